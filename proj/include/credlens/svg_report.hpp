#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

namespace credlens {

/// Renders an ALE plot-data document (centered curve plus optional band) as a
/// standalone SVG. Log-scale features get anti-log axis tick labels.
std::string ale_svg(const nlohmann::json& plot, const std::string& title);

/// Renders a Shapley importance ranking as a horizontal bar chart SVG.
std::string shapley_svg(const nlohmann::json& plot, const std::string& title);

}  // namespace credlens
