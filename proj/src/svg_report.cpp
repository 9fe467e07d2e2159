#include "credlens/svg_report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "credlens/common.hpp"

namespace credlens {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 55.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

struct Scale {
    double lo = 0.0;
    double hi = 1.0;
    double px_lo = 0.0;
    double px_hi = 1.0;
    double operator()(double v) const {
        if (hi == lo) return 0.5 * (px_lo + px_hi);
        return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
    }
};

std::vector<double> ticks(double lo, double hi, int count) {
    std::vector<double> out;
    if (hi <= lo) {
        out.push_back(lo);
        return out;
    }
    for (int i = 0; i < count; ++i) {
        out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    return out;
}

void open_svg(std::ostringstream& svg, const std::string& title) {
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
        << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n"
        << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << escape(title) << "</text>\n";
}

}  // namespace

std::string ale_svg(const nlohmann::json& plot, const std::string& title) {
    const auto& points = plot.at("points");
    const bool antilog = plot.value("antilog_x", false);
    const std::string feature = plot.value("feature", std::string("feature"));

    std::vector<double> xs, effects, lows, highs;
    const bool has_band = !points.empty() && points.front().contains("lo");
    for (const auto& pt : points) {
        xs.push_back(pt.at("x").get<double>());
        effects.push_back(pt.at("effect").get<double>());
        if (has_band) {
            lows.push_back(pt.at("lo").get<double>());
            highs.push_back(pt.at("hi").get<double>());
        }
    }
    if (xs.empty()) throw ConfigError("ale_svg: empty plot document");

    double x_lo = plot.value("x_min", xs.front());
    double x_hi = xs.back();
    if (x_hi == x_lo) x_hi = x_lo + 1.0;
    double y_lo = *std::min_element(effects.begin(), effects.end());
    double y_hi = *std::max_element(effects.begin(), effects.end());
    if (has_band) {
        y_lo = std::min(y_lo, *std::min_element(lows.begin(), lows.end()));
        y_hi = std::max(y_hi, *std::max_element(highs.begin(), highs.end()));
    }
    y_lo = std::min(y_lo, 0.0);
    y_hi = std::max(y_hi, 0.0);
    const double pad = (y_hi - y_lo) * 0.08 + 1e-12;
    y_lo -= pad;
    y_hi += pad;

    const Scale sx{x_lo, x_hi, kMarginLeft, kWidth - kMarginRight};
    const Scale sy{y_lo, y_hi, kHeight - kMarginBottom, kMarginTop};

    std::ostringstream svg;
    open_svg(svg, title);

    if (has_band) {
        svg << "<polygon fill=\"#9ecae1\" fill-opacity=\"0.45\" stroke=\"none\" points=\"";
        for (std::size_t i = 0; i < xs.size(); ++i) {
            svg << num(sx(xs[i])) << ',' << num(sy(lows[i])) << ' ';
        }
        for (std::size_t i = xs.size(); i-- > 0;) {
            svg << num(sx(xs[i])) << ',' << num(sy(highs[i])) << ' ';
        }
        svg << "\"/>\n";
    }

    // zero line
    svg << "<line x1=\"" << num(kMarginLeft) << "\" y1=\"" << num(sy(0.0)) << "\" x2=\""
        << num(kWidth - kMarginRight) << "\" y2=\"" << num(sy(0.0))
        << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";

    svg << "<polyline fill=\"none\" stroke=\"#08519c\" stroke-width=\"1.8\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        svg << num(sx(xs[i])) << ',' << num(sy(effects[i])) << ' ';
    }
    svg << "\"/>\n";

    // axes
    svg << "<line x1=\"" << num(kMarginLeft) << "\" y1=\"" << num(kHeight - kMarginBottom)
        << "\" x2=\"" << num(kWidth - kMarginRight) << "\" y2=\"" << num(kHeight - kMarginBottom)
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << num(kMarginLeft) << "\" y1=\"" << num(kMarginTop) << "\" x2=\""
        << num(kMarginLeft) << "\" y2=\"" << num(kHeight - kMarginBottom)
        << "\" stroke=\"black\"/>\n";

    for (const double t : ticks(x_lo, x_hi, 5)) {
        const double px = sx(t);
        svg << "<line x1=\"" << num(px) << "\" y1=\"" << num(kHeight - kMarginBottom) << "\" x2=\""
            << num(px) << "\" y2=\"" << num(kHeight - kMarginBottom + 5) << "\" stroke=\"black\"/>\n";
        // Curves over log-transformed features are labeled with anti-log values.
        const double label = antilog ? std::expm1(t) : t;
        svg << "<text x=\"" << num(px) << "\" y=\"" << num(kHeight - kMarginBottom + 20)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << tick_label(label) << "</text>\n";
    }
    for (const double t : ticks(y_lo, y_hi, 5)) {
        const double py = sy(t);
        svg << "<line x1=\"" << num(kMarginLeft - 5) << "\" y1=\"" << num(py) << "\" x2=\""
            << num(kMarginLeft) << "\" y2=\"" << num(py) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << num(kMarginLeft - 9) << "\" y=\"" << num(py + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << tick_label(t) << "</text>\n";
    }

    svg << "<text x=\"" << num((kMarginLeft + kWidth - kMarginRight) / 2) << "\" y=\""
        << num(kHeight - 12) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"12\">" << escape(feature) << (antilog ? " (anti-log scale)" : "")
        << "</text>\n";
    svg << "<text x=\"18\" y=\"" << num((kMarginTop + kHeight - kMarginBottom) / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "transform=\"rotate(-90 18 " << num((kMarginTop + kHeight - kMarginBottom) / 2)
        << ")\">accumulated local effect</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

std::string shapley_svg(const nlohmann::json& plot, const std::string& title) {
    const auto& items = plot.at("items");
    if (items.empty()) throw ConfigError("shapley_svg: empty plot document");

    double max_importance = 0.0;
    for (const auto& item : items) {
        max_importance = std::max(max_importance, item.at("importance").get<double>());
    }
    if (max_importance <= 0.0) max_importance = 1.0;

    const double bar_area_left = 170.0;
    const double bar_area_right = kWidth - 80.0;
    const double top = kMarginTop + 10.0;
    const double bottom = kHeight - 30.0;
    const double slot = (bottom - top) / static_cast<double>(items.size());
    const double bar_h = std::min(22.0, slot * 0.7);

    std::ostringstream svg;
    open_svg(svg, title);
    std::size_t row = 0;
    for (const auto& item : items) {
        const double importance = item.at("importance").get<double>();
        const double y = top + slot * static_cast<double>(row) + (slot - bar_h) / 2.0;
        const double w = (bar_area_right - bar_area_left) * importance / max_importance;
        svg << "<rect x=\"" << num(bar_area_left) << "\" y=\"" << num(y) << "\" width=\""
            << num(w) << "\" height=\"" << num(bar_h) << "\" fill=\"#3182bd\"/>\n";
        svg << "<text x=\"" << num(bar_area_left - 8) << "\" y=\"" << num(y + bar_h / 2 + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
            << escape(item.at("feature").get<std::string>()) << "</text>\n";
        svg << "<text x=\"" << num(bar_area_left + w + 6) << "\" y=\"" << num(y + bar_h / 2 + 4)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << tick_label(importance)
            << "</text>\n";
        ++row;
    }
    svg << "<text x=\"" << num((bar_area_left + bar_area_right) / 2) << "\" y=\""
        << num(kHeight - 8) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"12\">mean |Shapley value|</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace credlens
