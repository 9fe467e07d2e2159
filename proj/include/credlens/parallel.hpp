#pragma once

#include <cstddef>
#include <functional>

namespace credlens::par {

// Execution mode for the data-parallel kernels. The serial path is the
// reference: every kernel writes results into slots addressed by work-unit
// index and derives randomness from that index, so both modes must produce
// bit-identical output. tests/test_parallel.cpp and the bench target hold the
// two modes against each other.
enum class Mode { serial, openmp };

Mode mode();
void set_mode(Mode m);

/// 0 means "OpenMP default".
int max_threads();
void set_max_threads(int n);

/// True when this build can actually run the OpenMP path.
bool openmp_available();

/// Runs body(i) for i in [0, n). Never nests: inside an enclosing parallel
/// region the loop degrades to serial.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace credlens::par
