#include "credlens/parallel.hpp"

#include <atomic>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace credlens::par {

namespace {
std::atomic<Mode> g_mode{Mode::openmp};
std::atomic<int> g_max_threads{0};
}  // namespace

Mode mode() { return g_mode.load(); }
void set_mode(Mode m) { g_mode.store(m); }

int max_threads() { return g_max_threads.load(); }
void set_max_threads(int n) { g_max_threads.store(n < 0 ? 0 : n); }

bool openmp_available() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
#ifdef _OPENMP
    if (g_mode.load() == Mode::openmp && !omp_in_parallel() && n > 1) {
        // Exceptions may not escape an OpenMP region; marshal one out.
        std::exception_ptr error = nullptr;
        const auto guarded = [&](long long i) {
            try {
                body(static_cast<std::size_t>(i));
            } catch (...) {
#pragma omp critical(credlens_parallel_error)
                if (!error) error = std::current_exception();
            }
        };
        const int requested = g_max_threads.load();
        const long long count = static_cast<long long>(n);
        if (requested > 0) {
#pragma omp parallel for schedule(dynamic) num_threads(requested)
            for (long long i = 0; i < count; ++i) guarded(i);
        } else {
#pragma omp parallel for schedule(dynamic)
            for (long long i = 0; i < count; ++i) guarded(i);
        }
        if (error) std::rethrow_exception(error);
        return;
    }
#endif
    for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace credlens::par
