#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

// Data-parallel building blocks.
//
// tsl::par holds the OpenMP variants. Reductions are chunked with a layout
// that depends only on the problem size, never on the thread count, so the
// combine order is fixed and results are bit-identical across runs and
// across OMP_NUM_THREADS settings.
//
// tsl::ref holds plain serial loops, kept as the reference implementation
// for tests and for the kernel benchmark.

namespace tsl {

namespace par {

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

template <class F>
inline void for_each(std::size_t n, F&& f) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) f(static_cast<std::size_t>(i));
#else
    for (std::size_t i = 0; i < n; ++i) f(i);
#endif
}

// Fixed reduction chunk; must not depend on the runtime thread count.
inline constexpr std::size_t kReduceChunk = 4096;

template <class F>
inline double sum(std::size_t n, F&& f) {
    if (n == 0) return 0.0;
    const std::size_t nc = (n + kReduceChunk - 1) / kReduceChunk;
    std::vector<double> partial(nc, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long c = 0; c < static_cast<long long>(nc); ++c) {
        const std::size_t lo = static_cast<std::size_t>(c) * kReduceChunk;
        const std::size_t hi = std::min(lo + kReduceChunk, n);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += f(i);
        partial[static_cast<std::size_t>(c)] = s;
    }
    double total = 0.0;
    for (double s : partial) total += s;  // fixed combine order
    return total;
}

template <class F>
inline double max(std::size_t n, F&& f) {
    if (n == 0) return -std::numeric_limits<double>::infinity();
    const std::size_t nc = (n + kReduceChunk - 1) / kReduceChunk;
    std::vector<double> partial(nc, -std::numeric_limits<double>::infinity());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long c = 0; c < static_cast<long long>(nc); ++c) {
        const std::size_t lo = static_cast<std::size_t>(c) * kReduceChunk;
        const std::size_t hi = std::min(lo + kReduceChunk, n);
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t i = lo; i < hi; ++i) m = std::max(m, f(i));
        partial[static_cast<std::size_t>(c)] = m;
    }
    double total = partial[0];
    for (double m : partial) total = std::max(total, m);
    return total;
}

}  // namespace par

namespace ref {

template <class F>
inline void for_each(std::size_t n, F&& f) {
    for (std::size_t i = 0; i < n; ++i) f(i);
}

template <class F>
inline double sum(std::size_t n, F&& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += f(i);
    return s;
}

template <class F>
inline double max(std::size_t n, F&& f) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, f(i));
    return m;
}

}  // namespace ref

}  // namespace tsl
