// Timing comparison of the OpenMP kernels against the serial reference.
// Usage: tsl_bench [size] [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include "tsl/kernels.hpp"
#include "tsl/parallel.hpp"

using tsl::cplx;
using clk = std::chrono::steady_clock;

namespace {

double ms_since(clk::time_point t0) {
    return std::chrono::duration<double, std::milli>(clk::now() - t0).count();
}

template <class F>
double time_best(int repeats, F&& f) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        auto t0 = clk::now();
        f();
        best = std::min(best, ms_since(t0));
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t n = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : (1u << 22);
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 5;

    std::mt19937_64 rng(12345);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<cplx> a(n), x(n), table_c(n);
    std::vector<double> r(n), s(n), out(n), table_r(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = {g(rng), g(rng)};
        x[i] = {g(rng), g(rng)};
        table_c[i] = {g(rng), g(rng)};
        table_r[i] = g(rng);
        r[i] = g(rng);
        s[i] = g(rng);
    }

    std::printf("kernel benchmark: n = %zu, threads = %d\n", n, tsl::par::max_threads());
    std::printf("%-16s %12s %12s %9s\n", "kernel", "serial[ms]", "openmp[ms]", "speedup");

    auto row = [&](const char* name, double ts, double tp) {
        std::printf("%-16s %12.3f %12.3f %8.2fx\n", name, ts, tp, ts / tp);
    };

    {
        auto a1 = a, a2 = a;
        double ts = time_best(repeats, [&] { tsl::kernels_ref::scale_real(a1, table_r); });
        double tp = time_best(repeats, [&] { tsl::kernels::scale_real(a2, table_r); });
        row("scale_real", ts, tp);
    }
    {
        auto a1 = a, a2 = a;
        double ts = time_best(repeats, [&] { tsl::kernels_ref::scale_cplx(a1, table_c); });
        double tp = time_best(repeats, [&] { tsl::kernels::scale_cplx(a2, table_c); });
        row("scale_cplx", ts, tp);
    }
    {
        auto y1 = a, y2 = a;
        double ts = time_best(repeats, [&] { tsl::kernels_ref::axpy(y1, cplx{0.5, -0.25}, x); });
        double tp = time_best(repeats, [&] { tsl::kernels::axpy(y2, cplx{0.5, -0.25}, x); });
        row("axpy", ts, tp);
    }
    {
        double ts = time_best(repeats, [&] { tsl::kernels_ref::pointwise_mul(out, r, s); });
        double tp = time_best(repeats, [&] { tsl::kernels::pointwise_mul(out, r, s); });
        row("pointwise_mul", ts, tp);
    }
    {
        volatile double sink = 0.0;
        double ts = time_best(repeats, [&] { sink = tsl::kernels_ref::sum_abs2(a); });
        double tp = time_best(repeats, [&] { sink = tsl::kernels::sum_abs2(a); });
        (void)sink;
        row("sum_abs2", ts, tp);
    }
    {
        volatile double sink = 0.0;
        double ts = time_best(repeats, [&] { sink = tsl::kernels_ref::sum_pow(r, 2.5); });
        double tp = time_best(repeats, [&] { sink = tsl::kernels::sum_pow(r, 2.5); });
        (void)sink;
        row("sum_pow(2.5)", ts, tp);
    }
    {
        // smaller problem: quadratic cost in modes x points
        const std::size_t nm = 512, np = 2048;
        std::vector<cplx> coef(a.begin(), a.begin() + nm);
        std::vector<int> kvec(nm * 3);
        std::uniform_int_distribution<int> ki(-8, 8);
        for (auto& k : kvec) k = ki(rng);
        std::vector<double> pts(np * 3), o1(np), o2(np);
        std::uniform_real_distribution<double> xu(0.0, 6.28);
        for (auto& p : pts) p = xu(rng);
        double ts = time_best(repeats, [&] { tsl::kernels_ref::eval_modes(coef, kvec, 3, pts, o1); });
        double tp = time_best(repeats, [&] { tsl::kernels::eval_modes(coef, kvec, 3, pts, o2); });
        row("eval_modes", ts, tp);
    }
    return 0;
}
