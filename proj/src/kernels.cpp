#include "tsl/kernels.hpp"

#include <cmath>

#include "tsl/parallel.hpp"

namespace tsl {

namespace kernels {

void scale_real(std::span<cplx> a, std::span<const double> table) {
    par::for_each(a.size(), [&](std::size_t i) { a[i] *= table[i]; });
}

void scale_cplx(std::span<cplx> a, std::span<const cplx> table) {
    par::for_each(a.size(), [&](std::size_t i) { a[i] *= table[i]; });
}

void axpy(std::span<cplx> y, cplx alpha, std::span<const cplx> x) {
    par::for_each(y.size(), [&](std::size_t i) { y[i] += alpha * x[i]; });
}

void pointwise_mul(std::span<double> out, std::span<const double> a, std::span<const double> b) {
    par::for_each(out.size(), [&](std::size_t i) { out[i] = a[i] * b[i]; });
}

double sum_abs2(std::span<const cplx> a) {
    return par::sum(a.size(), [&](std::size_t i) { return std::norm(a[i]); });
}

double sum_pow(std::span<const double> a, double p) {
    return par::sum(a.size(), [&](std::size_t i) { return std::pow(std::abs(a[i]), p); });
}

double max_abs(std::span<const double> a) {
    return par::max(a.size(), [&](std::size_t i) { return std::abs(a[i]); });
}

void eval_modes(std::span<const cplx> coef, std::span<const int> kvec, int dim,
                std::span<const double> points, std::span<double> out) {
    const std::size_t nmodes = coef.size();
    par::for_each(out.size(), [&](std::size_t p) {
        const double* x = points.data() + static_cast<std::size_t>(dim) * p;
        double acc = 0.0;
        for (std::size_t m = 0; m < nmodes; ++m) {
            const int* k = kvec.data() + static_cast<std::size_t>(dim) * m;
            double phase = 0.0;
            for (int a = 0; a < dim; ++a) phase += k[a] * x[a];
            acc += coef[m].real() * std::cos(phase) - coef[m].imag() * std::sin(phase);
        }
        out[p] = acc;
    });
}

}  // namespace kernels

namespace kernels_ref {

void scale_real(std::span<cplx> a, std::span<const double> table) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= table[i];
}

void scale_cplx(std::span<cplx> a, std::span<const cplx> table) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= table[i];
}

void axpy(std::span<cplx> y, cplx alpha, std::span<const cplx> x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

void pointwise_mul(std::span<double> out, std::span<const double> a, std::span<const double> b) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
}

double sum_abs2(std::span<const cplx> a) {
    return ref::sum(a.size(), [&](std::size_t i) { return std::norm(a[i]); });
}

double sum_pow(std::span<const double> a, double p) {
    return ref::sum(a.size(), [&](std::size_t i) { return std::pow(std::abs(a[i]), p); });
}

double max_abs(std::span<const double> a) {
    return ref::max(a.size(), [&](std::size_t i) { return std::abs(a[i]); });
}

void eval_modes(std::span<const cplx> coef, std::span<const int> kvec, int dim,
                std::span<const double> points, std::span<double> out) {
    const std::size_t nmodes = coef.size();
    for (std::size_t p = 0; p < out.size(); ++p) {
        const double* x = points.data() + static_cast<std::size_t>(dim) * p;
        double acc = 0.0;
        for (std::size_t m = 0; m < nmodes; ++m) {
            const int* k = kvec.data() + static_cast<std::size_t>(dim) * m;
            double phase = 0.0;
            for (int a = 0; a < dim; ++a) phase += k[a] * x[a];
            acc += coef[m].real() * std::cos(phase) - coef[m].imag() * std::sin(phase);
        }
        out[p] = acc;
    }
}

}  // namespace kernels_ref

}  // namespace tsl
