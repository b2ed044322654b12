#pragma once

#include <complex>
#include <span>

// Hot inner loops shared by the spectral operators. Each kernel exists in an
// OpenMP variant (tsl::kernels) and a serial reference (tsl::kernels_ref)
// with identical semantics; tests pin the two against each other and the
// benchmark tool compares their throughput.

namespace tsl {

using cplx = std::complex<double>;

namespace kernels {

void scale_real(std::span<cplx> a, std::span<const double> table);
void scale_cplx(std::span<cplx> a, std::span<const cplx> table);
void axpy(std::span<cplx> y, cplx alpha, std::span<const cplx> x);
void pointwise_mul(std::span<double> out, std::span<const double> a, std::span<const double> b);

double sum_abs2(std::span<const cplx> a);
double sum_pow(std::span<const double> a, double p);
double max_abs(std::span<const double> a);

// Direct Fourier reconstruction u(x) = Re sum_k c_k e^{ik.x} at arbitrary
// points. points is npts x dim (row-major), kvec is nmodes x dim.
void eval_modes(std::span<const cplx> coef, std::span<const int> kvec, int dim,
                std::span<const double> points, std::span<double> out);

}  // namespace kernels

namespace kernels_ref {

void scale_real(std::span<cplx> a, std::span<const double> table);
void scale_cplx(std::span<cplx> a, std::span<const cplx> table);
void axpy(std::span<cplx> y, cplx alpha, std::span<const cplx> x);
void pointwise_mul(std::span<double> out, std::span<const double> a, std::span<const double> b);

double sum_abs2(std::span<const cplx> a);
double sum_pow(std::span<const double> a, double p);
double max_abs(std::span<const double> a);

void eval_modes(std::span<const cplx> coef, std::span<const int> kvec, int dim,
                std::span<const double> points, std::span<double> out);

}  // namespace kernels_ref

}  // namespace tsl
