#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "tsl/field.hpp"
#include "tsl/kernels.hpp"
#include "tsl/parallel.hpp"

// Spectral calculus on the torus: transforms, derivatives, the mean-zero
// inverse Laplacian, dealiased products, and L^p norms.

namespace tsl {

// Forward transform of real collocation values (n must match the grid).
SpectralField transform(const GridValues& values, const TorusGrid& grid);

// Inverse transform onto a (oversample*n)^d collocation grid. Nyquist
// coefficients are split symmetrically when oversampling so the result stays
// real-valued.
GridValues inverse_transform(const SpectralField& f, int oversample = 1);

// d/dx_axis: coefficient-wise i*k_axis, Nyquist zeroed (odd order).
SpectralField derivative(const SpectralField& f, int axis);

// Coefficient-wise -|k|^2 (Nyquist kept, even order).
SpectralField laplacian(const SpectralField& f);

SpectralField gradient(const SpectralField& scalar);    // scalar -> dim components
SpectralField divergence(const SpectralField& vec);     // dim components -> scalar

// K f: solves -Delta psi = f - {f} with zero mean, psi_k = f_k/|k|^2.
SpectralField poisson_inverse(const SpectralField& f);

// 2/3-rule band: modes with any |k_a| > n/3 are dropped.
int dealias_cutoff(const TorusGrid& g);
void dealias(SpectralField& f);

// Dealiased pointwise product; one factor must be scalar.
SpectralField multiply(const SpectralField& f, const SpectralField& g);
// Dealiased dot product of two vector fields (or product of scalars).
SpectralField dot(const SpectralField& f, const SpectralField& g);
// Dealiased pointwise reciprocal 1/f of a scalar field; requires min f > floor.
SpectralField reciprocal(const SpectralField& f, double floor);

// L^p norm; p = 2 via Parseval, p = inf as grid max, otherwise rectangle rule
// on a 2x oversampled grid. Vector fields use the pointwise Euclidean
// magnitude.
double lp_norm(const SpectralField& f, double p);

double mean(const SpectralField& f, int comp = 0);
double integral(const SpectralField& f, int comp = 0);  // (2pi)^d * mean
SpectralField remove_mean(SpectralField f);

double min_on_grid(const SpectralField& f, int comp = 0, int oversample = 2);
double max_on_grid(const SpectralField& f, int comp = 0, int oversample = 2);

// Trig interpolation at arbitrary points (npts x dim, row-major).
// Returns component-major values (comp c of point p at [c*npts + p]).
std::vector<double> eval_at_points(const SpectralField& f, std::span<const double> points);

// Coefficient-wise multiplication by M(k). Throws if M is non-finite at a
// retained mode.
template <class Fn>
SpectralField apply_multiplier(const SpectralField& f, Fn&& m) {
    const std::size_t nm = f.modes();
    std::vector<double> table(nm);
    for (std::size_t i = 0; i < nm; ++i) {
        int k[kMaxDim];
        f.grid.wavevector(i, k);
        const double v = m(std::span<const int>(k, static_cast<std::size_t>(f.grid.dim)));
        if (!std::isfinite(v)) throw std::domain_error("apply_multiplier: non-finite symbol at retained mode");
        table[i] = v;
    }
    SpectralField out = f;
    for (int c = 0; c < f.ncomp; ++c) kernels::scale_real(out.comp(c), table);
    return out;
}

}  // namespace tsl
