#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "tsl/grid.hpp"

namespace tsl {

using cplx = std::complex<double>;

// Truncated Fourier representation of a real field on the torus.
// Coefficients are stored component-major in FFT index order; the Fourier
// convention is u_k = (2pi)^{-d} \int u e^{-ik.x} dx with reconstruction
// u(x) = sum_k u_k e^{ik.x}, so coefficients of real fields are Hermitian.
struct SpectralField {
    TorusGrid grid;
    int ncomp = 1;
    std::vector<cplx> coef;

    SpectralField() = default;
    SpectralField(TorusGrid g, int ncomp_ = 1)
        : grid(g), ncomp(ncomp_), coef(g.num_modes() * static_cast<std::size_t>(ncomp_)) {
        if (ncomp < 1) throw std::invalid_argument("SpectralField: ncomp must be >= 1");
    }

    std::size_t modes() const { return grid.num_modes(); }

    std::span<cplx> comp(int c) {
        return {coef.data() + static_cast<std::size_t>(c) * modes(), modes()};
    }
    std::span<const cplx> comp(int c) const {
        return {coef.data() + static_cast<std::size_t>(c) * modes(), modes()};
    }

    bool same_shape(const SpectralField& o) const { return grid == o.grid && ncomp == o.ncomp; }

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double s);
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

// Collocation samples of a real field, possibly on an oversampled grid with
// n_grid = oversample * grid.n points per axis.
struct GridValues {
    int dim = 0;
    int n = 0;
    int ncomp = 1;
    std::vector<double> val;

    GridValues() = default;
    GridValues(int dim_, int n_, int ncomp_)
        : dim(dim_), n(n_), ncomp(ncomp_), val(points() * static_cast<std::size_t>(ncomp_)) {}

    std::size_t points() const {
        std::size_t m = 1;
        for (int a = 0; a < dim; ++a) m *= static_cast<std::size_t>(n);
        return m;
    }
    std::span<double> comp(int c) {
        return {val.data() + static_cast<std::size_t>(c) * points(), points()};
    }
    std::span<const double> comp(int c) const {
        return {val.data() + static_cast<std::size_t>(c) * points(), points()};
    }
};

// Max absolute deviation from coeffs(-k) = conj(coeffs(k)).
double hermitian_error(const SpectralField& f);

// Averages conjugate coefficient pairs so the symmetry holds exactly.
void symmetrize(SpectralField& f);

}  // namespace tsl
