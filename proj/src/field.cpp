#include "tsl/field.hpp"

#include <cmath>

#include "tsl/parallel.hpp"

namespace tsl {

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    if (!same_shape(o)) throw std::invalid_argument("SpectralField: shape mismatch");
    par::for_each(coef.size(), [&](std::size_t i) { coef[i] += o.coef[i]; });
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    if (!same_shape(o)) throw std::invalid_argument("SpectralField: shape mismatch");
    par::for_each(coef.size(), [&](std::size_t i) { coef[i] -= o.coef[i]; });
    return *this;
}

SpectralField& SpectralField::operator*=(double s) {
    par::for_each(coef.size(), [&](std::size_t i) { coef[i] *= s; });
    return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

double hermitian_error(const SpectralField& f) {
    const std::size_t nm = f.modes();
    double worst = 0.0;
    for (int c = 0; c < f.ncomp; ++c) {
        auto s = f.comp(c);
        worst = std::max(worst, par::max(nm, [&](std::size_t i) {
                             const std::size_t j = f.grid.conjugate_index(i);
                             return std::abs(s[j] - std::conj(s[i]));
                         }));
    }
    return worst;
}

void symmetrize(SpectralField& f) {
    const std::size_t nm = f.modes();
    for (int c = 0; c < f.ncomp; ++c) {
        auto s = f.comp(c);
        for (std::size_t i = 0; i < nm; ++i) {
            const std::size_t j = f.grid.conjugate_index(i);
            if (j < i) continue;
            const cplx avg = 0.5 * (s[i] + std::conj(s[j]));
            s[i] = avg;
            s[j] = std::conj(avg);
        }
    }
}

}  // namespace tsl
