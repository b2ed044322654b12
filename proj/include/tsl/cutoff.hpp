#pragma once

#include <cmath>

#include "tsl/grid.hpp"

// Dyadic Littlewood-Paley cutoffs. chi is the standard smooth bump built
// from h(t) = exp(-1/t): chi = 1 on [0,1], 0 on [2,inf), strictly between
// elsewhere. The blocks are
//   phi_0(r) = chi(r),   phi_j(r) = chi(2^{-j} r) - chi(2^{1-j} r)  (j >= 1),
// which telescope to a partition of unity and are supported in the annuli
// 2^{j-1} <= r <= 2^{j+1}.

namespace tsl {

inline double smooth_bump_h(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

inline double dyadic_chi(double z) {
    if (z <= 1.0) return 1.0;
    if (z >= 2.0) return 0.0;
    const double a = smooth_bump_h(2.0 - z);
    const double b = smooth_bump_h(z - 1.0);
    return a / (a + b);
}

inline double dyadic_phi(int j, double r) {
    if (j == 0) return dyadic_chi(r);
    return dyadic_chi(std::ldexp(r, -j)) - dyadic_chi(std::ldexp(r, 1 - j));
}

// Smallest M with 2^M >= sqrt(d) * n/2; blocks beyond M vanish on the grid
// and the partial sums of phi_j equal one on every retained wavevector.
inline int max_block(const TorusGrid& g) {
    const double kmax = std::sqrt(static_cast<double>(g.dim)) * g.n / 2.0;
    int m = 1;
    while (std::ldexp(1.0, m) < kmax) ++m;
    return m;
}

}  // namespace tsl
