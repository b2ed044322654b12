#pragma once

#include <span>
#include <vector>

#include "tsl/field.hpp"

// Littlewood-Paley blocks P_m u and Besov norms
//   ||u||_{B^s_{p,q}} = ( sum_m 2^{smq} ||P_m u||_p^q )^{1/q}
// on the torus (max over m when q = inf).

namespace tsl {

struct BesovIndex {
    double s = 0.0;
    double p = 2.0;
    double q = 1.0;
};

// P_m u: coefficient-wise multiplication by phi_m(|k|).
SpectralField lp_block(const SpectralField& u, int m);

// All blocks 0..max_block(grid); their sum reassembles u.
std::vector<SpectralField> block_decomposition(const SpectralField& u);

// ||P_m u||_p for m = 0..max_block(grid). The block transforms dominate the
// cost, so callers evaluating several norms of one field reuse this.
std::vector<double> block_lp_norms(const SpectralField& u, double p);

double besov_norm_from_blocks(std::span<const double> block_norms, double s, double q);

double besov_norm(const SpectralField& u, const BesovIndex& idx);

}  // namespace tsl
