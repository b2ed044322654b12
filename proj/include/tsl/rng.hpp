#pragma once

#include <cstdint>
#include <random>

#include "tsl/field.hpp"
#include "tsl/grid.hpp"

namespace tsl {

// Fixed seed-splitting rule (splitmix64) so that per-sample and per-worker
// streams are reproducible regardless of execution order.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t root_seed, std::uint64_t stream) {
    return std::mt19937_64(splitmix64(root_seed ^ splitmix64(stream)));
}

// Random real field with independent complex Gaussian coefficients on
// 0 < |k|_inf <= kmax (Nyquist never touched), Hermitian pairs tied together.
// Wavevectors are visited in a lexicographic order that depends only on
// (dim, kmax), so the same seed produces the same function on any grid that
// can hold the band -- this is what makes N -> 2N refinement studies
// meaningful.
SpectralField random_field(const TorusGrid& g, int ncomp, int kmax, double amplitude,
                           std::mt19937_64& rng, double decay = 0.0);

// Same, but coefficients restricted to a predicate on the wavevector.
// Used for block-supported samples; keep_k returns true to retain a mode.
template <class Keep>
SpectralField random_field_where(const TorusGrid& g, int ncomp, int kmax, double amplitude,
                                 std::mt19937_64& rng, Keep&& keep_k) {
    if (kmax >= g.n / 2) throw std::invalid_argument("random_field_where: band exceeds grid");
    SpectralField f(g, ncomp);
    std::normal_distribution<double> gauss(0.0, 1.0);
    int k[kMaxDim];
    for (int c = 0; c < ncomp; ++c) {
        auto s = f.comp(c);
        for (int a = 0; a < g.dim; ++a) k[a] = -kmax;
        while (true) {
            // canonical representative of the +-k pair: first nonzero entry positive
            bool canonical = false, zero = true;
            for (int a = 0; a < g.dim; ++a) {
                if (k[a] != 0) {
                    canonical = k[a] > 0;
                    zero = false;
                    break;
                }
            }
            if (!zero && canonical && keep_k(std::span<const int>(k, static_cast<std::size_t>(g.dim)))) {
                const cplx z{amplitude * gauss(rng), amplitude * gauss(rng)};
                int mk[kMaxDim];
                for (int a = 0; a < g.dim; ++a) mk[a] = -k[a];
                s[g.flatten(k)] = z;
                s[g.flatten(mk)] = std::conj(z);
            }
            int a = g.dim - 1;
            while (a >= 0 && ++k[a] > kmax) k[a--] = -kmax;
            if (a < 0) break;
        }
    }
    return f;
}

}  // namespace tsl
