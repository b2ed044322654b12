#include "tsl/rng.hpp"

#include <cmath>

#include "tsl/ops.hpp"

namespace tsl {

SpectralField random_field(const TorusGrid& g, int ncomp, int kmax, double amplitude,
                           std::mt19937_64& rng, double decay) {
    SpectralField f = random_field_where(g, ncomp, kmax, amplitude, rng,
                                         [](std::span<const int>) { return true; });
    if (decay > 0.0) {
        f = apply_multiplier(f, [decay](std::span<const int> k) {
            double k2 = 0.0;
            for (int v : k) k2 += static_cast<double>(v) * v;
            return std::exp(-decay * std::sqrt(k2));
        });
    }
    return f;
}

}  // namespace tsl
