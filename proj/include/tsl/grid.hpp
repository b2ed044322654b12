#pragma once

#include <cstddef>
#include <stdexcept>

namespace tsl {

inline constexpr double kTwoPi = 6.28318530717958647692528676655900577;
inline constexpr int kMaxDim = 4;

// Uniform collocation grid on [0,2pi)^d with n points per axis.
// Retained wavenumbers per axis are -n/2 < k <= n/2, stored in FFT order:
// array index j holds k = j for j <= n/2 and k = j - n otherwise.
struct TorusGrid {
    int dim = 0;
    int n = 0;

    TorusGrid() = default;
    TorusGrid(int dim_, int n_) : dim(dim_), n(n_) {
        if (dim < 2 || dim > kMaxDim) throw std::invalid_argument("TorusGrid: dim out of range");
        if (n < 8 || n % 2 != 0) throw std::invalid_argument("TorusGrid: n must be even and >= 8");
    }

    std::size_t num_modes() const {
        std::size_t m = 1;
        for (int a = 0; a < dim; ++a) m *= static_cast<std::size_t>(n);
        return m;
    }

    double spacing() const { return kTwoPi / n; }

    int wavenumber(int idx) const { return idx <= n / 2 ? idx : idx - n; }

    // Row-major flat index, last axis fastest (FFTW layout).
    void unflatten(std::size_t flat, int* idx) const {
        for (int a = dim - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(flat % static_cast<std::size_t>(n));
            flat /= static_cast<std::size_t>(n);
        }
    }

    std::size_t flatten(const int* idx) const {
        std::size_t f = 0;
        for (int a = 0; a < dim; ++a) {
            const int w = ((idx[a] % n) + n) % n;
            f = f * static_cast<std::size_t>(n) + static_cast<std::size_t>(w);
        }
        return f;
    }

    void wavevector(std::size_t flat, int* k) const {
        unflatten(flat, k);
        for (int a = 0; a < dim; ++a) k[a] = wavenumber(k[a]);
    }

    double k_squared(std::size_t flat) const {
        int k[kMaxDim];
        wavevector(flat, k);
        double s = 0.0;
        for (int a = 0; a < dim; ++a) s += static_cast<double>(k[a]) * k[a];
        return s;
    }

    // Flat index of the Hermitian partner -k (per axis: (n - j) mod n).
    std::size_t conjugate_index(std::size_t flat) const {
        int idx[kMaxDim];
        unflatten(flat, idx);
        std::size_t f = 0;
        for (int a = 0; a < dim; ++a) {
            const int w = (n - idx[a]) % n;
            f = f * static_cast<std::size_t>(n) + static_cast<std::size_t>(w);
        }
        return f;
    }

    bool operator==(const TorusGrid&) const = default;
};

}  // namespace tsl
