#include "tsl/besov.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "tsl/cutoff.hpp"
#include "tsl/kernels.hpp"
#include "tsl/ops.hpp"

namespace tsl {

namespace {

// phi_m(|k|) tables per grid, shared by every block operation
const std::vector<std::vector<double>>& phi_tables(const TorusGrid& g) {
    static std::map<std::pair<int, int>, std::vector<std::vector<double>>> cache;
    static std::mutex mtx;
    std::scoped_lock lock(mtx);
    auto& tabs = cache[{g.dim, g.n}];
    if (tabs.empty()) {
        const int M = max_block(g);
        const std::size_t nm = g.num_modes();
        tabs.assign(static_cast<std::size_t>(M) + 1, std::vector<double>(nm));
        for (std::size_t i = 0; i < nm; ++i) {
            const double r = std::sqrt(g.k_squared(i));
            for (int m = 0; m <= M; ++m) tabs[static_cast<std::size_t>(m)][i] = dyadic_phi(m, r);
        }
    }
    return tabs;
}

}  // namespace

SpectralField lp_block(const SpectralField& u, int m) {
    if (m < 0) throw std::invalid_argument("lp_block: m must be >= 0");
    SpectralField out = u;
    const auto& tabs = phi_tables(u.grid);
    if (static_cast<std::size_t>(m) >= tabs.size()) {
        for (auto& z : out.coef) z = cplx{};
        return out;
    }
    const auto& table = tabs[static_cast<std::size_t>(m)];
    for (int c = 0; c < u.ncomp; ++c) kernels::scale_real(out.comp(c), table);
    return out;
}

std::vector<SpectralField> block_decomposition(const SpectralField& u) {
    const int M = max_block(u.grid);
    std::vector<SpectralField> blocks;
    blocks.reserve(static_cast<std::size_t>(M) + 1);
    for (int m = 0; m <= M; ++m) blocks.push_back(lp_block(u, m));
    return blocks;
}

std::vector<double> block_lp_norms(const SpectralField& u, double p) {
    const int M = max_block(u.grid);
    std::vector<double> norms(static_cast<std::size_t>(M) + 1);
    if (p == 2.0) {
        // fused Parseval pass over all blocks, no field copies
        const auto& tabs = phi_tables(u.grid);
        const std::size_t nm = u.modes();
        std::vector<double> acc(tabs.size(), 0.0);
        for (int c = 0; c < u.ncomp; ++c) {
            auto sp = u.comp(c);
            for (std::size_t i = 0; i < nm; ++i) {
                const double a2 = std::norm(sp[i]);
                if (a2 == 0.0) continue;
                for (std::size_t m = 0; m < tabs.size(); ++m) {
                    const double w = tabs[m][i];
                    if (w != 0.0) acc[m] += w * w * a2;
                }
            }
        }
        const double vol = std::pow(kTwoPi, 0.5 * u.grid.dim);
        for (std::size_t m = 0; m < norms.size(); ++m) norms[m] = vol * std::sqrt(acc[m]);
        return norms;
    }
    for (int m = 0; m <= M; ++m) norms[static_cast<std::size_t>(m)] = lp_norm(lp_block(u, m), p);
    return norms;
}

double besov_norm_from_blocks(std::span<const double> block_norms, double s, double q) {
    if (std::isinf(q)) {
        double best = 0.0;
        for (std::size_t m = 0; m < block_norms.size(); ++m)
            best = std::max(best, std::pow(2.0, s * static_cast<double>(m)) * block_norms[m]);
        return best;
    }
    if (!(q >= 1.0)) throw std::domain_error("besov_norm: q must be >= 1 or inf");
    double acc = 0.0;
    for (std::size_t m = 0; m < block_norms.size(); ++m)
        acc += std::pow(std::pow(2.0, s * static_cast<double>(m)) * block_norms[m], q);
    return std::pow(acc, 1.0 / q);
}

double besov_norm(const SpectralField& u, const BesovIndex& idx) {
    return besov_norm_from_blocks(block_lp_norms(u, idx.p), idx.s, idx.q);
}

}  // namespace tsl
