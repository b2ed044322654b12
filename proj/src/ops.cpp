#include "tsl/ops.hpp"

#include <algorithm>
#include <cmath>

#include "tsl/fft.hpp"

namespace tsl {

namespace {

std::size_t ipow(int n, int d) {
    std::size_t m = 1;
    for (int a = 0; a < d; ++a) m *= static_cast<std::size_t>(n);
    return m;
}

// Places a truncated spectrum into an ng^d cube (ng >= n). Coefficients on a
// Nyquist plane k_a = n/2 stand for cos((n/2) x_a) and are split half/half
// between +-n/2 so the embedded spectrum stays Hermitian.
void embed_spectrum(const TorusGrid& g, std::span<const cplx> coef, int ng, std::span<cplx> big) {
    const int d = g.dim;
    const int n = g.n;
    for (std::size_t i = 0; i < g.num_modes(); ++i) {
        if (coef[i] == cplx{}) continue;
        int k[kMaxDim];
        g.wavevector(i, k);
        int nyq_axes[kMaxDim];
        int nnyq = 0;
        for (int a = 0; a < d; ++a)
            if (k[a] == n / 2) nyq_axes[nnyq++] = a;
        const double w = std::ldexp(1.0, -nnyq);
        for (int mask = 0; mask < (1 << nnyq); ++mask) {
            int kk[kMaxDim];
            std::copy(k, k + d, kk);
            for (int b = 0; b < nnyq; ++b)
                if (mask & (1 << b)) kk[nyq_axes[b]] = -n / 2;
            std::size_t flat = 0;
            for (int a = 0; a < d; ++a) {
                const int idx = ((kk[a] % ng) + ng) % ng;
                flat = flat * static_cast<std::size_t>(ng) + static_cast<std::size_t>(idx);
            }
            big[flat] += w * coef[i];
        }
    }
}

std::vector<double> pointwise_magnitude(const GridValues& v) {
    const std::size_t npts = v.points();
    std::vector<double> mag(npts);
    if (v.ncomp == 1) {
        auto s = v.comp(0);
        par::for_each(npts, [&](std::size_t i) { mag[i] = std::abs(s[i]); });
    } else {
        par::for_each(npts, [&](std::size_t i) {
            double s2 = 0.0;
            for (int c = 0; c < v.ncomp; ++c) {
                const double x = v.val[static_cast<std::size_t>(c) * npts + i];
                s2 += x * x;
            }
            mag[i] = std::sqrt(s2);
        });
    }
    return mag;
}

}  // namespace

SpectralField transform(const GridValues& values, const TorusGrid& grid) {
    if (values.dim != grid.dim || values.n != grid.n)
        throw std::invalid_argument("transform: value array does not match grid");
    SpectralField f(grid, values.ncomp);
    const std::size_t nm = grid.num_modes();
    const double scale = 1.0 / static_cast<double>(nm);
    std::vector<cplx> buf(nm);
    for (int c = 0; c < values.ncomp; ++c) {
        auto v = values.comp(c);
        par::for_each(nm, [&](std::size_t i) { buf[i] = v[i]; });
        fft::forward(grid.dim, grid.n, buf.data());
        auto out = f.comp(c);
        par::for_each(nm, [&](std::size_t i) { out[i] = buf[i] * scale; });
    }
    return f;
}

GridValues inverse_transform(const SpectralField& f, int oversample) {
    if (oversample < 1) throw std::invalid_argument("inverse_transform: oversample must be >= 1");
    const int d = f.grid.dim;
    const int ng = f.grid.n * oversample;
    GridValues out(d, ng, f.ncomp);
    const std::size_t big = ipow(ng, d);
    std::vector<cplx> buf(big);
    for (int c = 0; c < f.ncomp; ++c) {
        auto in = f.comp(c);
        if (oversample == 1) {
            par::for_each(big, [&](std::size_t i) { buf[i] = in[i]; });
        } else {
            std::fill(buf.begin(), buf.end(), cplx{});
            embed_spectrum(f.grid, in, ng, buf);
        }
        fft::backward(d, ng, buf.data());
        auto v = out.comp(c);
        par::for_each(big, [&](std::size_t i) { v[i] = buf[i].real(); });
    }
    return out;
}

SpectralField derivative(const SpectralField& f, int axis) {
    if (axis < 0 || axis >= f.grid.dim) throw std::out_of_range("derivative: axis out of range");
    const std::size_t nm = f.modes();
    std::vector<cplx> table(nm);
    const int n = f.grid.n;
    for (std::size_t i = 0; i < nm; ++i) {
        int k[kMaxDim];
        f.grid.wavevector(i, k);
        const int ka = k[axis];
        table[i] = (ka == n / 2) ? cplx{} : cplx(0.0, static_cast<double>(ka));
    }
    SpectralField out = f;
    for (int c = 0; c < f.ncomp; ++c) kernels::scale_cplx(out.comp(c), table);
    return out;
}

SpectralField laplacian(const SpectralField& f) {
    const std::size_t nm = f.modes();
    std::vector<double> table(nm);
    for (std::size_t i = 0; i < nm; ++i) table[i] = -f.grid.k_squared(i);
    SpectralField out = f;
    for (int c = 0; c < f.ncomp; ++c) kernels::scale_real(out.comp(c), table);
    return out;
}

SpectralField gradient(const SpectralField& scalar) {
    if (scalar.ncomp != 1) throw std::invalid_argument("gradient: expected scalar field");
    SpectralField out(scalar.grid, scalar.grid.dim);
    for (int a = 0; a < scalar.grid.dim; ++a) {
        SpectralField da = derivative(scalar, a);
        std::copy(da.comp(0).begin(), da.comp(0).end(), out.comp(a).begin());
    }
    return out;
}

SpectralField divergence(const SpectralField& vec) {
    if (vec.ncomp != vec.grid.dim) throw std::invalid_argument("divergence: expected vector field");
    SpectralField out(vec.grid, 1);
    for (int a = 0; a < vec.grid.dim; ++a) {
        SpectralField comp(vec.grid, 1);
        std::copy(vec.comp(a).begin(), vec.comp(a).end(), comp.comp(0).begin());
        out += derivative(comp, a);
    }
    return out;
}

SpectralField poisson_inverse(const SpectralField& f) {
    if (f.ncomp != 1) throw std::invalid_argument("poisson_inverse: expected scalar field");
    const std::size_t nm = f.modes();
    SpectralField out = f;
    auto s = out.comp(0);
    par::for_each(nm, [&](std::size_t i) {
        const double k2 = f.grid.k_squared(i);
        s[i] = (k2 == 0.0) ? cplx{} : s[i] / k2;
    });
    return out;
}

int dealias_cutoff(const TorusGrid& g) { return g.n / 3; }

void dealias(SpectralField& f) {
    const int cut = dealias_cutoff(f.grid);
    const std::size_t nm = f.modes();
    std::vector<double> table(nm);
    for (std::size_t i = 0; i < nm; ++i) {
        int k[kMaxDim];
        f.grid.wavevector(i, k);
        bool keep = true;
        for (int a = 0; a < f.grid.dim; ++a)
            if (std::abs(k[a]) > cut) keep = false;
        table[i] = keep ? 1.0 : 0.0;
    }
    for (int c = 0; c < f.ncomp; ++c) kernels::scale_real(f.comp(c), table);
}

SpectralField multiply(const SpectralField& f, const SpectralField& g) {
    if (f.grid != g.grid) throw std::invalid_argument("multiply: grid mismatch");
    if (f.ncomp != 1 && g.ncomp != 1)
        throw std::invalid_argument("multiply: one factor must be scalar");
    const SpectralField& scal = (f.ncomp == 1) ? f : g;
    const SpectralField& other = (f.ncomp == 1) ? g : f;
    SpectralField sd = scal;
    SpectralField od = other;
    dealias(sd);
    dealias(od);
    GridValues sv = inverse_transform(sd);
    GridValues ov = inverse_transform(od);
    GridValues prod(f.grid.dim, f.grid.n, other.ncomp);
    for (int c = 0; c < other.ncomp; ++c)
        kernels::pointwise_mul(prod.comp(c), ov.comp(c), sv.comp(0));
    SpectralField out = transform(prod, f.grid);
    dealias(out);
    return out;
}

SpectralField dot(const SpectralField& f, const SpectralField& g) {
    if (f.grid != g.grid) throw std::invalid_argument("dot: grid mismatch");
    if (f.ncomp != g.ncomp) throw std::invalid_argument("dot: component mismatch");
    SpectralField fd = f;
    SpectralField gd = g;
    dealias(fd);
    dealias(gd);
    GridValues fv = inverse_transform(fd);
    GridValues gv = inverse_transform(gd);
    GridValues prod(f.grid.dim, f.grid.n, 1);
    auto acc = prod.comp(0);
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int c = 0; c < f.ncomp; ++c) {
        auto a = fv.comp(c);
        auto b = gv.comp(c);
        par::for_each(acc.size(), [&](std::size_t i) { acc[i] += a[i] * b[i]; });
    }
    SpectralField out = transform(prod, f.grid);
    dealias(out);
    return out;
}

SpectralField reciprocal(const SpectralField& f, double floor) {
    if (f.ncomp != 1) throw std::invalid_argument("reciprocal: expected scalar field");
    SpectralField fd = f;
    dealias(fd);
    GridValues v = inverse_transform(fd);
    auto s = v.comp(0);
    const double mn = -par::max(s.size(), [&](std::size_t i) { return -s[i]; });
    if (!(mn > floor)) throw std::domain_error("reciprocal: field drops below floor");
    par::for_each(s.size(), [&](std::size_t i) { s[i] = 1.0 / s[i]; });
    SpectralField out = transform(v, f.grid);
    dealias(out);
    return out;
}

double lp_norm(const SpectralField& f, double p) {
    const int d = f.grid.dim;
    if (p == 2.0) {
        double s = 0.0;
        for (int c = 0; c < f.ncomp; ++c) s += kernels::sum_abs2(f.comp(c));
        return std::pow(kTwoPi, 0.5 * d) * std::sqrt(s);
    }
    if (std::isinf(p)) {
        GridValues v = inverse_transform(f, 2);
        std::vector<double> mag = pointwise_magnitude(v);
        return par::max(mag.size(), [&](std::size_t i) { return mag[i]; });
    }
    if (!(p >= 1.0)) throw std::domain_error("lp_norm: p must be >= 1 or inf");
    GridValues v = inverse_transform(f, 2);
    std::vector<double> mag = pointwise_magnitude(v);
    const double s = kernels::sum_pow(mag, p);
    const double cell = std::pow(kTwoPi / v.n, d);
    return std::pow(cell * s, 1.0 / p);
}

double mean(const SpectralField& f, int comp) { return f.comp(comp)[0].real(); }

double integral(const SpectralField& f, int comp) {
    return std::pow(kTwoPi, f.grid.dim) * mean(f, comp);
}

SpectralField remove_mean(SpectralField f) {
    for (int c = 0; c < f.ncomp; ++c) f.comp(c)[0] = cplx{};
    return f;
}

double min_on_grid(const SpectralField& f, int comp, int oversample) {
    GridValues v = inverse_transform(f, oversample);
    auto s = v.comp(comp);
    return -par::max(s.size(), [&](std::size_t i) { return -s[i]; });
}

double max_on_grid(const SpectralField& f, int comp, int oversample) {
    GridValues v = inverse_transform(f, oversample);
    auto s = v.comp(comp);
    return par::max(s.size(), [&](std::size_t i) { return s[i]; });
}

// Factorized evaluation: e^{ik.x} = prod_a e^{i k_a x_a}, so each point needs
// one short phase table per axis instead of a trig call per mode.
std::vector<double> eval_at_points(const SpectralField& f, std::span<const double> points) {
    const int d = f.grid.dim;
    const std::size_t npts = points.size() / static_cast<std::size_t>(d);
    std::vector<double> out(static_cast<std::size_t>(f.ncomp) * npts);
    const std::size_t nm = f.modes();
    for (int c = 0; c < f.ncomp; ++c) {
        auto s = f.comp(c);
        // bounding box of nonzero modes in signed-k space
        int lo[kMaxDim], hi[kMaxDim];
        bool any = false;
        for (std::size_t i = 0; i < nm; ++i) {
            if (s[i] == cplx{}) continue;
            int k[kMaxDim];
            f.grid.wavevector(i, k);
            if (!any) {
                for (int a = 0; a < d; ++a) lo[a] = hi[a] = k[a];
                any = true;
            } else {
                for (int a = 0; a < d; ++a) {
                    lo[a] = std::min(lo[a], k[a]);
                    hi[a] = std::max(hi[a], k[a]);
                }
            }
        }
        std::span<double> dst(out.data() + static_cast<std::size_t>(c) * npts, npts);
        if (!any) {
            std::fill(dst.begin(), dst.end(), 0.0);
            continue;
        }
        std::size_t bdim[kMaxDim], bstride[kMaxDim];
        std::size_t bsize = 1;
        bool fits = true;
        for (int a = 0; a < d; ++a) {
            bdim[a] = static_cast<std::size_t>(hi[a] - lo[a] + 1);
            if (bdim[a] > 160) fits = false;
        }
        if (!fits) {
            // very wide spectra fall back to the direct mode sum
            std::vector<cplx> coef;
            std::vector<int> kvec;
            for (std::size_t i = 0; i < nm; ++i) {
                if (s[i] == cplx{}) continue;
                int k[kMaxDim];
                f.grid.wavevector(i, k);
                coef.push_back(s[i]);
                for (int a = 0; a < d; ++a) kvec.push_back(k[a]);
            }
            kernels::eval_modes(coef, kvec, d, points, dst);
            continue;
        }
        for (int a = d - 1; a >= 0; --a) {
            bstride[a] = bsize;
            bsize *= bdim[a];
        }
        std::vector<cplx> box(bsize, cplx{});
        for (std::size_t i = 0; i < nm; ++i) {
            if (s[i] == cplx{}) continue;
            int k[kMaxDim];
            f.grid.wavevector(i, k);
            std::size_t idx = 0;
            for (int a = 0; a < d; ++a)
                idx += static_cast<std::size_t>(k[a] - lo[a]) * bstride[a];
            box[idx] = s[i];
        }
        par::for_each(npts, [&](std::size_t p) {
            const double* x = points.data() + static_cast<std::size_t>(d) * p;
            cplx table[kMaxDim][160];
            for (int a = 0; a < d; ++a) {
                const cplx step{std::cos(x[a]), std::sin(x[a])};
                cplx cur{std::cos(lo[a] * x[a]), std::sin(lo[a] * x[a])};
                for (std::size_t j = 0; j < bdim[a]; ++j) {
                    table[a][j] = cur;
                    cur *= step;
                }
            }
            // nested sums, innermost axis contiguous
            cplx acc{};
            std::size_t idx[kMaxDim] = {0, 0, 0, 0};
            while (true) {
                cplx prefix{1.0, 0.0};
                for (int a = 0; a < d - 1; ++a) prefix *= table[a][idx[a]];
                std::size_t base = 0;
                for (int a = 0; a < d - 1; ++a) base += idx[a] * bstride[a];
                cplx inner{};
                for (std::size_t j = 0; j < bdim[d - 1]; ++j) {
                    const cplx& bc = box[base + j];
                    if (bc != cplx{}) inner += bc * table[d - 1][j];
                }
                acc += prefix * inner;
                int a = d - 2;
                while (a >= 0 && ++idx[a] >= bdim[a]) idx[a--] = 0;
                if (a < 0) break;
            }
            dst[p] = acc.real();
        });
    }
    return out;
}

}  // namespace tsl
