#include "tsl/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tsl/kernels.hpp"
#include "tsl/ops.hpp"
#include "tsl/parallel.hpp"

namespace tsl {

namespace {

// Frobenius sup-norm of the velocity gradient, the running-smallness proxy.
double grad_sup_norm(const SpectralField& u) {
    const int d = u.grid.dim;
    SpectralField gradmat(u.grid, d * d);
    for (int i = 0; i < d; ++i) {
        SpectralField ui(u.grid, 1);
        std::copy(u.comp(i).begin(), u.comp(i).end(), ui.comp(0).begin());
        for (int j = 0; j < d; ++j) {
            SpectralField dij = derivative(ui, j);
            std::copy(dij.comp(0).begin(), dij.comp(0).end(), gradmat.comp(i * d + j).begin());
        }
    }
    return lp_norm(gradmat, std::numeric_limits<double>::infinity());
}

double det_small(const double* m, int d) {
    if (d == 2) return m[0] * m[3] - m[1] * m[2];
    if (d == 3)
        return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
               m[2] * (m[3] * m[7] - m[4] * m[6]);
    // Gauss for d = 4
    double a[16];
    std::copy(m, m + d * d, a);
    double det = 1.0;
    for (int c = 0; c < d; ++c) {
        int p = c;
        for (int r = c + 1; r < d; ++r)
            if (std::abs(a[r * d + c]) > std::abs(a[p * d + c])) p = r;
        if (p != c) {
            for (int j = 0; j < d; ++j) std::swap(a[c * d + j], a[p * d + j]);
            det = -det;
        }
        det *= a[c * d + c];
        if (a[c * d + c] == 0.0) return 0.0;
        for (int r = c + 1; r < d; ++r) {
            const double f = a[r * d + c] / a[c * d + c];
            for (int j = c; j < d; ++j) a[r * d + j] -= f * a[c * d + j];
        }
    }
    return det;
}

// Gauss-Jordan with partial pivoting; returns false when singular.
bool invert_small(const double* m, int d, double* out) {
    double a[32];
    std::copy(m, m + d * d, a);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) out[i * d + j] = (i == j) ? 1.0 : 0.0;
    for (int c = 0; c < d; ++c) {
        int p = c;
        for (int r = c + 1; r < d; ++r)
            if (std::abs(a[r * d + c]) > std::abs(a[p * d + c])) p = r;
        if (a[p * d + c] == 0.0) return false;
        for (int j = 0; j < d; ++j) {
            std::swap(a[c * d + j], a[p * d + j]);
            std::swap(out[c * d + j], out[p * d + j]);
        }
        const double piv = a[c * d + c];
        for (int j = 0; j < d; ++j) {
            a[c * d + j] /= piv;
            out[c * d + j] /= piv;
        }
        for (int r = 0; r < d; ++r) {
            if (r == c) continue;
            const double f = a[r * d + c];
            if (f == 0.0) continue;
            for (int j = 0; j < d; ++j) {
                a[r * d + j] -= f * a[c * d + j];
                out[r * d + j] -= f * out[c * d + j];
            }
        }
    }
    return true;
}

GridValues jacobian_values(const SpectralField& disp) {
    const int d = disp.grid.dim;
    SpectralField G(disp.grid, d * d);
    for (int i = 0; i < d; ++i) {
        SpectralField di(disp.grid, 1);
        std::copy(disp.comp(i).begin(), disp.comp(i).end(), di.comp(0).begin());
        for (int j = 0; j < d; ++j) {
            SpectralField dij = derivative(di, j);
            std::copy(dij.comp(0).begin(), dij.comp(0).end(), G.comp(i * d + j).begin());
        }
    }
    return inverse_transform(G);
}

std::vector<double> collocation_points(const TorusGrid& g) {
    const std::size_t npts = g.num_modes();
    std::vector<double> pts(npts * static_cast<std::size_t>(g.dim));
    const double h = g.spacing();
    int idx[kMaxDim];
    for (std::size_t p = 0; p < npts; ++p) {
        g.unflatten(p, idx);
        for (int a = 0; a < g.dim; ++a) pts[p * static_cast<std::size_t>(g.dim) + a] = h * idx[a];
    }
    return pts;
}

void require_diffeomorphism(const SpectralField& disp) {
    if (min_jacobian_det(disp) <= 0.0)
        throw std::domain_error("displacement is not a diffeomorphism on the grid");
}

SpectralField compose_at(const SpectralField& w, const std::vector<double>& pts) {
    const TorusGrid& g = w.grid;
    std::vector<double> vals = eval_at_points(w, pts);
    GridValues gv(g.dim, g.n, w.ncomp);
    std::copy(vals.begin(), vals.end(), gv.val.begin());
    return transform(gv, g);
}

}  // namespace

void advance_map(DeformationState& def, const SpectralField& u0, const SpectralField& u1,
                 double dt) {
    def.disp += (0.5 * dt) * (u0 + u1);
    def.gamma += 0.5 * dt * (grad_sup_norm(u0) + grad_sup_norm(u1));
    def.t += dt;
}

void advance_map_eulerian(DeformationState& def, const SpectralField& v0,
                          const SpectralField& v1, double dt) {
    SpectralField u0 = pullback(v0, def.disp);
    DeformationState pred(def.disp.grid);
    pred.disp = def.disp + dt * u0;
    SpectralField u1 = pullback(v1, pred.disp);
    advance_map(def, u0, u1, dt);
}

SpectralField jacobian(const SpectralField& disp) {
    const int d = disp.grid.dim;
    SpectralField J(disp.grid, d * d);
    for (int i = 0; i < d; ++i) {
        SpectralField di(disp.grid, 1);
        std::copy(disp.comp(i).begin(), disp.comp(i).end(), di.comp(0).begin());
        for (int j = 0; j < d; ++j) {
            SpectralField dij = derivative(di, j);
            std::copy(dij.comp(0).begin(), dij.comp(0).end(), J.comp(i * d + j).begin());
        }
    }
    for (int i = 0; i < d; ++i) J.comp(i * d + i)[0] += 1.0;
    return J;
}

double min_jacobian_det(const SpectralField& disp) {
    const int d = disp.grid.dim;
    GridValues G = jacobian_values(disp);
    const std::size_t npts = G.points();
    return -par::max(npts, [&](std::size_t p) {
        double m[16];
        for (int e = 0; e < d * d; ++e) m[e] = G.val[static_cast<std::size_t>(e) * npts + p];
        for (int i = 0; i < d; ++i) m[i * d + i] += 1.0;
        return -det_small(m, d);
    });
}

DeformationMatrix invert_jacobian(const SpectralField& G, double gamma, double tol,
                                  int max_terms) {
    const TorusGrid& grid = G.grid;
    const int d = grid.dim;
    if (G.ncomp != d * d) throw std::invalid_argument("invert_jacobian: expected a matrix field");
    SpectralField Gd = G;
    dealias(Gd);
    GridValues gv = inverse_transform(Gd);
    const std::size_t npts = gv.points();
    GridValues av(grid.dim, grid.n, d * d);

    DeformationMatrix out;
    std::vector<double> per_point(npts, 0.0);

    if (gamma < 0.5) {
        out.neumann = true;
        std::vector<int> terms(npts, 0);
        par::for_each(npts, [&](std::size_t p) {
            double g[16], term[16], acc[16], next[16];
            for (int e = 0; e < d * d; ++e) g[e] = gv.val[static_cast<std::size_t>(e) * npts + p];
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    acc[i * d + j] = (i == j) ? 1.0 : 0.0;
                    term[i * d + j] = acc[i * d + j];
                }
            int k = 0;
            for (; k < max_terms; ++k) {
                // term <- -term * g
                double mx = 0.0;
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) {
                        double s = 0.0;
                        for (int l = 0; l < d; ++l) s += term[i * d + l] * g[l * d + j];
                        next[i * d + j] = -s;
                        mx = std::max(mx, std::abs(s));
                    }
                std::copy(next, next + d * d, term);
                for (int e = 0; e < d * d; ++e) acc[e] += term[e];
                if (mx < tol) break;
            }
            terms[p] = k + 1;
            for (int e = 0; e < d * d; ++e) av.val[static_cast<std::size_t>(e) * npts + p] = acc[e];
        });
        int worst = 0;
        for (std::size_t p = 0; p < npts; ++p) worst = std::max(worst, terms[p]);
        if (worst >= max_terms)
            throw std::runtime_error("invert_jacobian: Neumann series did not converge");
        out.terms = worst;
    } else {
        out.neumann = false;
        std::vector<char> singular(npts, 0);
        par::for_each(npts, [&](std::size_t p) {
            double m[16], inv[16];
            for (int e = 0; e < d * d; ++e) m[e] = gv.val[static_cast<std::size_t>(e) * npts + p];
            for (int i = 0; i < d; ++i) m[i * d + i] += 1.0;
            if (!invert_small(m, d, inv)) {
                singular[p] = 1;
                return;
            }
            double nf = 0.0, ni = 0.0;
            for (int e = 0; e < d * d; ++e) {
                nf += m[e] * m[e];
                ni += inv[e] * inv[e];
                av.val[static_cast<std::size_t>(e) * npts + p] = inv[e];
            }
            per_point[p] = std::sqrt(nf * ni);
        });
        for (std::size_t p = 0; p < npts; ++p)
            if (singular[p]) throw std::runtime_error("invert_jacobian: singular Jacobian");
        out.max_condition = par::max(npts, [&](std::size_t p) { return per_point[p]; });
    }
    out.A = transform(av, grid);
    return out;
}

DeformationMatrix deformation_matrix(const DeformationState& def) {
    SpectralField G = jacobian(def.disp);
    for (int i = 0; i < def.disp.grid.dim; ++i) G.comp(i * def.disp.grid.dim + i)[0] -= 1.0;
    return invert_jacobian(G, def.gamma);
}

LagrangianOps::LagrangianOps(SpectralField A) : A_(std::move(A)), dim_(A_.grid.dim) {
    if (A_.ncomp != dim_ * dim_)
        throw std::invalid_argument("LagrangianOps: expected a matrix field");
    B_ = A_;
    for (int i = 0; i < dim_; ++i) B_.comp(i * dim_ + i)[0] -= 1.0;
    dealias(B_);
    B_values_ = inverse_transform(B_);
}

SpectralField LagrangianOps::commutator_scalar(const SpectralField& w) const {
    const TorusGrid& g = w.grid;
    const int d = dim_;
    const std::size_t npts = B_values_.points();

    SpectralField wd = w;
    dealias(wd);
    SpectralField dw(g, d);
    for (int i = 0; i < d; ++i) {
        SpectralField di = derivative(wd, i);
        std::copy(di.comp(0).begin(), di.comp(0).end(), dw.comp(i).begin());
    }
    GridValues dwv = inverse_transform(dw);

    // term1 = d_j ( (A_ij - delta_ij) d_i w )
    GridValues vv(g.dim, g.n, d);
    par::for_each(npts, [&](std::size_t p) {
        for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (int i = 0; i < d; ++i)
                s += B_values_.val[static_cast<std::size_t>(i * d + j) * npts + p] *
                     dwv.val[static_cast<std::size_t>(i) * npts + p];
            vv.val[static_cast<std::size_t>(j) * npts + p] = s;
        }
    });
    SpectralField v = transform(vv, g);
    dealias(v);
    SpectralField term1 = divergence(v);

    // inner_i = d_i w + (A_ki - delta_ik) d_k w
    GridValues innerv(g.dim, g.n, d);
    par::for_each(npts, [&](std::size_t p) {
        for (int i = 0; i < d; ++i) {
            double s = dwv.val[static_cast<std::size_t>(i) * npts + p];
            for (int k = 0; k < d; ++k)
                s += B_values_.val[static_cast<std::size_t>(k * d + i) * npts + p] *
                     dwv.val[static_cast<std::size_t>(k) * npts + p];
            innerv.val[static_cast<std::size_t>(i) * npts + p] = s;
        }
    });
    SpectralField inner = transform(innerv, g);
    dealias(inner);

    // term2 = (A_ji - delta_ij) d_j inner_i
    SpectralField dinner(g, d * d);
    for (int i = 0; i < d; ++i) {
        SpectralField ic(g, 1);
        std::copy(inner.comp(i).begin(), inner.comp(i).end(), ic.comp(0).begin());
        for (int j = 0; j < d; ++j) {
            SpectralField dji = derivative(ic, j);
            std::copy(dji.comp(0).begin(), dji.comp(0).end(), dinner.comp(i * d + j).begin());
        }
    }
    GridValues dinnerv = inverse_transform(dinner);
    GridValues t2v(g.dim, g.n, 1);
    par::for_each(npts, [&](std::size_t p) {
        double s = 0.0;
        for (int j = 0; j < d; ++j)
            for (int i = 0; i < d; ++i)
                s += B_values_.val[static_cast<std::size_t>(j * d + i) * npts + p] *
                     dinnerv.val[static_cast<std::size_t>(i * d + j) * npts + p];
        t2v.val[p] = s;
    });
    SpectralField term2 = transform(t2v, g);
    dealias(term2);
    return term1 + term2;
}

SpectralField LagrangianOps::commutator_laplacian(const SpectralField& w) const {
    if (w.ncomp == 1) return commutator_scalar(w);
    SpectralField out(w.grid, w.ncomp);
    for (int c = 0; c < w.ncomp; ++c) {
        SpectralField wc(w.grid, 1);
        std::copy(w.comp(c).begin(), w.comp(c).end(), wc.comp(0).begin());
        SpectralField oc = commutator_scalar(wc);
        std::copy(oc.comp(0).begin(), oc.comp(0).end(), out.comp(c).begin());
    }
    return out;
}

SpectralField LagrangianOps::grad_u(const SpectralField& f) const {
    if (f.ncomp != 1) throw std::invalid_argument("grad_u: expected scalar field");
    const TorusGrid& g = f.grid;
    const int d = dim_;
    SpectralField fd = f;
    dealias(fd);
    SpectralField df(g, d);
    for (int i = 0; i < d; ++i) {
        SpectralField di = derivative(fd, i);
        std::copy(di.comp(0).begin(), di.comp(0).end(), df.comp(i).begin());
    }
    GridValues dfv = inverse_transform(df);
    const std::size_t npts = dfv.points();
    GridValues outv(g.dim, g.n, d);
    par::for_each(npts, [&](std::size_t p) {
        for (int i = 0; i < d; ++i) {
            double s = dfv.val[static_cast<std::size_t>(i) * npts + p];
            for (int j = 0; j < d; ++j)
                s += B_values_.val[static_cast<std::size_t>(j * d + i) * npts + p] *
                     dfv.val[static_cast<std::size_t>(j) * npts + p];
            outv.val[static_cast<std::size_t>(i) * npts + p] = s;
        }
    });
    SpectralField out = transform(outv, g);
    dealias(out);
    return out;
}

SpectralField LagrangianOps::div_u(const SpectralField& F) const {
    if (F.ncomp != dim_) throw std::invalid_argument("div_u: expected vector field");
    const TorusGrid& g = F.grid;
    const int d = dim_;
    SpectralField Fd = F;
    dealias(Fd);
    SpectralField dF(g, d * d);  // entry (i,j) = d_j F_i
    for (int i = 0; i < d; ++i) {
        SpectralField fc(g, 1);
        std::copy(Fd.comp(i).begin(), Fd.comp(i).end(), fc.comp(0).begin());
        for (int j = 0; j < d; ++j) {
            SpectralField dji = derivative(fc, j);
            std::copy(dji.comp(0).begin(), dji.comp(0).end(), dF.comp(i * d + j).begin());
        }
    }
    GridValues dFv = inverse_transform(dF);
    const std::size_t npts = dFv.points();
    GridValues accv(g.dim, g.n, 1);
    par::for_each(npts, [&](std::size_t p) {
        double s = 0.0;
        for (int j = 0; j < d; ++j)
            for (int i = 0; i < d; ++i)
                s += B_values_.val[static_cast<std::size_t>(j * d + i) * npts + p] *
                     dFv.val[static_cast<std::size_t>(i * d + j) * npts + p];
        accv.val[p] = s;
    });
    SpectralField corr = transform(accv, g);
    dealias(corr);
    return divergence(Fd) + corr;
}

LagrangianOps::EllipticResult LagrangianOps::inverse_laplacian(const SpectralField& a, double tol,
                                                               int max_iter) const {
    SpectralField rhs = remove_mean(a);
    EllipticResult res{poisson_inverse(rhs), 0, 0.0};
    double prev_inc = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= max_iter; ++it) {
        SpectralField fnew = poisson_inverse(rhs + commutator_scalar(res.f));
        const double inc = lp_norm(fnew - res.f, 2.0);
        res.f = std::move(fnew);
        res.iterations = it;
        if (it > 1) {
            const double ratio = inc / prev_inc;
            res.contraction = std::max(res.contraction, ratio);
            if (inc > prev_inc && inc > tol)
                throw std::runtime_error("inverse_laplacian: iteration is not contracting");
        }
        if (inc < tol) break;
        prev_inc = inc;
    }
    return res;
}

SpectralField pullback(const SpectralField& w, const SpectralField& disp) {
    if (!(w.grid == disp.grid)) throw std::invalid_argument("pullback: grid mismatch");
    require_diffeomorphism(disp);
    const TorusGrid& g = w.grid;
    std::vector<double> pts = collocation_points(g);
    GridValues dv = inverse_transform(disp);
    const std::size_t npts = dv.points();
    par::for_each(npts, [&](std::size_t p) {
        for (int a = 0; a < g.dim; ++a)
            pts[p * static_cast<std::size_t>(g.dim) + a] +=
                dv.val[static_cast<std::size_t>(a) * npts + p];
    });
    return compose_at(w, pts);
}

SpectralField pushforward(const SpectralField& w, const SpectralField& disp) {
    if (!(w.grid == disp.grid)) throw std::invalid_argument("pushforward: grid mismatch");
    require_diffeomorphism(disp);
    const TorusGrid& g = w.grid;
    const int d = g.dim;
    const std::vector<double> xpts = collocation_points(g);
    std::vector<double> ypts = xpts;
    const std::size_t npts = g.num_modes();

    GridValues gradv = jacobian_values(disp);
    double grad_inf = 0.0;
    for (double v : gradv.val) grad_inf = std::max(grad_inf, std::abs(v));
    const double damping = grad_inf < 0.5 ? 1.0 : 0.5;

    for (int it = 0; it < 200; ++it) {
        std::vector<double> dv = eval_at_points(disp, ypts);
        const double move = par::max(npts, [&](std::size_t p) {
            double worst = 0.0;
            for (int a = 0; a < d; ++a) {
                const double target =
                    xpts[p * static_cast<std::size_t>(d) + a] - dv[static_cast<std::size_t>(a) * npts + p];
                const double next = (1.0 - damping) * ypts[p * static_cast<std::size_t>(d) + a] +
                                    damping * target;
                worst = std::max(worst,
                                 std::abs(next - ypts[p * static_cast<std::size_t>(d) + a]));
            }
            return worst;
        });
        par::for_each(npts, [&](std::size_t p) {
            for (int a = 0; a < d; ++a) {
                const double target =
                    xpts[p * static_cast<std::size_t>(d) + a] - dv[static_cast<std::size_t>(a) * npts + p];
                ypts[p * static_cast<std::size_t>(d) + a] =
                    (1.0 - damping) * ypts[p * static_cast<std::size_t>(d) + a] + damping * target;
            }
        });
        if (move < 1e-12) break;
    }
    return compose_at(w, ypts);
}

std::vector<EquivalenceReport> equivalence_check(const std::vector<double>& times,
                                                 const std::vector<SpectralField>& rho,
                                                 const std::vector<SpectralField>& v,
                                                 const std::vector<SpectralField>& a,
                                                 const std::vector<SpectralField>& u) {
    if (times.size() != rho.size() || times.size() != v.size() || times.size() != a.size() ||
        times.size() != u.size())
        throw std::invalid_argument("equivalence_check: sample count mismatch");
    const TorusGrid& g = rho.front().grid;
    DeformationState def(g);
    std::vector<EquivalenceReport> reports;
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < times.size(); ++s) {
        EquivalenceReport r;
        r.t = times[s];
        SpectralField rho_l = pullback(rho[s], def.disp);
        rho_l.coef[0] -= 1.0;
        r.max_density_mismatch = lp_norm(rho_l - a[s], inf);
        r.max_velocity_mismatch = lp_norm(pullback(v[s], def.disp) - u[s], inf);
        r.gamma = def.gamma;
        r.min_jacobian = min_jacobian_det(def.disp);
        reports.push_back(r);
        if (s + 1 < times.size())
            advance_map_eulerian(def, v[s], v[s + 1], times[s + 1] - times[s]);
    }
    return reports;
}

}  // namespace tsl
