#include "tsl/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <thread>

#include "tsl/besov.hpp"
#include "tsl/certify.hpp"
#include "tsl/io.hpp"
#include "tsl/lagrangian.hpp"
#include "tsl/ops.hpp"
#include "tsl/picard.hpp"
#include "tsl/rng.hpp"
#include "tsl/stokes.hpp"

namespace fs = std::filesystem;

namespace tsl {

namespace {

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

std::ofstream open_out(const std::string& dir, const std::string& name) {
    ensure_dir(dir);
    std::ofstream os(dir + "/" + name, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open output file " + dir + "/" + name);
    return os;
}

void write_json(const std::string& dir, const std::string& name, const nlohmann::json& j) {
    auto os = open_out(dir, name);
    os << j.dump(2) << "\n";
}

void write_dat(const std::string& dir, const std::string& name, const std::vector<double>& t,
               const std::vector<double>& y) {
    auto os = open_out(dir, name);
    char buf[80];
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", t[i], y[i]);
        os << buf;
    }
}

void note(const ExperimentContext& ctx, const std::string& msg) {
    if (!ctx.quiet) std::printf("%s\n", msg.c_str());
}

// classic RK4 with step doubling, used by linear-verify as its oracle
template <class F>
std::vector<cplx> rk4_path(F&& f, std::vector<cplx> y, double t0, double t1, double tol) {
    const std::size_t n = y.size();
    std::vector<cplx> k1(n), k2(n), k3(n), k4(n), tmp(n), full(n), half(n), half2(n);
    auto stepper = [&](double t, double h, const std::vector<cplx>& yin, std::vector<cplx>& out) {
        f(t, yin, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = yin[i] + 0.5 * h * k1[i];
        f(t + 0.5 * h, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = yin[i] + 0.5 * h * k2[i];
        f(t + 0.5 * h, tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = yin[i] + h * k3[i];
        f(t + h, tmp, k4);
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = yin[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    };
    double t = t0, h = (t1 - t0) / 256.0;
    while (t < t1 - 1e-14) {
        const double hs = std::min(h, t1 - t);
        stepper(t, hs, y, full);
        stepper(t, 0.5 * hs, y, half);
        stepper(t + 0.5 * hs, 0.5 * hs, half, half2);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(half2[i] - full[i]));
        if (err > tol && hs > 1e-12) {
            h = 0.5 * hs;
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) y[i] = half2[i] + (half2[i] - full[i]) / 15.0;
        t += hs;
        if (err < tol / 64.0) h = 2.0 * hs;
    }
    return y;
}

}  // namespace

FluidState scaled_perturbation(const TorusGrid& g, double eps, double besov_p,
                               std::uint64_t seed) {
    std::mt19937_64 rng = make_rng(seed, 424242);
    SpectralField da = random_field(g, 1, 2, 1.0, rng, 0.5);
    SpectralField v = random_field(g, g.dim, 2, 1.0, rng, 0.5);
    const double shi = g.dim / besov_p;
    FluidState s(g);
    s.rho += da;
    s.v = v;
    // alternate budget scaling with momentum removal; both constraints
    // converge geometrically since the cross terms are O(eps^2)
    for (int pass = 0; pass < 3; ++pass) {
        SpectralField a = s.rho;
        a.coef[0] -= 1.0;
        const double budget =
            besov_norm(a, {shi, besov_p, 1.0}) + besov_norm(s.v, {shi - 1.0, besov_p, 1.0});
        const double scale = eps / budget;
        a *= scale;
        s.rho = a;
        s.rho.coef[0] += 1.0;
        s.v *= scale;
        SpectralField mom = multiply(s.rho, s.v);
        for (int c = 0; c < g.dim; ++c) s.v.comp(c)[0] -= mom.comp(c)[0] / mean(s.rho);
    }
    return s;
}

SweepReport stability_sweep(const std::vector<double>& eps_list, const SimConfig& cfg,
                            std::uint64_t seed, int jobs) {
    SweepReport rep;
    rep.points.resize(eps_list.size());
    TorusGrid g(cfg.dim, cfg.n);

    auto run_point = [&](std::size_t idx) {
        const double eps = eps_list[idx];
        FluidState init = scaled_perturbation(g, eps, cfg.besov_p, seed);
        DiagnosticsSeries series(cfg.sign, cfg.rho_min, cfg.besov_p);
        SimResult res = simulate(init, cfg, [&](const FluidState& st, int stepno) {
            if (stepno % cfg.sample_every == 0) series.push(st);
        });
        SweepReport::Point pt;
        pt.eps = eps;
        pt.aborted = res.aborted;
        pt.amplification = series.peak_budget() / eps;
        rep.points[idx] = pt;
    };

    int workers = jobs;
    if (workers <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        workers = hw > 2 ? static_cast<int>(hw / 2) : 1;
    }
    if (workers <= 1) {
        for (std::size_t i = 0; i < eps_list.size(); ++i) run_point(i);
    } else {
        std::vector<std::future<void>> pending;
        for (std::size_t i = 0; i < eps_list.size(); ++i) {
            if (static_cast<int>(pending.size()) >= workers) {
                pending.front().get();
                pending.erase(pending.begin());
            }
            pending.push_back(std::async(std::launch::async, run_point, i));
        }
        for (auto& f : pending) f.get();
    }

    std::vector<double> lx, ly;
    bool any_abort = false;
    for (const auto& pt : rep.points) {
        any_abort = any_abort || pt.aborted;
        if (!pt.aborted && pt.amplification > 0.0) {
            lx.push_back(std::log(pt.eps));
            ly.push_back(std::log(pt.amplification));
        }
    }
    if (lx.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sx += lx[i];
            sy += ly[i];
            sxx += lx[i] * lx[i];
            sxy += lx[i] * ly[i];
        }
        const double n = static_cast<double>(lx.size());
        rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    rep.pass = !any_abort && std::abs(rep.slope) <= 0.15;
    return rep;
}

double linear_verify_max_error(double nu, int k2max, double t_end, double dt,
                               std::uint64_t seed) {
    TimeGrid tg{dt, static_cast<int>(std::lround(t_end / dt))};
    double worst = 0.0;
    for (int k2 = 1; k2 <= k2max; ++k2) {
        std::mt19937_64 rng = make_rng(seed, static_cast<std::uint64_t>(k2));
        std::uniform_real_distribution<double> uc(-0.5, 0.5), uw(0.3, 2.5), ub(0.05, 0.4);
        const double c1 = uc(rng), c2 = uc(rng), w1 = uw(rng), w2 = uw(rng), b1 = ub(rng),
                     b2 = ub(rng);
        auto h = [&](double t) {
            return cplx{c1 * std::cos(w1 * t) * std::exp(-b1 * t),
                        c2 * std::sin(w2 * t) * std::exp(-b2 * t)};
        };
        const cplx a0{uc(rng), uc(rng)};
        ModeSolution ms = characteristic_roots_k2(static_cast<double>(k2), nu);
        std::vector<cplx> hs(static_cast<std::size_t>(tg.samples()));
        for (int i = 0; i <= tg.nt; ++i) hs[static_cast<std::size_t>(i)] = h(tg.time(i));
        ModeTrajectory tr = solve_forced_mode(ms, a0, hs, tg);

        const double b = nu * k2;
        // the oracle integrates the same ODE d'' + nu k^2 d' + d = -h(t)
        const int checks = 20;
        std::vector<cplx> y = {cplx{}, a0};
        for (int c = 1; c <= checks; ++c) {
            const double t0 = t_end * (c - 1) / checks;
            const double t1 = t_end * c / checks;
            y = rk4_path(
                [&](double t, const std::vector<cplx>& yy, std::vector<cplx>& dy) {
                    dy[0] = yy[1];
                    dy[1] = -b * yy[1] - yy[0] - h(t);
                },
                y, t0, t1, 1e-12);
            const int i = static_cast<int>(std::lround(t1 / dt));
            worst = std::max(worst, std::abs(tr.d[static_cast<std::size_t>(i)] - y[0]));
        }
    }
    return worst;
}

int run_spectrum(double nu, int kmax, int dim, const ExperimentContext& ctx) {
    SpectrumTable tab = spectrum_report(nu, kmax, dim);
    {
        auto os = open_out(ctx.out_dir, "spectrum.csv");
        tab.write_csv(os);
    }
    SpectrumTable doubled = spectrum_report(nu, 2 * kmax, dim);
    nlohmann::json j{{"nu", nu},
                     {"kmax", kmax},
                     {"dim", dim},
                     {"min_gap_over_k2", tab.min_gap_over_k2},
                     {"min_re_lambda_plus", tab.min_re_lambda_plus},
                     {"min_re_lambda_plus_2x", doubled.min_re_lambda_plus},
                     {"asymptote_dev", tab.asymptote_dev},
                     {"gap_shrinks", doubled.min_re_lambda_plus < tab.min_re_lambda_plus}};
    write_json(ctx.out_dir, "spectrum_summary.json", j);
    note(ctx, "spectrum: " + std::to_string(tab.rows.size()) + " modes, min |Re l+| = " +
                  std::to_string(tab.min_re_lambda_plus));
    return 0;
}

int run_simulate(const SimConfig& cfg, const ExperimentContext& ctx) {
    TorusGrid g(cfg.dim, cfg.n);
    FluidState init = scaled_perturbation(g, 1e-2, cfg.besov_p, ctx.seed);
    DiagnosticsSeries series(cfg.sign, cfg.rho_min, cfg.besov_p);
    SimResult res = simulate(init, cfg, [&](const FluidState& st, int stepno) {
        if (stepno % cfg.sample_every == 0) series.push(st);
    });
    {
        auto os = open_out(ctx.out_dir, "diagnostics.csv");
        series.write_csv(os);
    }
    nlohmann::json j = series.summary();
    j["aborted"] = res.aborted;
    j["abort_reason"] = res.abort_reason;
    j["steps"] = res.steps;
    write_json(ctx.out_dir, "run_summary.json", j);

    const auto& rows = series.rows();
    std::vector<double> t, y;
    for (const auto& r : rows) t.push_back(r.t);
    auto dump = [&](const std::string& name, auto getter) {
        y.clear();
        for (const auto& r : rows) y.push_back(getter(r));
        write_dat(ctx.out_dir, name, t, y);
    };
    dump("energy.dat", [](const DiagnosticsRecord& r) { return r.energy; });
    dump("hminus1.dat", [](const DiagnosticsRecord& r) { return r.hminus1; });
    dump("dissipation.dat", [](const DiagnosticsRecord& r) { return r.dissipation; });
    dump("mass.dat", [](const DiagnosticsRecord& r) { return r.mass; });
    dump("max_rho.dat", [](const DiagnosticsRecord& r) { return r.max_rho; });
    dump("div_v_inf.dat", [](const DiagnosticsRecord& r) { return r.div_v_inf; });

    save_field(ctx.out_dir + "/final_rho.tslf", res.last.rho, {{"t", res.last.t}});
    save_field(ctx.out_dir + "/final_v.tslf", res.last.v, {{"t", res.last.t}});
    if (res.aborted) {
        note(ctx, "simulate: aborted (" + res.abort_reason + ") at t = " +
                      std::to_string(res.last.t));
        return cfg.sign == ForcingSign::repulsive ? 1 : 0;
    }
    note(ctx, "simulate: reached t = " + std::to_string(res.last.t));
    return 0;
}

int run_sweep(const SimConfig& cfg, const std::vector<double>& eps_list,
              const ExperimentContext& ctx) {
    SweepReport rep = stability_sweep(eps_list, cfg, ctx.seed, ctx.jobs);
    {
        auto os = open_out(ctx.out_dir, "sweep.csv");
        os << "eps,amplification,aborted\n";
        char buf[96];
        for (const auto& pt : rep.points) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", pt.eps, pt.amplification,
                          pt.aborted ? 1 : 0);
            os << buf;
        }
    }
    nlohmann::json j{{"slope", rep.slope}, {"pass", rep.pass}};
    write_json(ctx.out_dir, "sweep_summary.json", j);
    note(ctx, "sweep: log-slope = " + std::to_string(rep.slope) +
                  (rep.pass ? " (flat)" : " (FAILED)"));
    return rep.pass ? 0 : 1;
}

int run_linear_verify(const SimConfig& cfg, const ExperimentContext& ctx) {
    (void)cfg;
    const double err = linear_verify_max_error(1.0, 64, 20.0, 2e-5, ctx.seed);
    nlohmann::json j{{"nu", 1.0}, {"k2max", 64}, {"t_end", 20.0}, {"max_abs_error", err},
                     {"tolerance", 1e-8}, {"pass", err < 1e-8}};
    write_json(ctx.out_dir, "linear_verify.json", j);
    note(ctx, "linear-verify: max |error| = " + std::to_string(err));
    return err < 1e-8 ? 0 : 1;
}

int run_lagrangian_check(const SimConfig& cfg, double eps, const ExperimentContext& ctx) {
    TorusGrid g(cfg.dim, cfg.n);
    std::mt19937_64 rng = make_rng(ctx.seed, 7);
    FluidState init(g);
    init.rho += random_field(g, 1, 2, eps, rng, 0.5);

    SimConfig scfg = cfg;
    SimResult sim = simulate(init, scfg);
    if (sim.aborted) return 1;

    // closed-form linear Lagrangian evolution of the same data
    SpectralField a0 = init.rho;
    a0.coef[0] -= 1.0;
    SpectralField u0(g, g.dim);
    const double dts = sim.times[1] - sim.times[0];
    TimeGrid tg{dts, static_cast<int>(sim.times.size()) - 1};
    LinearSolution lin = solve_linear_system(a0, u0, nullptr, nullptr, 1.0, tg, 1);

    auto reports = equivalence_check(sim.times, sim.rho, sim.v, lin.a, lin.u);
    double worst_rho = 0.0, worst_v = 0.0;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : reports) {
        worst_rho = std::max(worst_rho, r.max_density_mismatch);
        worst_v = std::max(worst_v, r.max_velocity_mismatch);
        rows.push_back({{"t", r.t},
                        {"max_density_mismatch", r.max_density_mismatch},
                        {"max_velocity_mismatch", r.max_velocity_mismatch},
                        {"gamma", r.gamma},
                        {"min_jacobian", r.min_jacobian}});
    }
    nlohmann::json j{{"eps", eps},
                     {"worst_density_mismatch", worst_rho},
                     {"worst_velocity_mismatch", worst_v},
                     {"reports", rows}};
    write_json(ctx.out_dir, "lagrangian_check.json", j);
    note(ctx, "lagrangian-check: worst mismatch rho " + std::to_string(worst_rho) + ", v " +
                  std::to_string(worst_v));
    const double tol = 10.0 * eps * eps + 1e-8;
    return (worst_rho < tol && worst_v < tol) ? 0 : 1;
}

int run_besov_certify(const SimConfig& cfg, int samples, const ExperimentContext& ctx) {
    TorusGrid g(cfg.dim, cfg.n);
    const double p = cfg.besov_p;
    std::vector<CertificateReport> reports;
    reports.push_back(certify_nikolskij(g, samples, 2.0, std::numeric_limits<double>::infinity(),
                                        ctx.seed));
    reports.push_back(certify_embedding(g, samples, 3.0, ctx.seed));
    reports.push_back(certify_product_law(g, samples, p, cfg.dim / p, ctx.seed));
    reports.push_back(certify_max_regularity(g, samples, 0.0, 2.0, 5.0, ctx.seed));
    nlohmann::json j = nlohmann::json::array();
    bool all_pass = true;
    for (const auto& r : reports) {
        j.push_back(r.to_json());
        all_pass = all_pass && r.pass;
    }
    write_json(ctx.out_dir, "certificates.json", j);
    note(ctx, std::string("besov-certify: ") + (all_pass ? "all pass" : "FAILURES"));
    return all_pass ? 0 : 1;
}

int run_picard(const SimConfig& cfg, double eps, bool cross_check,
               const ExperimentContext& ctx) {
    TorusGrid g(cfg.dim, cfg.n);
    FluidState init = scaled_perturbation(g, eps, cfg.besov_p, ctx.seed);
    SpectralField a0 = init.rho;
    a0.coef[0] -= 1.0;

    PicardConfig pcfg;
    pcfg.horizon = cfg.t_end;
    pcfg.dt = cfg.dt * cfg.sample_every;
    pcfg.besov_p = cfg.besov_p;
    PicardResult pr = picard_iterate(a0, init.v, pcfg);
    LagrangianResidual resid = lagrangian_residual(pr);

    {
        auto os = open_out(ctx.out_dir, "picard.csv");
        os << "sweep,delta,contraction,gamma\n";
        char buf[120];
        for (std::size_t i = 0; i < pr.history.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", i + 1,
                          pr.history[i].delta, pr.history[i].contraction, pr.history[i].gamma);
            os << buf;
        }
    }
    double worst_contraction = 0.0;
    for (std::size_t i = 1; i < std::min<std::size_t>(pr.history.size(), 5); ++i)
        worst_contraction = std::max(worst_contraction, pr.history[i].contraction);
    bool pass = !pr.diverged && worst_contraction < 0.5 && resid.continuity < 1e-6 &&
                resid.momentum < 1e-6;

    nlohmann::json j{{"eps", eps},
                     {"iterations", pr.iterations},
                     {"converged", pr.converged},
                     {"diverged", pr.diverged},
                     {"worst_contraction", worst_contraction},
                     {"residual_continuity", resid.continuity},
                     {"residual_momentum", resid.momentum}};

    if (cross_check) {
        SimConfig scfg = cfg;
        scfg.t_end = std::min(cfg.t_end, 10.0);
        SimResult sim = simulate(init, scfg);
        if (!sim.aborted) {
            const std::size_t ns = sim.times.size();
            std::vector<SpectralField> pa(pr.a.begin(), pr.a.begin() + ns),
                pu(pr.u.begin(), pr.u.begin() + ns);
            auto reports = equivalence_check(sim.times, sim.rho, sim.v, pa, pu);
            double worst = 0.0;
            for (const auto& r : reports)
                worst = std::max({worst, r.max_density_mismatch, r.max_velocity_mismatch});
            j["eulerian_mismatch"] = worst;
            pass = pass && worst < 1e-4;
        } else {
            j["eulerian_mismatch"] = "aborted";
            pass = false;
        }
    }
    j["pass"] = pass;
    write_json(ctx.out_dir, "picard_summary.json", j);
    note(ctx, "picard: contraction " + std::to_string(worst_contraction) + ", residual (" +
                  std::to_string(resid.continuity) + ", " + std::to_string(resid.momentum) + ")");
    return pass ? 0 : 1;
}

int run_aggregation(const SimConfig& cfg, double eps, const ExperimentContext& ctx) {
    TorusGrid g(cfg.dim, cfg.n);
    std::mt19937_64 rng = make_rng(ctx.seed, 31);
    SpectralField rho(g, 1);
    rho.comp(0)[0] = 1.0;
    rho += random_field(g, 1, 2, eps, rng, 0.5);
    AggregationResult res =
        aggregation_simulate(rho, cfg.dt, cfg.t_end, cfg.rho_min, cfg.sample_every);
    std::vector<double> t, amp;
    for (std::size_t i = 0; i < res.times.size(); ++i) {
        t.push_back(res.times[i]);
        SpectralField dev = res.rho[i];
        dev.coef[0] -= 1.0;
        amp.push_back(lp_norm(dev, 2.0));
    }
    write_dat(ctx.out_dir, "aggregation_amplitude.dat", t, amp);
    nlohmann::json j{{"aborted", res.aborted}, {"abort_reason", res.abort_reason},
                     {"t_final", res.times.back()}};
    write_json(ctx.out_dir, "aggregation_summary.json", j);
    return 0;
}

}  // namespace tsl
