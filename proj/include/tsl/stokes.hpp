#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "tsl/field.hpp"

// Exact per-mode solver for the linear compressible Stokes system
//
//   a_t + div u = h,      u_t - nu Laplace u + grad K a = g,
//
// via the second-order mode ODEs for d = div u. Time stepping uses matrix
// phi-functions that are exact for piecewise-linear forcing samples, so the
// only error against the continuous problem is the interpolation of the
// forcing between samples.

namespace tsl {

enum class RootBranch { generic, resonant };

inline constexpr double kResonanceBand = 1e-8;  // on |nu^2 k^4 - 4|

struct ModeSolution {
    double k2 = 0.0;
    double nu = 1.0;
    cplx lambda_plus;
    cplx lambda_minus;
    RootBranch branch = RootBranch::generic;
};

// Coefficients of the homogeneous solution with d(0)=0, d'(0)=a0:
// generic d = A e^{l+ t} + B e^{l- t}; resonant d = (A + B t) e^{l t}.
struct ModeCoefficients {
    cplx A;
    cplx B;
};

// Roots of lambda^2 + nu k^2 lambda + 1. For nu^2 k^4 > 4 the large root is
// computed directly and the small one as its reciprocal (Vieta), avoiding
// cancellation. k = 0 is rejected.
ModeSolution characteristic_roots(std::span<const int> k, double nu);
ModeSolution characteristic_roots_k2(double k2, double nu);

ModeCoefficients mode_coefficients(const ModeSolution& ms, cplx a0);

struct TimeGrid {
    double dt = 0.01;
    int nt = 100;
    double time(int i) const { return dt * i; }
    int samples() const { return nt + 1; }
    double horizon() const { return dt * nt; }
};

struct ModeTrajectory {
    std::vector<cplx> d;
    std::vector<cplx> ddot;
};

// Closed-form homogeneous solution (h = 0), evaluated through the stable
// difference quotient (e^{l+ t} - e^{l- t})/(l+ - l-) = t e^{mt} sinch(dt)
// which degenerates smoothly into the resonant branch.
ModeTrajectory solve_homogeneous_mode(const ModeSolution& ms, cplx a0, const TimeGrid& tg);

// Forced solve of d'' + nu k^2 d' + d = -h(t), d(0) = 0, d'(0) = a0, with h
// sampled on the grid and interpolated linearly between samples.
ModeTrajectory solve_forced_mode(const ModeSolution& ms, cplx a0, std::span<const cplx> h,
                                 const TimeGrid& tg);

// Heat semigroup with forcing: per mode
//   w_k(t) = e^{-nu k^2 t} w0_k + int_0^t e^{-nu k^2 (t-s)} f_k(s) ds,
// exact for piecewise-linear forcing samples. forcing may be empty (= 0).
// Returns samples at every store_stride-th grid time.
std::vector<SpectralField> heat_lift(const SpectralField& w0,
                                     const std::function<SpectralField(int)>& forcing, double nu,
                                     const TimeGrid& tg, int store_stride = 1);

struct SpectrumRow {
    int k[kMaxDim] = {0, 0, 0, 0};
    double k2 = 0.0;
    cplx lambda_plus;
    cplx lambda_minus;
    RootBranch branch = RootBranch::generic;
};

struct SpectrumTable {
    int dim = 3;
    double nu = 1.0;
    int kmax = 8;
    std::vector<SpectrumRow> rows;
    double min_gap_over_k2 = 0.0;     // min_k |l+ - l-| / k^2
    double min_re_lambda_plus = 0.0;  // min_k |Re l+|
    double asymptote_dev = 0.0;       // max |nu |Re l+| k^2 - 1| over k^2 >= 25

    void write_csv(std::ostream& os) const;
};

SpectrumTable spectrum_report(double nu, int kmax, int dim = 3);

struct LinearSolution {
    TimeGrid tg;
    int store_stride = 1;
    std::vector<double> times;
    std::vector<SpectralField> a;   // scalar
    std::vector<SpectralField> u;   // vector
    std::vector<SpectralField> at;  // exact nodal derivatives
    std::vector<SpectralField> ut;
    std::vector<SpectralField> d;   // div u minus the heat-lifted part
    // max over Simpson pairs of the L2 residual of each equation,
    // measured against the sampled forcing (independent of the stepper).
    double residual_continuity = 0.0;
    double residual_momentum = 0.0;
};

// Full solve; h and g are sample generators on tg (either may be null for
// zero forcing). Initial data a0 scalar, u0 vector.
LinearSolution solve_linear_system(const SpectralField& a0, const SpectralField& u0,
                                   const std::function<SpectralField(int)>& h,
                                   const std::function<SpectralField(int)>& g, double nu,
                                   const TimeGrid& tg, int store_stride = 1);

// Stable phi functions, phi1(z) = (e^z - 1)/z, phi2(z) = (e^z - 1 - z)/z^2.
double phi1(double z);
double phi2(double z);
cplx sinch(cplx z);  // sinh(z)/z

}  // namespace tsl
