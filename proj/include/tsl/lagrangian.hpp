#pragma once

#include <vector>

#include "tsl/field.hpp"

// Lagrangian flow-map machinery: the displacement X - id, the deformation
// matrix A = (grad X)^{-1}, the transformed operators grad_u = A^T grad,
// div_u, Delta_u - Delta, the elliptic solve (-Delta_u)^{-1}, and field
// transport between the two coordinate systems by trigonometric
// interpolation.
//
// Matrix-valued fields use dim*dim components with entry (i,j) stored as
// component i*dim + j; the Jacobian convention is J_ij = dX_i / dy_j.

namespace tsl {

struct DeformationState {
    SpectralField disp;   // X - id (vector field)
    double gamma = 0.0;   // running int ||grad u||_inf dt
    double t = 0.0;

    explicit DeformationState(const TorusGrid& g) : disp(g, g.dim) {}
};

// X = id + int u dt, trapezoid in the integral form; u0/u1 are the
// Lagrangian velocities at the two time levels.
void advance_map(DeformationState& def, const SpectralField& u0, const SpectralField& u1,
                 double dt);

// Heun step for dX/dt = v(t, X) given the Eulerian field at both levels;
// velocities are pulled back through the current map internally.
void advance_map_eulerian(DeformationState& def, const SpectralField& v0,
                          const SpectralField& v1, double dt);

// Jacobian J = I + grad disp as a matrix field.
SpectralField jacobian(const SpectralField& disp);

// min over collocation points of det(I + grad disp).
double min_jacobian_det(const SpectralField& disp);

struct DeformationMatrix {
    SpectralField A;
    bool neumann = true;       // false: pointwise direct inversion fallback
    int terms = 0;             // Neumann terms consumed
    double max_condition = 0;  // reported by the fallback
};

// Inverts I + G pointwise. Neumann series I + sum (-G)^k, iterated on the
// collocation grid until the increment drops below tol, when gamma < 1/2;
// otherwise direct d x d inversion with a condition-number report.
DeformationMatrix invert_jacobian(const SpectralField& G, double gamma, double tol = 1e-12,
                                  int max_terms = 200);

DeformationMatrix deformation_matrix(const DeformationState& def);

// Operators built from a fixed deformation matrix. Grid values of A - I are
// prepared once so repeated applications (elliptic iterations) stay cheap.
class LagrangianOps {
  public:
    explicit LagrangianOps(SpectralField A);

    const SpectralField& matrix() const { return A_; }

    // (Delta_u - Delta) w, scalar or vector w (componentwise).
    SpectralField commutator_laplacian(const SpectralField& w) const;

    // grad_u f = A^T grad f (scalar -> vector).
    SpectralField grad_u(const SpectralField& f) const;

    // div_u F = A_ji d_j F_i (vector -> scalar).
    SpectralField div_u(const SpectralField& F) const;

    struct EllipticResult {
        SpectralField f;
        int iterations = 0;
        double contraction = 0.0;  // measured increment ratio
    };

    // Solves -Delta_u f = a - {a}, zero mean, by absorption:
    //   f <- (-Delta)^{-1} (a - {a} + (Delta_u - Delta) f).
    // Throws if the iteration stops contracting.
    EllipticResult inverse_laplacian(const SpectralField& a, double tol = 1e-10,
                                     int max_iter = 200) const;

  private:
    SpectralField A_;
    SpectralField B_;       // A - I, dealiased
    GridValues B_values_;   // collocation values of B
    int dim_;

    SpectralField commutator_scalar(const SpectralField& w) const;
};

// w o X with X = id + disp, by trigonometric interpolation at displaced
// collocation points. Requires det(grad X) > 0 on the grid.
SpectralField pullback(const SpectralField& w, const SpectralField& disp);

// w o X^{-1}; the inverse map is found per collocation point by the damped
// fixed point y = x - disp(y).
SpectralField pushforward(const SpectralField& w, const SpectralField& disp);

struct EquivalenceReport {
    double t = 0.0;
    double max_density_mismatch = 0.0;
    double max_velocity_mismatch = 0.0;
    double gamma = 0.0;
    double min_jacobian = 0.0;
};

// Co-advances a map along the Eulerian samples (rho, v) and compares the
// pulled-back state against the Lagrangian samples (a, u) at each time.
std::vector<EquivalenceReport> equivalence_check(const std::vector<double>& times,
                                                 const std::vector<SpectralField>& rho,
                                                 const std::vector<SpectralField>& v,
                                                 const std::vector<SpectralField>& a,
                                                 const std::vector<SpectralField>& u);

}  // namespace tsl
