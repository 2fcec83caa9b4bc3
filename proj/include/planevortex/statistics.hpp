#pragma once
// Empirical-measure statistics over the plane solver: weighted ensembles,
// cylindrical test functionals built from compactly supported divergence-free
// generator fields, the pushforward of an ensemble under the flow, and the
// residuals of the Liouville identity and the statistical energy equality.
//
// All ensemble reductions are fixed-order weighted sums over the member
// index, so results are bit-reproducible regardless of how many threads ran
// the member solves.

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "planevortex/fields.hpp"
#include "planevortex/grid.hpp"
#include "planevortex/solver_plane.hpp"
#include "planevortex/stationary.hpp"

namespace pv {

// ---------------------------------------------------------------------------
// Ensembles

struct EnsembleMember {
    double weight = 0.0;
    PlaneState state;
};

struct Ensemble {
    std::vector<EnsembleMember> members;
    double t = 0.0;

    const GridSpec2D& grid() const { return members.front().state.omega.grid; }
};

// Validates: at least one member, positive weights summing to 1 within 1e-12,
// all members on one grid and at one common time.
Ensemble make_ensemble(std::vector<EnsembleMember> members);

// ---------------------------------------------------------------------------
// Cylindrical test functionals  Phi(u) = phi((u,g_1), ..., (u,g_k))

// Smooth real function on R^k with an analytic, uniformly bounded gradient
// (the affine family is the one exception: its gradient is constant, which
// is bounded too). Shipped families: affine, saturated, smooth indicator.
class PhiFunction {
  public:
    enum class Kind { affine, saturated, indicator };

    // phi(x) = offset + sum_j coef[j] x_j
    static PhiFunction affine(std::vector<double> coef, double offset = 0.0);
    // phi(x) = sum_j (scale[j] x_j)^2 / (1 + (scale[j] x_j)^2), values in [0,k)
    static PhiFunction saturated(std::vector<double> scale);
    // phi(x) = prod_j chi((x_j - centre[j]) / width[j]) with chi a C^2
    // plateau: 1 on [-1,1], 0 outside [-2,2], quintic ramp between.
    static PhiFunction indicator(std::vector<double> centre, std::vector<double> width);

    double value(const std::vector<double>& x) const;
    double partial(std::size_t j, const std::vector<double>& x) const;
    std::size_t arity() const { return a_.size(); }
    Kind kind() const { return kind_; }

  private:
    PhiFunction(Kind k, std::vector<double> a, std::vector<double> b, double offset);
    Kind kind_;
    std::vector<double> a_, b_;
    double offset_ = 0.0;
};

// Generator field g = grad-perp of the C^2 radial stream bump
//   psi(x) = amplitude * (1 - |x - centre|^2 / radius^2)^3   inside the bump.
// g is C^1, divergence-free, and supported in the closed disc of the given
// radius about the centre. All derived quantities are closed-form.
struct BumpSpec {
    double cx = 0.0, cy = 0.0;
    double radius = 1.0;
    double amplitude = 1.0;
};

double bump_stream(const BumpSpec& b, double x, double y);
std::array<double, 2> bump_velocity(const BumpSpec& b, double x, double y);
double bump_vorticity(const BumpSpec& b, double x, double y);  // curl g = lap psi
// {d1 g1, d2 g1, d1 g2, d2 g2}
std::array<double, 4> bump_jacobian(const BumpSpec& b, double x, double y);

// One generator sampled on the evaluation grid, with its analytic curl and
// Jacobian sampled alongside (the identity residuals integrate against these
// instead of differencing the state numerically).
struct TestField {
    BumpSpec spec;
    VectorField2D g;
    ScalarField2D omega_g;
    ScalarField2D d1g1, d2g1, d1g2, d2g2;
};

TestField make_test_field(const GridSpec2D& grid, const BumpSpec& spec);

struct TestFunctional {
    PhiFunction phi;
    std::vector<TestField> fields;

    const GridSpec2D& grid() const { return fields.front().g.grid; }
    std::size_t arity() const { return fields.size(); }
};

// Validates: one generator per phi slot, and every generator supported
// inside the inner half of the grid (|centre| + radius <= extent / 2).
TestFunctional make_test_functional(const GridSpec2D& grid, PhiFunction phi,
                                    const std::vector<BumpSpec>& bumps);

// (u, g_j) for all j, by grid quadrature. Grid mismatch is an error.
std::vector<double> functional_inner_products(const TestFunctional& f, const VectorField2D& u);

double eval_functional(const TestFunctional& f, const PlaneState& u);

// Phi'(u) = sum_j d_j phi(...) g_j, compactly supported by construction.
VectorField2D functional_gradient(const TestFunctional& f, const PlaneState& u);

// ---------------------------------------------------------------------------
// Pushforward

// Advance every member by the duration t under cfg (weights untouched).
// Member solves run concurrently; a failure in member i is reported as
// "ensemble member i: <what>".
Ensemble pushforward(const Ensemble& mu0, const SolverConfig& cfg, double t);

// Weighted mean of an observable over the members, fixed-order sum.
template <typename F>
double ensemble_mean(const Ensemble& mu, F&& observable) {
    double acc = 0.0;
    for (const EnsembleMember& m : mu.members) acc += m.weight * observable(m.state);
    return acc;
}

// ---------------------------------------------------------------------------
// Liouville identity
//
//   mean Phi(u(t)) - mean Phi(u(0))
//     = int_0^t mean[ (f, Phi'(u)) - gamma (u, Phi'(u))
//                     - nu (omega_u, omega_{Phi'(u)}) - (u . grad u, Phi'(u)) ] ds
//
// with both right-hand integrands reduced to quadrature against the analytic
// generator data: the viscous pairing via curls and the inertial pairing via
// -int u_i u_l d_i (g_j)_l.

// The per-sample integrand of the identity on a shared uniform time grid of
// spacing dt, plus the endpoint functional means. Member trajectories are
// solved concurrently once; residuals at coarser spacings reuse the samples.
struct LiouvilleSamples {
    double dt = 0.0;
    double phi_initial = 0.0;
    double phi_final = 0.0;
    std::vector<double> integrand;  // size K+1, values at t0 + k dt
};

// Requires quad_dt to divide t (within rounding).
LiouvilleSamples liouville_samples(const Ensemble& mu0, const TestFunctional& f,
                                   const SolverConfig& cfg, double t, double quad_dt);

// Signed defect LHS - RHS with trapezoid quadrature at spacing stride * dt.
// stride must divide the sample count.
double liouville_defect(const LiouvilleSamples& s, int stride = 1);

double liouville_residual(const Ensemble& mu0, const TestFunctional& f,
                          const SolverConfig& cfg, double t, double quad_dt);

// ---------------------------------------------------------------------------
// Statistical energy equality
//
//   mean ||v(t)||^2 + 2 nu int mean ||grad v||^2
//     = mean ||v(0)||^2 + 2 int mean (f, v)
//       - 2 int mean ((v . grad sigma(u)), v) - 2 nu int mean (grad sigma(u), grad v)
//
// with v = u - sigma(u) member-wise and every gradient pairing evaluated
// through vorticity quadrature. Requires gamma = 0.

struct WeightedTrajectory {
    double weight = 0.0;
    Trajectory traj;
};

// Evaluate the identity on already-sampled trajectories (uniform sample
// spacing assumed for the trapezoid rule). The degenerate single-member
// sigma_m trajectory makes every term identically zero.
double statistical_energy_residual_on(const std::vector<WeightedTrajectory>& members,
                                      const StationaryVortex& vortex, double nu,
                                      std::shared_ptr<const VectorField2D> forcing);

double statistical_energy_residual(const Ensemble& mu0, const SolverConfig& cfg,
                                   double t, double quad_dt);

// ---------------------------------------------------------------------------
// Limit tables

struct VvStatRow {
    double nu = 0.0;
    double value = 0.0;  // mean Phi at time t under this viscosity
    double gap = 0.0;    // |value - Euler reference value|
};

// nus must be strictly decreasing and end with the nu = 0 reference.
std::vector<VvStatRow> vv_statistical_compare(const Ensemble& mu0, const TestFunctional& f,
                                              const SolverConfig& cfg,
                                              const std::vector<double>& nus, double t);

struct MomentRow {
    double p = 0.0;
    double initial = 0.0;    // mean ||omega(0)||_p
    double final = 0.0;      // mean ||omega(t)||_p
    double bound = 0.0;      // initial + t ||omega_f||_p
    double violation = 0.0;  // max(0, final - bound) / bound
};

std::vector<MomentRow> vorticity_moment_check(const Ensemble& mu0, const SolverConfig& cfg,
                                              double t, const std::vector<double>& ps);

struct ExpandingStatRow {
    double R = 0.0;
    double disk_value = 0.0;   // mean Phi_R over the disk ensemble
    double plane_value = 0.0;  // mean Phi over the whole-plane ensemble
    double gap = 0.0;
};

// For each R: project every member onto the disk, solve with no-slip walls,
// evaluate the restricted functional, and compare with the whole-plane value.
// Every generator must be supported inside the half-disc of the smallest R,
// and cfg.nu must be positive. The restriction identity for the functional
// gradient (extend-by-zero of the disk gradient equals the plane gradient of
// the extension) is asserted internally on the way.
std::vector<ExpandingStatRow> expanding_domain_statistical(const Ensemble& mu0,
                                                           const TestFunctional& f,
                                                           const SolverConfig& cfg,
                                                           const std::vector<double>& R_list,
                                                           double t);

}  // namespace pv
