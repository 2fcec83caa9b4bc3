#pragma once
// The stationary vortex sigma_1, the family sigma_m = m sigma_1, the
// circulation decomposition u = sigma_m + v, and the radial cutoffs h_R,
// phi_R used by the disk truncation operators.

#include <array>
#include <functional>
#include <memory>

#include "planevortex/fields.hpp"
#include "planevortex/grid.hpp"

namespace pv {

// Radial vorticity shape supported in [0, 1]; normalized internally so the
// plane integral of g(|x|) equals one.
struct RadialProfile {
    // polynomial family g ~ (1 - rho^2)^exponent, closed forms throughout
    static RadialProfile bump(int exponent = 3);
    // arbitrary shape, handled by quadrature tables
    static RadialProfile custom(std::function<double(double)> shape);

    bool is_bump = true;
    int exponent = 3;
    std::function<double(double)> shape;  // unnormalized, custom only
};

// Azimuthal stationary field sigma_1 with unit far-field speed scale:
//   sigma_1(x) = Gamma(|x|) / |x|^2 * (-x_2, x_1),
// where Gamma(r) = 2 pi int_0^r rho g drho is the cumulative vorticity mass,
// so |sigma_1(x)| = 1/|x| for |x| >= 1 and curl sigma_1 = 2 pi g(|x|).
//
// Two stream normalizations are exposed:
//   stream_circulation: psi with psi(x) = C2 + log|x|/(2 pi) for |x| >= 1
//   stream_velocity:    2 pi * stream_circulation, whose perp-gradient is
//                       exactly sigma_1 (used by the truncation operators)
class StationaryVortex {
  public:
    double Gamma(double r) const;
    double speed(double r) const;  // |sigma_1| at radius r
    double omega(double r) const;  // curl sigma_1 = 2 pi g(r)
    std::array<double, 2> velocity(double x, double y) const;
    double stream_circulation(double r) const;
    double stream_velocity(double r) const { return 2.0 * pi * stream_circulation(r); }
    double C2() const { return c2_; }

    // Jacobian d(sigma_1)_i / dx_j, row-major {d1s1, d2s1, d1s2, d2s2}.
    std::array<double, 4> jacobian(double x, double y) const;
    // Frobenius norm squared of the Jacobian at radius r: q'^2 + (q/r)^2.
    double jacobian_frob_sq(double r) const;

    // calibration constants for the a-priori estimates
    double jacobian_linf() const { return jac_linf_; }
    double jacobian_l2() const { return jac_l2_; }   // over the whole plane
    double speed_linf() const { return speed_linf_; }

    const RadialProfile& profile() const { return profile_; }

  private:
    friend StationaryVortex make_sigma1(const RadialProfile&);
    RadialProfile profile_;
    double norm_const_ = 1.0;  // multiplies profile_.shape for custom profiles
    double c2_ = 0.0;
    double jac_linf_ = 0.0, jac_l2_ = 0.0, speed_linf_ = 0.0;
    // quadrature tables for custom profiles (radius in [0,1])
    std::vector<double> gamma_table_, psi_table_;
    double g_of(double rho) const;
    double table_eval(const std::vector<double>& t, double r) const;
};

StationaryVortex make_sigma1(const RadialProfile& profile);
const StationaryVortex& default_vortex();  // bump exponent 3, shared instance

// Sample m * sigma_1 at the nodes of a grid.
VectorField2D eval_sigma_m(const StationaryVortex& vortex, double m, const GridSpec2D& grid);

struct Decomposition {
    double m = 0.0;
    VectorField2D v;
};

// Raw quadrature of curl u over the grid.
double total_vorticity(const VectorField2D& u);

// Circulation coordinate and L^2 part: m is the curl quadrature expressed in
// units of sigma_1's own circulation, so decompose(sigma_m).m == m.
// The support check compares the absolute curl mass beyond |x| = L/2 against
// support_tol times the total; the default sits well above the O(h^2)
// differentiation noise left beyond the half-extent by vortices in the middle
// of the field (their 1/r swirl tails differentiate noisily at n ~ 512) yet
// far below any real boundary-touching vorticity.
Decomposition decompose(const VectorField2D& u, const StationaryVortex& vortex,
                        double support_tol = 3e-4);
// Callers that already hold the vorticity of u (e.g. a solver state evolving
// the curl directly) can pass it and skip the finite-difference curl, which
// both tightens m and lets the support check see the true outer mass instead
// of differentiation residue.
Decomposition decompose(const VectorField2D& u, const ScalarField2D& omega,
                        const StationaryVortex& vortex, double support_tol = 3e-4);
Decomposition decompose(const VectorField2D& u);

// 2 pi log(R/(R-1)) + pi [(R-1)^{-2} - R^{-2}], the squared annulus H^1 mass
// of sigma_1 over R-1 <= |x| < R; valid (and enforced) for R >= 2.
double sigma1_annulus_h1_sq(double R);

struct CutoffPair {
    ScalarField2D h_R;
    ScalarField2D phi_R;
    double R = 0.0;
};

CutoffPair make_cutoffs(double R, const GridSpec2D& grid);

// Analytic cutoff profiles (value and radial derivatives), shared by the
// gridded cutoffs and the pointwise operator evaluators.
double cutoff_h(double R, double r);
double cutoff_h_dr(double R, double r);
double cutoff_h_d2r(double R, double r);
double cutoff_phi(double R, double r);
double cutoff_phi_dr(double R, double r);
double cutoff_phi_d2r(double R, double r);

}  // namespace pv
