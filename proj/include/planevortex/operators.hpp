#pragma once
// Truncation/projection operators carrying whole-plane fields onto disks:
// the clamped-stream projection (zero velocity at the rim), the azimuthal
// truncation (zero normal velocity only), and the plain disk projection
// surrogate, together with their error report.

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "planevortex/biot_savart.hpp"
#include "planevortex/fields.hpp"
#include "planevortex/grid.hpp"
#include "planevortex/stationary.hpp"

namespace pv {

enum class TruncationKind {
    vr,  // grad-perp of (h_R (psi_sigma - psi_sigma(R)) + phi_R psi_v); no-slip rim
    y,   // sigma_m restricted to the disk + grad-perp(phi_R psi_v); free-slip rim
    hr,  // same construction as y; contract is L^2 convergence on the disk
};

// A truncated field evaluable at arbitrary points of the plane (zero outside
// the disk). Velocity comes from the analytic cutoff/stream pieces plus
// bilinear lookups of the gridded psi_v data; vorticity is the analytic
// Laplacian expansion of the same stream function, usable as disk initial
// data without a finite-difference curl.
class TruncatedField {
  public:
    std::array<double, 2> velocity(double x, double y) const;
    double vorticity(double x, double y) const;

    double R() const { return R_; }
    double m() const { return m_; }
    TruncationKind kind() const { return kind_; }

    VectorField2D sample(const GridSpec2D& grid) const;
    ScalarField2D sample_vorticity(const GridSpec2D& grid) const;

  private:
    friend TruncatedField make_truncation(const VectorField2D&, const ScalarField2D&,
                                          const StationaryVortex&, double, TruncationKind);
    TruncationKind kind_ = TruncationKind::vr;
    double R_ = 0.0, m_ = 0.0;
    std::shared_ptr<const StationaryVortex> vortex_;
    ScalarField2D psi_v_;   // zero-mean on the disk
    VectorField2D v_v_;     // grad-perp of psi_v (via the velocity kernel)
    ScalarField2D omega_v_;
};

TruncatedField make_truncation(const VectorField2D& u, const StationaryVortex& vortex,
                               double R, TruncationKind kind);
// Variant for callers that already hold curl u (see the matching decompose
// overload): skips the finite-difference curl and its O(h^2) residue.
TruncatedField make_truncation(const VectorField2D& u, const ScalarField2D& omega,
                               const StationaryVortex& vortex, double R, TruncationKind kind);

// Polar grid matching the source grid's resolution per unit length (capped).
GridSpec2D default_disk_grid(const GridSpec2D& src, double R);

// One-call convenience forms; each samples the evaluator on a polar grid
// (resolution derived from the source grid, capped for cost).
VectorField2D approx_project_VR(const VectorField2D& u, const StationaryVortex& vortex, double R);
VectorField2D truncate_Y(const VectorField2D& u, const StationaryVortex& vortex, double R);
VectorField2D project_HR(const VectorField2D& u, double R);

struct ProjectionErrorRow {
    double R = 0.0;
    // H^1 quantities here combine value and gradient in quadrature
    // (sqrt of summed squares), the convention of the beta(R) closed form.
    double err_h1 = 0.0;  // ||u - trunc(u)||_{H^1} over the disk, plane-grid quadrature
    double bound = 0.0;   // |m| beta(R) + ||u - sigma_m||_{H^1} over the outer half-annulus
    double ratio = 0.0;   // bound / err_h1
};

std::vector<ProjectionErrorRow> projection_error_report(const VectorField2D& u,
                                                        const StationaryVortex& vortex,
                                                        const std::vector<double>& R_list);

void write_projection_error_csv(const std::string& path,
                                const std::vector<ProjectionErrorRow>& rows);

}  // namespace pv
