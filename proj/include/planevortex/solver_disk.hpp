#pragma once
// Viscous no-slip solver on the disk in vorticity/stream form on the
// stretched polar grid: per-mode tridiagonal Poisson solves, explicit RK3
// advection with third-order upwind-biased differencing, exact per-ring
// integrating factor for the angular diffusion (removes the axis timestep
// restriction), and a two-point wall vorticity closure enforcing no-slip.

#include <vector>

#include "planevortex/fields.hpp"
#include "planevortex/grid.hpp"
#include "planevortex/solver_plane.hpp"

namespace pv {

struct DiskState {
    ScalarField2D omega;  // polar grid, wall ring holds the closure value
    ScalarField2D psi;    // polar grid, psi = 0 on the wall
    double t = 0.0;
};

struct DiskTrajectory {
    std::vector<DiskState> states;
};

// Inverse Laplacian on the disk with psi(R) = 0; exposed for direct testing
// against manufactured solutions.
ScalarField2D solve_disk_poisson(const ScalarField2D& omega);

// Velocity grad-perp psi as cartesian components at the polar nodes. The
// normal component vanishes identically on the wall ring.
VectorField2D disk_velocity(const DiskState& s);

double disk_circulation(const DiskState& s);  // vorticity quadrature / 2 pi
double disk_energy(const DiskState& s);       // (1/2) int |u|^2

// Initial velocity is differentiated on the polar grid; requires cfg.nu > 0.
DiskTrajectory solve_disk(const VectorField2D& u0, const SolverConfig& cfg,
                          std::vector<double> sample_times);

// Entry point for callers holding exact initial vorticity (e.g. the analytic
// truncation evaluators), bypassing the finite-difference curl.
DiskTrajectory solve_disk_omega(ScalarField2D omega0, const SolverConfig& cfg,
                                std::vector<double> sample_times);

}  // namespace pv
