#pragma once
// Whole-plane vorticity solver: Strang-split exact spectral diffusion,
// flux-form third-order upwind-biased advection with exactly divergence-free
// face velocities, and exactly integrated linear damping/forcing.

#include <memory>
#include <optional>
#include <vector>

#include "planevortex/biot_savart.hpp"
#include "planevortex/fields.hpp"
#include "planevortex/stationary.hpp"

namespace pv {

struct PlaneState {
    ScalarField2D omega;
    double t = 0.0;
    // exact circulation tag for synthetic states built from a known
    // decomposition (skips the quadrature in circulation())
    std::optional<double> m_tag;

    // lazily computed Biot-Savart velocity, shared across copies
    const VectorField2D& velocity() const;
    // circulation in sigma_1 units: total vorticity / 2pi (or the tag)
    double circulation() const;
    // decomposition against the default vortex
    Decomposition decomposition() const;

  private:
    mutable std::shared_ptr<const VectorField2D> u_cache_;
};

PlaneState make_state(ScalarField2D omega, double t = 0.0);

struct SolverConfig {
    double nu = 0.0;
    double gamma = 0.0;
    double dt = 1e-2;  // target step; the advective CFL condition may shrink it
    double T = 1.0;
    std::shared_ptr<const VectorField2D> forcing;  // velocity forcing, may be null
    double cfl_safety = 0.5;
    bool use_limiter = true;   // Koren-limited vs linear kappa=1/3 reconstruction
    double guard_band = 0.9;   // fraction of the extent the support must stay inside
    double guard_tol = 1e-3;   // band mass (relative L1) that counts as escape
    double min_dt = 1e-12;
};

struct Trajectory {
    std::vector<PlaneState> states;
};

// One Strang step of size min(cfg.dt, CFL limit).
PlaneState step(const PlaneState& state, const SolverConfig& cfg);

// Advance to each sample time exactly, with uniform sub-stepping per sample
// interval (re-split uniformly whenever the CFL bound tightens, so results
// are reproducible run to run). Sample times are absolute, ascending, and
// must start at or after state.t. Empty list means {state.t + cfg.T}.
Trajectory solve(const PlaneState& state, const SolverConfig& cfg,
                 std::vector<double> sample_times);

// Euler variant: the diffusion stage is skipped entirely, whatever cfg.nu is.
Trajectory solve_euler(const PlaneState& state, const SolverConfig& cfg,
                       std::vector<double> sample_times);

}  // namespace pv
