#include "planevortex/solver_plane.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "planevortex/spectral.hpp"

namespace pv {

const VectorField2D& PlaneState::velocity() const {
    if (!u_cache_)
        u_cache_ = std::make_shared<const VectorField2D>(
            biot_savart(omega, shared_plan(omega.grid)));
    return *u_cache_;
}

double PlaneState::circulation() const {
    if (m_tag) return *m_tag;
    return integral(omega) / (2.0 * pi);
}

Decomposition PlaneState::decomposition() const {
    Decomposition d;
    d.m = circulation();
    d.v = velocity();
    const auto& vx = default_vortex();
    for (int j = 0; j < omega.grid.n; ++j)
        for (int i = 0; i < omega.grid.n; ++i) {
            auto s = vx.velocity(omega.grid.x(i), omega.grid.y(j));
            std::size_t k = omega.grid.idx(i, j);
            d.v.u1[k] -= d.m * s[0];
            d.v.u2[k] -= d.m * s[1];
        }
    return d;
}

PlaneState make_state(ScalarField2D omega, double t) {
    if (omega.grid.kind != GridKind::cartesian)
        throw std::invalid_argument("plane states live on cartesian grids");
    omega.require_finite("make_state");
    PlaneState s;
    s.omega = std::move(omega);
    s.t = t;
    return s;
}

namespace {

using cplx = std::complex<double>;

// x-faces: (n+1) columns x n rows; y-faces: n columns x (n+1) rows
struct Faces {
    std::vector<double> u, v;
    double speed_max = 0.0;
};

struct Ctx {
    const SolverConfig& cfg;
    const BiotSavartPlan& plan;
    int n;
    int N;
    double h, L;
    bool diffuse;
    ScalarField2D omega_f;  // curl of the forcing (empty grid when absent)
    bool has_forcing = false;
    // diffusion multiplier cache, keyed by nu * tau
    double cached_nutau = -1.0;
    std::vector<double> mult;
    std::vector<double> k2;

    // Diffusion runs periodically on the core box: with the support guard in
    // force the heat kernel never reaches the periodic images, and keeping
    // the k = 0 mode on the core grid preserves total vorticity exactly
    // (a padded transform would truncate ringing mass away on restriction).
    Ctx(const GridSpec2D& grid, const SolverConfig& cfg_, bool diffuse_)
        : cfg(cfg_), plan(shared_plan(grid)), n(grid.n), N(grid.n),
          h(grid.h()), L(grid.L), diffuse(diffuse_) {
        if (cfg.forcing) {
            if (!(cfg.forcing->grid == grid))
                throw std::invalid_argument("forcing grid mismatch");
            omega_f = curl(*cfg.forcing);
            has_forcing = true;
        }
        k2.resize(static_cast<std::size_t>(N) * N);
        const double box = N * h;  // core period
        for (int j = 0; j < N; ++j) {
            double ky = 2.0 * pi * ((j <= N / 2) ? j : j - N) / box;
            for (int i = 0; i < N; ++i) {
                double kx = 2.0 * pi * ((i <= N / 2) ? i : i - N) / box;
                k2[static_cast<std::size_t>(j) * N + i] = kx * kx + ky * ky;
            }
        }
    }
};

Faces faces_from(const ScalarField2D& w, const Ctx& c) {
    std::vector<double> psi = stream_corners(w, c.plan);
    const int n = c.n, np = n + 1;
    // Faces outside the midpoint of the guard band and the boundary carry no
    // flux. Real vorticity is forbidden out there (the guard throws), and
    // with every boundary face closed the flux divergence telescopes to an
    // exactly conserved total: trace vorticity in the band (heat-step
    // ringing, forcing-curl noise) can no longer bleed mass off the grid.
    const double cut = 0.5 * (c.cfg.guard_band + 1.0) * c.L;
    Faces f;
    f.u.resize(static_cast<std::size_t>(np) * n);
    f.v.resize(static_cast<std::size_t>(n) * np);
    double mx = 0.0;
    // face-average u1 over an x-face equals minus the corner difference in y
    for (int j = 0; j < n; ++j)
        for (int i = 0; i <= n; ++i) {
            double uf = -(psi[static_cast<std::size_t>(j + 1) * np + i] -
                          psi[static_cast<std::size_t>(j) * np + i]) /
                        c.h;
            if (std::max(std::abs(-c.L + i * c.h), std::abs(w.grid.y(j))) > cut) uf = 0.0;
            f.u[static_cast<std::size_t>(j) * np + i] = uf;
            mx = std::max(mx, std::abs(uf));
        }
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i < n; ++i) {
            double vf = (psi[static_cast<std::size_t>(j) * np + i + 1] -
                         psi[static_cast<std::size_t>(j) * np + i]) /
                        c.h;
            if (std::max(std::abs(w.grid.x(i)), std::abs(-c.L + j * c.h)) > cut) vf = 0.0;
            f.v[static_cast<std::size_t>(j) * n + i] = vf;
            mx = std::max(mx, std::abs(vf));
        }
    f.speed_max = mx;
    return f;
}

inline double koren_corr(double dminus, double dplus) {
    if (dminus * dplus <= 0.0) return 0.0;
    double s = (dminus > 0.0) ? 1.0 : -1.0;
    double a = std::abs(dminus), b = std::abs(dplus);
    return 0.5 * s * std::min({2.0 * b, (a + 2.0 * b) / 3.0, 2.0 * a});
}

inline double linear_corr(double dminus, double dplus) {
    return dminus / 6.0 + dplus / 3.0;
}

void advect_rhs(const ScalarField2D& w, const Faces& f, const Ctx& c, ScalarField2D& rhs) {
    const int n = c.n, np = n + 1;
    const bool lim = c.cfg.use_limiter;
    auto wat = [&](int i, int j) -> double {
        return (i < 0 || i >= n || j < 0 || j >= n) ? 0.0 : w.at(i, j);
    };

    std::vector<double> Fx(static_cast<std::size_t>(np) * n), Fy(static_cast<std::size_t>(n) * np);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i <= n; ++i) {
            double uf = f.u[static_cast<std::size_t>(j) * np + i];
            double wc, dm, dp;
            if (uf >= 0.0) {
                wc = wat(i - 1, j);
                dm = wc - wat(i - 2, j);
                dp = wat(i, j) - wc;
            } else {
                wc = wat(i, j);
                dm = wc - wat(i + 1, j);
                dp = wat(i - 1, j) - wc;
            }
            double face = wc + (lim ? koren_corr(dm, dp) : linear_corr(dm, dp));
            Fx[static_cast<std::size_t>(j) * np + i] = uf * face;
        }
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i < n; ++i) {
            double vf = f.v[static_cast<std::size_t>(j) * n + i];
            double wc, dm, dp;
            if (vf >= 0.0) {
                wc = wat(i, j - 1);
                dm = wc - wat(i, j - 2);
                dp = wat(i, j) - wc;
            } else {
                wc = wat(i, j);
                dm = wc - wat(i, j + 1);
                dp = wat(i, j - 1) - wc;
            }
            double face = wc + (lim ? koren_corr(dm, dp) : linear_corr(dm, dp));
            Fy[static_cast<std::size_t>(j) * n + i] = vf * face;
        }

    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            rhs.at(i, j) = -(Fx[static_cast<std::size_t>(j) * np + i + 1] -
                             Fx[static_cast<std::size_t>(j) * np + i] +
                             Fy[static_cast<std::size_t>(j + 1) * n + i] -
                             Fy[static_cast<std::size_t>(j) * n + i]) /
                           c.h;
}

// SSP-RK3 advection over dt; faces0 (for the first stage) may be reused from
// the CFL scan when the field has not changed since.
ScalarField2D advect(const ScalarField2D& w0, double dt, const Ctx& c, const Faces* faces0) {
    const std::size_t sz = w0.v.size();
    ScalarField2D rhs(w0.grid), w1(w0.grid), w2(w0.grid);

    if (faces0)
        advect_rhs(w0, *faces0, c, rhs);
    else
        advect_rhs(w0, faces_from(w0, c), c, rhs);
    for (std::size_t k = 0; k < sz; ++k) w1.v[k] = w0.v[k] + dt * rhs.v[k];

    advect_rhs(w1, faces_from(w1, c), c, rhs);
    for (std::size_t k = 0; k < sz; ++k)
        w2.v[k] = 0.75 * w0.v[k] + 0.25 * (w1.v[k] + dt * rhs.v[k]);

    advect_rhs(w2, faces_from(w2, c), c, rhs);
    ScalarField2D out(w0.grid);
    for (std::size_t k = 0; k < sz; ++k)
        out.v[k] = w0.v[k] / 3.0 + 2.0 / 3.0 * (w2.v[k] + dt * rhs.v[k]);
    return out;
}

void diffuse_half(ScalarField2D& w, double tau, Ctx& c) {
    if (!c.diffuse || c.cfg.nu <= 0.0 || tau <= 0.0) return;
    const int n = c.n, N = c.N;
    double nutau = c.cfg.nu * tau;
    if (c.cached_nutau != nutau) {
        c.mult.resize(c.k2.size());
        for (std::size_t k = 0; k < c.k2.size(); ++k) c.mult[k] = std::exp(-nutau * c.k2[k]);
        c.cached_nutau = nutau;
    }
    std::vector<cplx> buf(static_cast<std::size_t>(N) * N, cplx(0.0));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            buf[static_cast<std::size_t>(j) * N + i] = cplx(w.at(i, j), 0.0);
    fft2d_plan(N).forward(buf.data());
    for (std::size_t k = 0; k < buf.size(); ++k) buf[k] *= c.mult[k];
    fft2d_plan(N).inverse(buf.data());
    const double scale = 1.0 / (static_cast<double>(N) * N);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) w.at(i, j) = scale * buf[static_cast<std::size_t>(j) * N + i].real();
}

void apply_source(ScalarField2D& w, double dt, const Ctx& c) {
    if (c.cfg.gamma > 0.0) {
        double decay = std::exp(-c.cfg.gamma * dt);
        double gain = (1.0 - decay) / c.cfg.gamma;
        if (c.has_forcing)
            for (std::size_t k = 0; k < w.v.size(); ++k)
                w.v[k] = decay * w.v[k] + gain * c.omega_f.v[k];
        else
            for (auto& x : w.v) x *= decay;
    } else if (c.has_forcing) {
        for (std::size_t k = 0; k < w.v.size(); ++k) w.v[k] += dt * c.omega_f.v[k];
    }
}

void check_guard(const ScalarField2D& w, const Ctx& c) {
    const double lim = c.cfg.guard_band * c.L;
    double total = 0.0, outer = 0.0, peak = 0.0, band_peak = 0.0;
    for (int j = 0; j < c.n; ++j)
        for (int i = 0; i < c.n; ++i) {
            double a = std::abs(w.at(i, j));
            total += a;
            peak = std::max(peak, a);
            if (std::max(std::abs(w.grid.x(i)), std::abs(w.grid.y(j))) > lim) {
                outer += a;
                band_peak = std::max(band_peak, a);
            }
        }
    // Catch genuine support escape, not the band-limited ringing that the
    // spectral heat step spreads over the whole grid at a level set by the
    // data's Nyquist content. Escape means gross band mass with values
    // visible against the field's peak; ringing fails the peak test.
    if (total > 0.0 && outer > c.cfg.guard_tol * total && band_peak > 1e-3 * peak)
        throw std::runtime_error("domain too small");
}

// One Strang step of exactly dt. faces0 is consumed for the first advection
// stage only when no diffusion runs first.
PlaneState strang_step(const PlaneState& s, double dt, Ctx& c, const Faces* faces0) {
    ScalarField2D w = s.omega;
    bool runs_diffusion = c.diffuse && c.cfg.nu > 0.0;
    diffuse_half(w, dt / 2.0, c);
    w = advect(w, dt, c, runs_diffusion ? nullptr : faces0);
    apply_source(w, dt, c);
    diffuse_half(w, dt / 2.0, c);
    check_guard(w, c);
    PlaneState out = make_state(std::move(w), s.t + dt);
    return out;
}

void validate_cfg(const SolverConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (cfg.nu < 0.0 || cfg.gamma < 0.0) throw std::invalid_argument("nu, gamma must be >= 0");
    if (!(cfg.cfl_safety > 0.0) || cfg.cfl_safety > 1.0)
        throw std::invalid_argument("cfl_safety must lie in (0, 1]");
}

Trajectory run(const PlaneState& s0, const SolverConfig& cfg, std::vector<double> samples,
               bool diffuse) {
    validate_cfg(cfg);
    Ctx ctx(s0.omega.grid, cfg, diffuse);
    if (samples.empty()) samples.push_back(s0.t + cfg.T);
    for (std::size_t k = 0; k < samples.size(); ++k) {
        if (samples[k] < s0.t - 1e-12 || (k > 0 && samples[k] < samples[k - 1]))
            throw std::invalid_argument("sample times must ascend from the initial time");
    }

    Trajectory traj;
    PlaneState cur = s0;
    for (double target : samples) {
        double span = target - cur.t;
        if (span <= 1e-14 * std::max(1.0, std::abs(target))) {
            PlaneState snap = cur;
            snap.t = target;
            traj.states.push_back(std::move(snap));
            continue;
        }
        int nsub = std::max(1, static_cast<int>(std::ceil(span / cfg.dt - 1e-12)));
        double dt0 = span / nsub;
        double base = cur.t;
        int k = 0;
        while (k < nsub) {
            Faces f = faces_from(cur.omega, ctx);
            double dt_cfl = (f.speed_max > 0.0) ? cfg.cfl_safety * ctx.h / f.speed_max
                                                : std::numeric_limits<double>::infinity();
            if (dt0 > dt_cfl * (1.0 + 1e-12)) {
                // re-split the remaining span uniformly at the tighter step
                double remaining = target - cur.t;
                int m = static_cast<int>(std::ceil(remaining / dt_cfl - 1e-12));
                if (m <= nsub - k) m = nsub - k + 1;  // guarantee strict refinement
                nsub = m;
                dt0 = remaining / nsub;
                base = cur.t;
                k = 0;
                if (dt0 < cfg.min_dt) throw std::runtime_error("timestep underflow");
                continue;
            }
            if (dt0 < cfg.min_dt) throw std::runtime_error("timestep underflow");
            cur = strang_step(cur, dt0, ctx, &f);
            ++k;
            cur.t = (k == nsub) ? target : base + k * dt0;
        }
        traj.states.push_back(cur);
    }
    return traj;
}

}  // namespace

PlaneState step(const PlaneState& state, const SolverConfig& cfg) {
    validate_cfg(cfg);
    Ctx ctx(state.omega.grid, cfg, true);
    Faces f = faces_from(state.omega, ctx);
    double dt = cfg.dt;
    if (f.speed_max > 0.0) dt = std::min(dt, cfg.cfl_safety * ctx.h / f.speed_max);
    if (dt < cfg.min_dt) throw std::runtime_error("timestep underflow");
    return strang_step(state, dt, ctx, &f);
}

Trajectory solve(const PlaneState& state, const SolverConfig& cfg,
                 std::vector<double> sample_times) {
    return run(state, cfg, std::move(sample_times), true);
}

Trajectory solve_euler(const PlaneState& state, const SolverConfig& cfg,
                       std::vector<double> sample_times) {
    return run(state, cfg, std::move(sample_times), false);
}

}  // namespace pv
