#include "planevortex/solver_disk.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "planevortex/spectral.hpp"

namespace pv {

namespace {

using cplx = std::complex<double>;

struct PolarGeometry {
    GridSpec2D g;
    int nr, nt;
    double ds, dth, R;
    std::vector<double> r, drds, inv_r2;
    // conservative radial Laplacian rows, j = 1..nr-1
    std::vector<double> pa, pc, pdiag;
    double axis_b = 0.0, axis_c = 0.0;  // m = 0 axis row
    std::vector<double> dr_lo;          // r_j - r_{j-1}, j = 1..nr

    explicit PolarGeometry(const GridSpec2D& grid) : g(grid) {
        nr = g.n_r;
        nt = g.n_theta;
        ds = 1.0 / nr;
        dth = g.dtheta();
        R = g.R;
        r.resize(nr + 1);
        drds.resize(nr + 1);
        inv_r2.assign(nr + 1, 0.0);
        for (int j = 0; j <= nr; ++j) {
            r[j] = g.r(j);
            drds[j] = g.drds(j);
            if (j > 0) inv_r2[j] = 1.0 / (r[j] * r[j]);
        }
        dr_lo.assign(nr + 1, 0.0);
        for (int j = 1; j <= nr; ++j) dr_lo[j] = r[j] - r[j - 1];

        pa.assign(nr, 0.0);
        pc.assign(nr, 0.0);
        pdiag.assign(nr, 0.0);
        for (int j = 1; j < nr; ++j) {
            double dm = r[j] - r[j - 1], dp = r[j + 1] - r[j];
            double rm = 0.5 * (r[j] + r[j - 1]), rp = 0.5 * (r[j] + r[j + 1]);
            double cell = r[j] * 0.5 * (r[j + 1] - r[j - 1]);
            pa[j] = rm / (dm * cell);
            pc[j] = rp / (dp * cell);
            pdiag[j] = -(pa[j] + pc[j]);
        }
        axis_c = 4.0 / (r[1] * r[1]);
        axis_b = -axis_c;
    }
};

// ---- Poisson ---------------------------------------------------------------

// Solves Laplacian psi = omega with psi(R) = 0 by angular FFT and per-mode
// Thomas sweeps. omega's wall-ring values are not referenced.
ScalarField2D poisson(const PolarGeometry& geo, const ScalarField2D& omega) {
    const int nr = geo.nr, nt = geo.nt;
    const Fft1D& fft = fft1d_plan(nt);

    // forward transform of each ring row
    std::vector<cplx> modal(static_cast<std::size_t>(nr + 1) * nt);
    {
        std::vector<cplx> row(nt);
        for (int j = 0; j <= nr; ++j) {
            for (int i = 0; i < nt; ++i) row[i] = cplx(omega.at(i, j), 0.0);
            fft.forward(row.data());
            std::copy(row.begin(), row.end(), modal.begin() + static_cast<std::ptrdiff_t>(j) * nt);
        }
    }

    std::vector<cplx> x(nr + 1), rhs(nr + 1), cp(nr + 1);
    std::vector<double> diag(nr + 1);
    for (int im = 0; im < nt; ++im) {
        int mm = (im <= nt / 2) ? im : im - nt;
        double m2 = static_cast<double>(mm) * mm;
        int j0 = (mm == 0) ? 0 : 1;  // first unknown ring

        for (int j = j0; j < nr; ++j) rhs[j] = modal[static_cast<std::size_t>(j) * nt + im];
        for (int j = 1; j < nr; ++j) diag[j] = geo.pdiag[j] - m2 * geo.inv_r2[j];

        // Thomas sweep over unknowns j0..nr-1 (psi(nr) = 0; psi(0) = 0 for m != 0)
        if (mm == 0) {
            cp[0] = geo.axis_c / geo.axis_b;
            rhs[0] /= geo.axis_b;
            for (int j = 1; j < nr; ++j) {
                double denom = diag[j] - geo.pa[j] * cp[j - 1].real();
                cp[j] = geo.pc[j] / denom;
                rhs[j] = (rhs[j] - geo.pa[j] * rhs[j - 1]) / denom;
            }
        } else {
            double denom = diag[1];
            cp[1] = geo.pc[1] / denom;
            rhs[1] /= denom;
            for (int j = 2; j < nr; ++j) {
                double dd = diag[j] - geo.pa[j] * cp[j - 1].real();
                cp[j] = geo.pc[j] / dd;
                rhs[j] = (rhs[j] - geo.pa[j] * rhs[j - 1]) / dd;
            }
        }
        x[nr] = cplx(0.0);
        for (int j = nr - 1; j >= j0; --j) x[j] = rhs[j] - cp[j] * x[j + 1];
        if (mm != 0) x[0] = cplx(0.0);

        for (int j = 0; j <= nr; ++j) modal[static_cast<std::size_t>(j) * nt + im] = x[j];
    }

    // inverse transforms
    ScalarField2D psi(geo.g);
    {
        std::vector<cplx> row(nt);
        for (int j = 0; j <= nr; ++j) {
            std::copy(modal.begin() + static_cast<std::ptrdiff_t>(j) * nt,
                      modal.begin() + static_cast<std::ptrdiff_t>(j + 1) * nt, row.begin());
            fft.inverse(row.data());
            for (int i = 0; i < nt; ++i) psi.at(i, j) = row[i].real() / nt;
        }
    }
    return psi;
}

// Two-point Taylor closure for wall vorticity under psi(R) = 0, psi_r(R) = 0.
void wall_closure(const PolarGeometry& geo, const ScalarField2D& psi, ScalarField2D& omega) {
    const int nr = geo.nr;
    double d1 = geo.R - geo.r[nr - 1], d2 = geo.R - geo.r[nr - 2];
    double det = (d1 * d1 * d2 * d2 / 12.0) * (d1 - d2);
    for (int i = 0; i < geo.nt; ++i) {
        double p1 = psi.at(i, nr - 1), p2 = psi.at(i, nr - 2);
        double psi_rr = (p1 * (-d2 * d2 * d2 / 6.0) - p2 * (-d1 * d1 * d1 / 6.0)) / det;
        omega.at(i, nr) = psi_rr;
    }
}

struct PolarVelocity {
    VectorField2D cart;      // cartesian components at the nodes
    std::vector<double> ur;  // radial component
    std::vector<double> ut;  // azimuthal component
};

PolarVelocity velocity_from_psi(const PolarGeometry& geo, const ScalarField2D& psi) {
    const int nr = geo.nr, nt = geo.nt;
    PolarVelocity out{VectorField2D(geo.g), std::vector<double>(geo.g.node_count(), 0.0),
                      std::vector<double>(geo.g.node_count(), 0.0)};

    for (int j = 1; j <= nr; ++j) {
        for (int i = 0; i < nt; ++i) {
            int im = (i + nt - 1) % nt, ip = (i + 1) % nt;
            double psi_th = (j == nr) ? 0.0 : (psi.at(ip, j) - psi.at(im, j)) / (2.0 * geo.dth);
            double psi_s;
            if (j == nr)
                psi_s = (3.0 * psi.at(i, nr) - 4.0 * psi.at(i, nr - 1) + psi.at(i, nr - 2)) /
                        (2.0 * geo.ds);
            else
                psi_s = (psi.at(i, j + 1) - psi.at(i, j - 1)) / (2.0 * geo.ds);
            double psi_r = psi_s / geo.drds[j];
            double ur = -psi_th / geo.r[j];
            double ut = psi_r;
            std::size_t k = geo.g.idx(i, j);
            out.ur[k] = ur;
            out.ut[k] = ut;
            double c = std::cos(geo.g.theta(i)), s = std::sin(geo.g.theta(i));
            out.cart.u1[k] = ur * c - ut * s;
            out.cart.u2[k] = ur * s + ut * c;
        }
    }

    // axis velocity from the m = 1 moments of ring 1
    double mc = 0.0, ms = 0.0;
    for (int i = 0; i < nt; ++i) {
        mc += psi.at(i, 1) * std::cos(geo.g.theta(i));
        ms += psi.at(i, 1) * std::sin(geo.g.theta(i));
    }
    double px = 2.0 * mc / nt / geo.r[1];  // d psi / dx at the origin
    double py = 2.0 * ms / nt / geo.r[1];
    for (int i = 0; i < nt; ++i) {
        std::size_t k = geo.g.idx(i, 0);
        out.cart.u1[k] = -py;
        out.cart.u2[k] = px;
        // polar components are direction-dependent at the axis; store the
        // cartesian pair projected per duplicate node
        double c = std::cos(geo.g.theta(i)), s = std::sin(geo.g.theta(i));
        out.ur[k] = -py * c + px * s;
        out.ut[k] = py * s + px * c;
    }
    return out;
}

// third-order upwind-biased first derivative on a uniform stencil
inline double upwind3(double fm2, double fm1, double f0, double fp1, double fp2, double wind,
                      double h, bool have_p2) {
    if (wind >= 0.0) return (2.0 * fp1 + 3.0 * f0 - 6.0 * fm1 + fm2) / (6.0 * h);
    if (have_p2) return (-2.0 * fm1 - 3.0 * f0 + 6.0 * fp1 - fp2) / (6.0 * h);
    return (fp1 - fm1) / (2.0 * h);  // near-wall fallback
}

struct DiskCtx {
    PolarGeometry geo;
    const SolverConfig& cfg;
    ScalarField2D src;  // curl of forcing at polar nodes
    bool has_src = false;

    DiskCtx(const GridSpec2D& grid, const SolverConfig& cfg_) : geo(grid), cfg(cfg_) {
        if (cfg.forcing) {
            ScalarField2D wf = curl(*cfg.forcing);
            src = ScalarField2D(grid);
            for (int j = 0; j <= geo.nr; ++j)
                for (int i = 0; i < geo.nt; ++i) {
                    auto p = grid.pos(i, j);
                    src.at(i, j) = interp(wf, p[0], p[1]);
                }
            has_src = true;
        }
    }
};

// RHS of the explicit part (advection, radial diffusion, damping, forcing)
// at interior rings and the axis; the wall row stays zero.
void rhs_eval(const DiskCtx& c, const ScalarField2D& w, const PolarVelocity& vel,
              ScalarField2D& out) {
    const PolarGeometry& geo = c.geo;
    const int nr = geo.nr, nt = geo.nt;
    const double nu = c.cfg.nu, gamma = c.cfg.gamma;

    std::fill(out.v.begin(), out.v.end(), 0.0);

    for (int j = 1; j < nr; ++j) {
        for (int i = 0; i < nt; ++i) {
            std::size_t k = geo.g.idx(i, j);
            double ur = vel.ur[k], ut = vel.ut[k];

            // angular derivative (periodic)
            int im1 = (i + nt - 1) % nt, ip1 = (i + 1) % nt;
            int im2 = (i + nt - 2) % nt, ip2 = (i + 2) % nt;
            double dwdth = upwind3(w.at(im2, j), w.at(im1, j), w.at(i, j), w.at(ip1, j),
                                   w.at(ip2, j), ut, geo.dth, true);

            // radial derivative in the map coordinate s; ghost ring below the
            // axis is the opposite-angle value of ring 1
            double fm1 = w.at(i, j - 1);
            double fm2 = (j >= 2) ? w.at(i, j - 2) : w.at((i + nt / 2) % nt, 1);
            double fp1 = w.at(i, j + 1);
            bool have_p2 = (j + 2 <= nr);
            double fp2 = have_p2 ? w.at(i, j + 2) : 0.0;
            double dwds = upwind3(fm2, fm1, w.at(i, j), fp1, fp2, ur, geo.ds, have_p2);
            double dwdr = dwds / geo.drds[j];

            double lap_r = geo.pa[j] * w.at(i, j - 1) + geo.pdiag[j] * w.at(i, j) +
                           geo.pc[j] * w.at(i, j + 1);

            double val = -(ur * dwdr + ut / geo.r[j] * dwdth) + nu * lap_r - gamma * w.at(i, j);
            if (c.has_src) val += c.src.at(i, j);
            out.at(i, j) = val;
        }
    }

    // axis: gradient and Laplacian from ring-1 angular moments
    double m0 = 0.0, mc = 0.0, ms = 0.0;
    for (int i = 0; i < nt; ++i) {
        m0 += w.at(i, 1);
        mc += w.at(i, 1) * std::cos(geo.g.theta(i));
        ms += w.at(i, 1) * std::sin(geo.g.theta(i));
    }
    m0 /= nt;
    double w0 = w.at(0, 0);
    double gx = 2.0 * (mc / nt) / geo.r[1], gy = 2.0 * (ms / nt) / geo.r[1];
    double lap0 = 4.0 * (m0 - w0) / (geo.r[1] * geo.r[1]);
    std::size_t k0 = geo.g.idx(0, 0);
    double val = -(vel.cart.u1[k0] * gx + vel.cart.u2[k0] * gy) + nu * lap0 - gamma * w0;
    if (c.has_src) val += c.src.at(0, 0);
    for (int i = 0; i < nt; ++i) out.at(i, 0) = val;
}

// exact integrating factor for the angular diffusion term over tau
void angular_diffuse(const DiskCtx& c, ScalarField2D& w, double tau) {
    if (tau <= 0.0 || c.cfg.nu <= 0.0) return;
    const PolarGeometry& geo = c.geo;
    const int nr = geo.nr, nt = geo.nt;
    const Fft1D& fft = fft1d_plan(nt);
    std::vector<cplx> row(nt);
    for (int j = 1; j < nr; ++j) {
        for (int i = 0; i < nt; ++i) row[i] = cplx(w.at(i, j), 0.0);
        fft.forward(row.data());
        for (int im = 0; im < nt; ++im) {
            int mm = (im <= nt / 2) ? im : im - nt;
            row[im] *= std::exp(-c.cfg.nu * tau * mm * mm * geo.inv_r2[j]);
        }
        fft.inverse(row.data());
        for (int i = 0; i < nt; ++i) w.at(i, j) = row[i].real() / nt;
    }
}

struct StageData {
    ScalarField2D psi;
    PolarVelocity vel;
};

// Poisson solve + wall closure + velocity for a stage field (mutates the
// wall ring of w).
StageData stage_prepare(const DiskCtx& c, ScalarField2D& w) {
    StageData s{poisson(c.geo, w), {}};
    wall_closure(c.geo, s.psi, w);
    s.vel = velocity_from_psi(c.geo, s.psi);
    return s;
}

double cfl_limit(const DiskCtx& c, const PolarVelocity& vel) {
    const PolarGeometry& geo = c.geo;
    double dt = std::numeric_limits<double>::infinity();
    double dmin = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= geo.nr; ++j) {
        double dr = geo.dr_lo[j];
        dmin = std::min(dmin, dr);
        for (int i = 0; i < geo.nt; ++i) {
            std::size_t k = geo.g.idx(i, j);
            double aur = std::abs(vel.ur[k]), aut = std::abs(vel.ut[k]);
            if (aur > 0.0) dt = std::min(dt, dr / aur);
            if (aut > 0.0) dt = std::min(dt, geo.r[j] * geo.dth / aut);
        }
    }
    dt *= c.cfg.cfl_safety;
    if (c.cfg.nu > 0.0) {
        // explicit radial diffusion and the axis mean-formula stability
        dt = std::min(dt, 0.5 * dmin * dmin / c.cfg.nu);
        dt = std::min(dt, 0.3 * geo.r[1] * geo.r[1] / c.cfg.nu);
    }
    return dt;
}

DiskState snapshot(const DiskCtx& c, ScalarField2D w, double t) {
    DiskState s;
    s.psi = poisson(c.geo, w);
    wall_closure(c.geo, s.psi, w);
    s.omega = std::move(w);
    s.t = t;
    return s;
}

// one SSP-RK3 step of exactly dt, with angular diffusion wrapped around it
void disk_step(const DiskCtx& c, ScalarField2D& w, double dt) {
    angular_diffuse(c, w, dt / 2.0);

    ScalarField2D rhs(w.grid), w1(w.grid), w2(w.grid);
    const std::size_t sz = w.v.size();

    StageData s0 = stage_prepare(c, w);
    rhs_eval(c, w, s0.vel, rhs);
    for (std::size_t k = 0; k < sz; ++k) w1.v[k] = w.v[k] + dt * rhs.v[k];

    StageData s1 = stage_prepare(c, w1);
    rhs_eval(c, w1, s1.vel, rhs);
    for (std::size_t k = 0; k < sz; ++k)
        w2.v[k] = 0.75 * w.v[k] + 0.25 * (w1.v[k] + dt * rhs.v[k]);

    StageData s2 = stage_prepare(c, w2);
    rhs_eval(c, w2, s2.vel, rhs);
    for (std::size_t k = 0; k < sz; ++k)
        w.v[k] = w.v[k] / 3.0 + 2.0 / 3.0 * (w2.v[k] + dt * rhs.v[k]);

    angular_diffuse(c, w, dt / 2.0);
}

DiskTrajectory run_disk(ScalarField2D w, const SolverConfig& cfg, std::vector<double> samples,
                        double t0) {
    if (!(cfg.nu > 0.0)) throw std::runtime_error("disk solver requires viscosity");
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (w.grid.kind != GridKind::polar)
        throw std::invalid_argument("disk solver expects a polar grid");
    if (w.grid.n_r < 4 || w.grid.n_theta < 8)
        throw std::invalid_argument("disk solver needs n_r >= 4 and n_theta >= 8");
    w.require_finite("solve_disk");

    DiskCtx ctx(w.grid, cfg);
    if (samples.empty()) samples.push_back(t0 + cfg.T);
    for (std::size_t k = 0; k < samples.size(); ++k)
        if (samples[k] < t0 - 1e-12 || (k > 0 && samples[k] < samples[k - 1]))
            throw std::invalid_argument("sample times must ascend from the initial time");

    DiskTrajectory traj;
    double t = t0;
    for (double target : samples) {
        double span = target - t;
        if (span <= 1e-14 * std::max(1.0, std::abs(target))) {
            traj.states.push_back(snapshot(ctx, w, target));
            continue;
        }
        int nsub = std::max(1, static_cast<int>(std::ceil(span / cfg.dt - 1e-12)));
        double dt0 = span / nsub;
        double base = t;
        int k = 0;
        while (k < nsub) {
            StageData probe = stage_prepare(ctx, w);
            double dt_cfl = cfl_limit(ctx, probe.vel);
            if (dt0 > dt_cfl * (1.0 + 1e-12)) {
                double remaining = target - t;
                int m = static_cast<int>(std::ceil(remaining / dt_cfl - 1e-12));
                if (m <= nsub - k) m = nsub - k + 1;
                nsub = m;
                dt0 = remaining / nsub;
                base = t;
                k = 0;
                if (dt0 < cfg.min_dt) throw std::runtime_error("timestep underflow");
                continue;
            }
            if (dt0 < cfg.min_dt) throw std::runtime_error("timestep underflow");
            disk_step(ctx, w, dt0);
            ++k;
            t = (k == nsub) ? target : base + k * dt0;
        }
        traj.states.push_back(snapshot(ctx, w, t));
    }
    return traj;
}

}  // namespace

ScalarField2D solve_disk_poisson(const ScalarField2D& omega) {
    if (omega.grid.kind != GridKind::polar)
        throw std::invalid_argument("disk poisson expects a polar grid");
    PolarGeometry geo(omega.grid);
    return poisson(geo, omega);
}

VectorField2D disk_velocity(const DiskState& s) {
    PolarGeometry geo(s.psi.grid);
    return velocity_from_psi(geo, s.psi).cart;
}

double disk_circulation(const DiskState& s) { return integral(s.omega) / (2.0 * pi); }

double disk_energy(const DiskState& s) {
    VectorField2D u = disk_velocity(s);
    double e = norm_l2(u);
    return 0.5 * e * e;
}

DiskTrajectory solve_disk(const VectorField2D& u0, const SolverConfig& cfg,
                          std::vector<double> sample_times) {
    if (!(cfg.nu > 0.0)) throw std::runtime_error("disk solver requires viscosity");
    if (u0.grid.kind != GridKind::polar)
        throw std::invalid_argument("disk solver expects a polar grid");
    ScalarField2D w0 = curl(u0);
    return run_disk(std::move(w0), cfg, std::move(sample_times), 0.0);
}

DiskTrajectory solve_disk_omega(ScalarField2D omega0, const SolverConfig& cfg,
                                std::vector<double> sample_times) {
    return run_disk(std::move(omega0), cfg, std::move(sample_times), 0.0);
}

}  // namespace pv
