#include "planevortex/verification.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>
#include <string>

#include "planevortex/operators.hpp"
#include "planevortex/parallel.hpp"
#include "planevortex/statistics.hpp"

namespace pv {

namespace {

void require_uniform(const Trajectory& traj) {
    if (traj.states.empty()) throw std::invalid_argument("empty trajectory");
    const int K = static_cast<int>(traj.states.size()) - 1;
    if (K < 1) return;
    double dt = (traj.states.back().t - traj.states.front().t) / K;
    for (int k = 0; k <= K; ++k)
        if (std::fabs(traj.states[k].t - (traj.states.front().t + k * dt)) > 1e-9 * (1.0 + dt))
            throw std::invalid_argument("trajectory samples must be uniformly spaced");
}

// Circulation held at its initial value plus the exactly integrated forcing
// contribution (zero for compactly supported forcing).
struct CirculationLine {
    double m0 = 0.0, t0 = 0.0, eta = 0.0;
    double at(double t) const { return m0 + (t - t0) * eta; }
};

CirculationLine circulation_line(const Trajectory& traj,
                                 const std::shared_ptr<const VectorField2D>& forcing) {
    CirculationLine line;
    line.m0 = traj.states.front().circulation();
    line.t0 = traj.states.front().t;
    if (forcing) line.eta = integral(curl(*forcing)) / (2.0 * pi);
    return line;
}

VectorField2D subtract_sigma(const PlaneState& st, const VectorField2D& s1, double m) {
    VectorField2D v(st.omega.grid);
    const VectorField2D& u = st.velocity();
    for (std::size_t id = 0; id < v.u1.size(); ++id) {
        v.u1[id] = u.u1[id] - m * s1.u1[id];
        v.u2[id] = u.u2[id] - m * s1.u2[id];
    }
    return v;
}

}  // namespace

double energy_equality_residual(const Trajectory& traj, const StationaryVortex& vortex,
                                const SolverConfig& cfg) {
    require_uniform(traj);
    std::vector<WeightedTrajectory> one;
    one.push_back({1.0, traj});
    return statistical_energy_residual_on(one, vortex, cfg.nu, cfg.forcing);
}

GronwallReport gronwall_bound_check(const Trajectory& traj, const StationaryVortex& vortex,
                                    const SolverConfig& cfg) {
    require_uniform(traj);
    const GridSpec2D& grid = traj.states.front().omega.grid;
    VectorField2D s1 = eval_sigma_m(vortex, 1.0, grid);
    CirculationLine line = circulation_line(traj, cfg.forcing);

    GronwallReport rep;
    // Calibrated constant: the Gronwall derivation uses ||grad sigma_1||_inf
    // in the exponent and ||grad sigma_1||_{L^2}^2 on the viscous term; one
    // C >= both covers the stated form.
    rep.C = std::max(vortex.jacobian_linf(), vortex.jacobian_l2() * vortex.jacobian_l2());
    double f_l2_sq = 0.0;
    if (cfg.forcing) {
        double n = norm_l2(*cfg.forcing);
        f_l2_sq = n * n;
    }
    double v0 = norm_l2(subtract_sigma(traj.states.front(), s1, line.m0));
    rep.passed = true;
    rep.min_margin = infinity;
    for (const PlaneState& st : traj.states) {
        double dt = st.t - line.t0;
        double m = line.at(st.t);
        GronwallRow row;
        row.t = st.t;
        row.lhs = norm_l2(subtract_sigma(st, s1, m));
        row.bound = std::sqrt(v0 * v0 + rep.C * m * m * cfg.nu * dt + dt * f_l2_sq) *
                    std::exp((rep.C * std::fabs(m) + 1.0) * dt);
        rep.min_margin = std::min(rep.min_margin, row.bound - row.lhs);
        if (row.lhs > row.bound) rep.passed = false;
        rep.rows.push_back(row);
    }
    return rep;
}

std::vector<TailRow> tail_decay(const Trajectory& traj, const StationaryVortex& vortex,
                                const std::vector<double>& R_list) {
    if (traj.states.empty()) throw std::invalid_argument("empty trajectory");
    const GridSpec2D& grid = traj.states.front().omega.grid;
    VectorField2D s1 = eval_sigma_m(vortex, 1.0, grid);
    CirculationLine line = circulation_line(traj, nullptr);
    std::vector<TailRow> rows;
    for (const PlaneState& st : traj.states) {
        VectorField2D v = subtract_sigma(st, s1, line.at(st.t));
        for (double R : R_list) {
            AnnulusRegion reg{R, infinity};
            TailRow row;
            row.t = st.t;
            row.R = R;
            row.l2 = norm_l2(v, reg);
            row.h1 = norm_h1(v, reg);
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<ExpandingRow> expanding_domain_study(const PlaneState& u0,
                                                 const StationaryVortex& vortex,
                                                 const SolverConfig& cfg,
                                                 const std::vector<double>& R_list,
                                                 int n_samples) {
    if (R_list.empty()) throw std::invalid_argument("empty R list");
    if (n_samples < 1) throw std::invalid_argument("need at least one sample interval");
    if (!(cfg.nu > 0.0)) throw std::invalid_argument("expanding-domain comparison requires viscosity");
    std::vector<double> times;
    for (int k = 0; k <= n_samples; ++k) times.push_back(u0.t + cfg.T * k / n_samples);

    Trajectory plane = solve(u0, cfg, times);
    std::vector<ExpandingRow> rows;
    for (double R : R_list) {
        GridSpec2D disk = default_disk_grid(u0.omega.grid, R);
        TruncatedField tf0 =
            make_truncation(u0.velocity(), u0.omega, vortex, R, TruncationKind::vr);
        DiskTrajectory dtr = solve_disk_omega(tf0.sample_vorticity(disk), cfg, times);

        ExpandingRow row;
        row.R = R;
        AnnulusRegion inside = AnnulusRegion::disk(R);
        std::vector<double> grad_sq;
        for (std::size_t k = 0; k < times.size(); ++k) {
            const PlaneState& pu = plane.states[k];
            VectorField2D ur = disk_velocity(dtr.states[k]);
            VectorField2D ext = extend_by_zero(ur, u0.omega.grid);
            VectorField2D diff(u0.omega.grid);
            for (std::size_t id = 0; id < diff.u1.size(); ++id) {
                diff.u1[id] = pu.velocity().u1[id] - ext.u1[id];
                diff.u2[id] = pu.velocity().u2[id] - ext.u2[id];
            }
            row.sup_h1 = std::max(row.sup_h1, norm_h1(diff, inside));
            double g = grad_norm_l2(diff, inside);
            grad_sq.push_back(g * g);

            // Corollary variant: disk solution vs truncated plane solution,
            // compared natively on the polar grid.
            TruncatedField tft =
                make_truncation(pu.velocity(), pu.omega, vortex, R, TruncationKind::vr);
            VectorField2D proj = tft.sample(disk);
            for (std::size_t id = 0; id < proj.u1.size(); ++id) {
                proj.u1[id] = ur.u1[id] - proj.u1[id];
                proj.u2[id] = ur.u2[id] - proj.u2[id];
            }
            row.corollary_sup_h1 = std::max(row.corollary_sup_h1, norm_h1(proj));
        }
        double acc = 0.0;
        double dt = cfg.T / n_samples;
        for (std::size_t k = 0; k < grad_sq.size(); ++k) {
            double w = (k == 0 || k + 1 == grad_sq.size()) ? 0.5 : 1.0;
            acc += w * dt * grad_sq[k];
        }
        row.l2t_grad = std::sqrt(acc);
        rows.push_back(row);
    }
    return rows;
}

VvStudyResult vanishing_viscosity_study(const PlaneState& u0, const SolverConfig& cfg,
                                        const std::vector<double>& nus, double T,
                                        int n_samples) {
    if (nus.size() < 2 || nus.back() != 0.0)
        throw std::invalid_argument("viscosity ladder must end with the nu = 0 reference");
    for (std::size_t i = 1; i < nus.size(); ++i)
        if (!(nus[i] < nus[i - 1]))
            throw std::invalid_argument("viscosity ladder must be strictly decreasing");
    if (n_samples < 1) throw std::invalid_argument("need at least one sample interval");
    std::vector<double> times;
    for (int k = 0; k <= n_samples; ++k) times.push_back(u0.t + T * k / n_samples);

    std::vector<std::future<Trajectory>> futs;
    for (double nu : nus) {
        SolverConfig c = cfg;
        c.nu = nu;
        futs.push_back(std::async(std::launch::async, [c, &u0, &times] {
            ParallelSlot slot;
            return solve(u0, c, times);
        }));
    }
    std::vector<Trajectory> trajs;
    trajs.reserve(nus.size());
    for (auto& f : futs) trajs.push_back(f.get());

    VvStudyResult out;
    out.C = std::max({1.0, norm_lp(u0.omega, 1.0), norm_lp(u0.omega, infinity)});
    const Trajectory& ref = trajs.back();
    for (std::size_t i = 0; i < nus.size(); ++i) {
        VvRow row;
        row.nu = nus[i];
        for (std::size_t k = 0; k < times.size(); ++k) {
            const VectorField2D& a = trajs[i].states[k].velocity();
            const VectorField2D& b = ref.states[k].velocity();
            double acc = 0.0;
            for (int jj = 0; jj < u0.omega.grid.n; ++jj)
                for (int ii = 0; ii < u0.omega.grid.n; ++ii) {
                    int id = u0.omega.grid.idx(ii, jj);
                    double d1 = a.u1[id] - b.u1[id];
                    double d2 = a.u2[id] - b.u2[id];
                    acc += node_weight(u0.omega.grid, ii, jj) * (d1 * d1 + d2 * d2);
                }
            row.sup_l2 = std::max(row.sup_l2, std::sqrt(acc));
        }
        double cnt = out.C * row.nu * T;
        row.rho = row.nu > 0.0 ? std::pow(cnt, 0.5 * std::exp(-out.C * T)) : 0.0;
        out.rows.push_back(row);
    }

    // least-squares slope of log(sup) vs log(nu) over the positive rows
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (const VvRow& row : out.rows) {
        if (!(row.nu > 0.0) || !(row.sup_l2 > 0.0)) continue;
        double x = std::log(row.nu), y = std::log(row.sup_l2);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n >= 2) out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return out;
}

double damped_circulation_check(const Trajectory& traj, double gamma, double eta) {
    if (!(gamma > 0.0)) throw std::invalid_argument("damped check requires gamma > 0");
    if (traj.states.empty()) throw std::invalid_argument("empty trajectory");
    double t0 = traj.states.front().t;
    double m0 = traj.states.front().circulation();
    double dev = 0.0;
    for (const PlaneState& st : traj.states) {
        double expect = eta / gamma + (m0 - eta / gamma) * std::exp(-gamma * (st.t - t0));
        dev = std::max(dev, std::fabs(st.circulation() - expect));
    }
    return dev;
}

}  // namespace pv
