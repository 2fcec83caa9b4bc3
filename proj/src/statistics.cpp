#include "planevortex/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <stdexcept>
#include <string>
#include <utility>

#include "planevortex/operators.hpp"
#include "planevortex/parallel.hpp"
#include "planevortex/solver_disk.hpp"

namespace pv {

namespace {

double smooth5(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

double smooth5_d(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return 30.0 * x * x * (1.0 - x) * (1.0 - x);
}

// C^2 plateau: 1 on [-1,1], quintic ramp down to 0 at |s| = 2.
double plateau(double s) { return 1.0 - smooth5(std::fabs(s) - 1.0); }

double plateau_d(double s) {
    double d = -smooth5_d(std::fabs(s) - 1.0);
    return s < 0.0 ? -d : d;
}

}  // namespace

// ---------------------------------------------------------------------------
// Ensembles

Ensemble make_ensemble(std::vector<EnsembleMember> members) {
    if (members.empty()) throw std::invalid_argument("ensemble needs at least one member");
    double sum = 0.0;
    for (const EnsembleMember& m : members) {
        if (!(m.weight > 0.0)) throw std::invalid_argument("ensemble weights must be positive");
        sum += m.weight;
        if (!(m.state.omega.grid == members.front().state.omega.grid))
            throw std::invalid_argument("ensemble members must share one grid");
        if (std::fabs(m.state.t - members.front().state.t) > 1e-12)
            throw std::invalid_argument("ensemble members must share one time");
    }
    if (std::fabs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("ensemble weights must sum to 1");
    Ensemble mu;
    mu.t = members.front().state.t;
    mu.members = std::move(members);
    return mu;
}

// ---------------------------------------------------------------------------
// PhiFunction

PhiFunction::PhiFunction(Kind k, std::vector<double> a, std::vector<double> b, double offset)
    : kind_(k), a_(std::move(a)), b_(std::move(b)), offset_(offset) {}

PhiFunction PhiFunction::affine(std::vector<double> coef, double offset) {
    if (coef.empty()) throw std::invalid_argument("phi needs at least one slot");
    std::vector<double> b(coef.size(), 0.0);
    return PhiFunction(Kind::affine, std::move(coef), std::move(b), offset);
}

PhiFunction PhiFunction::saturated(std::vector<double> scale) {
    if (scale.empty()) throw std::invalid_argument("phi needs at least one slot");
    std::vector<double> b(scale.size(), 0.0);
    return PhiFunction(Kind::saturated, std::move(scale), std::move(b), 0.0);
}

PhiFunction PhiFunction::indicator(std::vector<double> centre, std::vector<double> width) {
    if (centre.empty() || centre.size() != width.size())
        throw std::invalid_argument("indicator phi needs matching centre/width lists");
    for (double w : width)
        if (!(w > 0.0)) throw std::invalid_argument("indicator widths must be positive");
    return PhiFunction(Kind::indicator, std::move(centre), std::move(width), 0.0);
}

double PhiFunction::value(const std::vector<double>& x) const {
    if (x.size() != a_.size()) throw std::invalid_argument("phi arity mismatch");
    switch (kind_) {
        case Kind::affine: {
            double v = offset_;
            for (std::size_t j = 0; j < a_.size(); ++j) v += a_[j] * x[j];
            return v;
        }
        case Kind::saturated: {
            double v = 0.0;
            for (std::size_t j = 0; j < a_.size(); ++j) {
                double s = a_[j] * x[j];
                v += s * s / (1.0 + s * s);
            }
            return v;
        }
        case Kind::indicator: {
            double v = 1.0;
            for (std::size_t j = 0; j < a_.size(); ++j) v *= plateau((x[j] - a_[j]) / b_[j]);
            return v;
        }
    }
    return 0.0;
}

double PhiFunction::partial(std::size_t j, const std::vector<double>& x) const {
    if (x.size() != a_.size()) throw std::invalid_argument("phi arity mismatch");
    if (j >= a_.size()) throw std::invalid_argument("phi slot out of range");
    switch (kind_) {
        case Kind::affine:
            return a_[j];
        case Kind::saturated: {
            double s = a_[j] * x[j];
            double den = 1.0 + s * s;
            return 2.0 * s * a_[j] / (den * den);
        }
        case Kind::indicator: {
            double d = plateau_d((x[j] - a_[j]) / b_[j]) / b_[j];
            for (std::size_t l = 0; l < a_.size(); ++l)
                if (l != j) d *= plateau((x[l] - a_[l]) / b_[l]);
            return d;
        }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Bump generators: psi = A f(u), u = |x-c|^2 / rho^2, f(u) = (1-u)^3.

double bump_stream(const BumpSpec& b, double x, double y) {
    double dx = x - b.cx, dy = y - b.cy;
    double u = (dx * dx + dy * dy) / (b.radius * b.radius);
    if (u >= 1.0) return 0.0;
    double w = 1.0 - u;
    return b.amplitude * w * w * w;
}

std::array<double, 2> bump_velocity(const BumpSpec& b, double x, double y) {
    double dx = x - b.cx, dy = y - b.cy;
    double r2 = b.radius * b.radius;
    double u = (dx * dx + dy * dy) / r2;
    if (u >= 1.0) return {0.0, 0.0};
    double w = 1.0 - u;
    double fp = -3.0 * w * w;                       // f'(u)
    double c = b.amplitude * fp * 2.0 / r2;         // d psi = c * (dx, dy)
    return {-c * dy, c * dx};                       // grad-perp
}

double bump_vorticity(const BumpSpec& b, double x, double y) {
    double dx = x - b.cx, dy = y - b.cy;
    double r2 = b.radius * b.radius;
    double s = dx * dx + dy * dy;
    double u = s / r2;
    if (u >= 1.0) return 0.0;
    double w = 1.0 - u;
    double fp = -3.0 * w * w;
    double fpp = 6.0 * w;
    return b.amplitude * (fpp * 4.0 * s / (r2 * r2) + fp * 4.0 / r2);
}

std::array<double, 4> bump_jacobian(const BumpSpec& b, double x, double y) {
    double dx = x - b.cx, dy = y - b.cy;
    double r2 = b.radius * b.radius;
    double u = (dx * dx + dy * dy) / r2;
    if (u >= 1.0) return {0.0, 0.0, 0.0, 0.0};
    double w = 1.0 - u;
    double fp = -3.0 * w * w;
    double fpp = 6.0 * w;
    double A = b.amplitude;
    double pxx = A * (fpp * 4.0 * dx * dx / (r2 * r2) + fp * 2.0 / r2);
    double pyy = A * (fpp * 4.0 * dy * dy / (r2 * r2) + fp * 2.0 / r2);
    double pxy = A * fpp * 4.0 * dx * dy / (r2 * r2);
    // g = (-psi_y, psi_x): {d1 g1, d2 g1, d1 g2, d2 g2}
    return {-pxy, -pyy, pxx, pxy};
}

TestField make_test_field(const GridSpec2D& grid, const BumpSpec& spec) {
    if (!(spec.radius > 0.0)) throw std::invalid_argument("bump radius must be positive");
    TestField tf{spec,          VectorField2D(grid), ScalarField2D(grid), ScalarField2D(grid),
                 ScalarField2D(grid), ScalarField2D(grid), ScalarField2D(grid)};
    const int ni = (grid.kind == GridKind::cartesian) ? grid.n : grid.n_theta;
    const int nj = (grid.kind == GridKind::cartesian) ? grid.n : grid.n_r + 1;
    for (int j = 0; j < nj; ++j)
        for (int i = 0; i < ni; ++i) {
            auto [x, y] = grid.pos(i, j);
            int id = grid.idx(i, j);
            auto g = bump_velocity(spec, x, y);
            tf.g.u1[id] = g[0];
            tf.g.u2[id] = g[1];
            tf.omega_g.v[id] = bump_vorticity(spec, x, y);
            auto J = bump_jacobian(spec, x, y);
            tf.d1g1.v[id] = J[0];
            tf.d2g1.v[id] = J[1];
            tf.d1g2.v[id] = J[2];
            tf.d2g2.v[id] = J[3];
        }
    return tf;
}

TestFunctional make_test_functional(const GridSpec2D& grid, PhiFunction phi,
                                    const std::vector<BumpSpec>& bumps) {
    if (bumps.size() != phi.arity())
        throw std::invalid_argument("one generator field per phi slot required");
    double half = 0.5 * ((grid.kind == GridKind::cartesian) ? grid.L : grid.R);
    TestFunctional f{std::move(phi), {}};
    f.fields.reserve(bumps.size());
    for (const BumpSpec& b : bumps) {
        if (std::hypot(b.cx, b.cy) + b.radius > half + 1e-12)
            throw std::invalid_argument("generator must be supported in the inner half of the grid");
        f.fields.push_back(make_test_field(grid, b));
    }
    return f;
}

std::vector<double> functional_inner_products(const TestFunctional& f, const VectorField2D& u) {
    if (!(u.grid == f.grid())) throw std::invalid_argument("functional and field grids differ");
    std::vector<double> ips(f.arity());
    for (std::size_t j = 0; j < f.arity(); ++j) ips[j] = ip_l2(u, f.fields[j].g);
    return ips;
}

double eval_functional(const TestFunctional& f, const PlaneState& u) {
    return f.phi.value(functional_inner_products(f, u.velocity()));
}

VectorField2D functional_gradient(const TestFunctional& f, const PlaneState& u) {
    std::vector<double> ips = functional_inner_products(f, u.velocity());
    VectorField2D out(f.grid());
    for (std::size_t j = 0; j < f.arity(); ++j) {
        double c = f.phi.partial(j, ips);
        const TestField& tf = f.fields[j];
        for (std::size_t id = 0; id < out.u1.size(); ++id) {
            out.u1[id] += c * tf.g.u1[id];
            out.u2[id] += c * tf.g.u2[id];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pushforward

namespace {

// Run tasks for every member index and collect results in member order,
// attaching the member index to any failure.
template <typename T, typename Fn>
std::vector<T> for_members(std::size_t count, Fn&& fn) {
    std::vector<std::future<T>> futs;
    futs.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        futs.push_back(std::async(std::launch::async, [&fn](std::size_t k) {
            ParallelSlot slot;
            return fn(k);
        }, i));
    std::vector<T> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        try {
            out.push_back(futs[i].get());
        } catch (const std::exception& e) {
            throw std::runtime_error("ensemble member " + std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace

Ensemble pushforward(const Ensemble& mu0, const SolverConfig& cfg, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("pushforward requires t >= 0");
    if (t == 0.0) return mu0;
    double target = mu0.t + t;
    std::vector<PlaneState> advanced = for_members<PlaneState>(
        mu0.members.size(), [&](std::size_t i) {
            Trajectory tr = solve(mu0.members[i].state, cfg, {target});
            return tr.states.back();
        });
    Ensemble out;
    out.t = target;
    out.members.reserve(mu0.members.size());
    for (std::size_t i = 0; i < mu0.members.size(); ++i)
        out.members.push_back({mu0.members[i].weight, std::move(advanced[i])});
    return out;
}

// ---------------------------------------------------------------------------
// Liouville identity

namespace {

int sample_count(double t, double quad_dt) {
    if (!(t >= 0.0)) throw std::invalid_argument("horizon must be nonnegative");
    if (t == 0.0) return 0;
    if (!(quad_dt > 0.0)) throw std::invalid_argument("quad_dt must be positive");
    double ratio = t / quad_dt;
    int K = static_cast<int>(std::lround(ratio));
    if (K < 1 || std::fabs(ratio - K) > 1e-9 * std::max(1.0, ratio))
        throw std::invalid_argument("quad_dt must divide t");
    return K;
}

struct IdentityContext {
    const TestFunctional& f;
    std::vector<double> forcing_ip;  // (forcing, g_j), fixed in time
    double nu = 0.0;
    double gamma = 0.0;
};

// (F(u), Phi'(u)): forcing work minus damping, viscous and inertial pairings,
// all against the analytic generator data.
double identity_integrand(const IdentityContext& ctx, const PlaneState& s) {
    const VectorField2D& u = s.velocity();
    std::vector<double> ips = functional_inner_products(ctx.f, u);
    double total = 0.0;
    for (std::size_t j = 0; j < ctx.f.arity(); ++j) {
        double c = ctx.f.phi.partial(j, ips);
        if (c == 0.0) continue;
        const TestField& tf = ctx.f.fields[j];
        double viscous = ctx.nu != 0.0 ? ctx.nu * ip_l2(s.omega, tf.omega_g) : 0.0;
        // -(u . grad u, g_j) = + int u_i u_l d_i (g_j)_l  (g_j divergence-free)
        double inertial = 0.0;
        const GridSpec2D& grid = u.grid;
        for (std::size_t id = 0; id < u.u1.size(); ++id) {
            double a = tf.d1g1.v[id], b = tf.d2g1.v[id], cc = tf.d1g2.v[id], d = tf.d2g2.v[id];
            if (a == 0.0 && b == 0.0 && cc == 0.0 && d == 0.0) continue;
            double u1 = u.u1[id], u2 = u.u2[id];
            int i = static_cast<int>(id) % grid.n, jr = static_cast<int>(id) / grid.n;
            inertial += node_weight(grid, i, jr) *
                        (u1 * u1 * a + u1 * u2 * (b + cc) + u2 * u2 * d);
        }
        total += c * (ctx.forcing_ip[j] - ctx.gamma * ips[j] - viscous + inertial);
    }
    return total;
}

IdentityContext make_identity_context(const TestFunctional& f, const SolverConfig& cfg) {
    IdentityContext ctx{f, std::vector<double>(f.arity(), 0.0), cfg.nu, cfg.gamma};
    if (cfg.forcing)
        for (std::size_t j = 0; j < f.arity(); ++j)
            ctx.forcing_ip[j] = ip_l2(*cfg.forcing, f.fields[j].g);
    return ctx;
}

}  // namespace

LiouvilleSamples liouville_samples(const Ensemble& mu0, const TestFunctional& f,
                                   const SolverConfig& cfg, double t, double quad_dt) {
    if (!(mu0.grid() == f.grid()))
        throw std::invalid_argument("functional and ensemble grids differ");
    if (mu0.grid().kind != GridKind::cartesian)
        throw std::invalid_argument("ensembles live on cartesian grids");
    const int K = sample_count(t, quad_dt);
    IdentityContext ctx = make_identity_context(f, cfg);

    struct MemberResult {
        std::vector<double> q;
        double phi0 = 0.0, phiT = 0.0;
    };
    std::vector<MemberResult> res = for_members<MemberResult>(
        mu0.members.size(), [&](std::size_t i) {
            MemberResult r;
            r.q.resize(K + 1);
            PlaneState cur = mu0.members[i].state;
            r.phi0 = eval_functional(f, cur);
            r.q[0] = identity_integrand(ctx, cur);
            for (int k = 1; k <= K; ++k) {
                cur = solve(cur, cfg, {mu0.t + k * quad_dt}).states.back();
                r.q[k] = identity_integrand(ctx, cur);
            }
            r.phiT = eval_functional(f, cur);
            return r;
        });

    LiouvilleSamples out;
    out.dt = quad_dt;
    out.integrand.assign(K + 1, 0.0);
    for (std::size_t i = 0; i < res.size(); ++i) {
        double w = mu0.members[i].weight;
        out.phi_initial += w * res[i].phi0;
        out.phi_final += w * res[i].phiT;
        for (int k = 0; k <= K; ++k) out.integrand[k] += w * res[i].q[k];
    }
    return out;
}

double liouville_defect(const LiouvilleSamples& s, int stride) {
    const int K = static_cast<int>(s.integrand.size()) - 1;
    if (stride < 1 || (K > 0 && K % stride != 0))
        throw std::invalid_argument("stride must divide the sample count");
    double integral = 0.0;
    if (K > 0) {
        double h = s.dt * stride;
        for (int k = 0; k <= K; k += stride) {
            double w = (k == 0 || k == K) ? 0.5 : 1.0;
            integral += w * h * s.integrand[k];
        }
    }
    return (s.phi_final - s.phi_initial) - integral;
}

double liouville_residual(const Ensemble& mu0, const TestFunctional& f,
                          const SolverConfig& cfg, double t, double quad_dt) {
    return std::fabs(liouville_defect(liouville_samples(mu0, f, cfg, t, quad_dt), 1));
}

// ---------------------------------------------------------------------------
// Statistical energy equality

double statistical_energy_residual_on(const std::vector<WeightedTrajectory>& members,
                                      const StationaryVortex& vortex, double nu,
                                      std::shared_ptr<const VectorField2D> forcing) {
    if (members.empty()) throw std::invalid_argument("ensemble needs at least one member");
    const std::size_t K1 = members.front().traj.states.size();
    if (K1 == 0) throw std::invalid_argument("empty trajectory");
    for (const WeightedTrajectory& m : members)
        if (m.traj.states.size() != K1)
            throw std::invalid_argument("member trajectories must share sample times");
    const GridSpec2D& grid = members.front().traj.states.front().omega.grid;
    const int K = static_cast<int>(K1) - 1;

    // sigma_1 data sampled once: velocity, curl, Jacobian entries
    VectorField2D s1 = eval_sigma_m(vortex, 1.0, grid);
    ScalarField2D w1(grid);
    std::vector<std::array<double, 4>> J(grid.node_count());
    for (int j = 0; j < grid.n; ++j)
        for (int i = 0; i < grid.n; ++i) {
            auto [x, y] = grid.pos(i, j);
            int id = grid.idx(i, j);
            w1.v[id] = vortex.omega(std::hypot(x, y));
            J[id] = vortex.jacobian(x, y);
        }
    double eta = 0.0;
    if (forcing) eta = integral(curl(*forcing)) / (2.0 * pi);

    // weighted-mean per-sample terms; fixed member order
    std::vector<double> A(K1, 0.0), B(K1, 0.0), C(K1, 0.0), D(K1, 0.0), F(K1, 0.0);
    for (const WeightedTrajectory& mem : members) {
        const double w = mem.weight;
        const double t0 = mem.traj.states.front().t;
        const double m0 = mem.traj.states.front().circulation();
        for (std::size_t k = 0; k < K1; ++k) {
            const PlaneState& st = mem.traj.states[k];
            const VectorField2D& u = st.velocity();
            const double m = m0 + (st.t - t0) * eta;
            double a = 0.0, b = 0.0, c = 0.0, d = 0.0, fw = 0.0;
            for (int j = 0; j < grid.n; ++j)
                for (int i = 0; i < grid.n; ++i) {
                    int id = grid.idx(i, j);
                    double nw = node_weight(grid, i, j);
                    double v1 = u.u1[id] - m * s1.u1[id];
                    double v2 = u.u2[id] - m * s1.u2[id];
                    double wv = st.omega.v[id] - m * w1.v[id];
                    a += nw * (v1 * v1 + v2 * v2);
                    b += nw * wv * wv;
                    d += nw * w1.v[id] * wv;
                    const std::array<double, 4>& Jc = J[id];
                    c += nw * (v1 * v1 * Jc[0] + v1 * v2 * (Jc[1] + Jc[2]) + v2 * v2 * Jc[3]);
                    if (forcing) fw += nw * ((*forcing).u1[id] * v1 + (*forcing).u2[id] * v2);
                }
            A[k] += w * a;
            B[k] += w * b;
            C[k] += w * m * c;
            D[k] += w * m * d;
            F[k] += w * fw;
        }
    }

    auto trapz = [&](const std::vector<double>& q) {
        if (K == 0) return 0.0;
        double dt = (members.front().traj.states.back().t -
                     members.front().traj.states.front().t) / K;
        double s = 0.5 * (q.front() + q.back());
        for (int k = 1; k < K; ++k) s += q[k];
        return s * dt;
    };

    double lhs = A.back() + 2.0 * nu * trapz(B);
    double rhs = A.front() + 2.0 * trapz(F) - 2.0 * trapz(C) - 2.0 * nu * trapz(D);
    return std::fabs(lhs - rhs);
}

double statistical_energy_residual(const Ensemble& mu0, const SolverConfig& cfg,
                                   double t, double quad_dt) {
    if (cfg.gamma != 0.0) throw std::invalid_argument("energy identity requires gamma = 0");
    const int K = sample_count(t, quad_dt);
    std::vector<double> samples;
    for (int k = 0; k <= K; ++k) samples.push_back(mu0.t + k * quad_dt);
    std::vector<Trajectory> trajs = for_members<Trajectory>(
        mu0.members.size(),
        [&](std::size_t i) { return solve(mu0.members[i].state, cfg, samples); });
    std::vector<WeightedTrajectory> wt;
    wt.reserve(trajs.size());
    for (std::size_t i = 0; i < trajs.size(); ++i)
        wt.push_back({mu0.members[i].weight, std::move(trajs[i])});
    return statistical_energy_residual_on(wt, default_vortex(), cfg.nu, cfg.forcing);
}

// ---------------------------------------------------------------------------
// Limit tables

std::vector<VvStatRow> vv_statistical_compare(const Ensemble& mu0, const TestFunctional& f,
                                              const SolverConfig& cfg,
                                              const std::vector<double>& nus, double t) {
    if (nus.size() < 2 || nus.back() != 0.0)
        throw std::invalid_argument("viscosity ladder must end with the nu = 0 reference");
    for (std::size_t i = 1; i < nus.size(); ++i)
        if (!(nus[i] < nus[i - 1]))
            throw std::invalid_argument("viscosity ladder must be strictly decreasing");

    std::vector<double> values(nus.size());
    for (std::size_t i = 0; i < nus.size(); ++i) {
        SolverConfig c = cfg;
        c.nu = nus[i];
        Ensemble mu_t = pushforward(mu0, c, t);
        values[i] = ensemble_mean(mu_t, [&](const PlaneState& s) { return eval_functional(f, s); });
    }
    std::vector<VvStatRow> rows(nus.size());
    for (std::size_t i = 0; i < nus.size(); ++i)
        rows[i] = {nus[i], values[i], std::fabs(values[i] - values.back())};
    return rows;
}

std::vector<MomentRow> vorticity_moment_check(const Ensemble& mu0, const SolverConfig& cfg,
                                              double t, const std::vector<double>& ps) {
    for (double p : ps)
        if (!(p >= 1.0)) throw std::invalid_argument("moment exponents must be >= 1");
    Ensemble mu_t = pushforward(mu0, cfg, t);
    std::vector<MomentRow> rows;
    rows.reserve(ps.size());
    for (double p : ps) {
        MomentRow r;
        r.p = p;
        r.initial = ensemble_mean(mu0, [&](const PlaneState& s) { return norm_lp(s.omega, p); });
        r.final = ensemble_mean(mu_t, [&](const PlaneState& s) { return norm_lp(s.omega, p); });
        r.bound = r.initial;
        if (cfg.forcing) r.bound += t * norm_lp(curl(*cfg.forcing), p);
        r.violation = std::max(0.0, r.final - r.bound) / std::max(r.bound, 1e-300);
        rows.push_back(r);
    }
    return rows;
}

std::vector<ExpandingStatRow> expanding_domain_statistical(const Ensemble& mu0,
                                                           const TestFunctional& f,
                                                           const SolverConfig& cfg,
                                                           const std::vector<double>& R_list,
                                                           double t) {
    if (R_list.empty()) throw std::invalid_argument("empty R list");
    for (std::size_t i = 1; i < R_list.size(); ++i)
        if (!(R_list[i] > R_list[i - 1]))
            throw std::invalid_argument("R ladder must be strictly increasing");
    if (!(cfg.nu > 0.0))
        throw std::invalid_argument("expanding-domain comparison requires viscosity");
    const double r_min = R_list.front();
    for (const TestField& tf : f.fields)
        if (std::hypot(tf.spec.cx, tf.spec.cy) + tf.spec.radius > 0.5 * r_min + 1e-12)
            throw std::invalid_argument(
                "generators must be supported in the half-disc of the smallest R");

    const StationaryVortex& vortex = default_vortex();
    Ensemble mu_t = pushforward(mu0, cfg, t);
    double plane_value =
        ensemble_mean(mu_t, [&](const PlaneState& s) { return eval_functional(f, s); });

    std::vector<ExpandingStatRow> rows;
    rows.reserve(R_list.size());
    for (double R : R_list) {
        GridSpec2D disk = default_disk_grid(mu0.grid(), R);
        // generators resampled analytically at the polar nodes
        std::vector<VectorField2D> g_disk;
        g_disk.reserve(f.arity());
        for (const TestField& tf : f.fields) {
            VectorField2D g(disk);
            for (int j = 0; j <= disk.n_r; ++j)
                for (int i = 0; i < disk.n_theta; ++i) {
                    auto [x, y] = disk.pos(i, j);
                    auto gv = bump_velocity(tf.spec, x, y);
                    int id = disk.idx(i, j);
                    g.u1[id] = gv[0];
                    g.u2[id] = gv[1];
                }
            g_disk.push_back(std::move(g));
        }

        struct MemberValue {
            std::vector<double> ips;
            double phi = 0.0;
        };
        std::vector<MemberValue> vals = for_members<MemberValue>(
            mu0.members.size(), [&](std::size_t i) {
                TruncatedField tf = make_truncation(mu0.members[i].state.velocity(),
                                                    mu0.members[i].state.omega, vortex, R,
                                                    TruncationKind::vr);
                ScalarField2D w0 = tf.sample_vorticity(disk);
                SolverConfig c = cfg;
                DiskTrajectory tr = solve_disk_omega(std::move(w0), c, {mu0.t + t});
                VectorField2D v = disk_velocity(tr.states.back());
                MemberValue mv;
                mv.ips.resize(f.arity());
                for (std::size_t j = 0; j < f.arity(); ++j) mv.ips[j] = ip_l2(v, g_disk[j]);
                mv.phi = f.phi.value(mv.ips);
                // restriction identity for the gradient: coefficients computed on
                // the disk must match those of the zero-extension on the plane
                if (i == 0) {
                    VectorField2D ext = extend_by_zero(v, mu0.grid());
                    std::vector<double> ipp = functional_inner_products(f, ext);
                    for (std::size_t j = 0; j < f.arity(); ++j) {
                        double cd = f.phi.partial(j, mv.ips);
                        double cp = f.phi.partial(j, ipp);
                        if (std::fabs(cd - cp) > 5e-2 * (1.0 + std::fabs(cd)))
                            throw std::runtime_error(
                                "restriction identity violated beyond quadrature tolerance");
                    }
                }
                return mv;
            });

        ExpandingStatRow row;
        row.R = R;
        for (std::size_t i = 0; i < vals.size(); ++i)
            row.disk_value += mu0.members[i].weight * vals[i].phi;
        row.plane_value = plane_value;
        row.gap = std::fabs(row.disk_value - plane_value);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace pv
