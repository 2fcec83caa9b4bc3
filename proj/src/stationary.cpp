#include "planevortex/stationary.hpp"

#include <cmath>
#include <stdexcept>

namespace pv {

RadialProfile RadialProfile::bump(int exponent) {
    if (exponent < 1) throw std::invalid_argument("bump exponent must be >= 1");
    RadialProfile p;
    p.is_bump = true;
    p.exponent = exponent;
    return p;
}

RadialProfile RadialProfile::custom(std::function<double(double)> shape) {
    RadialProfile p;
    p.is_bump = false;
    p.shape = std::move(shape);
    return p;
}

// ---- StationaryVortex ------------------------------------------------------

double StationaryVortex::g_of(double rho) const {
    if (rho >= 1.0) return 0.0;
    if (profile_.is_bump) {
        int k = profile_.exponent;
        double b = 1.0 - rho * rho;
        return (k + 1) / pi * std::pow(b, k);
    }
    return norm_const_ * profile_.shape(rho);
}

double StationaryVortex::table_eval(const std::vector<double>& t, double r) const {
    double f = r * (t.size() - 1);
    std::size_t i = std::min(static_cast<std::size_t>(f), t.size() - 2);
    double frac = f - i;
    return t[i] * (1.0 - frac) + t[i + 1] * frac;
}

double StationaryVortex::Gamma(double r) const {
    if (r >= 1.0) return 1.0;
    if (profile_.is_bump) {
        double b = 1.0 - r * r;
        return 1.0 - std::pow(b, profile_.exponent + 1);
    }
    return table_eval(gamma_table_, r);
}

double StationaryVortex::speed(double r) const {
    if (r <= 0.0) return 0.0;
    return Gamma(r) / r;
}

double StationaryVortex::omega(double r) const { return 2.0 * pi * g_of(r); }

std::array<double, 2> StationaryVortex::velocity(double x, double y) const {
    double r2 = x * x + y * y;
    if (r2 <= 0.0) return {0.0, 0.0};
    double s = Gamma(std::sqrt(r2)) / r2;
    return {-s * y, s * x};
}

double StationaryVortex::stream_circulation(double r) const {
    if (r >= 1.0) return c2_ + std::log(r) / (2.0 * pi);
    if (profile_.is_bump) {
        // (1/4pi) sum_{j=1}^{k+1} (1 - (1 - r^2)^j) / j
        int n = profile_.exponent + 1;
        double b = 1.0 - r * r, bp = 1.0, acc = 0.0;
        for (int j = 1; j <= n; ++j) {
            bp *= b;
            acc += (1.0 - bp) / j;
        }
        return acc / (4.0 * pi);
    }
    return table_eval(psi_table_, r);
}

double StationaryVortex::jacobian_frob_sq(double r) const {
    double q = speed(r), w = omega(r);
    double qp = w - (r > 0.0 ? q / r : 0.5 * omega(0.0));
    double qr = (r > 0.0) ? q / r : 0.5 * omega(0.0);
    return qp * qp + qr * qr;
}

std::array<double, 4> StationaryVortex::jacobian(double x, double y) const {
    double r = std::hypot(x, y);
    // B = (q' - q/r)/r^2 has a finite limit at the origin; evaluate just off
    // axis, where the formula is already stable.
    double re = std::max(r, 1e-6);
    double q = speed(re);
    double B = (omega(re) - 2.0 * q / re) / (re * re);
    double qr = (r > 1e-12) ? speed(r) / r : 0.5 * omega(0.0);
    return {-x * y * B, -qr - y * y * B, qr + x * x * B, x * y * B};
}

// ---- construction ----------------------------------------------------------

StationaryVortex make_sigma1(const RadialProfile& profile) {
    StationaryVortex v;
    v.profile_ = profile;

    if (!profile.is_bump) {
        if (!profile.shape) throw std::invalid_argument("custom profile needs a shape");
        double inside = 0.0, outside = 0.0;
        for (int i = 0; i <= 400; ++i) {
            inside = std::max(inside, std::abs(profile.shape(i / 400.0)));
            outside = std::max(outside, std::abs(profile.shape(1.0 + 1e-9 + i / 400.0)));
        }
        if (outside > 1e-12 * std::max(inside, 1.0))
            throw std::invalid_argument("profile support must lie in the unit disk");

        // normalization by composite Simpson of 2 pi rho shape(rho)
        const int N = 16384;
        double h = 1.0 / N, mass = 0.0;
        auto f = [&](double rho) { return 2.0 * pi * rho * profile.shape(rho); };
        for (int i = 0; i < N; i += 2)
            mass += h / 3.0 * (f(i * h) + 4.0 * f((i + 1) * h) + f((i + 2) * h));
        if (!(mass > 0.0)) throw std::invalid_argument("profile has nonpositive mass");
        v.norm_const_ = 1.0 / mass;

        // cumulative tables: Gamma (trapezoid is enough at this resolution
        // with Richardson-free 1e-9 accuracy) and the circulation stream
        v.gamma_table_.assign(N + 1, 0.0);
        for (int i = 1; i <= N; ++i) {
            double a = (i - 1) * h, b = i * h, m = (a + b) / 2;
            double seg = h / 6.0 *
                         (2.0 * pi * a * v.g_of(a) + 8.0 * pi * m * v.g_of(m) +
                          2.0 * pi * b * v.g_of(b));
            v.gamma_table_[i] = v.gamma_table_[i - 1] + seg;
        }
        // rescale to land exactly on Gamma(1) = 1
        double g1 = v.gamma_table_[N];
        for (auto& x : v.gamma_table_) x /= g1;

        v.psi_table_.assign(N + 1, 0.0);
        auto q_of = [&](double r) {
            return r > 0.0 ? v.table_eval(v.gamma_table_, std::min(r, 1.0)) / r : 0.0;
        };
        for (int i = 1; i <= N; ++i) {
            double a = (i - 1) * h, b = i * h, m = (a + b) / 2;
            double seg = h / 6.0 * (q_of(a) + 4.0 * q_of(m) + q_of(b)) / (2.0 * pi);
            v.psi_table_[i] = v.psi_table_[i - 1] + seg;
        }
    }

    // C2 = psi at the unit circle
    if (profile.is_bump) {
        double H = 0.0;
        for (int j = 1; j <= profile.exponent + 1; ++j) H += 1.0 / j;
        v.c2_ = H / (4.0 * pi);
    } else {
        v.c2_ = v.psi_table_.back();
    }

    // calibration scans
    double linf = 0.0, sp = 0.0, l2 = 0.0;
    const int M = 20000;
    for (int i = 1; i <= M; ++i) {
        double r = static_cast<double>(i) / M;  // (0, 1]
        linf = std::max(linf, std::sqrt(v.jacobian_frob_sq(r)));
        sp = std::max(sp, v.speed(r));
        l2 += v.jacobian_frob_sq(r) * r / M;
    }
    v.jac_linf_ = std::max(linf, std::sqrt(2.0));  // exterior value sqrt(2)/r^2 peaks at r = 1
    v.speed_linf_ = std::max(sp, 1.0);
    v.jac_l2_ = std::sqrt(2.0 * pi * (l2 + 1.0));  // exterior integral of 2/r^4 * r dr = 1
    return v;
}

const StationaryVortex& default_vortex() {
    static const StationaryVortex v = make_sigma1(RadialProfile::bump(3));
    return v;
}

VectorField2D eval_sigma_m(const StationaryVortex& vortex, double m, const GridSpec2D& grid) {
    VectorField2D out(grid);
    int ni = (grid.kind == GridKind::cartesian) ? grid.n : grid.n_theta;
    int nj = (grid.kind == GridKind::cartesian) ? grid.n : grid.n_r + 1;
    for (int j = 0; j < nj; ++j)
        for (int i = 0; i < ni; ++i) {
            auto p = grid.pos(i, j);
            auto s = vortex.velocity(p[0], p[1]);
            std::size_t k = grid.idx(i, j);
            out.u1[k] = m * s[0];
            out.u2[k] = m * s[1];
        }
    return out;
}

double total_vorticity(const VectorField2D& u) { return integral(curl(u)); }

Decomposition decompose(const VectorField2D& u, const StationaryVortex& vortex,
                        double support_tol) {
    if (u.grid.kind != GridKind::cartesian)
        throw std::invalid_argument("decompose expects a cartesian grid");
    return decompose(u, curl(u), vortex, support_tol);
}

Decomposition decompose(const VectorField2D& u, const ScalarField2D& w,
                        const StationaryVortex& vortex, double support_tol) {
    if (u.grid.kind != GridKind::cartesian)
        throw std::invalid_argument("decompose expects a cartesian grid");
    if (!(w.grid == u.grid)) throw std::invalid_argument("decompose: curl grid mismatch");
    double total = 0.0, mass = 0.0, outer = 0.0;
    double half = u.grid.L / 2.0, h2 = u.grid.h() * u.grid.h();
    for (int j = 0; j < u.grid.n; ++j)
        for (int i = 0; i < u.grid.n; ++i) {
            double a = w.at(i, j);
            total += h2 * a;
            mass += h2 * std::abs(a);
            if (std::hypot(u.grid.x(i), u.grid.y(j)) > half) outer += h2 * std::abs(a);
        }
    if (mass > 0.0 && outer > support_tol * mass)
        throw std::runtime_error("circulation undefined on this grid");

    Decomposition d;
    d.m = total / (2.0 * pi);
    d.v = u;
    for (int j = 0; j < u.grid.n; ++j)
        for (int i = 0; i < u.grid.n; ++i) {
            auto s = vortex.velocity(u.grid.x(i), u.grid.y(j));
            std::size_t k = u.grid.idx(i, j);
            d.v.u1[k] -= d.m * s[0];
            d.v.u2[k] -= d.m * s[1];
        }
    return d;
}

Decomposition decompose(const VectorField2D& u) { return decompose(u, default_vortex()); }

double sigma1_annulus_h1_sq(double R) {
    if (!(R >= 2.0)) throw std::invalid_argument("sigma1_annulus_h1_sq requires R >= 2");
    double Rm = R - 1.0;
    return 2.0 * pi * std::log(R / Rm) + pi * (1.0 / (Rm * Rm) - 1.0 / (R * R));
}

// ---- cutoffs ---------------------------------------------------------------

namespace {
// quintic smoothstep on [0, 1]
inline double smooth5(double x) { return x * x * x * (10.0 + x * (-15.0 + 6.0 * x)); }
inline double smooth5_d(double x) { return 30.0 * x * x * (1.0 + x * (-2.0 + x)); }
inline double smooth5_dd(double x) { return x * (60.0 + x * (-180.0 + 120.0 * x)); }
}  // namespace

// h_R ramps over the outer half-collar: 1 for r <= R - 1/2, 0 at r = R, with
// vanishing first derivatives at both ends (and so at |x| = R in particular).
double cutoff_h(double R, double r) {
    double t = R - r;
    if (t <= 0.0) return 0.0;
    if (t >= 0.5) return 1.0;
    return smooth5(2.0 * t);
}

double cutoff_h_dr(double R, double r) {
    double t = R - r;
    if (t <= 0.0 || t >= 0.5) return 0.0;
    return -2.0 * smooth5_d(2.0 * t);
}

double cutoff_h_d2r(double R, double r) {
    double t = R - r;
    if (t <= 0.0 || t >= 0.5) return 0.0;
    return 4.0 * smooth5_dd(2.0 * t);
}

// phi_R(x) = phi_1(|x|/R), phi_1 = 1 on [0, 1/2], 0 at 1, quintic in between.
double cutoff_phi(double R, double r) {
    double rho = r / R;
    if (rho <= 0.5) return 1.0;
    if (rho >= 1.0) return 0.0;
    return 1.0 - smooth5(2.0 * (rho - 0.5));
}

double cutoff_phi_dr(double R, double r) {
    double rho = r / R;
    if (rho <= 0.5 || rho >= 1.0) return 0.0;
    return -2.0 * smooth5_d(2.0 * (rho - 0.5)) / R;
}

double cutoff_phi_d2r(double R, double r) {
    double rho = r / R;
    if (rho <= 0.5 || rho >= 1.0) return 0.0;
    return -4.0 * smooth5_dd(2.0 * (rho - 0.5)) / (R * R);
}

CutoffPair make_cutoffs(double R, const GridSpec2D& grid) {
    if (!(R >= 1.0)) throw std::invalid_argument("cutoff radius must be at least 1");
    double extent = (grid.kind == GridKind::cartesian) ? grid.L : grid.R;
    if (R > extent) throw std::invalid_argument("cutoff radius exceeds grid extent");

    CutoffPair pair{ScalarField2D(grid), ScalarField2D(grid), R};
    int ni = (grid.kind == GridKind::cartesian) ? grid.n : grid.n_theta;
    int nj = (grid.kind == GridKind::cartesian) ? grid.n : grid.n_r + 1;
    for (int j = 0; j < nj; ++j)
        for (int i = 0; i < ni; ++i) {
            auto p = grid.pos(i, j);
            double r = std::hypot(p[0], p[1]);
            pair.h_R.at(i, j) = cutoff_h(R, r);
            pair.phi_R.at(i, j) = cutoff_phi(R, r);
        }
    return pair;
}

}  // namespace pv
