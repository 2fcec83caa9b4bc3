#include "planevortex/fields.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace pv {

double node_weight(const GridSpec2D& g, int i, int j) {
    (void)i;
    if (g.kind == GridKind::cartesian) return g.h() * g.h();
    return g.ring_weight(j);
}

static double node_radius(const GridSpec2D& g, int i, int j) {
    if (g.kind == GridKind::cartesian) return std::hypot(g.x(i), g.y(j));
    return g.r(j);
}

namespace {

// Applies fn(i, j, weight) to every node of g inside reg; returns the number
// of nodes visited.
template <class Fn>
std::size_t for_region(const GridSpec2D& g, const AnnulusRegion& reg, Fn&& fn) {
    std::size_t count = 0;
    int ni = (g.kind == GridKind::cartesian) ? g.n : g.n_theta;
    int nj = (g.kind == GridKind::cartesian) ? g.n : g.n_r + 1;
    for (int j = 0; j < nj; ++j)
        for (int i = 0; i < ni; ++i)
            if (reg.contains(node_radius(g, i, j))) {
                fn(i, j, node_weight(g, i, j));
                ++count;
            }
    return count;
}

void require_nonempty(std::size_t count) {
    if (count == 0) throw std::runtime_error("empty region");
}

}  // namespace

double integral(const ScalarField2D& f, const AnnulusRegion& reg) {
    double s = 0.0;
    for_region(f.grid, reg, [&](int i, int j, double w) { s += w * f.at(i, j); });
    return s;
}

static double lp_of(const GridSpec2D& g, const AnnulusRegion& reg, double p,
                    const std::function<double(int, int)>& mag) {
    if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
    double acc = 0.0;
    std::size_t count;
    if (p == infinity) {
        count = for_region(g, reg, [&](int i, int j, double) {
            acc = std::max(acc, mag(i, j));
        });
        require_nonempty(count);
        return acc;
    }
    count = for_region(g, reg, [&](int i, int j, double w) {
        acc += w * std::pow(mag(i, j), p);
    });
    require_nonempty(count);
    return std::pow(acc, 1.0 / p);
}

double norm_lp(const ScalarField2D& f, double p, const AnnulusRegion& reg) {
    return lp_of(f.grid, reg, p, [&](int i, int j) { return std::abs(f.at(i, j)); });
}

double norm_lp(const VectorField2D& u, double p, const AnnulusRegion& reg) {
    return lp_of(u.grid, reg, p, [&](int i, int j) {
        std::size_t k = u.grid.idx(i, j);
        return std::hypot(u.u1[k], u.u2[k]);
    });
}

double norm_l2(const ScalarField2D& f, const AnnulusRegion& reg) { return norm_lp(f, 2.0, reg); }

double norm_l2(const VectorField2D& u, const AnnulusRegion& reg) {
    // direct sum of squares; avoids the hypot round-trip of norm_lp
    double acc = 0.0;
    std::size_t count = for_region(u.grid, reg, [&](int i, int j, double w) {
        std::size_t k = u.grid.idx(i, j);
        acc += w * (u.u1[k] * u.u1[k] + u.u2[k] * u.u2[k]);
    });
    require_nonempty(count);
    return std::sqrt(acc);
}

double ip_l2(const ScalarField2D& a, const ScalarField2D& b, const AnnulusRegion& reg) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("inner product: grid mismatch");
    double acc = 0.0;
    for_region(a.grid, reg, [&](int i, int j, double w) { acc += w * a.at(i, j) * b.at(i, j); });
    return acc;
}

double ip_l2(const VectorField2D& a, const VectorField2D& b, const AnnulusRegion& reg) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("inner product: grid mismatch");
    double acc = 0.0;
    for_region(a.grid, reg, [&](int i, int j, double w) {
        std::size_t k = a.grid.idx(i, j);
        acc += w * (a.u1[k] * b.u1[k] + a.u2[k] * b.u2[k]);
    });
    return acc;
}

// ---- derivatives -----------------------------------------------------------

namespace {

// second-order one-sided difference at the start of a line
inline double one_sided(double f0, double f1, double f2, double h) {
    return (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h);
}

void gradient_cartesian(const ScalarField2D& f, ScalarField2D& gx, ScalarField2D& gy) {
    const int n = f.grid.n;
    const double h = f.grid.h();
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            double dx, dy;
            if (i == 0)
                dx = one_sided(f.at(0, j), f.at(1, j), f.at(2, j), h);
            else if (i == n - 1)
                dx = -one_sided(f.at(n - 1, j), f.at(n - 2, j), f.at(n - 3, j), h);
            else
                dx = (f.at(i + 1, j) - f.at(i - 1, j)) / (2.0 * h);
            if (j == 0)
                dy = one_sided(f.at(i, 0), f.at(i, 1), f.at(i, 2), h);
            else if (j == n - 1)
                dy = -one_sided(f.at(i, n - 1), f.at(i, n - 2), f.at(i, n - 3), h);
            else
                dy = (f.at(i, j + 1) - f.at(i, j - 1)) / (2.0 * h);
            gx.at(i, j) = dx;
            gy.at(i, j) = dy;
        }
    }
}

void gradient_polar(const ScalarField2D& f, ScalarField2D& gx, ScalarField2D& gy) {
    const GridSpec2D& g = f.grid;
    const int nt = g.n_theta, nr = g.n_r;
    const double ds = 1.0 / nr, dth = g.dtheta();

    for (int j = 1; j <= nr; ++j) {
        double r = g.r(j), drds = g.drds(j);
        for (int i = 0; i < nt; ++i) {
            int im = (i + nt - 1) % nt, ip = (i + 1) % nt;
            double f_th = (f.at(ip, j) - f.at(im, j)) / (2.0 * dth);
            double f_s;
            if (j == nr)
                f_s = -one_sided(f.at(i, nr), f.at(i, nr - 1), f.at(i, nr - 2), ds);
            else
                f_s = (f.at(i, j + 1) - f.at(i, j - 1)) / (2.0 * ds);
            double f_r = f_s / drds;
            double c = std::cos(g.theta(i)), s = std::sin(g.theta(i));
            gx.at(i, j) = f_r * c - f_th * s / r;
            gy.at(i, j) = f_r * s + f_th * c / r;
        }
    }

    // Axis value: least-squares linear fit through the first two rings with
    // Richardson elimination of the quadratic term.
    auto ring_moment = [&](int j, bool use_cos) {
        double acc = 0.0;
        for (int i = 0; i < nt; ++i)
            acc += f.at(i, j) * (use_cos ? std::cos(g.theta(i)) : std::sin(g.theta(i)));
        return 2.0 * acc / nt;
    };
    double r1 = g.r(1), r2 = g.r(2);
    double ax1 = ring_moment(1, true) / r1, ax2 = ring_moment(2, true) / r2;
    double ay1 = ring_moment(1, false) / r1, ay2 = ring_moment(2, false) / r2;
    double den = r2 * r2 - r1 * r1;
    double ax = (ax1 * r2 * r2 - ax2 * r1 * r1) / den;
    double ay = (ay1 * r2 * r2 - ay2 * r1 * r1) / den;
    for (int i = 0; i < nt; ++i) {
        gx.at(i, 0) = ax;
        gy.at(i, 0) = ay;
    }
}

}  // namespace

std::array<ScalarField2D, 2> gradient(const ScalarField2D& f) {
    std::array<ScalarField2D, 2> out{ScalarField2D(f.grid), ScalarField2D(f.grid)};
    if (f.grid.kind == GridKind::cartesian)
        gradient_cartesian(f, out[0], out[1]);
    else
        gradient_polar(f, out[0], out[1]);
    return out;
}

double grad_norm_l2(const VectorField2D& u, const AnnulusRegion& reg) {
    ScalarField2D c1(u.grid), c2(u.grid);
    c1.v = u.u1;
    c2.v = u.u2;
    auto g1 = gradient(c1);
    auto g2 = gradient(c2);
    double acc = 0.0;
    std::size_t count = for_region(u.grid, reg, [&](int i, int j, double w) {
        double a = g1[0].at(i, j), b = g1[1].at(i, j);
        double c = g2[0].at(i, j), d = g2[1].at(i, j);
        acc += w * (a * a + b * b + c * c + d * d);
    });
    require_nonempty(count);
    return std::sqrt(acc);
}

double norm_h1(const VectorField2D& u, const AnnulusRegion& reg) {
    return norm_l2(u, reg) + grad_norm_l2(u, reg);
}

ScalarField2D curl(const VectorField2D& u) {
    ScalarField2D c1(u.grid), c2(u.grid);
    c1.v = u.u1;
    c2.v = u.u2;
    auto g1 = gradient(c1);  // grad of u1
    auto g2 = gradient(c2);  // grad of u2
    ScalarField2D w(u.grid);
    for (std::size_t k = 0; k < w.v.size(); ++k) w.v[k] = g2[0].v[k] - g1[1].v[k];
    return w;
}

// ---- resampling ------------------------------------------------------------

namespace {

// Cubic Lagrange weights along one axis: the interpolant through four
// consecutive nodes reproduces cubic polynomials exactly, so resampling a
// smooth field onto another grid leaves an O(h^4) residual instead of the
// O(h^2) a linear blend would.  Near the edges the stencil slides inward and
// the same cubic is evaluated one-sidedly.
struct CubicAxis {
    int idx[4];
    double w[4];
};

CubicAxis cubic_axis(double f, int n) {
    f = std::clamp(f, 0.0, static_cast<double>(n - 1));
    int base = std::clamp(static_cast<int>(f), 1, n - 3);
    double t = f - base;  // in [-1, 2] only when the stencil was slid inward
    CubicAxis a;
    for (int k = 0; k < 4; ++k) a.idx[k] = base - 1 + k;
    a.w[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
    a.w[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    a.w[2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
    a.w[3] = (t + 1.0) * t * (t - 1.0) / 6.0;
    return a;
}

struct BicubicWeights {
    CubicAxis ax, ay;
};

BicubicWeights cartesian_weights(const GridSpec2D& g, double x, double y) {
    return {cubic_axis((x + g.L) / g.h() - 0.5, g.n),
            cubic_axis((y + g.L) / g.h() - 0.5, g.n)};
}

// ring pair and angular pair for a point inside the disk
struct PolarWeights {
    bool outside = false;
    int j0, j1, i0, i1;
    double wj, wi;
};

PolarWeights polar_weights(const GridSpec2D& g, double x, double y) {
    PolarWeights w;
    double r = std::hypot(x, y);
    if (r > g.R * (1.0 + 1e-12)) {
        w.outside = true;
        return w;
    }
    r = std::min(r, g.R);
    // binary search for the ring interval
    int lo = 0, hi = g.n_r;
    while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        (g.r(mid) <= r ? lo : hi) = mid;
    }
    w.j0 = lo;
    w.j1 = hi;
    double rl = g.r(lo), rh = g.r(hi);
    w.wj = (r - rl) / (rh - rl);
    double th = std::atan2(y, x);
    if (th < 0.0) th += 2.0 * pi;
    double ft = th / g.dtheta();
    w.i0 = static_cast<int>(ft) % g.n_theta;
    w.i1 = (w.i0 + 1) % g.n_theta;
    w.wi = ft - static_cast<int>(ft);
    return w;
}

template <class At>
double apply_cart(const BicubicWeights& w, At&& at) {
    double s = 0.0;
    for (int b = 0; b < 4; ++b) {
        double row = 0.0;
        for (int a = 0; a < 4; ++a) row += w.ax.w[a] * at(w.ax.idx[a], w.ay.idx[b]);
        s += w.ay.w[b] * row;
    }
    return s;
}

template <class At>
double apply_polar(const PolarWeights& w, At&& at) {
    return (1 - w.wi) * (1 - w.wj) * at(w.i0, w.j0) + w.wi * (1 - w.wj) * at(w.i1, w.j0) +
           (1 - w.wi) * w.wj * at(w.i0, w.j1) + w.wi * w.wj * at(w.i1, w.j1);
}

}  // namespace

double interp(const ScalarField2D& f, double x, double y) {
    if (f.grid.kind == GridKind::cartesian) {
        auto w = cartesian_weights(f.grid, x, y);
        return apply_cart(w, [&](int i, int j) { return f.at(i, j); });
    }
    auto w = polar_weights(f.grid, x, y);
    if (w.outside) return 0.0;
    return apply_polar(w, [&](int i, int j) { return f.at(i, j); });
}

std::array<double, 2> interp(const VectorField2D& u, double x, double y) {
    if (u.grid.kind == GridKind::cartesian) {
        auto w = cartesian_weights(u.grid, x, y);
        return {apply_cart(w, [&](int i, int j) { return u.u1[u.grid.idx(i, j)]; }),
                apply_cart(w, [&](int i, int j) { return u.u2[u.grid.idx(i, j)]; })};
    }
    auto w = polar_weights(u.grid, x, y);
    if (w.outside) return {0.0, 0.0};
    return {apply_polar(w, [&](int i, int j) { return u.u1[u.grid.idx(i, j)]; }),
            apply_polar(w, [&](int i, int j) { return u.u2[u.grid.idx(i, j)]; })};
}

VectorField2D extend_by_zero(const VectorField2D& disk_field, const GridSpec2D& target) {
    if (disk_field.grid.kind != GridKind::polar || target.kind != GridKind::cartesian)
        throw std::invalid_argument("extend_by_zero maps a polar field to a cartesian grid");
    VectorField2D out(target);
    for (int j = 0; j < target.n; ++j)
        for (int i = 0; i < target.n; ++i) {
            auto v = interp(disk_field, target.x(i), target.y(j));
            std::size_t k = target.idx(i, j);
            out.u1[k] = v[0];
            out.u2[k] = v[1];
        }
    return out;
}

ScalarField2D extend_by_zero(const ScalarField2D& disk_field, const GridSpec2D& target) {
    if (disk_field.grid.kind != GridKind::polar || target.kind != GridKind::cartesian)
        throw std::invalid_argument("extend_by_zero maps a polar field to a cartesian grid");
    ScalarField2D out(target);
    for (int j = 0; j < target.n; ++j)
        for (int i = 0; i < target.n; ++i) out.at(i, j) = interp(disk_field, target.x(i), target.y(j));
    return out;
}

VectorField2D restrict_to_polar(const VectorField2D& plane_field, const GridSpec2D& polar) {
    if (plane_field.grid.kind != GridKind::cartesian || polar.kind != GridKind::polar)
        throw std::invalid_argument("restrict_to_polar maps a cartesian field to a polar grid");
    VectorField2D out(polar);
    for (int j = 0; j <= polar.n_r; ++j)
        for (int i = 0; i < polar.n_theta; ++i) {
            auto p = polar.pos(i, j);
            auto v = interp(plane_field, p[0], p[1]);
            std::size_t k = polar.idx(i, j);
            out.u1[k] = v[0];
            out.u2[k] = v[1];
        }
    return out;
}

}  // namespace pv
