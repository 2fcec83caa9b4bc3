#include "planevortex/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace pv {

GridSpec2D GridSpec2D::make_cartesian(double L, int n) {
    if (!(L > 0.0) || n < 2)
        throw std::invalid_argument("cartesian grid needs L > 0 and n >= 2");
    GridSpec2D g;
    g.kind = GridKind::cartesian;
    g.L = L;
    g.n = n;
    return g;
}

GridSpec2D GridSpec2D::make_polar(double R, int n_r, int n_theta, double stretch) {
    if (!(R > 0.0) || n_r < 2 || n_theta < 4 || n_theta % 2 != 0)
        throw std::invalid_argument("polar grid needs R > 0, n_r >= 2, even n_theta >= 4");
    GridSpec2D g;
    g.kind = GridKind::polar;
    g.R = R;
    g.n_r = n_r;
    g.n_theta = n_theta;
    g.stretch = stretch;
    return g;
}

// s in [0,1] -> [0,1], monotone, contracting spacing near s = 1.
static double stretch_map(double s, double a) {
    if (a <= 0.0) return s;
    return std::tanh(a * s) / std::tanh(a);
}

static double stretch_map_deriv(double s, double a) {
    if (a <= 0.0) return 1.0;
    double c = std::cosh(a * s);
    return a / (std::tanh(a) * c * c);
}

double GridSpec2D::r(int j) const {
    return R * stretch_map(static_cast<double>(j) / n_r, stretch);
}

double GridSpec2D::drds(int j) const {
    return R * stretch_map_deriv(static_cast<double>(j) / n_r, stretch);
}

double GridSpec2D::ring_weight(int j) const {
    // shell between the radial midpoints; outermost shell extends to R,
    // innermost collapses to the axis
    double lo = (j == 0) ? 0.0 : 0.5 * (r(j - 1) + r(j));
    double hi = (j == n_r) ? R : 0.5 * (r(j) + r(j + 1));
    return 0.5 * (hi * hi - lo * lo) * dtheta();
}

std::size_t GridSpec2D::node_count() const {
    return kind == GridKind::cartesian
               ? static_cast<std::size_t>(n) * n
               : static_cast<std::size_t>(n_r + 1) * n_theta;
}

std::array<double, 2> GridSpec2D::pos(int i, int j) const {
    if (kind == GridKind::cartesian) return {x(i), y(j)};
    double rr = r(j), th = theta(i);
    return {rr * std::cos(th), rr * std::sin(th)};
}

bool GridSpec2D::operator==(const GridSpec2D& o) const {
    if (kind != o.kind) return false;
    if (kind == GridKind::cartesian) return L == o.L && n == o.n;
    return R == o.R && n_r == o.n_r && n_theta == o.n_theta && stretch == o.stretch;
}

AnnulusRegion::AnnulusRegion(double ri, double ro) : r_inner(ri), r_outer(ro) {
    if (ri < 0.0 || !(ro > ri)) throw std::invalid_argument("bad annulus bounds");
}

ScalarField2D::ScalarField2D(const GridSpec2D& g, double fill)
    : grid(g), v(g.node_count(), fill) {}

void ScalarField2D::require_finite(const char* what) const {
    for (double x : v)
        if (!std::isfinite(x)) throw std::runtime_error(std::string(what) + ": non-finite value");
}

VectorField2D::VectorField2D(const GridSpec2D& g)
    : grid(g), u1(g.node_count(), 0.0), u2(g.node_count(), 0.0) {}

void VectorField2D::require_finite(const char* what) const {
    for (double x : u1)
        if (!std::isfinite(x)) throw std::runtime_error(std::string(what) + ": non-finite value");
    for (double x : u2)
        if (!std::isfinite(x)) throw std::runtime_error(std::string(what) + ": non-finite value");
}

}  // namespace pv
