#pragma once
// Uniform node-centred grids (cartesian square and polar disk), sampled
// fields, and annular regions.

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace pv {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double infinity = std::numeric_limits<double>::infinity();

enum class GridKind : std::uint8_t { cartesian = 0, polar = 1 };

// Cartesian: the square [-L, L]^2 with n cells per axis, nodes at cell
// centres, spacing h = 2L/n.
// Polar: the disk of radius R; radii r_j = R * stretch_map(j / n_r) for
// j = 0..n_r (axis node at j = 0, boundary ring at j = n_r), n_theta
// equispaced angles. stretch > 0 clusters nodes toward the boundary.
struct GridSpec2D {
    GridKind kind = GridKind::cartesian;
    double L = 0.0;
    int n = 0;
    double R = 0.0;
    int n_r = 0;
    int n_theta = 0;
    double stretch = 0.0;

    static GridSpec2D make_cartesian(double L, int n);
    static GridSpec2D make_polar(double R, int n_r, int n_theta, double stretch = 1.2);

    double h() const { return 2.0 * L / n; }
    double x(int i) const { return -L + (i + 0.5) * h(); }
    double y(int j) const { return -L + (j + 0.5) * h(); }

    double dtheta() const { return 2.0 * pi / n_theta; }
    double theta(int i) const { return i * dtheta(); }
    double r(int j) const;            // stretched radius of ring j
    double drds(int j) const;         // d r / d s at ring j, s = j / n_r
    double ring_weight(int j) const;  // annular shell area / n_theta

    std::size_t node_count() const;
    std::size_t idx(int i, int j) const {
        return kind == GridKind::cartesian
                   ? static_cast<std::size_t>(j) * n + i
                   : static_cast<std::size_t>(j) * n_theta + i;  // j = ring
    }
    // node position (both kinds)
    std::array<double, 2> pos(int i, int j) const;

    bool operator==(const GridSpec2D& o) const;
};

struct AnnulusRegion {
    double r_inner = 0.0;
    double r_outer = infinity;  // infinity means the whole grid

    AnnulusRegion() = default;
    AnnulusRegion(double ri, double ro);
    bool contains(double r) const { return r >= r_inner && r < r_outer; }
    static AnnulusRegion all() { return AnnulusRegion(); }
    static AnnulusRegion disk(double r) { return AnnulusRegion(0.0, r); }
};

struct ScalarField2D {
    GridSpec2D grid;
    std::vector<double> v;

    ScalarField2D() = default;
    explicit ScalarField2D(const GridSpec2D& g, double fill = 0.0);
    double& at(int i, int j) { return v[grid.idx(i, j)]; }
    double at(int i, int j) const { return v[grid.idx(i, j)]; }
    void require_finite(const char* what) const;
};

// Components are cartesian (u1, u2) regardless of grid kind; polar-grid
// fields store the cartesian components at the polar nodes.
struct VectorField2D {
    GridSpec2D grid;
    std::vector<double> u1, u2;

    VectorField2D() = default;
    explicit VectorField2D(const GridSpec2D& g);
    void require_finite(const char* what) const;
};

}  // namespace pv
