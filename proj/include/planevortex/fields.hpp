#pragma once
// Quadrature, norms, derivatives, and resampling for sampled fields.

#include <array>

#include "planevortex/grid.hpp"

namespace pv {

// Midpoint quadrature weight of node (i, j).
double node_weight(const GridSpec2D& g, int i, int j);

// Plain quadrature of f over a region (node-centre membership test).
double integral(const ScalarField2D& f, const AnnulusRegion& reg = AnnulusRegion::all());

// L^p norm over a region, p in [1, inf]. p = pv::infinity takes the max of
// |f| over region nodes. Throws "empty region" when no node lies inside.
double norm_lp(const ScalarField2D& f, double p,
               const AnnulusRegion& reg = AnnulusRegion::all());
double norm_lp(const VectorField2D& u, double p,
               const AnnulusRegion& reg = AnnulusRegion::all());

double norm_l2(const ScalarField2D& f, const AnnulusRegion& reg = AnnulusRegion::all());
double norm_l2(const VectorField2D& u, const AnnulusRegion& reg = AnnulusRegion::all());

// L^2 inner products over a region.
double ip_l2(const ScalarField2D& a, const ScalarField2D& b,
             const AnnulusRegion& reg = AnnulusRegion::all());
double ip_l2(const VectorField2D& a, const VectorField2D& b,
             const AnnulusRegion& reg = AnnulusRegion::all());

// Cartesian gradient components of a scalar field, second order (centred in
// the interior, one-sided at grid edges, parity ghosts across the polar axis).
std::array<ScalarField2D, 2> gradient(const ScalarField2D& f);

// L^2 norm of the full velocity gradient (Frobenius) over a region.
double grad_norm_l2(const VectorField2D& u, const AnnulusRegion& reg = AnnulusRegion::all());

// ||u||_{L^2} + ||grad u||_{L^2} over a region (a sum, not a square root of
// a sum of squares).
double norm_h1(const VectorField2D& u, const AnnulusRegion& reg = AnnulusRegion::all());

// Scalar vorticity curl u = d1 u2 - d2 u1.
ScalarField2D curl(const VectorField2D& u);

// Bilinear samplers. Cartesian lookups clamp to the grid box; polar lookups
// interpolate in (radius, angle) and return 0 outside the disk.
double interp(const ScalarField2D& f, double x, double y);
std::array<double, 2> interp(const VectorField2D& u, double x, double y);

// Resample a polar-grid field onto a cartesian grid, zero outside the disk.
VectorField2D extend_by_zero(const VectorField2D& disk_field, const GridSpec2D& target);
ScalarField2D extend_by_zero(const ScalarField2D& disk_field, const GridSpec2D& target);

// Evaluate a cartesian-grid field at the nodes of a polar grid.
VectorField2D restrict_to_polar(const VectorField2D& plane_field, const GridSpec2D& polar);

}  // namespace pv
