#pragma once
// Free-space velocity recovery u = K * omega on cartesian grids, via
// zero-padded FFT convolution against sampled kernels, plus an independent
// O(n^4) direct-quadrature oracle.

#include <complex>
#include <vector>

#include "planevortex/fields.hpp"
#include "planevortex/grid.hpp"

namespace pv {

struct BiotSavartPlan {
    GridSpec2D grid;
    int padded = 0;  // transform size per axis, = 2n
    // spectra of the sampled kernels on the padded grid
    std::vector<std::complex<double>> K1hat, K2hat;  // velocity kernel, centre offsets
    std::vector<std::complex<double>> Ghat_centre;   // log kernel, centre offsets
    std::vector<std::complex<double>> Ghat_corner;   // log kernel, corner-to-centre offsets
};

BiotSavartPlan make_plan(const GridSpec2D& grid);

// Process-wide plan cache keyed by grid geometry; thread-safe, plans live for
// the process lifetime. Concurrent applies on one plan are fine.
const BiotSavartPlan& shared_plan(const GridSpec2D& grid);

// u = K * omega with K(x) = (1/2pi) (-x2, x1)/|x|^2. Warns on stderr when the
// vorticity carries mass outside 0.9 of the grid extent; throws on non-finite
// input.
VectorField2D biot_savart(const ScalarField2D& omega, const BiotSavartPlan& plan);

// Direct double-sum quadrature, singular cell skipped. Only for n <= 128.
VectorField2D biot_savart_direct(const ScalarField2D& omega);

// psi = G * omega with G = (1/2pi) log|x| at cell centres; the singular
// origin cell uses the exact cell average of G.
ScalarField2D stream_function(const ScalarField2D& omega, const BiotSavartPlan& plan);

// psi sampled at the (n+1)^2 cell corners (row-major, index j*(n+1)+i).
// Corner-to-centre displacements are half-integral, so no kernel sample is
// singular; differencing these values along cell edges yields face-normal
// velocities whose discrete divergence vanishes identically.
std::vector<double> stream_corners(const ScalarField2D& omega, const BiotSavartPlan& plan);

}  // namespace pv
