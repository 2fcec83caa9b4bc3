#pragma once
// Binary field snapshots.
//
// Layout (all integers unsigned 64-bit little-endian, floats IEEE double LE):
//   bytes 0..3   magic "PVF1"
//   u64          grid kind (0 cartesian, 1 polar)
//   f64          L (cartesian) or R (polar)
//   u64          n1 (cartesian n, polar n_r)
//   u64          n2 (cartesian n, polar n_theta)
//   u64          ncomp (1 scalar, 2 vector)
//   f64[...]     ncomp blocks of row-major node values
// A JSON sidecar is written next to the file at <path>.json carrying the
// metadata (time, nu, label) plus the polar stretch parameter when needed.

#include <optional>
#include <string>

#include <json.hpp>

#include "planevortex/grid.hpp"

namespace pv {

struct SnapshotMeta {
    double time = 0.0;
    double nu = 0.0;
    std::string label;
};

void write_snapshot(const std::string& path, const ScalarField2D& f, const SnapshotMeta& meta);
void write_snapshot(const std::string& path, const VectorField2D& u, const SnapshotMeta& meta);

struct Snapshot {
    GridSpec2D grid;
    int ncomp = 0;
    std::optional<ScalarField2D> scalar;
    std::optional<VectorField2D> vector;
    SnapshotMeta meta;
};

Snapshot read_snapshot(const std::string& path);

}  // namespace pv
