#include "planevortex/snapshot.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace pv {

namespace {

// x86-64 is little-endian; raw writes of u64/f64 match the on-disk format.
void put_u64(std::ofstream& os, std::uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_f64(std::ofstream& os, double v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
std::uint64_t get_u64(std::ifstream& is) {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}
double get_f64(std::ifstream& is) {
    double v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

void write_header(std::ofstream& os, const GridSpec2D& g, std::uint64_t ncomp) {
    os.write("PVF1", 4);
    if (g.kind == GridKind::cartesian) {
        put_u64(os, 0);
        put_f64(os, g.L);
        put_u64(os, static_cast<std::uint64_t>(g.n));
        put_u64(os, static_cast<std::uint64_t>(g.n));
    } else {
        put_u64(os, 1);
        put_f64(os, g.R);
        put_u64(os, static_cast<std::uint64_t>(g.n_r));
        put_u64(os, static_cast<std::uint64_t>(g.n_theta));
    }
    put_u64(os, ncomp);
}

void write_sidecar(const std::string& path, const GridSpec2D& g, const SnapshotMeta& meta) {
    nlohmann::json j;
    j["time"] = meta.time;
    j["nu"] = meta.nu;
    j["label"] = meta.label;
    if (g.kind == GridKind::polar) j["stretch"] = g.stretch;
    std::ofstream os(path + ".json");
    if (!os) throw std::runtime_error("cannot write " + path + ".json");
    os << j.dump(2) << "\n";
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    return os;
}

void put_block(std::ofstream& os, const std::vector<double>& v) {
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
}

}  // namespace

void write_snapshot(const std::string& path, const ScalarField2D& f, const SnapshotMeta& meta) {
    auto os = open_out(path);
    write_header(os, f.grid, 1);
    put_block(os, f.v);
    if (!os) throw std::runtime_error("write failed: " + path);
    write_sidecar(path, f.grid, meta);
}

void write_snapshot(const std::string& path, const VectorField2D& u, const SnapshotMeta& meta) {
    auto os = open_out(path);
    write_header(os, u.grid, 2);
    put_block(os, u.u1);
    put_block(os, u.u2);
    if (!os) throw std::runtime_error("write failed: " + path);
    write_sidecar(path, u.grid, meta);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path);
    char magic[4] = {};
    is.read(magic, 4);
    if (std::memcmp(magic, "PVF1", 4) != 0) throw std::runtime_error("bad snapshot magic");
    std::uint64_t kind = get_u64(is);
    double len = get_f64(is);
    std::uint64_t n1 = get_u64(is), n2 = get_u64(is), ncomp = get_u64(is);
    if (kind > 1 || ncomp < 1 || ncomp > 2) throw std::runtime_error("bad snapshot header");

    Snapshot snap;
    snap.ncomp = static_cast<int>(ncomp);

    // sidecar first: the polar stretch lives there
    double stretch = 1.2;
    {
        std::ifstream js(path + ".json");
        if (js) {
            nlohmann::json j = nlohmann::json::parse(js, nullptr, false);
            if (!j.is_discarded()) {
                snap.meta.time = j.value("time", 0.0);
                snap.meta.nu = j.value("nu", 0.0);
                snap.meta.label = j.value("label", std::string());
                stretch = j.value("stretch", stretch);
            }
        }
    }

    snap.grid = (kind == 0)
                    ? GridSpec2D::make_cartesian(len, static_cast<int>(n1))
                    : GridSpec2D::make_polar(len, static_cast<int>(n1), static_cast<int>(n2), stretch);

    std::size_t count = snap.grid.node_count();
    auto read_block = [&](std::vector<double>& v) {
        v.resize(count);
        is.read(reinterpret_cast<char*>(v.data()),
                static_cast<std::streamsize>(count * sizeof(double)));
        if (!is) throw std::runtime_error("truncated snapshot: " + path);
    };
    if (ncomp == 1) {
        ScalarField2D f(snap.grid);
        read_block(f.v);
        snap.scalar = std::move(f);
    } else {
        VectorField2D u(snap.grid);
        read_block(u.u1);
        read_block(u.u2);
        snap.vector = std::move(u);
    }
    return snap;
}

}  // namespace pv
