#include "planevortex/studies.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "planevortex/biot_savart.hpp"
#include "planevortex/fields.hpp"
#include "planevortex/operators.hpp"
#include "planevortex/parallel.hpp"
#include "planevortex/snapshot.hpp"
#include "planevortex/solver_plane.hpp"
#include "planevortex/stationary.hpp"
#include "planevortex/statistics.hpp"
#include "planevortex/verification.hpp"

namespace pv {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

// Malformed config (wrong shape or type) -> exit 2, before any artifact.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// Well-formed config with out-of-range values -> exit 4.
struct ParamError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fnv_hash_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// Typed config access; every read value is echoed into the summary record.

class Params {
  public:
    explicit Params(const json& j) : j_(j) {}

    double num(const std::string& key, double fallback) const {
        if (!j_.contains(key)) {
            note(key, fallback);
            return fallback;
        }
        const json& v = j_.at(key);
        if (v.is_number()) {
            double d = v.get<double>();
            note(key, d);
            return d;
        }
        if (v.is_string() && v.get<std::string>() == "inf") {
            note(key, "inf");
            return infinity;
        }
        throw ConfigError("key '" + key + "' must be a number");
    }

    int whole(const std::string& key, int fallback) const {
        if (!j_.contains(key)) {
            note(key, fallback);
            return fallback;
        }
        const json& v = j_.at(key);
        if (!v.is_number()) throw ConfigError("key '" + key + "' must be an integer");
        double d = v.get<double>();
        int k = static_cast<int>(std::llround(d));
        if (d != static_cast<double>(k)) throw ConfigError("key '" + key + "' must be an integer");
        note(key, k);
        return k;
    }

    bool flag(const std::string& key, bool fallback) const {
        if (!j_.contains(key)) {
            note(key, fallback);
            return fallback;
        }
        const json& v = j_.at(key);
        if (!v.is_boolean()) throw ConfigError("key '" + key + "' must be true or false");
        bool b = v.get<bool>();
        note(key, b);
        return b;
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
        if (!j_.contains(key)) {
            note_list(key, fallback);
            return fallback;
        }
        const json& v = j_.at(key);
        if (!v.is_array()) throw ConfigError("key '" + key + "' must be an array of numbers");
        std::vector<double> out;
        for (const json& e : v) {
            if (e.is_number())
                out.push_back(e.get<double>());
            else if (e.is_string() && e.get<std::string>() == "inf")
                out.push_back(infinity);
            else
                throw ConfigError("key '" + key + "' must be an array of numbers");
        }
        echo_[key] = v;
        return out;
    }

    // Seeds are mandatory wherever random sampling happens; CLI --seed wins.
    std::uint64_t seed_value(const StudyOptions& opt, bool required) const {
        if (opt.override_seed) {
            note(key_seed, opt.seed);
            return opt.seed;
        }
        if (!j_.contains(key_seed)) {
            if (required) throw ParamError("a 'seed' is required for deterministic sampling");
            note(key_seed, 0);
            return 0;
        }
        const json& v = j_.at(key_seed);
        if (!v.is_number_integer()) throw ConfigError("key 'seed' must be an integer");
        if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)
            throw ConfigError("key 'seed' must be non-negative");
        std::uint64_t s = v.get<std::uint64_t>();
        note(key_seed, s);
        return s;
    }

    const json& echo() const { return echo_; }

  private:
    template <typename T>
    void note(const std::string& k, const T& v) const {
        echo_[k] = v;
    }
    void note_list(const std::string& k, const std::vector<double>& v) const {
        json a = json::array();
        for (double d : v) {
            if (std::isinf(d))
                a.push_back("inf");
            else
                a.push_back(d);
        }
        echo_[k] = a;
    }

    static constexpr const char* key_seed = "seed";
    const json& j_;
    mutable json echo_ = json::object();
};

// ---------------------------------------------------------------------------
// CSV assembly (%.17g text, fixed row order -> bit-identical reruns).

class Csv {
  public:
    explicit Csv(std::string header) : text_(std::move(header)) { text_ += '\n'; }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) text_ += ',';
            text_ += cells[i];
        }
        text_ += '\n';
    }

    void nrow(std::initializer_list<double> cells) {
        std::vector<std::string> c;
        for (double d : cells) c.push_back(fmt17(d));
        row(c);
    }

    const std::string& text() const { return text_; }

  private:
    std::string text_;
};

// ---------------------------------------------------------------------------
// Per-run context: parameter echo, artifact directory, wall clock.

struct Ctx {
    Params p;
    const StudyOptions& opt;
    StudyResult& res;
    json details = json::object();
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    Ctx(const json& cfg, const StudyOptions& o, StudyResult& r) : p(cfg), opt(o), res(r) {}

    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }

    // The directory appears only once a study survived validation.
    void ensure_dir() {
        if (!res.out_dir.empty()) return;
        std::filesystem::path d = std::filesystem::path(opt.out_root) / res.study;
        std::filesystem::create_directories(d);
        res.out_dir = d.string();
    }

    std::string path_of(const std::string& name) {
        ensure_dir();
        return (std::filesystem::path(res.out_dir) / name).string();
    }

    void save_text(const std::string& name, const std::string& text) {
        std::ofstream out(path_of(name), std::ios::binary);
        if (!out) throw std::runtime_error("cannot write artifact " + name);
        out << text;
        res.artifacts.push_back(name);
    }

    void save_csv(const std::string& name, const Csv& csv) { save_text(name, csv.text()); }
};

// ---------------------------------------------------------------------------
// Criterion helpers. Margins are relative headroom: positive iff satisfied.

CriterionResult crit_upper(const std::string& name, double measured, double limit) {
    CriterionResult c;
    c.name = name;
    c.measured = measured;
    c.limit = limit;
    c.pass = measured <= limit;
    c.margin = limit != 0.0 ? 1.0 - measured / limit : -measured;
    return c;
}

CriterionResult crit_lower(const std::string& name, double measured, double limit) {
    CriterionResult c;
    c.name = name;
    c.measured = measured;
    c.limit = limit;
    c.pass = measured >= limit;
    c.margin = limit != 0.0 ? measured / limit - 1.0 : measured;
    return c;
}

// Strict decrease down a column; measured = worst adjacent ratio (next/prev).
CriterionResult crit_decreasing(const std::string& name, const std::vector<double>& col) {
    CriterionResult c;
    c.name = name;
    c.limit = 1.0;
    c.pass = col.size() >= 2;
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < col.size(); ++i) {
        if (!(col[i + 1] < col[i])) c.pass = false;
        if (col[i] > 0.0) worst = std::max(worst, col[i + 1] / col[i]);
    }
    c.measured = worst;
    c.margin = 1.0 - worst;
    return c;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ParamError(what);
}

// ---------------------------------------------------------------------------
// Shared experiment ingredients.

double sq(double v) { return v * v; }

// [0,1) doubles straight off the engine, so sequences do not depend on any
// library's distribution internals.
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
double draw_in(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * unit_draw(rng);
}

// Mollified vortex patch: amp/2 (1 - tanh((|x-c| - r0)/edge)).
struct Patch {
    double cx = 0.0, cy = 0.0, r0 = 1.0, amp = 1.0, edge = 0.15;
};

double patch_omega(const Patch& p, double x, double y) {
    double d = std::hypot(x - p.cx, y - p.cy);
    return p.amp * 0.5 * (1.0 - std::tanh((d - p.r0) / p.edge));
}

ScalarField2D sample_patch_vorticity(const GridSpec2D& g, const std::vector<Patch>& ps,
                                     double m_sigma = 0.0) {
    const StationaryVortex& vx = default_vortex();
    ScalarField2D w(g);
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.n; ++i) {
            double x = g.x(i), y = g.y(j);
            double acc = 0.0;
            for (const Patch& p : ps) acc += patch_omega(p, x, y);
            if (m_sigma != 0.0) acc += m_sigma * vx.omega(std::hypot(x, y));
            w.at(i, j) = acc;
        }
    return w;
}

std::vector<Patch> random_patches(std::uint64_t seed, int count, double spread, double r_lo,
                                  double r_hi, double a_lo, double a_hi, double edge_frac) {
    std::mt19937_64 rng(seed);
    std::vector<Patch> out;
    for (int k = 0; k < count; ++k) {
        Patch p;
        double ang = draw_in(rng, 0.0, 2.0 * kPi);
        double rad = spread * std::sqrt(unit_draw(rng));
        p.cx = rad * std::cos(ang);
        p.cy = rad * std::sin(ang);
        p.r0 = draw_in(rng, r_lo, r_hi);
        p.amp = draw_in(rng, a_lo, a_hi);
        p.edge = edge_frac * p.r0;
        out.push_back(p);
    }
    return out;
}

// One random patch per member, uniform weights; optional per-member sigma
// component cycling through m_values.
Ensemble patch_ensemble(const GridSpec2D& g, std::uint64_t seed, int count, double spread,
                        double r_lo, double r_hi, double a_lo, double a_hi,
                        const std::vector<double>& m_values = {}) {
    std::vector<Patch> ps = random_patches(seed, count, spread, r_lo, r_hi, a_lo, a_hi, 0.12);
    std::vector<EnsembleMember> mem;
    for (int k = 0; k < count; ++k) {
        double msig = m_values.empty() ? 0.0 : m_values[static_cast<std::size_t>(k) % m_values.size()];
        EnsembleMember em;
        em.weight = 1.0 / count;
        em.state = make_state(sample_patch_vorticity(g, {ps[static_cast<std::size_t>(k)]}, msig));
        mem.push_back(std::move(em));
    }
    return make_ensemble(std::move(mem));
}

// Member snapshots plus the manifest (paths, weights, config hash).
void write_ensemble_artifacts(Ctx& ctx, const Ensemble& mu, double nu, const json& config) {
    json manifest;
    manifest["config_hash"] = fnv_hash_hex(config.dump());
    json members = json::array();
    for (std::size_t k = 0; k < mu.members.size(); ++k) {
        char name[64];
        std::snprintf(name, sizeof name, "member-%03zu.pvf", k);
        SnapshotMeta meta;
        meta.time = mu.t;
        meta.nu = nu;
        meta.label = "initial vorticity, member " + std::to_string(k);
        write_snapshot(ctx.path_of(name), mu.members[k].state.omega, meta);
        ctx.res.artifacts.push_back(name);
        ctx.res.artifacts.push_back(std::string(name) + ".json");
        members.push_back({{"path", name}, {"weight", mu.members[k].weight}});
    }
    manifest["members"] = members;
    ctx.save_text("manifest.json", manifest.dump(2) + "\n");
}

// Two fixed bump generators inside the inner half of every grid we ship.
std::vector<BumpSpec> default_generators(double shrink = 1.0) {
    return {{0.8 * shrink, 0.3 * shrink, 1.2 * shrink, 1.0},
            {-0.7 * shrink, -0.5 * shrink, 1.0 * shrink, 0.8}};
}

std::vector<double> uniform_times(double t0, double T, int count) {
    std::vector<double> out;
    for (int k = 0; k <= count; ++k) out.push_back(t0 + T * k / count);
    return out;
}

// ---------------------------------------------------------------------------
// Study 1: fast Biot-Savart against the direct kernel sum.

void run_biot_savart_oracle(Ctx& ctx) {
    int n = ctx.p.whole("n", 32);
    double L = ctx.p.num("extent", 2.0);
    int blobs = ctx.p.whole("blobs", 4);
    double tol = ctx.p.num("tolerance", 1e-8);
    double budget = ctx.p.num("time_budget_seconds", 5.0);
    std::uint64_t seed = ctx.p.seed_value(ctx.opt, true);
    require(n >= 4 && n <= 256, "n must lie in [4, 256] for the direct-sum oracle");
    require(L > 0.0, "extent must be positive");
    require(blobs >= 1 && blobs <= 64, "blobs must lie in [1, 64]");
    require(tol > 0.0 && budget > 0.0, "tolerance and time budget must be positive");

    GridSpec2D g = GridSpec2D::make_cartesian(L, n);
    std::mt19937_64 rng(seed);
    struct Blob {
        double cx, cy, r, a;
    };
    std::vector<Blob> bs;
    for (int k = 0; k < blobs; ++k) {
        Blob b;
        b.cx = draw_in(rng, -0.45 * L, 0.45 * L);
        b.cy = draw_in(rng, -0.45 * L, 0.45 * L);
        b.r = draw_in(rng, 0.15 * L, 0.3 * L);
        b.a = draw_in(rng, -1.0, 1.0);
        bs.push_back(b);
    }
    ScalarField2D w(g);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (const Blob& b : bs) {
                double q = (sq(g.x(i) - b.cx) + sq(g.y(j) - b.cy)) / (b.r * b.r);
                if (q < 1.0) acc += b.a * (1.0 - q) * (1.0 - q) * (1.0 - q);
            }
            w.at(i, j) = acc;
        }

    VectorField2D fast = biot_savart(w, shared_plan(g));
    VectorField2D direct = biot_savart_direct(w);
    VectorField2D diff(g);
    for (std::size_t k = 0; k < diff.u1.size(); ++k) {
        diff.u1[k] = fast.u1[k] - direct.u1[k];
        diff.u2[k] = fast.u2[k] - direct.u2[k];
    }
    double rel = norm_l2(diff) / std::max(norm_l2(direct), 1e-300);

    Csv csv("n,extent,blobs,rel_l2");
    csv.nrow({static_cast<double>(n), L, static_cast<double>(blobs), rel});
    ctx.save_csv("oracle.csv", csv);

    ctx.res.criteria.push_back(crit_upper("relative_l2", rel, tol));
    ctx.res.criteria.push_back(crit_upper("runtime_seconds", ctx.elapsed(), budget));
}

// ---------------------------------------------------------------------------
// Study 2: projection error law against the annulus profile bound.

void run_projection_error(Ctx& ctx) {
    double L = ctx.p.num("extent", 20.0);
    int n = ctx.p.whole("n", 512);
    double m = ctx.p.num("m", 5.0);
    std::vector<double> Rs = ctx.p.numbers("radii", {4.0, 8.0, 16.0});
    double cmax = ctx.p.num("constant_limit", 4.0);
    require(L > 0.0, "extent must be positive");
    require(n >= 64 && n <= 2048, "n must lie in [64, 2048]");
    require(Rs.size() >= 2, "need at least two radii");
    for (std::size_t i = 0; i < Rs.size(); ++i) {
        require(Rs[i] >= 2.0, "every radius must be at least 2");
        if (i) require(Rs[i] > Rs[i - 1], "radii must be strictly increasing");
    }
    require(Rs.back() <= 0.9 * L, "largest radius must stay inside 0.9 of the extent");
    require(cmax > 0.0, "constant_limit must be positive");

    GridSpec2D g = GridSpec2D::make_cartesian(L, n);
    const StationaryVortex& vx = default_vortex();
    VectorField2D u = eval_sigma_m(vx, m, g);
    std::vector<ProjectionErrorRow> rows = projection_error_report(u, vx, Rs);

    write_projection_error_csv(ctx.path_of("projection-error.csv"), rows);
    ctx.res.artifacts.push_back("projection-error.csv");

    double worst_c = 0.0;
    std::vector<double> errs;
    for (const ProjectionErrorRow& r : rows) {
        errs.push_back(r.err_h1);
        double beta = std::sqrt(sigma1_annulus_h1_sq(r.R));
        worst_c = std::max(worst_c, r.err_h1 / (5.0 * beta));
    }
    ctx.details["measured_constant"] = worst_c;
    ctx.res.criteria.push_back(crit_upper("projection_constant", worst_c, cmax));
    ctx.res.criteria.push_back(crit_decreasing("error_decreasing", errs));
}

// ---------------------------------------------------------------------------
// Study 3: radial Gaussian under viscosity against the heat-evolved profile.

void run_lamb_oseen(Ctx& ctx) {
    double nu = ctx.p.num("nu", 1e-2);
    double t = ctx.p.num("t", 1.0);
    int n = ctx.p.whole("n", 256);
    double L = ctx.p.num("extent", 6.0);
    double amp = ctx.p.num("amplitude", 1.0);
    double core = ctx.p.num("core", 1.0);
    double dt = ctx.p.num("dt", 5e-3);
    bool limiter = ctx.p.flag("limiter", false);
    int samples = ctx.p.whole("samples", 4);
    double tol = ctx.p.num("tolerance", 1e-4);
    double budget = ctx.p.num("time_budget_seconds", 120.0);
    require(nu > 0.0, "nu must be positive");
    require(t > 0.0 && dt > 0.0 && dt <= t, "need 0 < dt <= t");
    require(n >= 32 && n <= 2048, "n must lie in [32, 2048]");
    require(L > 0.0 && core > 0.0, "extent and core must be positive");
    require(L >= 4.0 * core, "extent must cover at least four core radii");
    require(samples >= 1 && samples <= 256, "samples must lie in [1, 256]");
    require(tol > 0.0 && budget > 0.0, "tolerance and time budget must be positive");

    GridSpec2D g = GridSpec2D::make_cartesian(L, n);
    ScalarField2D w0(g);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            w0.at(i, j) = amp * std::exp(-(sq(g.x(i)) + sq(g.y(j))) / sq(core));

    SolverConfig cfg;
    cfg.nu = nu;
    cfg.dt = dt;
    cfg.use_limiter = limiter;
    std::vector<double> times;
    for (int k = 1; k <= samples; ++k) times.push_back(t * k / samples);
    Trajectory traj = solve(make_state(w0), cfg, times);

    Csv csv("t,rel_l2");
    double final_rel = 0.0;
    for (const PlaneState& s : traj.states) {
        double s2 = sq(core) + 4.0 * nu * s.t;
        ScalarField2D diff(g);
        double num = 0.0, den = 0.0;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                double exact = amp * sq(core) / s2 * std::exp(-(sq(g.x(i)) + sq(g.y(j))) / s2);
                double d = s.omega.at(i, j) - exact;
                num += d * d;
                den += exact * exact;
            }
        double rel = std::sqrt(num / std::max(den, 1e-300));
        csv.nrow({s.t, rel});
        final_rel = rel;
    }
    ctx.save_csv("profile-error.csv", csv);

    SnapshotMeta meta;
    meta.time = traj.states.back().t;
    meta.nu = nu;
    meta.label = "vorticity at the final time";
    write_snapshot(ctx.path_of("omega-final.pvf"), traj.states.back().omega, meta);
    ctx.res.artifacts.push_back("omega-final.pvf");
    ctx.res.artifacts.push_back("omega-final.pvf.json");

    ctx.res.criteria.push_back(crit_upper("relative_l2", final_rel, tol));
    ctx.res.criteria.push_back(crit_upper("runtime_seconds", ctx.elapsed(), budget));
}

// ---------------------------------------------------------------------------
// Study 4: radial data is an Euler steady state; drift must stay tiny.

void run_radial_euler(Ctx& ctx) {
    int n = ctx.p.whole("n", 384);
    double L = ctx.p.num("extent", 2.0);
    double t = ctx.p.num("t", 1.0);
    double dt = ctx.p.num("dt", 4e-3);
    double m = ctx.p.num("m", 1.0);
    bool limiter = ctx.p.flag("limiter", false);
    int samples = ctx.p.whole("samples", 4);
    double tol = ctx.p.num("tolerance", 1e-5);
    require(n >= 32 && n <= 2048, "n must lie in [32, 2048]");
    require(L >= 1.5, "extent must cover the unit-disc profile with margin");
    require(t > 0.0 && dt > 0.0 && dt <= t, "need 0 < dt <= t");
    require(m != 0.0, "m must be nonzero");
    require(samples >= 1 && samples <= 256, "samples must lie in [1, 256]");
    require(tol > 0.0, "tolerance must be positive");

    GridSpec2D g = GridSpec2D::make_cartesian(L, n);
    const StationaryVortex& vx = default_vortex();
    ScalarField2D w0(g);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            w0.at(i, j) = m * vx.omega(std::hypot(g.x(i), g.y(j)));
    double base = norm_l2(w0);

    SolverConfig cfg;
    cfg.dt = dt;
    cfg.use_limiter = limiter;
    std::vector<double> times;
    for (int k = 1; k <= samples; ++k) times.push_back(t * k / samples);
    Trajectory traj = solve_euler(make_state(w0), cfg, times);

    Csv csv("t,rel_change");
    double final_rel = 0.0;
    for (const PlaneState& s : traj.states) {
        double acc = 0.0;
        for (std::size_t k = 0; k < w0.v.size(); ++k) acc += sq(s.omega.v[k] - w0.v[k]);
        double rel = std::sqrt(acc) * g.h() / base;
        csv.nrow({s.t, rel});
        final_rel = rel;
    }
    ctx.save_csv("stationarity.csv", csv);

    SnapshotMeta meta;
    meta.time = traj.states.back().t;
    meta.label = "vorticity at the final time";
    write_snapshot(ctx.path_of("omega-final.pvf"), traj.states.back().omega, meta);
    ctx.res.artifacts.push_back("omega-final.pvf");
    ctx.res.artifacts.push_back("omega-final.pvf.json");

    ctx.res.criteria.push_back(crit_upper("relative_drift", final_rel, tol));
}

// ---------------------------------------------------------------------------
// Study 5: disk solutions approach the whole-plane solution as R grows.

void run_expanding_domain(Ctx& ctx) {
    double L = ctx.p.num("extent", 20.0);
    int n = ctx.p.whole("n", 512);
    double nu = ctx.p.num("nu", 1e-2);
    double T = ctx.p.num("t", 0.5);
    double dt = ctx.p.num("dt", 1e-2);
    int n_samples = ctx.p.whole("samples", 8);
    std::vector<double> Rs = ctx.p.numbers("radii", {4.0, 8.0, 16.0});
    double amp = ctx.p.num("patch_amplitude", 6.0);
    double r0 = ctx.p.num("patch_radius", 0.5);
    double off = ctx.p.num("patch_offset", 0.25);
    double sep = ctx.p.num("patch_separation", 0.6);
    bool dipole = ctx.p.flag("dipole", true);
    double drop = ctx.p.num("drop_limit", 0.5);
    double budget = ctx.p.num("time_budget_seconds", 900.0);
    require(L > 0.0 && n >= 64 && n <= 2048, "need extent > 0 and n in [64, 2048]");
    require(nu > 0.0, "nu must be positive for the no-slip comparison");
    require(T > 0.0 && dt > 0.0 && dt <= T, "need 0 < dt <= t");
    require(n_samples >= 2 && n_samples <= 64, "samples must lie in [2, 64]");
    require(Rs.size() >= 2, "need at least two radii");
    for (std::size_t i = 0; i < Rs.size(); ++i) {
        require(Rs[i] >= 2.0, "every radius must be at least 2");
        if (i) require(Rs[i] > Rs[i - 1], "radii must be strictly increasing");
    }
    require(Rs.back() <= 0.9 * L, "largest radius must stay inside 0.9 of the extent");
    require(r0 > 0.0 && amp != 0.0, "patch must have positive radius and nonzero amplitude");
    require(sep >= 0.0, "patch_separation must be non-negative");
    // reach = centre offset + patch radius + 8 edge widths (tanh tail < 1e-6)
    require(std::hypot(off, sep) + 2.2 * r0 <= Rs.front() / 2.0 + 1e-9,
            "patch must sit well inside the smallest disk");
    require(drop > 0.0 && drop < 1.0, "drop_limit must lie in (0, 1)");

    GridSpec2D g = GridSpec2D::make_cartesian(L, n);
    // A single offset patch carries circulation, whose sigma-type tail makes
    // every comparison norm fall like 1/sqrt(R); the mirrored opposite-sign
    // pair cancels the circulation so the far field decays like 1/|x|^2 and
    // the ladder drops much faster than the tail-driven floor.
    std::vector<Patch> patches{{off, sep, r0, amp, 0.15 * r0}};
    if (dipole) patches.push_back({off, -sep, r0, -amp, 0.15 * r0});
    PlaneState u0 = make_state(sample_patch_vorticity(g, patches));

    SolverConfig cfg;
    cfg.nu = nu;
    cfg.dt = dt;
    cfg.T = T;
    std::vector<ExpandingRow> rows = expanding_domain_study(u0, default_vortex(), cfg, Rs, n_samples);

    Csv csv("R,sup_h1,l2t_grad,corollary_sup_h1");
    std::vector<double> col_sup, col_grad;
    for (const ExpandingRow& r : rows) {
        csv.nrow({r.R, r.sup_h1, r.l2t_grad, r.corollary_sup_h1});
        col_sup.push_back(r.sup_h1);
        col_grad.push_back(r.l2t_grad);
    }
    ctx.save_csv("expanding.csv", csv);

    double worst_drop = std::max(col_sup.back() / col_sup.front(), col_grad.back() / col_grad.front());
    ctx.res.criteria.push_back(crit_decreasing("sup_h1_decreasing", col_sup));
    ctx.res.criteria.push_back(crit_decreasing("l2t_grad_decreasing", col_grad));
    ctx.res.criteria.push_back(crit_upper("ladder_drop", worst_drop, drop));
    ctx.res.criteria.push_back(crit_upper("runtime_seconds", ctx.elapsed(), budget));
}

// ---------------------------------------------------------------------------
// Study 6: viscous solutions approach the Euler solution at a measurable rate.

void run_vanishing_viscosity(Ctx& ctx) {
    int n = ctx.p.whole("n", 256);
    double L = ctx.p.num("extent", 6.0);
    double T = ctx.p.num("t", 0.5);
    double dt = ctx.p.num("dt", 5e-3);
    int n_samples = ctx.p.whole("samples", 8);
    std::vector<double> nus = ctx.p.numbers("nu_ladder", {1e-1, 5e-2, 2.5e-2, 1.25e-2, 0.0});
    double amp = ctx.p.num("patch_amplitude", 4.0);
    double r0 = ctx.p.num("patch_radius", 1.0);
    double off = ctx.p.num("patch_offset", 0.5);
    double slope_limit = ctx.p.num("slope_limit", 0.4);
    require(n >= 64 && n <= 2048 && L > 0.0, "need extent > 0 and n in [64, 2048]");
    require(T > 0.0 && dt > 0.0 && dt <= T, "need 0 < dt <= t");
    require(n_samples >= 2 && n_samples <= 64, "samples must lie in [2, 64]");
    require(nus.size() >= 3, "the viscosity ladder needs at least three rungs");
    require(nus.back() == 0.0, "the viscosity ladder must end with the nu = 0 reference");
    for (std::size_t i = 1; i < nus.size(); ++i)
        require(nus[i] < nus[i - 1], "the viscosity ladder must be strictly decreasing");
    require(r0 > 0.0 && amp != 0.0, "patch must have positive radius and nonzero amplitude");
    require(off + 2.2 * r0 <= 0.5 * L, "patch must sit well inside the grid");
    require(slope_limit > 0.0, "slope_limit must be positive");

    GridSpec2D g = GridSpec2D::make_cartesian(L, n);
    Patch patch{off, 0.0, r0, amp, 0.15 * r0};
    PlaneState u0 = make_state(sample_patch_vorticity(g, {patch}));

    SolverConfig cfg;
    cfg.dt = dt;
    cfg.T = T;
    VvStudyResult vv = vanishing_viscosity_study(u0, cfg, nus, T, n_samples);

    Csv csv("nu,sup_l2,rho");
    std::vector<double> gaps;
    double worst_env = 0.0;
    for (const VvRow& r : vv.rows) {
        csv.nrow({r.nu, r.sup_l2, r.rho});
        if (r.nu > 0.0) {
            gaps.push_back(r.sup_l2);
            worst_env = std::max(worst_env, r.sup_l2 / r.rho);
        }
    }
    ctx.save_csv("viscosity.csv", csv);
    ctx.details["calibrated_C"] = vv.C;
    ctx.details["slope"] = vv.slope;

    ctx.res.criteria.push_back(crit_decreasing("gap_decreasing", gaps));
    ctx.res.criteria.push_back(crit_lower("slope", vv.slope, slope_limit));
    ctx.res.criteria.push_back(crit_upper("below_envelope", worst_env, 1.0));
}

// ---------------------------------------------------------------------------
// Study 7: the transport identity for ensemble means of test functionals.

void run_liouville(Ctx& ctx) {
    int members = ctx.p.whole("members", 8);
    int n = ctx.p.whole("n", 256);
    double L = ctx.p.num("extent", 6.0);
    double nu = ctx.p.num("nu", 1e-2);
    double t = ctx.p.num("t", 0.5);
    double quad_dt = ctx.p.num("quad_dt", t / 64.0);
    double dt = ctx.p.num("dt", 1e-2);
    bool limiter = ctx.p.flag("limiter", true);
    double tol = ctx.p.num("tolerance", 1e-3);
    double ratio_limit = ctx.p.num("ratio_limit", 3.0);
    std::uint64_t seed = ctx.p.seed_value(ctx.opt, true);
    require(members >= 1 && members <= 64, "members must lie in [1, 64]");
    require(n >= 64 && n <= 1024 && L > 0.0, "need extent > 0 and n in [64, 1024]");
    require(nu >= 0.0, "nu must be non-negative");
    require(t > 0.0 && dt > 0.0 && dt <= t, "need 0 < dt <= t");
    require(quad_dt > 0.0 && quad_dt <= t, "need 0 < quad_dt <= t");
    double k_quarter = t / (quad_dt / 4.0);
    require(std::fabs(k_quarter - std::round(k_quarter)) < 1e-9 * std::max(1.0, k_quarter),
            "quad_dt must divide t");
    require(tol > 0.0 && ratio_limit > 0.0, "tolerance and ratio_limit must be positive");

    GridSpec2D g = GridSpec2D::make_cartesian(L, n);
    Ensemble mu0 = patch_ensemble(g, seed, members, 0.25 * L, 0.1 * L, 0.17 * L, 0.5, 1.5);
    TestFunctional f =
        make_test_functional(g, PhiFunction::saturated({1.0, 1.0}), default_generators());

    SolverConfig cfg;
    cfg.nu = nu;
    cfg.dt = dt;
    cfg.use_limiter = limiter;
    LiouvilleSamples s = liouville_samples(mu0, f, cfg, t, quad_dt / 4.0);
    double d_coarse = liouville_defect(s, 4);
    double d_half = liouville_defect(s, 2);
    double d_fine = liouville_defect(s, 1);
    double rel = std::fabs(d_coarse) / std::max(std::fabs(s.phi_final), 1e-300);
    double q_coarse = d_coarse - d_fine;
    double q_half = d_half - d_fine;
    double ratio = std::fabs(q_coarse) / std::max(std::fabs(q_half), 1e-300);

    Csv csv("quad_dt,defect,relative");
    csv.nrow({quad_dt, d_coarse, rel});
    csv.nrow({quad_dt / 2.0, d_half, std::fabs(d_half) / std::max(std::fabs(s.phi_final), 1e-300)});
    csv.nrow({quad_dt / 4.0, d_fine, std::fabs(d_fine) / std::max(std::fabs(s.phi_final), 1e-300)});
    ctx.save_csv("residuals.csv", csv);
    ctx.details["phi_final_mean"] = s.phi_final;
    ctx.details["quadrature_ratio"] = ratio;
    write_ensemble_artifacts(ctx, mu0, nu, ctx.p.echo());

    ctx.res.criteria.push_back(crit_upper("relative_residual", rel, tol));
    ctx.res.criteria.push_back(crit_lower("refinement_ratio", ratio, ratio_limit));
}

// ---------------------------------------------------------------------------
// Study 8: the ensemble energy identity refines at scheme order; the frozen
// single-profile ensemble sits at the quadrature floor.

void run_statistical_energy(Ctx& ctx) {
    int members = ctx.p.whole("members", 4);
    double L = ctx.p.num("extent", 6.0);
    double nu = ctx.p.num("nu", 1e-2);
    double t = ctx.p.num("t", 0.32);
    std::vector<double> n_ladder = ctx.p.numbers("n_ladder", {96.0, 192.0, 384.0});
    std::vector<double> dt_ladder = ctx.p.numbers("dt_ladder", {0.04, 0.02, 0.01});
    std::vector<double> m_values = ctx.p.numbers("m_values", {-1.0, 0.5, 1.0, 2.0});
    double order_ratio = ctx.p.num("order_ratio", 3.0);
    double degenerate_tol = ctx.p.num("degenerate_tolerance", 1e-12);
    std::uint64_t seed = ctx.p.seed_value(ctx.opt, true);
    require(members >= 1 && members <= 64, "members must lie in [1, 64]");
    require(L > 0.0 && nu >= 0.0 && t > 0.0, "need extent > 0, nu >= 0, t > 0");
    require(n_ladder.size() == dt_ladder.size(), "n_ladder and dt_ladder must pair up");
    require(dt_ladder.size() >= 2, "the refinement ladder needs at least two rungs");
    for (std::size_t i = 0; i < dt_ladder.size(); ++i) {
        double nd = n_ladder[i];
        require(nd == std::floor(nd) && nd >= 64.0 && nd <= 1024.0,
                "every n must be a whole number in [64, 1024]");
        if (i) require(nd > n_ladder[i - 1], "n_ladder must be strictly increasing");
        require(dt_ladder[i] > 0.0 && dt_ladder[i] <= t, "every dt must lie in (0, t]");
        if (i) require(dt_ladder[i] < dt_ladder[i - 1], "dt_ladder must be strictly decreasing");
        double k = t / dt_ladder[i];
        require(std::fabs(k - std::round(k)) < 1e-9 * std::max(1.0, k), "every dt must divide t");
    }
    require(!m_values.empty(), "m_values must not be empty");
    require(order_ratio > 1.0, "order_ratio must exceed 1");
    require(degenerate_tol > 0.0, "degenerate_tolerance must be positive");

    // One continuum ensemble evaluated on every rung: the patch parameters
    // depend only on the seed, so coarse and fine grids sample one measure.
    // Wide patch edges keep the coarsest rung inside the asymptotic range.
    std::vector<Patch> ps =
        random_patches(seed, members, 0.2 * L, 0.08 * L, 0.14 * L, 0.5, 1.5, 0.3);
    auto rung_ensemble = [&](const GridSpec2D& g) {
        std::vector<EnsembleMember> mem;
        for (int k = 0; k < members; ++k) {
            double msig = m_values[static_cast<std::size_t>(k) % m_values.size()];
            EnsembleMember em;
            em.weight = 1.0 / members;
            em.state = make_state(sample_patch_vorticity(g, {ps[static_cast<std::size_t>(k)]}, msig));
            mem.push_back(std::move(em));
        }
        return make_ensemble(std::move(mem));
    };

    Csv csv("n,dt,residual");
    std::vector<double> residuals;
    for (std::size_t i = 0; i < dt_ladder.size(); ++i) {
        GridSpec2D g = GridSpec2D::make_cartesian(L, static_cast<int>(n_ladder[i]));
        SolverConfig cfg;
        cfg.nu = nu;
        cfg.dt = dt_ladder[i];
        double r = statistical_energy_residual(rung_ensemble(g), cfg, t, dt_ladder[i]);
        residuals.push_back(r);
        csv.nrow({n_ladder[i], dt_ladder[i], r});
    }
    ctx.save_csv("refinement.csv", csv);
    GridSpec2D g_fine = GridSpec2D::make_cartesian(L, static_cast<int>(n_ladder.back()));
    write_ensemble_artifacts(ctx, rung_ensemble(g_fine), nu, ctx.p.echo());

    // The frozen exact-profile trajectory isolates the evaluator's algebra.
    const StationaryVortex& vx = default_vortex();
    double m_deg = m_values.front();
    ScalarField2D w_sigma(g_fine);
    for (int j = 0; j < g_fine.n; ++j)
        for (int i = 0; i < g_fine.n; ++i)
            w_sigma.at(i, j) = m_deg * vx.omega(std::hypot(g_fine.x(i), g_fine.y(j)));
    Trajectory frozen;
    for (int k = 0; k <= 2; ++k) {
        PlaneState s = make_state(w_sigma, t * k / 2.0);
        s.m_tag = m_deg;
        frozen.states.push_back(std::move(s));
    }
    double degenerate =
        statistical_energy_residual_on({{1.0, std::move(frozen)}}, vx, nu, nullptr);
    ctx.details["degenerate_residual"] = degenerate;

    double worst_ratio = infinity;
    for (std::size_t i = 0; i + 1 < residuals.size(); ++i)
        worst_ratio = std::min(worst_ratio, residuals[i] / std::max(residuals[i + 1], 1e-300));
    ctx.res.criteria.push_back(crit_decreasing("residual_decreasing", residuals));
    ctx.res.criteria.push_back(crit_lower("order_ratio", worst_ratio, order_ratio));
    ctx.res.criteria.push_back(crit_upper("degenerate_residual", degenerate, degenerate_tol));
}

// ---------------------------------------------------------------------------
// Study 9: ensemble vorticity moments never beat their transport bound.

void run_vorticity_moments(Ctx& ctx) {
    int members = ctx.p.whole("members", 4);
    int n = ctx.p.whole("n", 256);
    double L = ctx.p.num("extent", 6.0);
    double t = ctx.p.num("t", 0.5);
    double dt = ctx.p.num("dt", 1e-2);
    std::vector<double> nu_list = ctx.p.numbers("nu_list", {0.0, 1e-2});
    std::vector<double> ps = ctx.p.numbers("p_list", {1.0, 2.0, 4.0, infinity});
    double tol = ctx.p.num("tolerance", 1e-3);
    std::uint64_t seed = ctx.p.seed_value(ctx.opt, true);
    require(members >= 1 && members <= 64, "members must lie in [1, 64]");
    require(n >= 64 && n <= 1024 && L > 0.0, "need extent > 0 and n in [64, 1024]");
    require(t > 0.0 && dt > 0.0 && dt <= t, "need 0 < dt <= t");
    require(!nu_list.empty(), "nu_list must not be empty");
    for (double nu : nu_list) require(nu >= 0.0, "every nu must be non-negative");
    require(!ps.empty(), "p_list must not be empty");
    for (double p : ps) require(p >= 1.0, "every p must be at least 1");
    require(tol > 0.0, "tolerance must be positive");

    GridSpec2D g = GridSpec2D::make_cartesian(L, n);
    Ensemble mu0 = patch_ensemble(g, seed, members, 0.25 * L, 0.1 * L, 0.17 * L, 0.5, 1.5);

    Csv csv("nu,p,initial,final,bound,violation");
    double worst = 0.0;
    for (double nu : nu_list) {
        SolverConfig cfg;
        cfg.nu = nu;
        cfg.dt = dt;
        cfg.use_limiter = true;  // moment bounds lean on the monotone reconstruction
        std::vector<MomentRow> rows = vorticity_moment_check(mu0, cfg, t, ps);
        for (const MomentRow& r : rows) {
            csv.nrow({nu, r.p, r.initial, r.final, r.bound, r.violation});
            worst = std::max(worst, r.violation);
        }
    }
    ctx.save_csv("moments.csv", csv);
    write_ensemble_artifacts(ctx, mu0, nu_list.back(), ctx.p.echo());

    ctx.res.criteria.push_back(crit_upper("max_violation", worst, tol));
}

// ---------------------------------------------------------------------------
// Study 10: ensemble functional gaps shrink along the viscosity ladder.

void run_statistical_vv(Ctx& ctx) {
    int members = ctx.p.whole("members", 4);
    int n = ctx.p.whole("n", 192);
    double L = ctx.p.num("extent", 6.0);
    double t = ctx.p.num("t", 0.3);
    double dt = ctx.p.num("dt", 5e-3);
    std::vector<double> nus = ctx.p.numbers("nu_ladder", {1e-1, 5e-2, 2.5e-2, 1.25e-2, 0.0});
    std::uint64_t seed = ctx.p.seed_value(ctx.opt, true);
    require(members >= 1 && members <= 64, "members must lie in [1, 64]");
    require(n >= 64 && n <= 1024 && L > 0.0, "need extent > 0 and n in [64, 1024]");
    require(t > 0.0 && dt > 0.0 && dt <= t, "need 0 < dt <= t");
    require(nus.size() >= 3, "the viscosity ladder needs at least three rungs");
    require(nus.back() == 0.0, "the viscosity ladder must end with the nu = 0 reference");
    for (std::size_t i = 1; i < nus.size(); ++i)
        require(nus[i] < nus[i - 1], "the viscosity ladder must be strictly decreasing");

    GridSpec2D g = GridSpec2D::make_cartesian(L, n);
    Ensemble mu0 = patch_ensemble(g, seed, members, 0.25 * L, 0.1 * L, 0.17 * L, 0.5, 1.5);
    TestFunctional f =
        make_test_functional(g, PhiFunction::saturated({1.0, 1.0}), default_generators());

    SolverConfig cfg;
    cfg.dt = dt;
    std::vector<VvStatRow> rows = vv_statistical_compare(mu0, f, cfg, nus, t);

    Csv csv("nu,value,gap");
    std::vector<double> gaps;
    for (const VvStatRow& r : rows) {
        csv.nrow({r.nu, r.value, r.gap});
        gaps.push_back(r.gap);
    }
    ctx.save_csv("gaps.csv", csv);
    write_ensemble_artifacts(ctx, mu0, nus.front(), ctx.p.echo());

    ctx.res.criteria.push_back(crit_decreasing("gap_decreasing", gaps));
}

// ---------------------------------------------------------------------------
// Study 11: ensemble functional gaps shrink along the disk-radius ladder.

void run_statistical_expanding(Ctx& ctx) {
    int members = ctx.p.whole("members", 4);
    int n = ctx.p.whole("n", 512);
    double L = ctx.p.num("extent", 16.0);
    double nu = ctx.p.num("nu", 1e-2);
    double t = ctx.p.num("t", 0.25);
    double dt = ctx.p.num("dt", 1e-2);
    std::vector<double> Rs = ctx.p.numbers("radii", {4.0, 8.0, 12.0});
    std::uint64_t seed = ctx.p.seed_value(ctx.opt, true);
    require(members >= 1 && members <= 64, "members must lie in [1, 64]");
    require(n >= 64 && n <= 1024 && L > 0.0, "need extent > 0 and n in [64, 1024]");
    require(nu > 0.0, "nu must be positive for the no-slip comparison");
    require(t > 0.0 && dt > 0.0 && dt <= t, "need 0 < dt <= t");
    require(Rs.size() >= 2, "need at least two radii");
    for (std::size_t i = 0; i < Rs.size(); ++i) {
        require(Rs[i] >= 2.0, "every radius must be at least 2");
        if (i) require(Rs[i] > Rs[i - 1], "radii must be strictly increasing");
    }
    require(Rs.back() <= 0.9 * L, "largest radius must stay inside 0.9 of the extent");

    std::vector<double> sat_rs = ctx.p.numbers("satellite_radii", {3.0, 6.0});
    std::vector<double> sat_amps = ctx.p.numbers("satellite_amplitudes", {3.0, 2.0});
    require(sat_rs.size() == sat_amps.size(), "satellite radii and amplitudes must pair up");

    GridSpec2D g = GridSpec2D::make_cartesian(L, n);
    double half = Rs.front() / 2.0;
    // Each member carries the same chain of satellite vortices. A satellite
    // sitting in the cutoff collar [R/2, R] of a disk is distorted by the
    // projection onto that disk, while larger disks keep it intact, so the
    // functional gap falls as the disks grow to engulf the whole measure.
    std::vector<Patch> sats;
    for (std::size_t k = 0; k < sat_rs.size(); ++k) {
        double s = sat_rs[k];
        double size = std::clamp(0.15 * s, 0.3, 0.7);
        require(s > 0.0 && s + 2.5 * size <= 0.5 * L,
                "satellite support must stay inside the half-extent");
        double ang = pi / 6.0 + 2.4 * static_cast<double>(k);
        sats.push_back(
            {s * std::cos(ang), s * std::sin(ang), size, sat_amps[k], 0.3 * size});
    }
    std::vector<Patch> rnd =
        random_patches(seed, members, 0.4 * half, 0.2 * half, 0.35 * half, 0.5, 1.5, 0.12);
    std::vector<EnsembleMember> mem;
    for (int k = 0; k < members; ++k) {
        EnsembleMember em;
        em.weight = 1.0 / members;
        std::vector<Patch> ps = sats;
        ps.push_back(rnd[static_cast<std::size_t>(k)]);
        em.state = make_state(sample_patch_vorticity(g, ps));
        mem.push_back(std::move(em));
    }
    Ensemble mu0 = make_ensemble(std::move(mem));
    TestFunctional f = make_test_functional(g, PhiFunction::saturated({1.0, 1.0}),
                                            default_generators(half / 2.7));

    SolverConfig cfg;
    cfg.nu = nu;
    cfg.dt = dt;
    std::vector<ExpandingStatRow> rows = expanding_domain_statistical(mu0, f, cfg, Rs, t);

    Csv csv("R,disk_value,plane_value,gap");
    std::vector<double> gaps;
    for (const ExpandingStatRow& r : rows) {
        csv.nrow({r.R, r.disk_value, r.plane_value, r.gap});
        gaps.push_back(r.gap);
    }
    ctx.save_csv("gaps.csv", csv);
    write_ensemble_artifacts(ctx, mu0, nu, ctx.p.echo());

    ctx.res.criteria.push_back(crit_decreasing("gap_decreasing", gaps));
}

// ---------------------------------------------------------------------------
// Study 12: circulation follows the damped linear law exactly.

void run_damped_circulation(Ctx& ctx) {
    int n = ctx.p.whole("n", 128);
    double L = ctx.p.num("extent", 4.0);
    double t = ctx.p.num("t", 1.0);
    double dt = ctx.p.num("dt", 1e-2);
    double nu = ctx.p.num("nu", 1e-2);
    double gamma = ctx.p.num("gamma", 0.5);
    int samples = ctx.p.whole("samples", 8);
    double cons_tol = ctx.p.num("conservation_tolerance", 1e-8);
    double damp_tol = ctx.p.num("damped_tolerance", 1e-10);
    require(n >= 32 && n <= 1024 && L > 0.0, "need extent > 0 and n in [32, 1024]");
    require(t > 0.0 && dt > 0.0 && dt <= t, "need 0 < dt <= t");
    require(nu >= 0.0, "nu must be non-negative");
    require(gamma > 0.0, "gamma must be positive");
    require(samples >= 2 && samples <= 256, "samples must lie in [2, 256]");
    require(cons_tol > 0.0 && damp_tol > 0.0, "tolerances must be positive");

    GridSpec2D g = GridSpec2D::make_cartesian(L, n);
    const StationaryVortex& vx = default_vortex();
    ScalarField2D w0(g);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            double x = g.x(i), y = g.y(j);
            w0.at(i, j) = vx.omega(std::hypot(x - 0.3, y - 0.2)) +
                          0.4 * vx.omega(2.0 * std::hypot(x + 0.6, y + 0.4));
        }
    PlaneState u0 = make_state(w0);
    double m0 = u0.circulation();
    std::vector<double> times = uniform_times(0.0, t, samples);

    Csv csv("case,nu,gamma,eta,deviation");
    auto conserved_dev = [&](const Trajectory& traj) {
        double worst = 0.0;
        for (const PlaneState& s : traj.states)
            worst = std::max(worst, std::fabs(s.circulation() - m0));
        return worst;
    };

    SolverConfig euler_cfg;
    euler_cfg.dt = dt;
    double dev_euler = conserved_dev(solve_euler(u0, euler_cfg, times));
    csv.row({"euler", fmt17(0.0), fmt17(0.0), fmt17(0.0), fmt17(dev_euler)});

    SolverConfig ns_cfg;
    ns_cfg.nu = nu;
    ns_cfg.dt = dt;
    double dev_ns = conserved_dev(solve(u0, ns_cfg, times));
    csv.row({"ns", fmt17(nu), fmt17(0.0), fmt17(0.0), fmt17(dev_ns)});

    SolverConfig free_cfg;
    free_cfg.nu = nu;
    free_cfg.gamma = gamma;
    free_cfg.dt = dt;
    double dev_free = damped_circulation_check(solve(u0, free_cfg, times), gamma, 0.0);
    csv.row({"damped-free", fmt17(nu), fmt17(gamma), fmt17(0.0), fmt17(dev_free)});

    // Balance the drive against the damping: scale a unit profile so its
    // discrete curl integral injects exactly gamma * m(0) per unit time.
    VectorField2D base = eval_sigma_m(vx, 1.0, g);
    double eta_raw = integral(curl(base)) / (2.0 * kPi);
    double scale = gamma * m0 / eta_raw;
    auto forcing = std::make_shared<VectorField2D>(g);
    for (std::size_t k = 0; k < base.u1.size(); ++k) {
        forcing->u1[k] = scale * base.u1[k];
        forcing->u2[k] = scale * base.u2[k];
    }
    double eta = gamma * m0;
    SolverConfig bal_cfg;
    bal_cfg.nu = nu;
    bal_cfg.gamma = gamma;
    bal_cfg.dt = dt;
    bal_cfg.forcing = forcing;
    double dev_bal = damped_circulation_check(solve(u0, bal_cfg, times), gamma, eta);
    csv.row({"damped-balanced", fmt17(nu), fmt17(gamma), fmt17(eta), fmt17(dev_bal)});

    ctx.save_csv("circulation.csv", csv);
    ctx.details["m0"] = m0;

    ctx.res.criteria.push_back(
        crit_upper("conservation", std::max(dev_euler, dev_ns), cons_tol));
    ctx.res.criteria.push_back(crit_upper("damped", std::max(dev_free, dev_bal), damp_tol));
}

// ---------------------------------------------------------------------------
// Catalogue and dispatch.

struct StudyEntry {
    StudyInfo info;
    void (*run)(Ctx&);
};

const std::vector<StudyEntry>& registry() {
    static const std::vector<StudyEntry> entries = {
        {{"biot-savart-oracle",
          "fast free-space velocity reconstruction against direct kernel quadrature",
          "u = K * omega, K(x) = (1/(2 pi)) (-x_2, x_1) / |x|^2"},
         &run_biot_savart_oracle},
        {{"projection-error", "disk-projection error of the slow-decay profile against its bound",
          "||sigma_m - U_R sigma_m||_{H1(Omega_R)} <= 5 C beta(R), "
          "beta(R)^2 = 2 pi ln(R/(R-1)) + pi ((R-1)^-2 - R^-2)"},
         &run_projection_error},
        {{"lamb-oseen", "viscous radial Gaussian against the heat-evolved profile",
          "omega(r, t) = A s^2/(s^2 + 4 nu t) exp(-r^2/(s^2 + 4 nu t))"},
         &run_lamb_oseen},
        {{"radial-euler", "radial vorticity is a steady state of the inviscid dynamics",
          "u . grad omega = 0 for radial omega, so omega(t) = omega(0) when nu = 0"},
         &run_radial_euler},
        {{"expanding-domain", "no-slip disk solutions approach the whole-plane solution",
          "||u_R - u||_{Linf([0,T]; H1(Omega_R))} -> 0 and "
          "||grad(u_R - u)||_{L2([0,T] x Omega_R)} -> 0 as R -> infinity"},
         &run_expanding_domain},
        {{"vanishing-viscosity", "viscous solutions approach the Euler solution below the envelope",
          "sup_{t<=T} ||u^nu - u^0||_{L2} <= rho(nu, t) = (C nu t)^((1/2) exp(-C t))"},
         &run_vanishing_viscosity},
        {{"liouville", "transport identity for ensemble means of test functionals",
          "mean Phi(u(t)) = mean Phi(u(0)) + int_0^t mean (F(s, u), Phi'(u)) ds"},
         &run_liouville},
        {{"statistical-energy", "ensemble energy identity under refinement",
          "mean ||v(t)||^2 + 2 nu int mean ||grad v||^2 = mean ||v(0)||^2 + 2 int mean (f, v) "
          "- 2 int mean ((v . grad sigma), v) - 2 nu int mean (grad sigma, grad v), "
          "v = u - sigma(u)"},
         &run_statistical_energy},
        {{"vorticity-moments", "ensemble vorticity moments stay under the transport bound",
          "mean ||omega(t)||_p <= mean ||omega(0)||_p + int_0^t ||curl f||_p ds"},
         &run_vorticity_moments},
        {{"statistical-vv", "ensemble functional gaps along the viscosity ladder",
          "int Phi d mu_t^nu -> int Phi d mu_t^0 as nu -> 0"},
         &run_statistical_vv},
        {{"statistical-expanding", "ensemble functional gaps along the disk-radius ladder",
          "int Phi_R d mu_t^R -> int Phi d mu_t as R -> infinity"},
         &run_statistical_expanding},
        {{"damped-circulation", "circulation follows the damped linear law",
          "m(t) = eta/gamma + (m(0) - eta/gamma) exp(-gamma t)"},
         &run_damped_circulation},
    };
    return entries;
}

void finish(Ctx& ctx, const StudyInfo& info) {
    StudyResult& r = ctx.res;
    r.passed = !r.criteria.empty();
    for (const CriterionResult& c : r.criteria)
        if (!c.pass) r.passed = false;

    json s;
    s["study"] = r.study;
    s["description"] = info.description;
    s["law"] = info.law;
    s["parameters"] = ctx.p.echo();
    json cs = json::array();
    for (const CriterionResult& c : r.criteria)
        cs.push_back({{"name", c.name},
                      {"pass", c.pass},
                      {"measured", c.measured},
                      {"limit", c.limit},
                      {"margin", c.margin}});
    s["criteria"] = cs;
    s["passed"] = r.passed;
    if (!ctx.details.empty()) s["details"] = ctx.details;
    s["artifacts"] = r.artifacts;
    s["elapsed_seconds"] = ctx.elapsed();
    ctx.save_text("summary.json", s.dump(2) + "\n");
}

}  // namespace

const std::vector<StudyInfo>& study_catalogue() {
    static const std::vector<StudyInfo> infos = [] {
        std::vector<StudyInfo> out;
        for (const StudyEntry& e : registry()) out.push_back(e.info);
        return out;
    }();
    return infos;
}

StudyResult run_study(const json& config, const StudyOptions& opt) {
    StudyResult res;
    try {
        if (!config.is_object()) throw ConfigError("config root must be a table of keys");
        if (!config.contains("study") || !config.at("study").is_string())
            throw ConfigError("config must name a study (string key 'study')");
        res.study = config.at("study").get<std::string>();
        const StudyEntry* entry = nullptr;
        for (const StudyEntry& e : registry())
            if (e.info.name == res.study) entry = &e;
        if (!entry) {
            res.exit_code = study_exit_unknown_study;
            res.error = "unknown study: " + res.study;
            return res;
        }
        set_max_parallelism(opt.threads);
        Ctx ctx(config, opt, res);
        entry->run(ctx);
        finish(ctx, entry->info);
        res.exit_code = res.passed ? study_exit_pass : study_exit_criteria_failed;
    } catch (const ConfigError& e) {
        res.exit_code = study_exit_bad_config;
        res.error = e.what();
    } catch (const ParamError& e) {
        res.exit_code = study_exit_bad_parameters;
        res.error = e.what();
    } catch (const std::invalid_argument& e) {
        res.exit_code = study_exit_bad_parameters;
        res.error = e.what();
    } catch (const std::exception& e) {
        std::string what = e.what();
        bool guard = what.find("domain too small") != std::string::npos ||
                     what.find("timestep underflow") != std::string::npos;
        res.exit_code = guard ? study_exit_guard_band : study_exit_runtime_error;
        res.error = what;
    }
    return res;
}

}  // namespace pv
