// planevortex: numerical laboratory for slow-decay 2D incompressible flow.
//
//   planevortex list-studies
//   planevortex run <config> [--out DIR] [--threads K] [--seed S]
//
// Configs are TOML (a JSON object is accepted too). Exit codes: 0 all
// criteria pass, 1 criteria failed, 2 malformed config, 3 unknown study,
// 4 invalid parameter ranges, 5 support-guard violation, 6 other error.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "CLI11.hpp"
#include "planevortex/studies.hpp"
#include "planevortex/toml_lite.hpp"

namespace {

int cmd_list() {
    const auto& cat = pv::study_catalogue();
    for (const pv::StudyInfo& s : cat) {
        std::printf("%-22s %s\n", s.name.c_str(), s.description.c_str());
        std::printf("%-22s law: %s\n", "", s.law.c_str());
    }
    return 0;
}

int cmd_run(const std::string& config_path, const pv::StudyOptions& opt) {
    nlohmann::json config;
    try {
        config = pv::load_config(config_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "planevortex: %s\n", e.what());
        return pv::study_exit_bad_config;
    }

    pv::StudyResult res = pv::run_study(config, opt);

    if (!res.study.empty()) std::printf("study: %s\n", res.study.c_str());
    for (const pv::CriterionResult& c : res.criteria)
        std::printf("  %s %-22s measured %-14.6g limit %-14.6g margin %+.3f\n",
                    c.pass ? "PASS" : "FAIL", c.name.c_str(), c.measured, c.limit, c.margin);
    if (!res.error.empty()) std::fprintf(stderr, "planevortex: error: %s\n", res.error.c_str());
    if (!res.out_dir.empty())
        std::printf("result: %s (artifacts in %s)\n", res.passed ? "PASS" : "FAIL",
                    res.out_dir.c_str());
    return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"planevortex: studies of slow-decay 2D incompressible flow"};
    app.require_subcommand(1);

    app.add_subcommand("list-studies", "List every study with its one-line summary and law");

    auto* run = app.add_subcommand("run", "Run one study from a config file");
    std::string config_path;
    run->add_option("config", config_path, "TOML or JSON study config")->required();

    pv::StudyOptions opt;
    if (const char* env = std::getenv("PLANEVORTEX_OUT")) opt.out_root = env;
    run->add_option("--out", opt.out_root, "Output root directory (default: $PLANEVORTEX_OUT or pv-out)");
    run->add_option("--threads", opt.threads, "Max concurrent member solves (default: all cores)");
    auto* seed_opt = run->add_option("--seed", opt.seed, "Override the config's sampling seed");

    CLI11_PARSE(app, argc, argv);

    if (app.got_subcommand("list-studies")) return cmd_list();
    opt.override_seed = seed_opt->count() > 0;
    return cmd_run(config_path, opt);
}
