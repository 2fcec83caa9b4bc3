#pragma once
// Named, configuration-driven reproductions of the laboratory's experiments.
// Each study runs a fixed computation, writes plot-ready CSV artifacts plus a
// machine-readable summary JSON under <out_root>/<study>/, and reports
// pass/fail with a margin for every criterion its config pins.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace pv {

struct StudyInfo {
    std::string name;
    std::string description;  // one line, for list-studies
    std::string law;          // the identity or estimate the study tests
};

// The shipped set of twelve studies, in canonical order.
const std::vector<StudyInfo>& study_catalogue();

struct StudyOptions {
    std::string out_root = "pv-out";  // output root (CLI flag / env already resolved)
    int threads = 0;                  // parallel solve cap; 0 = hardware default
    bool override_seed = false;       // when set, `seed` replaces the config's seed
    std::uint64_t seed = 0;
};

// Exit codes shared by run_study and the command-line front end.
enum StudyExit : int {
    study_exit_pass = 0,
    study_exit_criteria_failed = 1,
    study_exit_bad_config = 2,
    study_exit_unknown_study = 3,
    study_exit_bad_parameters = 4,
    study_exit_guard_band = 5,
    study_exit_runtime_error = 6,
};

struct CriterionResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double limit = 0.0;
    double margin = 0.0;  // relative headroom; positive means satisfied
};

struct StudyResult {
    std::string study;
    int exit_code = study_exit_runtime_error;
    bool passed = false;
    std::vector<CriterionResult> criteria;
    std::vector<std::string> artifacts;  // file names written under out_dir
    std::string out_dir;
    std::string error;  // populated when exit_code >= study_exit_bad_config
};

// Executes the study named in config["study"]. Validates the config before
// creating any artifact (malformed configs leave no files behind), then
// writes CSVs, snapshots, and summary.json. Never throws; every failure is
// mapped onto the exit-code enum above.
StudyResult run_study(const nlohmann::json& config, const StudyOptions& opt);

}  // namespace pv
