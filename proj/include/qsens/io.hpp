#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qsens/robustness.hpp"
#include "qsens/stats.hpp"
#include "qsens/synthesis.hpp"

namespace qsens {

// Everything a study run needs; filled from CLI flags. (t_f, kappa) must be an
// admissible pair from the problem catalog unless override_admissible is set.
struct RunConfig {
    int problem = 1;
    double t_f = 0.0;
    int kappa = 0;
    int restarts = 100;
    std::uint64_t seed = 1;
    InitStrategy init = InitStrategy::normal;
    double fidelity_filter = 1e-2;
    int max_iters = 5000;
    double grad_tol = 1e-9;
    double epsilon = 0.1; // worst-case search threshold
    double step = 0.0;    // search step size; 0 picks the automatic rule
    long max_iter = 10000;
    std::string structures_file; // optional custom uncertainty structures
    std::string out_dir = ".";
    bool override_admissible = false;
    bool emit_traces = false;
};

void validate_run_config(const RunConfig& cfg);

// ---- controller persistence (JSON, lossless doubles) ----

struct StoredController {
    std::string id;
    int problem = 0;
    Controller ctrl;
    std::uint64_t seed = 0;
    InitStrategy init = InitStrategy::normal;
    double eps = 1.0;
};

void save_controller(const std::string& path, const StoredController& sc);
StoredController load_controller(const std::string& path);

// ---- robustness records (RFC-4180 CSV, CRLF line endings) ----

struct RobustnessRecord {
    std::string id;
    double eps = 1.0;
    double b_vu = 0.0;
    double b_static = 0.0;
    double log_sens_norm = 0.0;
    double delta_bar = 0.0;
    bool delta_bar_lower_bound = false; // search stopped on max iterations
    double step = 0.0;
    std::uint64_t seed = 0;
    std::string init;
};

void write_records_csv(const std::string& path, const std::vector<RobustnessRecord>& recs);
std::vector<RobustnessRecord> read_records_csv(const std::string& path);

// custom uncertainty structures from a JSON file (see README for the schema)
UncertaintyStructure load_structures(const std::string& path, const ProblemSpec& spec);

// log-log scatter plot, values floored at 1e-16 to keep log axes finite
void write_scatter_svg(const std::string& path, const std::vector<double>& x,
                       const std::vector<double>& y, const std::string& x_label,
                       const std::string& y_label);

// ---- CLI commands ----

enum class StatsPair { bvu_eps, bvu_dbar, logsens_eps };
enum class StatsMethod { pearson, kendall };

struct StatsOptions {
    std::string records_csv;
    StatsPair pair = StatsPair::bvu_eps;
    StatsMethod method = StatsMethod::pearson;
    Tail tail = Tail::positive;
    bool method_set = false; // defaults depend on the pair when unset
    bool tail_set = false;
    std::string out_dir = ".";
    std::string svg_path; // empty = no plot
};

// exit codes: 0 ok, 4 completed with nothing to write (warning)
int cmd_synthesize(const RunConfig& cfg);
int cmd_analyze(const RunConfig& cfg, const std::vector<std::string>& controller_files);
int cmd_stats(const StatsOptions& opt);

} // namespace qsens
