// qsens command-line tool: synthesize piecewise-constant gate controllers,
// analyze their robustness (sensitivity bounds and worst-case perturbation
// search), and run the correlation studies over the resulting records.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qsens/io.hpp"

namespace {

int run(CLI::App& app, int argc, char** argv) {
    using namespace qsens;

    RunConfig cfg;
    StatsOptions stats;
    std::vector<std::string> controller_files;
    std::string init_name = "normal";
    std::string pair_name = "bvu-eps";
    std::string method_name;
    std::string tail_name;

    app.require_subcommand(1);

    CLI::App* syn = app.add_subcommand(
        "synthesize", "optimize controllers for a catalog problem and write them as JSON");
    syn->add_option("--problem", cfg.problem, "problem id 1-9")->required();
    syn->add_option("--tf", cfg.t_f, "gate operation time")->required();
    syn->add_option("--kappa", cfg.kappa, "number of time steps")->required();
    syn->add_option("--restarts", cfg.restarts, "independent optimizer restarts");
    syn->add_option("--seed", cfg.seed, "master seed for the restart streams");
    syn->add_option("--init", init_name, "field initialization: uniform|normal|zeros");
    syn->add_option("--filter", cfg.fidelity_filter, "keep controllers with eps below this");
    syn->add_option("--max-iters", cfg.max_iters, "optimizer iteration cap");
    syn->add_option("--grad-tol", cfg.grad_tol, "gradient max-norm stopping tolerance");
    syn->add_option("--out", cfg.out_dir, "output directory");
    syn->add_flag("--override", cfg.override_admissible,
                  "allow (tf, kappa) outside the catalog lists");

    CLI::App* ana = app.add_subcommand(
        "analyze", "compute sensitivity bounds and the worst-case perturbation per controller");
    ana->add_option("files", controller_files, "controller JSON files")->required();
    ana->add_option("--epsilon", cfg.epsilon, "perturbed-error threshold for the search");
    ana->add_option("--step", cfg.step, "search step size (0 = automatic rule)");
    ana->add_option("--max-iter", cfg.max_iter, "search iteration cap");
    ana->add_option("--structures", cfg.structures_file,
                    "JSON file with custom uncertainty structures");
    ana->add_option("--out", cfg.out_dir, "output directory for records.csv");
    ana->add_flag("--traces", cfg.emit_traces, "write per-controller search traces as CSV");

    CLI::App* st = app.add_subcommand("stats", "correlation hypothesis test over a records file");
    st->add_option("--records", stats.records_csv, "records.csv from analyze")->required();
    st->add_option("--pair", pair_name, "bvu-eps | bvu-dbar | logsens-eps");
    st->add_option("--method", method_name, "pearson | kendall (default depends on pair)");
    st->add_option("--tail", tail_name, "negative | positive (default depends on pair)");
    st->add_option("--out", stats.out_dir, "output directory for stats.csv and scatter.csv");
    st->add_option("--svg", stats.svg_path, "also write a log-log scatter plot here");

    CLI::App* prob = app.add_subcommand("problems", "list the benchmark problem catalog");

    app.parse(argc, argv);

    if (prob->parsed()) {
        for (const auto& info : problem_registry()) {
            std::cout << info.id << ": " << info.description << "; tf in {";
            for (std::size_t i = 0; i < info.tf_options.size(); ++i)
                std::cout << (i ? "," : "") << info.tf_options[i];
            std::cout << "}, kappa in {";
            for (std::size_t i = 0; i < info.kappa_options.size(); ++i)
                std::cout << (i ? "," : "") << info.kappa_options[i];
            std::cout << "}\n";
        }
        return 0;
    }

    if (syn->parsed()) {
        cfg.init = init_strategy_from_string(init_name);
        return cmd_synthesize(cfg);
    }

    if (ana->parsed()) return cmd_analyze(cfg, controller_files);

    if (st->parsed()) {
        if (pair_name == "bvu-eps") stats.pair = StatsPair::bvu_eps;
        else if (pair_name == "bvu-dbar") stats.pair = StatsPair::bvu_dbar;
        else if (pair_name == "logsens-eps") stats.pair = StatsPair::logsens_eps;
        else throw argument_error("unknown pair '" + pair_name + "'");
        if (!method_name.empty()) {
            stats.method_set = true;
            if (method_name == "pearson") stats.method = StatsMethod::pearson;
            else if (method_name == "kendall") stats.method = StatsMethod::kendall;
            else throw argument_error("unknown method '" + method_name + "'");
        }
        if (!tail_name.empty()) {
            stats.tail_set = true;
            if (tail_name == "negative") stats.tail = Tail::negative;
            else if (tail_name == "positive") stats.tail = Tail::positive;
            else throw argument_error("unknown tail '" + tail_name + "'");
        }
        return cmd_stats(stats);
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"piecewise-constant quantum gate controllers: synthesis, differential-"
                 "sensitivity robustness bounds, and correlation studies"};
    try {
        return run(app, argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // usage problems exit 1
    } catch (const qsens::argument_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const qsens::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const qsens::contract_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
