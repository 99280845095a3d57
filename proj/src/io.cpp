#include "qsens/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "qsens/parallel.hpp"

namespace qsens {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kControllerFormat = "qsens.controller.v1";
// max_field reports max |f| per controller; the optimization is unconstrained,
// so implausible amplitudes should be visible at a glance
constexpr const char* kIndexHeader = "id,seed,init,eps,fidelity,iterations,converged,max_field";
constexpr const char* kRecordsHeader =
    "id,eps,b_vu,b_static,log_sens_norm,delta_bar,delta_bar_lower_bound,step,seed,init";
constexpr const char* kStatsHeader =
    "pair,method,tail,n,coefficient,statistic,p_value,significant,status";

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_tf(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open '" + path + "' for writing");
    return f;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw io_error("cannot create directory '" + dir.string() + "': " + ec.message());
}

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open '" + path + "' for reading");
    return f;
}

// CSV values here never contain commas or quotes, so rows split plainly;
// readers accept both CRLF and LF.
std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw io_error("bad number '" + s + "' in " + where);
    }
}

void expect_header(const std::string& got, const char* want, const std::string& path) {
    std::string g = got;
    if (!g.empty() && g.back() == '\r') g.pop_back();
    if (g != want)
        throw io_error("unexpected CSV header in '" + path + "' (schema mismatch): got \"" + g +
                       "\"");
}

std::string controller_id(int problem, double tf, int kappa, int restart) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "p%d_tf%s_k%d_r%04d", problem, fmt_tf(tf).c_str(), kappa,
                  restart);
    return buf;
}

} // namespace

void validate_run_config(const RunConfig& cfg) {
    const ProblemInfo& info = problem_info(cfg.problem);
    if (!cfg.override_admissible) {
        if (!admissible_tf(info, cfg.t_f))
            throw argument_error("t_f not in the admissible list for problem " +
                                 std::to_string(cfg.problem) + " (use --override to force)");
        if (!admissible_kappa(info, cfg.kappa))
            throw argument_error("kappa not in the admissible list for problem " +
                                 std::to_string(cfg.problem) + " (use --override to force)");
    } else {
        if (!(cfg.t_f > 0.0)) throw argument_error("t_f must be positive");
        if (cfg.kappa < 1) throw argument_error("kappa must be at least 1");
    }
    if (cfg.restarts < 0) throw argument_error("restarts must be non-negative");
    if (!(cfg.epsilon > 0.0)) throw argument_error("epsilon must be positive");
    if (cfg.step < 0.0) throw argument_error("step must be non-negative");
    if (!(cfg.fidelity_filter > 0.0 && cfg.fidelity_filter <= 1.0))
        throw argument_error("fidelity filter must lie in (0, 1]");
}

void save_controller(const std::string& path, const StoredController& sc) {
    json j;
    j["format"] = kControllerFormat;
    j["id"] = sc.id;
    j["problem"] = sc.problem;
    j["t_f"] = sc.ctrl.t_f;
    j["kappa"] = sc.ctrl.steps;
    j["controls"] = sc.ctrl.num_controls;
    j["seed"] = sc.seed;
    j["init"] = to_string(sc.init);
    j["eps"] = sc.eps;
    json rows = json::array();
    for (int m = 0; m < sc.ctrl.num_controls; ++m) {
        json row = json::array();
        for (int k = 0; k < sc.ctrl.steps; ++k) row.push_back(sc.ctrl.f(m, k));
        rows.push_back(std::move(row));
    }
    j["fields"] = std::move(rows);
    open_out(path) << j.dump(2) << '\n';
}

StoredController load_controller(const std::string& path) {
    json j;
    try {
        open_in(path) >> j;
    } catch (const json::exception& e) {
        throw io_error("cannot parse '" + path + "': " + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != kControllerFormat)
            throw io_error("'" + path + "' is not a qsens controller file");
        StoredController sc;
        sc.id = j.at("id").get<std::string>();
        sc.problem = j.at("problem").get<int>();
        sc.seed = j.at("seed").get<std::uint64_t>();
        sc.init = init_strategy_from_string(j.at("init").get<std::string>());
        sc.eps = j.at("eps").get<double>();
        const int mctl = j.at("controls").get<int>();
        const int kappa = j.at("kappa").get<int>();
        sc.ctrl = Controller(mctl, kappa, j.at("t_f").get<double>());
        const json& rows = j.at("fields");
        if (static_cast<int>(rows.size()) != mctl)
            throw io_error("'" + path + "': field row count mismatch");
        for (int m = 0; m < mctl; ++m) {
            if (static_cast<int>(rows[m].size()) != kappa)
                throw io_error("'" + path + "': field column count mismatch");
            for (int k = 0; k < kappa; ++k) sc.ctrl.f(m, k) = rows[m][k].get<double>();
        }
        sc.ctrl.validate();
        return sc;
    } catch (const json::exception& e) {
        throw io_error("bad controller file '" + path + "': " + e.what());
    }
}

void write_records_csv(const std::string& path, const std::vector<RobustnessRecord>& recs) {
    std::ofstream f = open_out(path);
    f << kRecordsHeader << "\r\n";
    for (const auto& r : recs) {
        f << r.id << ',' << fmt_double(r.eps) << ',' << fmt_double(r.b_vu) << ','
          << fmt_double(r.b_static) << ',' << fmt_double(r.log_sens_norm) << ','
          << fmt_double(r.delta_bar) << ',' << (r.delta_bar_lower_bound ? 1 : 0) << ','
          << fmt_double(r.step) << ',' << r.seed << ',' << r.init << "\r\n";
    }
}

std::vector<RobustnessRecord> read_records_csv(const std::string& path) {
    std::ifstream f = open_in(path);
    std::string line;
    if (!std::getline(f, line)) throw io_error("'" + path + "' is empty");
    expect_header(line, kRecordsHeader, path);
    std::vector<RobustnessRecord> out;
    while (std::getline(f, line)) {
        if (line.empty() || line == "\r") continue;
        const auto cols = split_csv_row(line);
        if (cols.size() != 10) throw io_error("'" + path + "': wrong column count");
        RobustnessRecord r;
        r.id = cols[0];
        r.eps = parse_double(cols[1], path);
        r.b_vu = parse_double(cols[2], path);
        r.b_static = parse_double(cols[3], path);
        r.log_sens_norm = parse_double(cols[4], path);
        r.delta_bar = parse_double(cols[5], path);
        r.delta_bar_lower_bound = cols[6] == "1";
        r.step = parse_double(cols[7], path);
        r.seed = std::strtoull(cols[8].c_str(), nullptr, 10);
        r.init = cols[9];
        out.push_back(std::move(r));
    }
    return out;
}

UncertaintyStructure load_structures(const std::string& path, const ProblemSpec& spec) {
    json j;
    try {
        open_in(path) >> j;
    } catch (const json::exception& e) {
        throw io_error("cannot parse '" + path + "': " + e.what());
    }
    try {
        const int dim = j.at("dim").get<int>();
        if (dim != spec.dim)
            throw argument_error("structure file dimension " + std::to_string(dim) +
                                 " does not match problem dimension " + std::to_string(spec.dim));
        const int slots = spec.num_controls() + 1;
        UncertaintyStructure unc;
        unc.structures.assign(slots, Mat(spec.dim));
        unc.active.assign(slots, 0);
        for (const json& entry : j.at("slots")) {
            const int m = entry.at("slot").get<int>();
            if (m < 0 || m >= slots)
                throw argument_error("structure slot " + std::to_string(m) + " out of range");
            const json& rows = entry.at("matrix");
            if (static_cast<int>(rows.size()) != dim)
                throw argument_error("structure matrix has wrong row count");
            Mat h(dim);
            for (int i = 0; i < dim; ++i) {
                if (static_cast<int>(rows[i].size()) != dim)
                    throw argument_error("structure matrix has wrong column count");
                for (int c = 0; c < dim; ++c)
                    h(i, c) = cxd(rows[i][c].at(0).get<double>(), rows[i][c].at(1).get<double>());
            }
            unc.structures[m] = std::move(h);
            unc.active[m] = 1;
        }
        unc.validate(spec.dim); // enforces hermiticity and unit Frobenius norm
        return unc;
    } catch (const json::exception& e) {
        throw io_error("bad structure file '" + path + "': " + e.what());
    }
}

void write_scatter_svg(const std::string& path, const std::vector<double>& x,
                       const std::vector<double>& y, const std::string& x_label,
                       const std::string& y_label) {
    if (x.size() != y.size()) throw argument_error("scatter: size mismatch");
    constexpr double kfloor = 1e-16;
    constexpr int w = 640, h = 480, ml = 70, mr = 20, mt = 20, mb = 50;

    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        lx[i] = std::log10(std::max(x[i], kfloor));
        ly[i] = std::log10(std::max(y[i], kfloor));
    }
    auto minmax = [](const std::vector<double>& v) {
        double lo = v.empty() ? 0.0 : v[0], hi = lo;
        for (double t : v) {
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        }
        return std::pair<double, double>(lo, hi);
    };
    const auto [x0, x1] = minmax(lx);
    const auto [y0, y1] = minmax(ly);
    auto px = [&](double v) { return ml + (v - x0) / (x1 - x0) * (w - ml - mr); };
    auto py = [&](double v) { return h - mb - (v - y0) / (y1 - y0) * (h - mt - mb); };

    std::ofstream f = open_out(path);
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
    f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    f << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\""
      << h - mb << "\" stroke=\"black\"/>\n";
    f << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
      << "\" stroke=\"black\"/>\n";
    // decade ticks
    for (int d = static_cast<int>(std::ceil(x0)); d <= static_cast<int>(std::floor(x1)); ++d) {
        const double X = px(d);
        f << "<line x1=\"" << X << "\" y1=\"" << h - mb << "\" x2=\"" << X << "\" y2=\""
          << h - mb + 5 << "\" stroke=\"black\"/>\n";
        f << "<text x=\"" << X << "\" y=\"" << h - mb + 18
          << "\" font-size=\"11\" text-anchor=\"middle\">1e" << d << "</text>\n";
    }
    for (int d = static_cast<int>(std::ceil(y0)); d <= static_cast<int>(std::floor(y1)); ++d) {
        const double Y = py(d);
        f << "<line x1=\"" << ml - 5 << "\" y1=\"" << Y << "\" x2=\"" << ml << "\" y2=\"" << Y
          << "\" stroke=\"black\"/>\n";
        f << "<text x=\"" << ml - 8 << "\" y=\"" << Y + 4
          << "\" font-size=\"11\" text-anchor=\"end\">1e" << d << "</text>\n";
    }
    f << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 12
      << "\" font-size=\"13\" text-anchor=\"middle\">" << x_label << " (log)</text>\n";
    f << "<text x=\"16\" y=\"" << (mt + h - mb) / 2
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << (mt + h - mb) / 2 << ")\">" << y_label << " (log)</text>\n";
    for (std::size_t i = 0; i < lx.size(); ++i)
        f << "<circle cx=\"" << px(lx[i]) << "\" cy=\"" << py(ly[i])
          << "\" r=\"3\" fill=\"steelblue\" fill-opacity=\"0.7\"/>\n";
    f << "</svg>\n";
}

int cmd_synthesize(const RunConfig& cfg) {
    validate_run_config(cfg);
    const ProblemSpec spec = make_problem(cfg.problem);

    SynthesisConfig sc;
    sc.init = cfg.init;
    sc.seed = cfg.seed;
    sc.max_iters = cfg.max_iters;
    sc.grad_tol = cfg.grad_tol;
    sc.fidelity_filter = cfg.fidelity_filter;

    const auto survivors = batch_synthesize(spec, cfg.t_f, cfg.kappa, cfg.restarts, sc);

    ensure_dir(cfg.out_dir);
    std::ofstream index = open_out((fs::path(cfg.out_dir) / "index.csv").string());
    index << kIndexHeader << "\r\n";
    for (const auto& s : survivors) {
        StoredController stored;
        stored.id = controller_id(cfg.problem, cfg.t_f, cfg.kappa, s.restart_index);
        stored.problem = cfg.problem;
        stored.ctrl = s.controller;
        stored.seed = s.seed;
        stored.init = s.init;
        stored.eps = s.error;
        save_controller((fs::path(cfg.out_dir) / (stored.id + ".json")).string(), stored);
        double max_field = 0.0;
        for (double v : s.controller.fields) max_field = std::max(max_field, std::abs(v));
        index << stored.id << ',' << s.seed << ',' << to_string(s.init) << ','
              << fmt_double(s.error) << ',' << fmt_double(s.fidelity) << ',' << s.iterations
              << ',' << (s.converged ? 1 : 0) << ',' << fmt_double(max_field) << "\r\n";
    }
    std::cout << "synthesize: " << survivors.size() << " of " << cfg.restarts
              << " restarts passed the eps < " << cfg.fidelity_filter << " filter\n";
    if (survivors.empty()) {
        std::cerr << "warning: no controllers survived the fidelity filter\n";
        return 4;
    }
    return 0;
}

int cmd_analyze(const RunConfig& cfg, const std::vector<std::string>& controller_files) {
    ensure_dir(cfg.out_dir);
    if (cfg.emit_traces) ensure_dir(fs::path(cfg.out_dir) / "traces");

    std::map<int, ProblemSpec> specs;
    std::map<int, UncertaintyStructure> structures;

    struct Slot {
        bool ok = false;
        RobustnessRecord rec;
        std::vector<std::pair<double, double>> trace;
        std::string error;
    };
    std::vector<Slot> slots(controller_files.size());

    // load serially (cheap, and spec/structure caches stay simple)
    std::vector<StoredController> loaded(controller_files.size());
    std::vector<bool> loadable(controller_files.size(), false);
    for (std::size_t i = 0; i < controller_files.size(); ++i) {
        try {
            loaded[i] = load_controller(controller_files[i]);
            const int pid = loaded[i].problem;
            if (!specs.count(pid)) {
                specs.emplace(pid, make_problem(pid));
                structures.emplace(pid, cfg.structures_file.empty()
                                            ? UncertaintyStructure::default_for(specs.at(pid))
                                            : load_structures(cfg.structures_file, specs.at(pid)));
            }
            if (loaded[i].ctrl.num_controls != specs.at(pid).num_controls())
                throw argument_error("controller shape does not match problem " +
                                     std::to_string(pid));
            loadable[i] = true;
        } catch (const std::exception& e) {
            slots[i].error = e.what();
        }
    }

    parallel_for(static_cast<int>(controller_files.size()), [&](int i) {
        if (!loadable[i]) return;
        Slot& slot = slots[i];
        try {
            const StoredController& sc = loaded[i];
            const ProblemSpec& spec = specs.at(sc.problem);
            const UncertaintyStructure& unc = structures.at(sc.problem);

            const SensitivityReport rep = analyze_sensitivity(spec, sc.ctrl, unc);
            double step = cfg.step;
            if (step <= 0.0) step = choose_step_size(spec, sc.ctrl, unc).value;
            const DeltaSearchResult search =
                find_delta_bar(spec, sc.ctrl, unc, cfg.epsilon, step, cfg.max_iter);

            slot.rec.id = sc.id;
            slot.rec.eps = rep.nominal_error;
            slot.rec.b_vu = rep.b_vu;
            slot.rec.b_static = rep.b_static;
            slot.rec.log_sens_norm = rep.log_sens.norm;
            slot.rec.delta_bar = search.delta_bar;
            slot.rec.delta_bar_lower_bound =
                search.terminated == DeltaSearchResult::Termination::max_iterations;
            slot.rec.step = step;
            slot.rec.seed = sc.seed;
            slot.rec.init = to_string(sc.init);
            slot.trace = search.trace;
            slot.ok = true;
        } catch (const std::exception& e) {
            slot.error = e.what();
        }
    });

    std::vector<RobustnessRecord> recs;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (!slots[i].ok) {
            std::cerr << "analyze: skipping '" << controller_files[i] << "': " << slots[i].error
                      << "\n";
            continue;
        }
        recs.push_back(slots[i].rec);
        if (cfg.emit_traces) {
            std::ofstream tf = open_out(
                (fs::path(cfg.out_dir) / "traces" / (slots[i].rec.id + "_trace.csv")).string());
            tf << "delta,perturbed_error\r\n";
            for (const auto& [d, e] : slots[i].trace)
                tf << fmt_double(d) << ',' << fmt_double(e) << "\r\n";
        }
    }

    write_records_csv((fs::path(cfg.out_dir) / "records.csv").string(), recs);
    std::cout << "analyze: wrote " << recs.size() << " records ("
              << controller_files.size() - recs.size() << " skipped)\n";
    return recs.empty() ? 4 : 0;
}

int cmd_stats(const StatsOptions& opt) {
    const auto recs = read_records_csv(opt.records_csv);

    std::string pair_name, x_name, y_name;
    StatsMethod method = opt.method;
    Tail tail = opt.tail;
    std::vector<double> x, y;
    for (const auto& r : recs) {
        switch (opt.pair) {
        case StatsPair::bvu_eps:
            x.push_back(r.b_vu);
            y.push_back(r.eps);
            break;
        case StatsPair::bvu_dbar:
            x.push_back(r.b_vu);
            y.push_back(r.delta_bar);
            break;
        case StatsPair::logsens_eps:
            x.push_back(r.log_sens_norm);
            y.push_back(r.eps);
            break;
        }
    }
    switch (opt.pair) {
    case StatsPair::bvu_eps:
        pair_name = "bvu-eps";
        x_name = "b_vu";
        y_name = "eps";
        if (!opt.method_set) method = StatsMethod::pearson;
        if (!opt.tail_set) tail = Tail::positive;
        break;
    case StatsPair::bvu_dbar:
        pair_name = "bvu-dbar";
        x_name = "b_vu";
        y_name = "delta_bar";
        if (!opt.method_set) method = StatsMethod::pearson;
        if (!opt.tail_set) tail = Tail::negative;
        break;
    case StatsPair::logsens_eps:
        pair_name = "logsens-eps";
        x_name = "log_sens_norm";
        y_name = "eps";
        if (!opt.method_set) method = StatsMethod::kendall;
        if (!opt.tail_set) tail = Tail::negative;
        break;
    }

    ensure_dir(opt.out_dir);
    std::ofstream out = open_out((fs::path(opt.out_dir) / "stats.csv").string());
    out << kStatsHeader << "\r\n";

    const char* method_name = method == StatsMethod::pearson ? "pearson" : "kendall";
    const char* tail_name = tail == Tail::negative ? "negative" : "positive";

    CorrelationResult res;
    std::string status = "ok";
    try {
        res = (method == StatsMethod::pearson) ? pearson_test(x, y, tail)
                                               : kendall_test(x, y, tail);
    } catch (const argument_error& e) {
        if (x.size() < 3) throw; // insufficient sample is a usage error
        status = "degenerate";   // e.g. zero variance: emit an error row
        res.n = static_cast<int>(x.size());
        std::cerr << "stats: " << e.what() << "\n";
    }

    out << pair_name << ',' << method_name << ',' << tail_name << ',' << res.n << ','
        << fmt_double(res.coefficient) << ',' << fmt_double(res.statistic) << ','
        << fmt_double(res.p_value) << ',' << (res.significant ? 1 : 0) << ',' << status
        << "\r\n";

    std::ofstream scatter = open_out((fs::path(opt.out_dir) / "scatter.csv").string());
    scatter << x_name << ',' << y_name << "\r\n";
    for (std::size_t i = 0; i < x.size(); ++i)
        scatter << fmt_double(x[i]) << ',' << fmt_double(y[i]) << "\r\n";

    if (!opt.svg_path.empty()) write_scatter_svg(opt.svg_path, x, y, x_name, y_name);

    std::cout << pair_name << " (" << method_name << ", " << tail_name << " tail): n=" << res.n
              << " coefficient=" << res.coefficient << " statistic=" << res.statistic
              << " p=" << res.p_value << (res.significant ? " (significant)" : "") << "\n";
    return 0;
}

} // namespace qsens
