// Command-line front end: falsification suites, the counterexample demo,
// DS certification of a matrix file and a single averaging run.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ergoseq/ergodic.hpp"
#include "ergoseq/error.hpp"
#include "ergoseq/harness.hpp"
#include "ergoseq/io.hpp"

using namespace ergoseq;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument("bad list item '" + item + "'");
        out.push_back(v);
    }
    return out;
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << body;
}

// key=value lines; '#' starts a comment.
std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

struct SuiteArgs {
    std::string suite;
    std::uint64_t seed = 0;
    std::size_t trials = 1000;
    std::size_t dim = 16;
    std::size_t horizon = 0;
    double tol = 1e-8;
    std::string p_list;
    std::string alpha_list;
    std::size_t window = 3;
    double density = 0.5;
    std::string op = "random";
    std::string input = "random";
    bool c0_contrast = false;
    std::string out;
    std::string trace;
    std::string config;
};

SuiteConfig build_config(const SuiteArgs& a, const CLI::App& sub) {
    SuiteConfig cfg;
    std::map<std::string, std::string> file;
    if (!a.config.empty()) file = read_config(a.config);

    // Flags given on the command line win over the config file.
    auto pick = [&](const char* flag, const char* key) -> std::optional<std::string> {
        if (sub.count(flag) == 0 && file.count(key)) return file.at(key);
        return std::nullopt;
    };
    auto fs = pick("--seed", "seed");
    cfg.seed = fs ? std::stoull(*fs) : a.seed;
    auto ft = pick("--trials", "trials");
    cfg.trials = ft ? std::stoull(*ft) : a.trials;
    auto fd = pick("--dim", "dim");
    cfg.dim = fd ? std::stoull(*fd) : a.dim;
    auto fh = pick("--horizon", "horizon");
    if (fh) cfg.horizon = std::stoull(*fh);
    else if (sub.count("--horizon")) cfg.horizon = a.horizon;
    auto ftol = pick("--tol", "tol");
    cfg.tol = ftol ? std::stod(*ftol) : a.tol;
    auto fp = pick("--p", "p");
    if (fp) cfg.p_values = parse_list(*fp);
    else if (!a.p_list.empty()) cfg.p_values = parse_list(a.p_list);
    auto fa = pick("--alpha", "alpha");
    if (fa) cfg.alpha_values = parse_list(*fa);
    else if (!a.alpha_list.empty()) cfg.alpha_values = parse_list(a.alpha_list);
    auto fw = pick("--window", "window");
    cfg.window = fw ? std::stoull(*fw) : a.window;
    auto fden = pick("--density", "density");
    cfg.density = fden ? std::stod(*fden) : a.density;
    auto fop = pick("--operator", "operator");
    cfg.op = operator_choice_from_string(fop ? *fop : a.op);
    auto fin = pick("--input", "input");
    cfg.input = input_choice_from_string(fin ? *fin : a.input);
    auto fc = pick("--c0-contrast", "c0_contrast");
    cfg.c0_contrast = fc ? (*fc == "true" || *fc == "1") : a.c0_contrast;
    cfg.suite = suite_from_string(a.suite);
    cfg.validate();
    return cfg;
}

void print_summary(const SuiteReport& r, const std::string& indent = "") {
    std::printf("%s%s: pass=%zu fail=%zu max_ratio=%.6g worst_residual=%.6g\n", indent.c_str(),
                to_string(r.suite).c_str(), r.aggregate.pass, r.aggregate.fail, r.aggregate.max_ratio,
                r.aggregate.worst_residual);
    for (const auto& c : r.children) print_summary(c, indent + "  ");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ergoseq: ergodic averages of Dunford-Schwartz operators on sequence spaces"};
    app.require_subcommand(1);

    SuiteArgs sa;
    auto* suite = app.add_subcommand("suite", "run a seeded falsification suite");
    suite->add_option("name", sa.suite, "maximal_ineq|convergence|majorization|decomposition|"
                                        "rearrangement_continuity|fatou|counterexample|all")
        ->required();
    suite->add_option("--seed", sa.seed);
    suite->add_option("--trials", sa.trials);
    suite->add_option("--dim", sa.dim);
    suite->add_option("--horizon", sa.horizon);
    suite->add_option("--tol", sa.tol);
    suite->add_option("--p", sa.p_list, "comma-separated exponents");
    suite->add_option("--alpha", sa.alpha_list, "comma-separated levels");
    suite->add_option("--window", sa.window);
    suite->add_option("--density", sa.density);
    suite->add_option("--operator", sa.op, "random|identity|left_shift|swap");
    suite->add_option("--input", sa.input, "random|e1");
    suite->add_flag("--c0-contrast", sa.c0_contrast);
    suite->add_option("--out", sa.out, "JSON report path");
    suite->add_option("--trace", sa.trace, "CSV trace path");
    suite->add_option("--config", sa.config, "key=value file");

    std::size_t demo_horizon = std::size_t{1} << 20;
    bool demo_contrast = false;
    std::string demo_out;
    std::string demo_trace;
    auto* demo = app.add_subcommand("demo", "counterexample demonstration");
    auto* demo_ce = demo->add_subcommand("counterexample", "left shift on the block sequence");
    demo->require_subcommand(1);
    demo_ce->add_option("--horizon", demo_horizon);
    demo_ce->add_flag("--c0-contrast", demo_contrast);
    demo_ce->add_option("--out", demo_out);
    demo_ce->add_option("--trace", demo_trace);

    std::string matrix_path;
    double cert_tol = 0.0;
    auto* certify = app.add_subcommand("certify", "check a matrix for the DS bounds");
    certify->add_option("--matrix", matrix_path, "operator JSON")->required();
    certify->add_option("--tolerance", cert_tol);

    std::string op_spec;
    std::string x_spec;
    std::size_t avg_horizon = std::size_t{1} << 12;
    double avg_tol = 1e-8;
    std::size_t avg_window = 3;
    std::string avg_out;
    std::string avg_trace;
    auto* average = app.add_subcommand("average", "Cesàro averages of one orbit");
    average->add_option("--op", op_spec, "identity:M | shift:left | shift:right | perm:i1,... | file:PATH")
        ->required();
    average->add_option("--x", x_spec, "v1,v2,...[@zero|@const:c|@bounded:b]")->required();
    average->add_option("--horizon", avg_horizon);
    average->add_option("--tol", avg_tol);
    average->add_option("--window", avg_window);
    average->add_option("--out", avg_out);
    average->add_option("--trace", avg_trace);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*suite) {
            SuiteConfig cfg;
            try {
                cfg = build_config(sa, *suite);
            } catch (const std::exception& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                return kExitUsage;
            }
            const SuiteReport report = run_suite(cfg);
            const Json j = report_to_json(report);
            if (!sa.out.empty()) write_file(sa.out, j.dump(2) + "\n");
            if (!sa.trace.empty()) {
                std::vector<TraceRow> rows = report.trace;
                for (const auto& c : report.children) rows.insert(rows.end(), c.trace.begin(), c.trace.end());
                write_file(sa.trace, trace_to_csv(rows));
            }
            print_summary(report);
            std::printf("body_hash=%s\n", j.at("body_hash").get<std::string>().c_str());
            return report.all_passed() ? 0 : kExitFail;
        }

        if (*demo_ce) {
            DemoResult d;
            try {
                d = demo_counterexample(demo_horizon, demo_contrast);
            } catch (const PreconditionViolated& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                return kExitUsage;
            }
            const bool ok = demo_contrast ? d.gap <= kContrastGap : d.gap >= kCounterexampleGap;
            std::printf("coord=%zu horizon=%zu limsup_est=%.9f liminf_est=%.9f gap=%.9f\n", d.coord, d.horizon,
                        d.limsup_est, d.liminf_est, d.gap);
            if (!demo_out.empty()) {
                Json j{{"coord", d.coord},
                       {"horizon", d.horizon},
                       {"limsup_est", d.limsup_est},
                       {"liminf_est", d.liminf_est},
                       {"gap", d.gap},
                       {"c0_contrast", demo_contrast}};
                write_file(demo_out, j.dump(2) + "\n");
            }
            if (!demo_trace.empty()) write_file(demo_trace, trace_to_csv(d.trace));
            return ok ? 0 : kExitFail;
        }

        if (*certify) {
            try {
                const DsOperator op = load_operator(matrix_path, cert_tol);
                std::printf("certified row_norm=%.17g col_norm=%.17g\n", op.certificate().row_norm,
                            op.certificate().col_norm);
                return 0;
            } catch (const NotContraction& e) {
                std::printf("rejected: %s\n", e.what());
                return kExitFail;
            }
        }

        if (*average) {
            DsOperator op = DsOperator::shift(ShiftDirection::Left);
            TruncatedSequence x;
            try {
                op = parse_operator_spec(op_spec);
                x = parse_sequence_spec(x_spec);
            } catch (const std::exception& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                return kExitUsage;
            }
            const ConvergenceReport r = run_averaging(op, x, avg_horizon, avg_tol, avg_window);
            std::vector<TraceRow> rows;
            Json checkpoints = Json::array();
            for (const auto& cp : r.residual_trace) {
                const auto v = cp.average.values();
                for (std::size_t i = 0; i < v.size(); ++i) rows.push_back({cp.n, cp.residual, i + 1, v[i]});
                checkpoints.push_back(Json{{"n", cp.n}, {"residual", cp.residual}});
            }
            std::printf("converged=%s horizon=%zu final_residual=%.6g\n", r.converged ? "true" : "false", r.horizon,
                        r.residual_trace.empty() ? 0.0 : r.residual_trace.back().residual);
            std::printf("limit=%s\n", to_json(r.limit_estimate).dump().c_str());
            if (!avg_out.empty()) {
                Json j{{"converged", r.converged},
                       {"horizon", r.horizon},
                       {"tolerance", r.tolerance},
                       {"window", r.window},
                       {"limit_estimate", to_json(r.limit_estimate)},
                       {"checkpoints", checkpoints}};
                write_file(avg_out, j.dump(2) + "\n");
            }
            if (!avg_trace.empty()) write_file(avg_trace, trace_to_csv(rows));
            return r.converged ? 0 : kExitFail;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFail;
    }
    return kExitUsage;
}
