#include "ergoseq/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <functional>
#include <limits>
#include <sstream>

#include "ergoseq/ergodic.hpp"
#include "ergoseq/error.hpp"
#include "ergoseq/random.hpp"

namespace ergoseq {

namespace {

constexpr std::size_t kDefaultHorizon = std::size_t{1} << 12;
constexpr std::size_t kDemoHorizon = std::size_t{1} << 20;
constexpr std::size_t kMinDemoHorizon = std::size_t{1} << 10;
constexpr std::size_t kDecompositionDoublings = 62;
constexpr std::size_t kPermutationTerms = 3;
constexpr std::size_t kPerturbations = 64;
constexpr std::size_t kFatouFamily = 32;
constexpr double kEq3Tolerance = 1e-10;
constexpr double kSandwichK[] = {2.0, 8.0, 32.0};

// Independent sub-streams of one trial.
enum Stream : std::uint64_t { kOperatorStream = 1, kInputStream = 2, kAuxStream = 3 };

std::uint64_t stream_seed(const SuiteConfig& cfg, std::size_t index, Stream s) {
    return mix_seed(trial_seed(cfg.seed, index) ^ mix_seed(s));
}

DsOperator draw_operator(const SuiteConfig& cfg, std::size_t index, SignMode sign) {
    switch (cfg.op) {
        case OperatorChoice::Random:
            return random_ds(cfg.dim, cfg.density, sign, stream_seed(cfg, index, kOperatorStream));
        case OperatorChoice::Identity:
            return DsOperator::identity(cfg.dim);
        case OperatorChoice::LeftShift:
            return DsOperator::shift(ShiftDirection::Left);
        case OperatorChoice::Swap: {
            std::vector<std::size_t> map(std::max<std::size_t>(cfg.dim, 2));
            for (std::size_t i = 0; i < map.size(); ++i) map[i] = i + 1;
            std::swap(map[0], map[1]);
            return DsOperator::permutation(map);
        }
    }
    throw PreconditionViolated("unknown operator choice");
}

std::vector<double> random_vector(Rng& rng, std::size_t dim, bool nonnegative) {
    std::vector<double> v(dim);
    for (double& e : v) e = nonnegative ? rng.uniform_positive() : 2.0 * rng.uniform() - 1.0;
    return v;
}

TruncatedSequence normalized(std::vector<double> v, double p) {
    TruncatedSequence x(std::move(v));
    const double n = norm(x, p);
    return n > 0.0 ? (1.0 / n) * x : x;
}

// Random input with unit lp norm, or e1 when the config asks for it.
TruncatedSequence draw_input(const SuiteConfig& cfg, Rng& rng, double p, bool nonnegative) {
    if (cfg.input == InputChoice::E1) return TruncatedSequence::unit(1);
    return normalized(random_vector(rng, cfg.dim, nonnegative), p);
}

SignMode alternating_sign(std::size_t index) { return index % 2 == 0 ? SignMode::Nonnegative : SignMode::Signed; }

double slack_for(const TruncatedSequence& x) { return 1e-12 * std::max(1.0, norm(x, 1.0)); }

std::vector<TraceRow> checkpoint_trace(const std::vector<Checkpoint>& cps) {
    std::vector<TraceRow> rows;
    for (const auto& cp : cps) {
        const auto v = cp.average.values();
        for (std::size_t i = 0; i < v.size(); ++i) rows.push_back({cp.n, cp.residual, i + 1, v[i]});
    }
    return rows;
}

Json make_artifact(SuiteName suite, const SuiteConfig& cfg, std::size_t index, const Json& inputs) {
    return Json{{"suite", to_string(suite)}, {"index", index}, {"config", to_json(cfg)}, {"inputs", inputs}};
}

// ---------------------------------------------------------------------------
// maximal_ineq

Json draw_maximal_ineq(const SuiteConfig& cfg, std::size_t index) {
    Rng rng(stream_seed(cfg, index, kInputStream));
    Json xs = Json::array();
    for (double p : cfg.p_values) xs.push_back(Json{{"p", p}, {"x", to_json(draw_input(cfg, rng, p, true))}});
    return Json{{"T", to_json(draw_operator(cfg, index, SignMode::Nonnegative))}, {"xs", xs}};
}

TrialRecord eval_maximal_ineq(const SuiteConfig& cfg, std::size_t index, const Json& inputs,
                              std::vector<TraceRow>*) {
    const DsOperator op = operator_from_json(inputs.at("T"));
    const std::size_t horizon = cfg.horizon_for(SuiteName::MaximalIneq);

    TrialRecord rec;
    rec.index = index;
    Json violations = Json::array();
    Json worst;
    for (const auto& entry : inputs.at("xs")) {
        const double p = entry.at("p").get<double>();
        const TruncatedSequence x = sequence_from_json(entry.at("x"));
        const TruncatedSequence maximal = maximal_function(op, x, horizon);
        for (double alpha : cfg.alpha_values) {
            const MaximalCheck check = check_maximal_inequality(maximal, x, p, alpha);
            if (check.ratio >= rec.ratio) {
                rec.ratio = check.ratio;
                worst = Json{{"p", p}, {"alpha", alpha}, {"lhs_card", check.lhs_card}, {"rhs_bound", check.rhs_bound}};
            }
            if (!check.holds) {
                rec.passed = false;
                violations.push_back(Json{{"p", p},
                                          {"alpha", alpha},
                                          {"lhs_card", check.lhs_card},
                                          {"rhs_bound", check.rhs_bound},
                                          {"coordinates", check.witnesses}});
            }
        }
    }
    rec.details = Json{{"max_ratio", rec.ratio}, {"worst", worst}, {"horizon", horizon}};
    if (!violations.empty()) rec.details["violations"] = violations;
    return rec;
}

// ---------------------------------------------------------------------------
// convergence

Json draw_convergence(const SuiteConfig& cfg, std::size_t index) {
    Rng rng(stream_seed(cfg, index, kInputStream));
    return Json{{"T", to_json(draw_operator(cfg, index, alternating_sign(index)))},
                {"x", to_json(draw_input(cfg, rng, 2.0, false))}};
}

// ‖A(n)x − x̂‖ <= ‖A(n)y − ŷ‖ + 2/k at every checkpoint, with y the c0 head of x.
bool sandwich_holds(const DsOperator& op, const TruncatedSequence& x, const ConvergenceReport& report, double k,
                    Json& detail) {
    const SplitPair split = split_c0(x, static_cast<std::size_t>(k));
    const TruncatedSequence& y = split.head;
    const bool head_empty = y.support_length() == 0;
    const bool head_full = split.tail_part.support_length() == 0;

    std::vector<TruncatedSequence> y_avgs;
    TruncatedSequence y_limit;
    if (!head_empty && !head_full) {
        AverageState state(op, y);
        std::size_t next = 0;
        while (state.n() < report.horizon) {
            state.step();
            if (next < report.residual_trace.size() && state.n() == report.residual_trace[next].n) {
                y_avgs.push_back(state.average());
                ++next;
            }
        }
        y_limit = state.average();
    }

    double worst_margin = -kInfinity;
    for (std::size_t i = 0; i < report.residual_trace.size(); ++i) {
        const auto& cp = report.residual_trace[i];
        const double lhs = sup_distance(cp.average, report.limit_estimate);
        double y_term = 0.0;
        if (head_full) y_term = lhs;
        if (!head_empty && !head_full) y_term = sup_distance(y_avgs[i], y_limit);
        worst_margin = std::max(worst_margin, lhs - (y_term + 2.0 / k));
    }
    detail[std::to_string(static_cast<int>(k))] = Json{{"support", split.support()}, {"worst_margin", worst_margin}};
    return worst_margin <= 1e-12;
}

TrialRecord eval_convergence(const SuiteConfig& cfg, std::size_t index, const Json& inputs,
                             std::vector<TraceRow>* trace) {
    const DsOperator op = operator_from_json(inputs.at("T"));
    const TruncatedSequence x = sequence_from_json(inputs.at("x"));
    const std::size_t horizon = cfg.horizon_for(SuiteName::Convergence);

    const ConvergenceReport report = run_averaging(op, x, horizon, cfg.tol, cfg.window);
    const Membership member = contains(SpaceDescriptor::lp(2.0), report.limit_estimate);
    const bool majorized = majorized_by(report.limit_estimate, x, slack_for(x));

    Json sandwich = Json::object();
    bool sandwich_ok = true;
    for (double k : kSandwichK) sandwich_ok = sandwich_holds(op, x, report, k, sandwich) && sandwich_ok;

    TrialRecord rec;
    rec.index = index;
    rec.residual = report.residual_trace.empty() ? 0.0 : report.residual_trace.back().residual;
    rec.passed = report.converged && member == Membership::Member && majorized && sandwich_ok;
    rec.details = Json{{"converged", report.converged},
                       {"horizon_reached", report.horizon},
                       {"final_residual", rec.residual},
                       {"limit_membership", to_string(member)},
                       {"limit_majorized", majorized},
                       {"sandwich", sandwich}};
    if (trace) *trace = checkpoint_trace(report.residual_trace);
    return rec;
}

// ---------------------------------------------------------------------------
// majorization

TrialRecord eval_majorization(const SuiteConfig& cfg, std::size_t index, const Json& inputs,
                              std::vector<TraceRow>* trace) {
    const DsOperator op = operator_from_json(inputs.at("T"));
    const TruncatedSequence x = sequence_from_json(inputs.at("x"));
    const std::size_t horizon = cfg.horizon_for(SuiteName::Majorization);
    const double slack = slack_for(x);

    TrialRecord rec;
    rec.index = index;
    AverageState state(op, x);
    std::size_t next = 1;
    std::size_t checked = 0;
    Json failed_at = Json::array();
    std::vector<Checkpoint> cps;
    TruncatedSequence previous;
    while (state.n() < horizon) {
        state.step();
        if (state.n() != next && state.n() != horizon) continue;
        if (state.n() == next) next *= 2;
        TruncatedSequence avg = state.average();
        ++checked;
        if (!majorized_by(avg, x, slack)) {
            rec.passed = false;
            failed_at.push_back(state.n());
        }
        const double residual = state.n() == 1 ? 0.0 : sup_distance(avg, previous);
        previous = avg;
        cps.push_back({state.n(), residual, std::move(avg)});
    }
    rec.details = Json{{"checkpoints_checked", checked}, {"horizon", horizon}};
    if (!failed_at.empty()) rec.details["failed_at"] = failed_at;
    if (trace) *trace = checkpoint_trace(cps);
    return rec;
}

// ---------------------------------------------------------------------------
// decomposition

Json draw_decomposition(const SuiteConfig& cfg, std::size_t index) {
    Rng rng(stream_seed(cfg, index, kInputStream));
    const DsOperator op = cfg.op == OperatorChoice::Random
                              ? random_doubly_stochastic(cfg.dim, kPermutationTerms,
                                                         stream_seed(cfg, index, kOperatorStream))
                              : to_matrix(draw_operator(cfg, index, SignMode::Nonnegative), cfg.dim);
    TruncatedSequence x = cfg.input == InputChoice::E1 ? TruncatedSequence::unit(1)
                                                       : TruncatedSequence(random_vector(rng, cfg.dim, false));
    Json probes = Json::array();
    for (int i = 0; i < 2; ++i) probes.push_back(to_json(TruncatedSequence(random_vector(rng, cfg.dim, false))));
    return Json{{"T", to_json(op)}, {"x", to_json(x)}, {"probes", probes}};
}

TrialRecord eval_decomposition(const SuiteConfig& cfg, std::size_t index, const Json& inputs,
                               std::vector<TraceRow>*) {
    const DsOperator op = operator_from_json(inputs.at("T"));
    const TruncatedSequence x = sequence_from_json(inputs.at("x"));
    const double x_norm = norm(x, 2.0);

    TrialRecord rec;
    rec.index = index;
    Decomposition d;
    bool solved = true;
    try {
        d = mean_ergodic_decompose(op, x, cfg.tol, kDecompositionDoublings);
    } catch (const NoConvergence& e) {
        d = e.partial();
        solved = false;
    }
    const double relative = x_norm > 0.0 ? d.residual / x_norm : d.residual;

    // ‖Tv − v‖² = ‖Tv‖² − ‖v‖² for transpose-fixed v.
    double eq3_worst = 0.0;
    for (const auto& probe : inputs.at("probes")) {
        const TruncatedSequence v =
            transpose_fixed_projection(op, sequence_from_json(probe), std::min(cfg.tol, 1e-12), kDecompositionDoublings);
        const TruncatedSequence tv = apply(op, v);
        const double lhs = std::pow(norm(tv - v, 2.0), 2.0);
        const double rhs = std::pow(norm(tv, 2.0), 2.0) - std::pow(norm(v, 2.0), 2.0);
        eq3_worst = std::max(eq3_worst, std::abs(lhs - rhs));
    }

    rec.residual = relative;
    rec.passed = solved && d.residual <= cfg.tol * x_norm && d.fixed_defect <= cfg.tol && eq3_worst <= kEq3Tolerance;
    rec.details = Json{{"residual", d.residual},
                       {"relative_residual", relative},
                       {"fixed_defect", d.fixed_defect},
                       {"averaging_order", d.averaging_order},
                       {"solver_iterations", d.solver_iterations},
                       {"isometry_identity_error", eq3_worst}};
    return rec;
}

// ---------------------------------------------------------------------------
// rearrangement continuity

Json draw_rearrangement(const SuiteConfig& cfg, std::size_t index) {
    Rng rng(stream_seed(cfg, index, kInputStream));
    const std::size_t dim = std::max<std::size_t>(cfg.dim, 2);
    TruncatedSequence x = cfg.input == InputChoice::E1 ? TruncatedSequence::unit(1)
                                                       : TruncatedSequence(random_vector(rng, dim, false));
    Json perturbed = Json::array();
    for (std::size_t m = 1; m <= kPerturbations; ++m) {
        std::vector<double> delta(dim, 0.0);
        if (cfg.input == InputChoice::E1) {
            delta[1] = 1.0 / static_cast<double>(m);
        } else {
            delta = random_vector(rng, dim, false);
            double big = 0.0;
            for (double d : delta) big = std::max(big, std::abs(d));
            for (double& d : delta) d = d / big / static_cast<double>(m);
        }
        perturbed.push_back(to_json(x + TruncatedSequence(std::move(delta))));
    }
    return Json{{"x", to_json(x)}, {"perturbed", perturbed}};
}

TrialRecord eval_rearrangement(const SuiteConfig&, std::size_t index, const Json& inputs, std::vector<TraceRow>*) {
    const TruncatedSequence x = sequence_from_json(inputs.at("x"));
    const TruncatedSequence xs = rearrange(x);

    TrialRecord rec;
    rec.index = index;
    double worst_excess = -kInfinity;
    std::size_t m = 0;
    Json failures = Json::array();
    for (const auto& pj : inputs.at("perturbed")) {
        ++m;
        const TruncatedSequence xm = sequence_from_json(pj);
        const TruncatedSequence xms = rearrange(xm);
        const double distance = sup_distance(xm, x);
        const double bound = 1.0 / static_cast<double>(m);
        const double rounding = 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + norm(x, kInfinity));
        const std::size_t len = std::max(xs.size(), xms.size());
        for (std::size_t n = 1; n <= len; ++n) {
            const double gap = std::abs(xms.at(n) - xs.at(n));
            worst_excess = std::max(worst_excess, gap - distance);
            const bool contraction = gap <= distance;
            const bool within_bound = gap <= bound + rounding;
            if (!contraction || !within_bound) {
                rec.passed = false;
                failures.push_back(Json{{"m", m}, {"n", n}, {"gap", gap}, {"distance", distance}});
            }
        }
    }
    rec.residual = std::max(0.0, worst_excess);
    rec.details = Json{{"perturbations", m}, {"worst_gap_minus_distance", worst_excess}};
    if (!failures.empty()) rec.details["failures"] = failures;
    return rec;
}

// ---------------------------------------------------------------------------
// fatou

Json draw_fatou(const SuiteConfig& cfg, std::size_t index) {
    Rng rng(stream_seed(cfg, index, kInputStream));
    const std::size_t dim = cfg.dim;
    Json family = Json::array();
    TruncatedSequence x;
    std::string kind;
    switch (index % 3) {
        case 0: {
            kind = "scaled";
            x = cfg.input == InputChoice::E1 ? TruncatedSequence::unit(1)
                                             : TruncatedSequence(random_vector(rng, dim, true));
            for (std::size_t k = 1; k <= kFatouFamily; ++k) {
                family.push_back(to_json((1.0 - 1.0 / static_cast<double>(k)) * x));
            }
            break;
        }
        case 1: {
            kind = "prefixes";
            const auto y = random_vector(rng, dim, false);
            x = TruncatedSequence(y);
            for (std::size_t k = 1; k <= dim; ++k) {
                family.push_back(to_json(TruncatedSequence(std::vector<double>(y.begin(), y.begin() + k))));
            }
            break;
        }
        default: {
            kind = "noise";
            x = TruncatedSequence(random_vector(rng, dim, false));
            const TruncatedSequence noise(random_vector(rng, dim, false));
            for (std::size_t k = 1; k <= kFatouFamily; ++k) {
                family.push_back(to_json(x + (1.0 / static_cast<double>(k)) * noise));
            }
            break;
        }
    }
    return Json{{"kind", kind}, {"x", to_json(x)}, {"family", family}};
}

TrialRecord eval_fatou(const SuiteConfig& cfg, std::size_t index, const Json& inputs, std::vector<TraceRow>*) {
    const TruncatedSequence x = sequence_from_json(inputs.at("x"));
    std::vector<TruncatedSequence> family;
    for (const auto& f : inputs.at("family")) family.push_back(sequence_from_json(f));

    TrialRecord rec;
    rec.index = index;
    Json per_p = Json::object();
    for (double p : cfg.p_values) {
        bool ok = false;
        std::string note = "ok";
        try {
            ok = fatou_check(SpaceDescriptor::lp(p), family, x);
            if (!ok) note = "norm bound violated";
        } catch (const PreconditionViolated& e) {
            note = e.what();
        }
        rec.passed = rec.passed && ok;
        per_p[std::to_string(p)] = note;
    }
    rec.details = Json{{"kind", inputs.at("kind")}, {"checks", per_p}};
    return rec;
}

// ---------------------------------------------------------------------------
// counterexample

TrialRecord eval_counterexample(const SuiteConfig& cfg, std::size_t index, const Json& inputs,
                                std::vector<TraceRow>* trace) {
    const std::size_t horizon = inputs.at("horizon").get<std::size_t>();
    const bool contrast = inputs.at("c0_contrast").get<bool>();
    const DemoResult demo = demo_counterexample(horizon, contrast);

    TrialRecord rec;
    rec.index = index;
    rec.passed = contrast ? demo.gap <= kContrastGap : demo.gap >= kCounterexampleGap;
    rec.details = Json{{"coord", demo.coord},
                       {"horizon", demo.horizon},
                       {"limsup_est", demo.limsup_est},
                       {"liminf_est", demo.liminf_est},
                       {"gap", demo.gap},
                       {"c0_contrast", contrast},
                       {"threshold", contrast ? kContrastGap : kCounterexampleGap}};
    if (trace) *trace = demo.trace;
    (void)cfg;
    return rec;
}

// ---------------------------------------------------------------------------

using Drawer = std::function<Json(const SuiteConfig&, std::size_t)>;
using Evaluator = std::function<TrialRecord(const SuiteConfig&, std::size_t, const Json&, std::vector<TraceRow>*)>;

struct SuiteImpl {
    Drawer draw;
    Evaluator eval;
};

SuiteImpl suite_impl(SuiteName s) {
    switch (s) {
        case SuiteName::MaximalIneq:
            return {draw_maximal_ineq, eval_maximal_ineq};
        case SuiteName::Convergence:
            return {draw_convergence, eval_convergence};
        case SuiteName::Majorization:
            return {draw_convergence, eval_majorization};
        case SuiteName::Decomposition:
            return {draw_decomposition, eval_decomposition};
        case SuiteName::RearrangementContinuity:
            return {draw_rearrangement, eval_rearrangement};
        case SuiteName::Fatou:
            return {draw_fatou, eval_fatou};
        case SuiteName::Counterexample:
            return {[](const SuiteConfig& cfg, std::size_t) {
                        return Json{{"horizon", cfg.horizon_for(SuiteName::Counterexample)},
                                    {"c0_contrast", cfg.c0_contrast}};
                    },
                    eval_counterexample};
        case SuiteName::All:
            break;
    }
    throw PreconditionViolated("suite 'all' has no single-trial form");
}

TrialRecord run_trial_impl(SuiteName suite, const SuiteConfig& cfg, std::size_t index, std::vector<TraceRow>* trace) {
    const SuiteImpl impl = suite_impl(suite);
    const Json inputs = impl.draw(cfg, index);
    TrialRecord rec = impl.eval(cfg, index, inputs, trace);
    if (!rec.passed) rec.artifact = make_artifact(suite, cfg, index, inputs);
    return rec;
}

constexpr SuiteName kAllSuites[] = {SuiteName::MaximalIneq,   SuiteName::Convergence,
                                    SuiteName::Majorization,  SuiteName::Decomposition,
                                    SuiteName::RearrangementContinuity, SuiteName::Fatou,
                                    SuiteName::Counterexample};

void accumulate(Aggregate& agg, const TrialRecord& rec) {
    (rec.passed ? agg.pass : agg.fail) += 1;
    agg.max_ratio = std::max(agg.max_ratio, rec.ratio);
    agg.worst_residual = std::max(agg.worst_residual, rec.residual);
}

struct NamePair {
    SuiteName value;
    const char* name;
};
constexpr NamePair kSuiteNames[] = {
    {SuiteName::MaximalIneq, "maximal_ineq"},
    {SuiteName::Convergence, "convergence"},
    {SuiteName::Majorization, "majorization"},
    {SuiteName::Decomposition, "decomposition"},
    {SuiteName::RearrangementContinuity, "rearrangement_continuity"},
    {SuiteName::Fatou, "fatou"},
    {SuiteName::Counterexample, "counterexample"},
    {SuiteName::All, "all"},
};

Json trial_to_json(const TrialRecord& rec) {
    return Json{{"index", rec.index},
                {"passed", rec.passed},
                {"ratio", rec.ratio},
                {"residual", rec.residual},
                {"details", rec.details}};
}

Json report_body(const SuiteReport& report) {
    Json failures = Json::array();
    Json trials = Json::array();
    for (const auto& t : report.trials) {
        trials.push_back(trial_to_json(t));
        if (!t.passed) failures.push_back(t.artifact);
    }
    Json j{{"schema_version", kSchemaVersion},
           {"suite", to_string(report.suite)},
           {"config", to_json(report.config)},
           {"aggregate",
            {{"pass", report.aggregate.pass},
             {"fail", report.aggregate.fail},
             {"max_ratio", report.aggregate.max_ratio},
             {"worst_residual", report.aggregate.worst_residual}}},
           {"failures", failures},
           {"trials", trials}};
    if (!report.children.empty()) {
        Json children = Json::array();
        for (const auto& c : report.children) {
            Json cj = report_body(c);
            for (const auto& f : cj.at("failures")) j["failures"].push_back(f);
            children.push_back(std::move(cj));
        }
        j["suites"] = std::move(children);
    }
    if (!report.extra.is_null()) j["extra"] = report.extra;
    return j;
}

std::string fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

std::string to_string(SuiteName s) {
    for (const auto& p : kSuiteNames) {
        if (p.value == s) return p.name;
    }
    return "unknown";
}

SuiteName suite_from_string(const std::string& s) {
    for (const auto& p : kSuiteNames) {
        if (s == p.name) return p.value;
    }
    throw PreconditionViolated("unknown suite '" + s + "'");
}

std::string to_string(OperatorChoice c) {
    switch (c) {
        case OperatorChoice::Random:
            return "random";
        case OperatorChoice::Identity:
            return "identity";
        case OperatorChoice::LeftShift:
            return "left_shift";
        case OperatorChoice::Swap:
            return "swap";
    }
    return "unknown";
}

OperatorChoice operator_choice_from_string(const std::string& s) {
    if (s == "random") return OperatorChoice::Random;
    if (s == "identity") return OperatorChoice::Identity;
    if (s == "left_shift") return OperatorChoice::LeftShift;
    if (s == "swap") return OperatorChoice::Swap;
    throw PreconditionViolated("unknown operator choice '" + s + "'");
}

std::string to_string(InputChoice c) { return c == InputChoice::E1 ? "e1" : "random"; }

InputChoice input_choice_from_string(const std::string& s) {
    if (s == "random") return InputChoice::Random;
    if (s == "e1") return InputChoice::E1;
    throw PreconditionViolated("unknown input choice '" + s + "'");
}

std::size_t SuiteConfig::horizon_for(SuiteName s) const {
    if (horizon) return *horizon;
    return s == SuiteName::Counterexample ? kDemoHorizon : kDefaultHorizon;
}

void SuiteConfig::validate() const {
    if (trials < 1) throw PreconditionViolated("trials must be >= 1");
    if (dim < 1) throw PreconditionViolated("dim must be >= 1");
    if (horizon && *horizon < 2) throw PreconditionViolated("horizon must be >= 2");
    if (!(tol >= 0.0)) throw PreconditionViolated("tol must be nonnegative");
    if (window < 2) throw PreconditionViolated("window must be >= 2");
    if (!(density > 0.0 && density <= 1.0)) throw PreconditionViolated("density must lie in (0, 1]");
    for (double p : p_values) {
        if (!(p >= 1.0) || std::isinf(p)) throw PreconditionViolated("p values must lie in [1, inf)");
    }
    for (double a : alpha_values) {
        if (!(a > 0.0)) throw PreconditionViolated("alpha values must be positive");
    }
    const bool demo = suite == SuiteName::Counterexample || suite == SuiteName::All;
    if (demo && horizon_for(SuiteName::Counterexample) < kMinDemoHorizon) {
        throw PreconditionViolated("counterexample demo needs horizon >= 1024");
    }
}

Json to_json(const SuiteConfig& cfg) {
    Json j{{"suite", to_string(cfg.suite)},
           {"seed", cfg.seed},
           {"trials", cfg.trials},
           {"dim", cfg.dim},
           {"tol", cfg.tol},
           {"p_values", cfg.p_values},
           {"alpha_values", cfg.alpha_values},
           {"window", cfg.window},
           {"density", cfg.density},
           {"operator", to_string(cfg.op)},
           {"input", to_string(cfg.input)},
           {"c0_contrast", cfg.c0_contrast}};
    j["horizon"] = cfg.horizon ? Json(*cfg.horizon) : Json(nullptr);
    return j;
}

SuiteConfig config_from_json(const Json& j) {
    SuiteConfig cfg;
    cfg.suite = suite_from_string(j.at("suite").get<std::string>());
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.trials = j.at("trials").get<std::size_t>();
    cfg.dim = j.at("dim").get<std::size_t>();
    cfg.tol = j.at("tol").get<double>();
    cfg.p_values = j.at("p_values").get<std::vector<double>>();
    cfg.alpha_values = j.at("alpha_values").get<std::vector<double>>();
    cfg.window = j.at("window").get<std::size_t>();
    cfg.density = j.at("density").get<double>();
    cfg.op = operator_choice_from_string(j.at("operator").get<std::string>());
    cfg.input = input_choice_from_string(j.at("input").get<std::string>());
    cfg.c0_contrast = j.at("c0_contrast").get<bool>();
    if (!j.at("horizon").is_null()) cfg.horizon = j.at("horizon").get<std::size_t>();
    return cfg;
}

TrialRecord run_trial(SuiteName suite, const SuiteConfig& cfg, std::size_t index) {
    return run_trial_impl(suite, cfg, index, nullptr);
}

TrialRecord replay_artifact(const Json& artifact) {
    const SuiteName suite = suite_from_string(artifact.at("suite").get<std::string>());
    const SuiteConfig cfg = config_from_json(artifact.at("config"));
    const std::size_t index = artifact.at("index").get<std::size_t>();
    const Json& inputs = artifact.at("inputs");
    TrialRecord rec = suite_impl(suite).eval(cfg, index, inputs, nullptr);
    if (!rec.passed) rec.artifact = make_artifact(suite, cfg, index, inputs);
    return rec;
}

SuiteReport run_suite(const SuiteConfig& cfg) {
    cfg.validate();
    SuiteReport report;
    report.suite = cfg.suite;
    report.config = cfg;

    if (cfg.suite == SuiteName::All) {
        for (SuiteName s : kAllSuites) {
            SuiteConfig sub = cfg;
            sub.suite = s;
            SuiteReport child = run_suite(sub);
            report.aggregate.pass += child.aggregate.pass;
            report.aggregate.fail += child.aggregate.fail;
            report.aggregate.max_ratio = std::max(report.aggregate.max_ratio, child.aggregate.max_ratio);
            report.aggregate.worst_residual = std::max(report.aggregate.worst_residual, child.aggregate.worst_residual);
            report.children.push_back(std::move(child));
        }
        return report;
    }

    // The demo is deterministic; one trial regardless of the requested count.
    const std::size_t trials = cfg.suite == SuiteName::Counterexample ? 1 : cfg.trials;
    report.trials.reserve(trials);
    for (std::size_t i = 0; i < trials; ++i) {
        TrialRecord rec = run_trial_impl(cfg.suite, cfg, i, i == 0 ? &report.trace : nullptr);
        accumulate(report.aggregate, rec);
        report.trials.push_back(std::move(rec));
    }
    if (cfg.suite == SuiteName::Counterexample) report.extra = report.trials.front().details;
    return report;
}

TruncatedSequence block_sequence(std::size_t length, bool c0_contrast) {
    std::vector<double> v(length, 0.0);
    for (std::size_t start = 1; start <= length; start *= 4) {
        for (std::size_t s = start; s < 2 * start && s <= length; ++s) {
            v[s - 1] = c0_contrast ? 1.0 / std::sqrt(static_cast<double>(s)) : 1.0;
        }
    }
    const double bound = c0_contrast ? 1.0 / std::sqrt(static_cast<double>(length + 1)) : 1.0;
    return TruncatedSequence(std::move(v), Tail::bounded(bound));
}

DemoResult demo_counterexample(std::size_t horizon, bool c0_contrast) {
    if (horizon < kMinDemoHorizon) throw PreconditionViolated("counterexample demo needs horizon >= 1024");
    const DsOperator shift = DsOperator::shift(ShiftDirection::Left);
    // A(n)x_1 needs x_1..x_n.
    const TruncatedSequence x = block_sequence(horizon, c0_contrast);

    DemoResult out;
    out.horizon = horizon;
    out.limsup_est = -kInfinity;
    out.liminf_est = kInfinity;
    const std::size_t octave_start = horizon / 2;

    double sum = 0.0;
    double last_traced = 0.0;
    std::size_t next_trace = 1;
    for (std::size_t n = 1; n <= horizon; ++n) {
        sum += power_coordinate(shift, x, n - 1, out.coord);
        const double avg = sum / static_cast<double>(n);
        if (n >= octave_start) {
            out.limsup_est = std::max(out.limsup_est, avg);
            out.liminf_est = std::min(out.liminf_est, avg);
        }
        // 16 samples per octave.
        if (n == next_trace || n == horizon) {
            out.trace.push_back({n, n == 1 ? 0.0 : std::abs(avg - last_traced), out.coord, avg});
            last_traced = avg;
            next_trace = std::max(n + 1, static_cast<std::size_t>(std::ceil(static_cast<double>(n) * 1.0442737824274138)));
        }
    }
    out.gap = out.limsup_est - out.liminf_est;
    return out;
}

Json report_to_json(const SuiteReport& report, bool with_timestamp) {
    Json j = report_body(report);
    j["body_hash"] = body_hash(j);
    if (with_timestamp) {
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&now, &tm);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        j["generated_at"] = buf;
    }
    return j;
}

std::string body_hash(const Json& report) {
    Json body = report;
    body.erase("generated_at");
    body.erase("body_hash");
    return fnv1a64(body.dump());
}

std::string trace_to_csv(const std::vector<TraceRow>& rows) {
    std::ostringstream out;
    out.precision(17);
    out << "n,residual,coord_index,coord_value\n";
    for (const auto& r : rows) out << r.n << ',' << r.residual << ',' << r.coord_index << ',' << r.coord_value << '\n';
    return out.str();
}

}  // namespace ergoseq
