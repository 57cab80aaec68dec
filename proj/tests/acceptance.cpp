// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "ergoseq/ergodic.hpp"
#include "ergoseq/harness.hpp"
#include "ergoseq/random.hpp"
#include "ergoseq/spaces.hpp"

using namespace ergoseq;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& what) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void dump_failures(const SuiteReport& r, const std::string& path) {
    Json arr = Json::array();
    for (const auto& t : r.trials) {
        if (!t.passed) arr.push_back(t.artifact);
    }
    if (arr.empty()) return;
    std::ofstream(path) << arr.dump(2) << "\n";
    std::printf("    reproducers written to %s\n", path.c_str());
}

void maximal_inequality() {
    SuiteConfig cfg;
    cfg.suite = SuiteName::MaximalIneq;
    cfg.seed = 42;
    cfg.trials = 1000;
    cfg.dim = 16;
    cfg.horizon = 4096;
    cfg.p_values = {1.0, 2.0, 3.0};
    cfg.alpha_values = {0.1, 0.25, 0.5, 1.0};
    const auto t0 = Clock::now();
    const SuiteReport r = run_suite(cfg);
    const double secs = seconds_since(t0);
    dump_failures(r, "acceptance_maximal_ineq_failures.json");
    report(1, r.aggregate.fail == 0 && secs <= 60.0,
           fmt("maximal inequality: %zu/%zu trials hold, max ratio %.4f, %.2f s (limit 60 s)", r.aggregate.pass,
               r.trials.size(), r.aggregate.max_ratio, secs));
}

void uniform_convergence() {
    SuiteConfig cfg;
    cfg.suite = SuiteName::Convergence;
    cfg.seed = 7;
    cfg.trials = 500;
    cfg.dim = 16;
    cfg.horizon = std::size_t{1} << 20;
    cfg.tol = 1e-8;
    const auto t0 = Clock::now();
    const SuiteReport r = run_suite(cfg);
    const double secs = seconds_since(t0);

    std::size_t converged = 0;
    std::size_t majorized = 0;
    std::size_t member = 0;
    std::size_t sandwich = 0;
    double best = kInfinity;
    for (const auto& t : r.trials) {
        converged += t.details.at("converged").get<bool>();
        majorized += t.details.at("limit_majorized").get<bool>();
        member += t.details.at("limit_membership") == "member";
        bool ok = true;
        for (const auto& [k, v] : t.details.at("sandwich").items()) ok = ok && v.at("worst_margin").get<double>() <= 1e-12;
        sandwich += ok;
        best = std::min(best, t.residual);
    }
    const std::size_t n = r.trials.size();
    std::printf("    sub-check limit majorized by input: %zu/%zu\n", majorized, n);
    std::printf("    sub-check limit contained in l2:    %zu/%zu\n", member, n);
    std::printf("    sub-check c0 split sandwich:        %zu/%zu\n", sandwich, n);
    std::printf("    final residuals: best %.3e, worst %.3e (tol 1e-8)\n", best, r.aggregate.worst_residual);
    dump_failures(r, "acceptance_convergence_failures.json");
    report(2, r.aggregate.fail == 0,
           fmt("uniform convergence: %zu/%zu converged at tol 1e-8 by n=2^20, %zu/%zu fully passing, %.1f s",
               converged, n, r.aggregate.pass, n, secs));
}

void decomposition() {
    SuiteConfig cfg;
    cfg.suite = SuiteName::Decomposition;
    cfg.seed = 42;
    cfg.trials = 200;
    cfg.tol = 1e-8;
    const SuiteReport r = run_suite(cfg);
    double worst_defect = 0.0;
    double worst_identity = 0.0;
    for (const auto& t : r.trials) {
        worst_defect = std::max(worst_defect, t.details.at("fixed_defect").get<double>());
        worst_identity = std::max(worst_identity, t.details.at("isometry_identity_error").get<double>());
    }
    dump_failures(r, "acceptance_decomposition_failures.json");
    report(3, r.aggregate.fail == 0,
           fmt("decomposition: %zu/%zu pass, worst relative residual %.2e (<= 1e-8), worst ‖Ty-y‖inf %.2e (<= 1e-8), "
               "worst isometry identity error %.2e (<= 1e-10)",
               r.aggregate.pass, r.trials.size(), r.aggregate.worst_residual, worst_defect, worst_identity));
}

void counterexample() {
    const std::size_t horizon = std::size_t{1} << 20;
    const auto t0 = Clock::now();
    const DemoResult d = demo_counterexample(horizon, false);
    const DemoResult c = demo_counterexample(horizon, true);
    const double secs = seconds_since(t0);
    report(4, d.gap >= kCounterexampleGap && c.gap <= kContrastGap && secs <= 10.0,
           fmt("counterexample: gap %.6f (>= %.2f) in [%.6f, %.6f]; c0 contrast gap %.6f (<= %.2f); %.2f s (limit 10 s)",
               d.gap, kCounterexampleGap, d.liminf_est, d.limsup_est, c.gap, kContrastGap, secs));
}

void modulus_domination() {
    std::size_t violations = 0;
    std::size_t checks = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const DsOperator t = random_ds(16, 0.5, SignMode::Signed, seed);
        const DsOperator abs_t = modulus(t);
        Rng rng(mix_seed(seed));
        std::vector<double> v(16);
        for (double& e : v) e = 2.0 * rng.uniform() - 1.0;
        TruncatedSequence tx(v);
        TruncatedSequence mx = abs(tx);
        for (int k = 1; k <= 20; ++k) {
            tx = apply(t, tx);
            mx = apply(abs_t, mx);
            for (std::size_t s = 1; s <= 16; ++s) {
                const double lhs = std::abs(tx.at(s));
                const double rhs = mx.at(s);
                ++checks;
                if (lhs > rhs * (1.0 + 1e-12)) ++violations;
                if (rhs > 0.0) worst = std::max(worst, lhs / rhs);
            }
        }
    }
    report(5, violations == 0,
           fmt("modulus domination: %zu violations in %zu entrywise checks (200 operators, k <= 20), max |T^k x|/|T|^k|x| = %.15f",
               violations, checks, worst));
}

void rearrangement_and_fatou() {
    SuiteConfig rc;
    rc.suite = SuiteName::RearrangementContinuity;
    rc.seed = 42;
    const SuiteReport r = run_suite(rc);
    SuiteConfig fc;
    fc.suite = SuiteName::Fatou;
    fc.seed = 42;
    const SuiteReport f = run_suite(fc);
    dump_failures(r, "acceptance_rearrangement_failures.json");
    dump_failures(f, "acceptance_fatou_failures.json");
    // worst_residual is max(0, max gap - ‖x_m - x‖inf): zero means the
    // contraction bound held exactly.
    report(6, r.all_passed() && f.all_passed() && r.aggregate.worst_residual == 0.0,
           fmt("rearrangement continuity %zu/%zu, contraction excess %.1e (exactly 0 required); fatou %zu/%zu",
               r.aggregate.pass, r.trials.size(), r.aggregate.worst_residual, f.aggregate.pass, f.trials.size()));
}

void determinism() {
    SuiteConfig cfg;
    cfg.suite = SuiteName::All;
    cfg.seed = 42;
    const auto t0 = Clock::now();
    const std::string a = report_to_json(run_suite(cfg)).at("body_hash").get<std::string>();
    const std::string b = report_to_json(run_suite(cfg)).at("body_hash").get<std::string>();
    report(7, a == b, fmt("determinism: suite all --seed 42 body hashes %s / %s, %.1f s", a.c_str(), b.c_str(),
                          seconds_since(t0)));
}

// Dense powers and naive sums; shares nothing with AverageState.
std::vector<double> brute_average(const std::vector<double>& t, const std::vector<double>& x, std::size_t n) {
    const std::size_t d = x.size();
    std::vector<double> sum(d, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> p(d * d, 0.0);
        for (std::size_t i = 0; i < d; ++i) p[i * d + i] = 1.0;
        for (std::size_t r = 0; r < k; ++r) {
            std::vector<double> q(d * d, 0.0);
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t l = 0; l < d; ++l)
                    for (std::size_t j = 0; j < d; ++j) q[i * d + j] += t[i * d + l] * p[l * d + j];
            p = std::move(q);
        }
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) sum[i] += p[i * d + j] * x[j];
    }
    for (double& e : sum) e /= static_cast<double>(n);
    return sum;
}

void oracle_equivalence() {
    double worst = 0.0;
    std::size_t compared = 0;
    for (std::uint64_t c = 0; c < 100; ++c) {
        Rng rng(trial_seed(2024, c));
        const std::size_t d = 1 + rng.below(4);
        const std::size_t horizon = 2 + rng.below(63);
        const DsOperator t = random_ds(d, 0.75, c % 2 ? SignMode::Signed : SignMode::Nonnegative, rng.next());
        std::vector<double> x(d);
        for (double& e : x) e = 2.0 * rng.uniform() - 1.0;
        const std::vector<double> dense = t.matrix().to_dense();
        AverageState state(t, TruncatedSequence(x));
        for (std::size_t n = 1; n <= horizon; ++n) {
            state.step();
            const auto want = brute_average(dense, x, n);
            const auto got = state.average();
            for (std::size_t s = 0; s < d; ++s) worst = std::max(worst, std::abs(got.at(s + 1) - want[s]));
            ++compared;
        }
    }
    report(8, worst <= 1e-12,
           fmt("oracle equivalence: 100 cases (dim <= 4, horizon <= 64), %zu averages compared, max deviation %.2e "
               "(<= 1e-12)",
               compared, worst));
}

}  // namespace

int main() {
    maximal_inequality();
    uniform_convergence();
    decomposition();
    counterexample();
    modulus_domination();
    rearrangement_and_fatou();
    determinism();
    oracle_equivalence();
    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
