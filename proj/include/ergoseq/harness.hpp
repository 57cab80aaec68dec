#pragma once

// Seeded falsification suites for the ergodic machinery and the report
// formats the command-line runner writes.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ergoseq/io.hpp"

namespace ergoseq {

inline constexpr int kSchemaVersion = 1;
inline constexpr double kCounterexampleGap = 0.2;
inline constexpr double kContrastGap = 0.01;

enum class SuiteName {
    MaximalIneq,
    Convergence,
    Majorization,
    Decomposition,
    RearrangementContinuity,
    Fatou,
    Counterexample,
    All,
};

enum class OperatorChoice { Random, Identity, LeftShift, Swap };
enum class InputChoice { Random, E1 };

std::string to_string(SuiteName s);
SuiteName suite_from_string(const std::string& s);
std::string to_string(OperatorChoice c);
OperatorChoice operator_choice_from_string(const std::string& s);
std::string to_string(InputChoice c);
InputChoice input_choice_from_string(const std::string& s);

struct SuiteConfig {
    SuiteName suite = SuiteName::All;
    std::uint64_t seed = 0;
    std::size_t trials = 1000;
    std::size_t dim = 16;
    /// Unset: 2^20 for the counterexample demo, 2^12 for everything else.
    std::optional<std::size_t> horizon;
    double tol = 1e-8;
    std::vector<double> p_values{1.0, 2.0, 3.0};
    std::vector<double> alpha_values{0.1, 0.25, 0.5, 1.0};
    std::size_t window = 3;
    double density = 0.5;
    OperatorChoice op = OperatorChoice::Random;
    InputChoice input = InputChoice::Random;
    bool c0_contrast = false;

    std::size_t horizon_for(SuiteName s) const;
    /// Throws PreconditionViolated on out-of-range fields.
    void validate() const;
};

Json to_json(const SuiteConfig& cfg);
SuiteConfig config_from_json(const Json& j);

struct TrialRecord {
    std::size_t index = 0;
    bool passed = true;
    double ratio = 0.0;     // maximal_ineq: largest lhs_card / rhs_bound
    double residual = 0.0;  // suite-specific worst residual
    Json details;
    Json artifact;          // present iff !passed
};

struct Aggregate {
    std::size_t pass = 0;
    std::size_t fail = 0;
    double max_ratio = 0.0;
    double worst_residual = 0.0;
};

struct TraceRow {
    std::size_t n = 0;
    double residual = 0.0;
    std::size_t coord_index = 0;
    double coord_value = 0.0;
};

struct SuiteReport {
    SuiteName suite = SuiteName::All;
    SuiteConfig config;
    std::vector<TrialRecord> trials;
    Aggregate aggregate;
    std::vector<SuiteReport> children;  // suite "all"
    std::vector<TraceRow> trace;
    Json extra;                          // suite-specific summary (demo values)

    bool all_passed() const noexcept { return aggregate.fail == 0; }
};

/// Runs one suite (or every suite for SuiteName::All). Trials are independent:
/// trial i draws from an RNG seeded by (seed, i).
SuiteReport run_suite(const SuiteConfig& cfg);

/// Single trial of a single suite.
TrialRecord run_trial(SuiteName suite, const SuiteConfig& cfg, std::size_t index);

/// Re-runs the trial serialized in a failure artifact from its stored inputs.
TrialRecord replay_artifact(const Json& artifact);

struct DemoResult {
    std::size_t coord = 1;
    std::size_t horizon = 0;
    double limsup_est = 0.0;  // max of A(n)x_1 over n in [horizon/2, horizon]
    double liminf_est = 0.0;  // min over the same octave
    double gap = 0.0;
    std::vector<TraceRow> trace;
};

/// Coordinate-1 averages of the left shift on the block sequence with ones on
/// [4^j, 2·4^j) (or, with c0_contrast, the same blocks damped by 1/sqrt(s)).
DemoResult demo_counterexample(std::size_t horizon, bool c0_contrast = false);

/// The block sequence (or its damped c0 variant) restricted to 1..length,
/// with a certified bound on the rest.
TruncatedSequence block_sequence(std::size_t length, bool c0_contrast = false);

/// {schema_version, suite, config, aggregate, failures, trials, ...}; includes
/// body_hash (FNV-1a over the report without generated_at) and generated_at.
Json report_to_json(const SuiteReport& report, bool with_timestamp = true);

/// Hash of a report body; generated_at and body_hash are ignored.
std::string body_hash(const Json& report);

/// CSV with header "n,residual,coord_index,coord_value".
std::string trace_to_csv(const std::vector<TraceRow>& rows);

}  // namespace ergoseq
