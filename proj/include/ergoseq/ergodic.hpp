#pragma once

// Cesàro averages A(n,T)x = (1/n) Σ_{k<n} T^k x, their finite-horizon maximal
// function, sup-norm convergence detection and the l2 mean-ergodic split.

#include <cstddef>
#include <string>
#include <vector>

#include "ergoseq/error.hpp"
#include "ergoseq/operator.hpp"
#include "ergoseq/sequence.hpp"

namespace ergoseq {

/// Incremental state of the Cesàro average of one orbit.
///
/// After n steps: power_image() = T^n x, running_sum() = Σ_{k<n} T^k x and
/// maximal() = max_{1<=m<=n} |A(m,T)x| coordinatewise. Matrix operators on
/// finitely supported inputs run on flat buffers with compensated summation;
/// every other combination goes through apply().
class AverageState {
public:
    AverageState(DsOperator op, TruncatedSequence x);

    /// Advances n by one: one operator application plus vector updates.
    void step();

    std::size_t n() const noexcept { return n_; }
    const DsOperator& op() const noexcept { return op_; }

    /// A(n,T)x; requires n >= 1.
    TruncatedSequence average() const;
    TruncatedSequence power_image() const;
    TruncatedSequence running_sum() const;
    TruncatedSequence maximal() const;

    /// Fast-path only: writes A(n,T)x into `out` (length dim) without allocating.
    bool average_into(std::vector<double>& out) const;

private:

    DsOperator op_;
    std::size_t n_ = 0;

    // Flat buffers (matrix operator, finitely supported input).
    bool fast_ = false;
    std::vector<double> power_;
    std::vector<double> sum_;
    std::vector<double> compensation_;
    std::vector<double> maximal_;
    std::vector<double> scratch_;

    // General representation.
    TruncatedSequence power_seq_;
    TruncatedSequence sum_seq_;
    TruncatedSequence maximal_seq_;
};

struct Checkpoint {
    std::size_t n = 0;
    double residual = 0.0;       // ‖A(n)x − A(n/2)x‖_inf
    TruncatedSequence average;   // A(n)x
};

struct ConvergenceReport {
    TruncatedSequence limit_estimate;
    bool converged = false;
    std::vector<Checkpoint> residual_trace;
    std::size_t horizon = 0;  // n actually reached
    double tolerance = 0.0;
    std::size_t window = 0;
};

/// Runs the averages to `horizon`, comparing A(2n)x with A(n)x at every
/// power-of-two checkpoint. Stops early once the last `window` residuals are
/// all <= tol.
ConvergenceReport run_averaging(const DsOperator& op, const TruncatedSequence& x, std::size_t horizon, double tol,
                                std::size_t window);

/// max_{1<=n<=horizon} |A(n,T)x|: a lower envelope of the full maximal function.
TruncatedSequence maximal_function(const DsOperator& op, const TruncatedSequence& x, std::size_t horizon);

struct MaximalCheck {
    std::size_t lhs_card = 0;   // #{s : maximal_s >= alpha}
    double rhs_bound = 0.0;     // (2‖x‖_p / alpha)^p
    bool holds = true;
    double ratio = 0.0;         // lhs_card / rhs_bound
    std::vector<std::size_t> witnesses;  // 1-based coordinates counted in lhs_card
};

/// One-sided test of the weak-type bound card{Â ≥ α} ≤ (2‖x‖_p/α)^p at a finite
/// horizon. A pass is evidence; a failure is a refutation.
MaximalCheck check_maximal_inequality(const DsOperator& op, const TruncatedSequence& x, double p, double alpha,
                                      std::size_t horizon);

/// Same test against a precomputed maximal function.
MaximalCheck check_maximal_inequality(const TruncatedSequence& maximal, const TruncatedSequence& x, double p,
                                      double alpha);

struct Decomposition {
    TruncatedSequence fixed_part;         // y with Ty = y
    TruncatedSequence coboundary_source;  // z with x ≈ y + (Tz − z)
    double residual = 0.0;                // ‖x − y − (Tz − z)‖_2
    double fixed_defect = 0.0;            // ‖Ty − y‖_inf
    std::size_t averaging_order = 0;      // n with y = A(n,T)x
    std::size_t solver_iterations = 0;
};

class NoConvergence : public Error {
public:
    NoConvergence(Decomposition partial, const std::string& what) : Error(what), partial_(std::move(partial)) {}
    const Decomposition& partial() const noexcept { return partial_; }

private:
    Decomposition partial_;
};

/// Splits x into a T-fixed part plus a coboundary Tz − z.
///
/// The fixed part is A(n,T)x with n doubled (n = 2^i, i <= max_iters) until
/// ‖Ty − y‖_inf <= tol. z is the minimum-norm least-squares solution of
/// (T − I)z = x − y from CGLS started at zero. Throws NoConvergence, carrying
/// the partial result, when either stage misses its tolerance (residual
/// tolerance is tol·‖x‖_2).
Decomposition mean_ergodic_decompose(const DsOperator& op, const TruncatedSequence& x, double tol,
                                     std::size_t max_iters);

/// Projection onto {y : T^t y = y} by the same dyadic Cesàro escalation
/// applied to the transpose; used to produce test vectors for the l2
/// isometry identity ‖Ty − y‖² = ‖Ty‖² − ‖y‖².
TruncatedSequence transpose_fixed_projection(const DsOperator& op, const TruncatedSequence& x, double tol,
                                             std::size_t max_iters);

}  // namespace ergoseq
