#pragma once

// Finite representations of elements of l_inf: a prefix x_1..x_N plus a
// symbolic description of everything beyond position N.

#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace ergoseq {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class TailKind { Zero, Constant, Bounded };

/// What is known about x_s for s > N.
///
/// Constant(0) and Bounded(0) both pin every tail entry to zero and are
/// normalized to Zero on construction.
class Tail {
public:
    Tail() = default;

    static Tail zero() { return Tail{}; }
    static Tail constant(double c);
    static Tail bounded(double b);

    TailKind kind() const noexcept { return kind_; }
    double value() const noexcept { return value_; }

    /// Upper bound on |x_s| beyond the prefix.
    double sup() const noexcept;

    /// Value of every tail entry; only meaningful when the tail is exact.
    double exact_value() const noexcept { return kind_ == TailKind::Constant ? value_ : 0.0; }
    bool is_exact() const noexcept { return kind_ != TailKind::Bounded; }

    friend bool operator==(const Tail&, const Tail&) = default;

private:
    Tail(TailKind kind, double value) : kind_(kind), value_(value) {}

    TailKind kind_ = TailKind::Zero;
    double value_ = 0.0;
};

class TruncatedSequence {
public:
    TruncatedSequence() = default;
    explicit TruncatedSequence(std::vector<double> values, Tail tail = Tail::zero());

    /// The constant sequence {1, 1, ...}.
    static TruncatedSequence ones();
    /// Unit vector e_index (1-based) with zero tail.
    static TruncatedSequence unit(std::size_t index);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    const Tail& tail() const noexcept { return tail_; }

    /// x_s for 1-based s; throws InvalidSequence when s lies in a bounded tail.
    double at(std::size_t s) const;

    /// Every entry beyond the last nonzero prefix entry is zero.
    bool finitely_supported() const noexcept { return tail_.kind() == TailKind::Zero; }

    /// Largest 1-based index with a nonzero prefix entry (0 when none).
    std::size_t support_length() const noexcept;

    /// sup_{s > position} |x_s| (position is 0-based count of skipped entries).
    double sup_beyond(std::size_t position) const noexcept;

    std::vector<double> release_values() && { return std::move(values_); }

    friend bool operator==(const TruncatedSequence&, const TruncatedSequence&) = default;

private:
    std::vector<double> values_;
    Tail tail_;
};

/// lp norm for p in [1, inf]; pass kInfinity for the sup norm.
double norm(const TruncatedSequence& x, double p);

/// Non-increasing rearrangement x* of |x|.
TruncatedSequence rearrange(const TruncatedSequence& x);

/// Hardy-Littlewood-Polya order: true iff x ≺ y, i.e. every partial sum of
/// x* is at most the matching partial sum of y* (plus `slack`).
bool majorized_by(const TruncatedSequence& x, const TruncatedSequence& y, double slack = 0.0);

struct SplitPair {
    TruncatedSequence head;       // finitely supported part, positions 1..support
    TruncatedSequence tail_part;  // everything else, sup norm below 1/k
    std::size_t k = 1;
    double bound = 0.0;           // sup norm of tail_part

    std::size_t support() const noexcept { return head.size(); }
};

/// Splits a c0 element into a finitely supported head and a remainder with
/// sup norm < 1/k, using the shortest head that works.
SplitPair split_c0(const TruncatedSequence& x, std::size_t k);

// Arithmetic. Prefixes are aligned by padding exact tails; a bounded operand
// truncates the result to its prefix length and folds the rest into the bound.

TruncatedSequence linear_combination(std::span<const double> weights,
                                     std::span<const TruncatedSequence* const> terms);
TruncatedSequence operator+(const TruncatedSequence& a, const TruncatedSequence& b);
TruncatedSequence operator-(const TruncatedSequence& a, const TruncatedSequence& b);
TruncatedSequence operator*(double c, const TruncatedSequence& a);
TruncatedSequence abs(const TruncatedSequence& a);

/// Coordinatewise max(|a_s|, |b_s|).
TruncatedSequence max_abs(const TruncatedSequence& a, const TruncatedSequence& b);

/// ‖a − b‖_inf.
double sup_distance(const TruncatedSequence& a, const TruncatedSequence& b);

}  // namespace ergoseq
