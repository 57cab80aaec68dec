#include "ergoseq/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "ergoseq/error.hpp"

namespace ergoseq {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw InvalidSequence(std::string(what) + " must be finite");
}

// Padded value at 0-based position i; only valid when i < size or the tail is exact.
double padded(const TruncatedSequence& x, std::size_t i) {
    return i < x.size() ? x.values()[i] : x.tail().exact_value();
}

// Result prefix length when combining several sequences.
std::size_t aligned_length(std::span<const TruncatedSequence* const> terms) {
    std::size_t bounded_len = std::numeric_limits<std::size_t>::max();
    std::size_t exact_len = 0;
    bool any_bounded = false;
    for (const auto* t : terms) {
        if (t->tail().is_exact()) {
            exact_len = std::max(exact_len, t->size());
        } else {
            any_bounded = true;
            bounded_len = std::min(bounded_len, t->size());
        }
    }
    return any_bounded ? bounded_len : exact_len;
}

bool any_bounded(std::span<const TruncatedSequence* const> terms) {
    return std::any_of(terms.begin(), terms.end(),
                       [](const auto* t) { return !t->tail().is_exact(); });
}

}  // namespace

Tail Tail::constant(double c) {
    require_finite(c, "constant tail");
    if (c == 0.0) return Tail{};
    return Tail{TailKind::Constant, c};
}

Tail Tail::bounded(double b) {
    require_finite(b, "tail bound");
    if (b < 0.0) throw InvalidSequence("tail bound must be nonnegative");
    if (b == 0.0) return Tail{};
    return Tail{TailKind::Bounded, b};
}

double Tail::sup() const noexcept {
    return kind_ == TailKind::Zero ? 0.0 : std::abs(value_);
}

TruncatedSequence::TruncatedSequence(std::vector<double> values, Tail tail)
    : values_(std::move(values)), tail_(tail) {
    for (double v : values_) require_finite(v, "sequence entry");
}

TruncatedSequence TruncatedSequence::ones() { return TruncatedSequence({}, Tail::constant(1.0)); }

TruncatedSequence TruncatedSequence::unit(std::size_t index) {
    if (index == 0) throw InvalidSequence("unit vector index is 1-based");
    std::vector<double> v(index, 0.0);
    v.back() = 1.0;
    return TruncatedSequence(std::move(v));
}

double TruncatedSequence::at(std::size_t s) const {
    if (s == 0) throw InvalidSequence("sequence positions are 1-based");
    if (s <= values_.size()) return values_[s - 1];
    if (!tail_.is_exact()) throw InvalidSequence("position " + std::to_string(s) + " lies in a bounded tail");
    return tail_.exact_value();
}

std::size_t TruncatedSequence::support_length() const noexcept {
    for (std::size_t i = values_.size(); i > 0; --i) {
        if (values_[i - 1] != 0.0) return i;
    }
    return 0;
}

double TruncatedSequence::sup_beyond(std::size_t position) const noexcept {
    double m = tail_.sup();
    for (std::size_t i = position; i < values_.size(); ++i) m = std::max(m, std::abs(values_[i]));
    return m;
}

double norm(const TruncatedSequence& x, double p) {
    if (std::isnan(p) || p < 1.0) throw PreconditionViolated("norm exponent must lie in [1, inf]");
    if (std::isinf(p)) return x.sup_beyond(0);

    switch (x.tail().kind()) {
        case TailKind::Constant:
            return kInfinity;
        case TailKind::Bounded:
            throw UndecidableNorm("lp norm of a sequence with a bounded tail is undecidable");
        case TailKind::Zero:
            break;
    }

    const auto v = x.values();
    if (p == 1.0) {
        double s = 0.0;
        for (double e : v) s += std::abs(e);
        return s;
    }
    // Scale by the largest magnitude to keep |e|^p representable.
    const double scale = x.sup_beyond(0);
    if (scale == 0.0) return 0.0;
    double s = 0.0;
    for (double e : v) s += std::pow(std::abs(e) / scale, p);
    return scale * std::pow(s, 1.0 / p);
}

TruncatedSequence rearrange(const TruncatedSequence& x) {
    std::vector<double> mags;
    mags.reserve(x.size());
    const Tail& tail = x.tail();

    switch (tail.kind()) {
        case TailKind::Zero:
            for (double v : x.values()) mags.push_back(std::abs(v));
            std::stable_sort(mags.begin(), mags.end(), std::greater<>{});
            return TruncatedSequence(std::move(mags));

        case TailKind::Constant: {
            // Entries at or below |c| are never reached by the inf-sup formula.
            const double c = std::abs(tail.value());
            for (double v : x.values()) {
                if (std::abs(v) > c) mags.push_back(std::abs(v));
            }
            std::stable_sort(mags.begin(), mags.end(), std::greater<>{});
            return TruncatedSequence(std::move(mags), Tail::constant(c));
        }

        case TailKind::Bounded: {
            const double b = tail.value();
            for (double v : x.values()) {
                if (v == 0.0) continue;
                if (std::abs(v) < b) {
                    throw InexactRearrangement("tail bound exceeds a prefix magnitude; rearrangement prefix is not certified");
                }
                mags.push_back(std::abs(v));
            }
            std::stable_sort(mags.begin(), mags.end(), std::greater<>{});
            return TruncatedSequence(std::move(mags), tail);
        }
    }
    return {};
}

bool majorized_by(const TruncatedSequence& x, const TruncatedSequence& y, double slack) {
    const TruncatedSequence xs = rearrange(x);
    const TruncatedSequence ys = rearrange(y);
    if (!xs.tail().is_exact() || !ys.tail().is_exact()) {
        throw InexactRearrangement("partial sums beyond a bounded prefix are undetermined");
    }

    const std::size_t len = std::max(xs.size(), ys.size());
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        sx += padded(xs, i);
        sy += padded(ys, i);
        if (sx > sy + slack) return false;
    }
    // Beyond len both partial sums grow linearly with the tail constants.
    return xs.tail().exact_value() <= ys.tail().exact_value();
}

SplitPair split_c0(const TruncatedSequence& x, std::size_t k) {
    if (k == 0) throw PreconditionViolated("split_c0 requires k >= 1");
    const Tail& tail = x.tail();
    if (tail.kind() == TailKind::Constant) throw NotInC0("sequence with a nonzero constant tail is not in c0");

    const double threshold = 1.0 / static_cast<double>(k);
    if (tail.sup() >= threshold) {
        throw SplitImpossible("tail bound " + std::to_string(tail.sup()) + " is not below 1/k");
    }

    const auto v = x.values();
    std::size_t support = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) >= threshold) support = i + 1;
    }

    std::vector<double> head(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(support));
    std::vector<double> rest(v.begin(), v.end());
    std::fill(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(support), 0.0);

    SplitPair out;
    out.head = TruncatedSequence(std::move(head));
    out.tail_part = TruncatedSequence(std::move(rest), tail);
    out.k = k;
    out.bound = out.tail_part.sup_beyond(0);
    return out;
}

TruncatedSequence linear_combination(std::span<const double> weights,
                                     std::span<const TruncatedSequence* const> terms) {
    if (weights.size() != terms.size()) throw PreconditionViolated("weights and terms differ in length");
    const std::size_t len = aligned_length(terms);

    std::vector<double> out(len, 0.0);
    for (std::size_t t = 0; t < terms.size(); ++t) {
        const double w = weights[t];
        if (w == 0.0) continue;
        for (std::size_t i = 0; i < len; ++i) out[i] += w * padded(*terms[t], i);
    }

    if (any_bounded(terms)) {
        double bound = 0.0;
        for (std::size_t t = 0; t < terms.size(); ++t) bound += std::abs(weights[t]) * terms[t]->sup_beyond(len);
        return TruncatedSequence(std::move(out), Tail::bounded(bound));
    }
    double c = 0.0;
    for (std::size_t t = 0; t < terms.size(); ++t) c += weights[t] * terms[t]->tail().exact_value();
    return TruncatedSequence(std::move(out), Tail::constant(c));
}

TruncatedSequence operator+(const TruncatedSequence& a, const TruncatedSequence& b) {
    const double w[] = {1.0, 1.0};
    const TruncatedSequence* t[] = {&a, &b};
    return linear_combination(w, t);
}

TruncatedSequence operator-(const TruncatedSequence& a, const TruncatedSequence& b) {
    const double w[] = {1.0, -1.0};
    const TruncatedSequence* t[] = {&a, &b};
    return linear_combination(w, t);
}

TruncatedSequence operator*(double c, const TruncatedSequence& a) {
    const double w[] = {c};
    const TruncatedSequence* t[] = {&a};
    return linear_combination(w, t);
}

TruncatedSequence abs(const TruncatedSequence& a) {
    std::vector<double> v(a.values().begin(), a.values().end());
    for (double& e : v) e = std::abs(e);
    const Tail& t = a.tail();
    switch (t.kind()) {
        case TailKind::Zero:
            return TruncatedSequence(std::move(v));
        case TailKind::Constant:
            return TruncatedSequence(std::move(v), Tail::constant(std::abs(t.value())));
        case TailKind::Bounded:
            return TruncatedSequence(std::move(v), t);
    }
    return {};
}

TruncatedSequence max_abs(const TruncatedSequence& a, const TruncatedSequence& b) {
    const TruncatedSequence* terms[] = {&a, &b};
    const std::size_t len = aligned_length(terms);
    std::vector<double> out(len);
    for (std::size_t i = 0; i < len; ++i) out[i] = std::max(std::abs(padded(a, i)), std::abs(padded(b, i)));
    if (any_bounded(terms)) {
        return TruncatedSequence(std::move(out), Tail::bounded(std::max(a.sup_beyond(len), b.sup_beyond(len))));
    }
    return TruncatedSequence(std::move(out), Tail::constant(std::max(a.tail().sup(), b.tail().sup())));
}

double sup_distance(const TruncatedSequence& a, const TruncatedSequence& b) {
    return norm(a - b, kInfinity);
}

}  // namespace ergoseq
