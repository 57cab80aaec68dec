#include "ergoseq/operator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ergoseq/error.hpp"
#include "ergoseq/random.hpp"

namespace ergoseq {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Dense row-major product c = a * b.
std::vector<double> dense_product(std::size_t n, const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a[i * n + k];
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) c[i * n + j] += aik * b[k * n + j];
        }
    }
    return c;
}

std::vector<double> dense_identity(std::size_t n) {
    std::vector<double> id(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) id[i * n + i] = 1.0;
    return id;
}

std::vector<double> dense_compression(const DsOperator& op, std::size_t dim);

std::vector<double> dense_power(std::size_t n, std::vector<double> base, std::size_t k) {
    std::vector<double> result = dense_identity(n);
    while (k > 0) {
        if (k & 1U) result = dense_product(n, result, base);
        k >>= 1U;
        if (k > 0) base = dense_product(n, base, base);
    }
    return result;
}

std::vector<double> dense_compression(const DsOperator& op, std::size_t dim) {
    return std::visit(
        Overloaded{
            [&](const MatrixForm& f) {
                std::vector<double> d(dim * dim, 0.0);
                for (const auto& e : f.matrix.entries()) {
                    if (e.row < dim && e.col < dim) d[e.row * dim + e.col] = e.value;
                }
                return d;
            },
            [&](const ShiftForm& f) {
                std::vector<double> d(dim * dim, 0.0);
                for (std::size_t r = 0; r < dim; ++r) {
                    if (f.direction == ShiftDirection::Left && r + 1 < dim) d[r * dim + r + 1] = 1.0;
                    if (f.direction == ShiftDirection::Right && r > 0) d[r * dim + r - 1] = 1.0;
                }
                return d;
            },
            [&](const PermutationForm& f) {
                // Coordinates beyond the permuted block are fixed.
                std::vector<double> d(dim * dim, 0.0);
                for (std::size_t i = 0; i < dim; ++i) {
                    const std::size_t image = i < f.map.size() ? f.map[i] : i;
                    if (image < dim) d[image * dim + i] = 1.0;
                }
                return d;
            },
            [&](const ConvexCombinationForm& f) {
                std::vector<double> d(dim * dim, 0.0);
                for (std::size_t p = 0; p < f.parts.size(); ++p) {
                    const auto part = dense_compression(f.parts[p], dim);
                    for (std::size_t i = 0; i < d.size(); ++i) d[i] += f.weights[p] * part[i];
                }
                return d;
            },
            [&](const PowerForm& f) { return dense_power(dim, dense_compression(*f.base, dim), f.exponent); },
            [&](const ComposeForm& f) {
                std::vector<double> d = dense_identity(dim);
                for (const auto& part : f.parts) d = dense_product(dim, d, dense_compression(part, dim));
                return d;
            },
        },
        op.form());
}

void require_certified(const DsOperator& op) {
    if (!op.certificate().certified) throw InvalidOperator("operand is not a certified DS operator");
}

TruncatedSequence apply_matrix(const SparseMatrix& m, const TruncatedSequence& x) {
    if (!x.finitely_supported()) {
        throw IncompatibleSupport("matrix operators act on finitely supported sequences only");
    }
    if (x.support_length() > m.dim()) {
        throw IncompatibleSupport("sequence support " + std::to_string(x.support_length()) +
                                  " exceeds operator dimension " + std::to_string(m.dim()));
    }
    std::vector<double> in(m.dim(), 0.0);
    std::copy_n(x.values().begin(), std::min(x.size(), m.dim()), in.begin());
    std::vector<double> out(m.dim(), 0.0);
    m.multiply(in, out);
    return TruncatedSequence(std::move(out));
}

}  // namespace

SparseMatrix::SparseMatrix(std::size_t dim, std::vector<MatrixEntry> entries) : dim_(dim) {
    for (const auto& e : entries) {
        if (e.row >= dim || e.col >= dim) throw InvalidOperator("matrix entry outside dimension");
        if (!std::isfinite(e.value)) throw InvalidOperator("matrix entries must be finite");
    }
    std::stable_sort(entries.begin(), entries.end(), [](const MatrixEntry& a, const MatrixEntry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (const auto& e : entries) {
        if (!entries_.empty() && entries_.back().row == e.row && entries_.back().col == e.col) {
            entries_.back().value += e.value;
        } else {
            entries_.push_back(e);
        }
    }
    std::erase_if(entries_, [](const MatrixEntry& e) { return e.value == 0.0; });

    row_start_.assign(dim_ + 1, 0);
    for (const auto& e : entries_) ++row_start_[e.row + 1];
    std::partial_sum(row_start_.begin(), row_start_.end(), row_start_.begin());
}

SparseMatrix SparseMatrix::identity(std::size_t dim) {
    std::vector<MatrixEntry> e;
    e.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i) e.push_back({i, i, 1.0});
    return SparseMatrix(dim, std::move(e));
}

SparseMatrix SparseMatrix::from_dense(std::size_t dim, std::span<const double> dense) {
    if (dense.size() != dim * dim) throw InvalidOperator("dense matrix has wrong size");
    std::vector<MatrixEntry> e;
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            if (dense[r * dim + c] != 0.0) e.push_back({r, c, dense[r * dim + c]});
        }
    }
    return SparseMatrix(dim, std::move(e));
}

double SparseMatrix::at(std::size_t row, std::size_t col) const {
    if (row >= dim_ || col >= dim_) throw InvalidOperator("matrix index out of range");
    for (std::size_t i = row_start_[row]; i < row_start_[row + 1]; ++i) {
        if (entries_[i].col == col) return entries_[i].value;
    }
    return 0.0;
}

double SparseMatrix::max_abs_row_sum() const {
    double best = 0.0;
    for (std::size_t r = 0; r < dim_; ++r) {
        double s = 0.0;
        for (std::size_t i = row_start_[r]; i < row_start_[r + 1]; ++i) s += std::abs(entries_[i].value);
        best = std::max(best, s);
    }
    return best;
}

double SparseMatrix::max_abs_col_sum() const {
    std::vector<double> sums(dim_, 0.0);
    for (const auto& e : entries_) sums[e.col] += std::abs(e.value);
    return sums.empty() ? 0.0 : *std::max_element(sums.begin(), sums.end());
}

void SparseMatrix::multiply(std::span<const double> in, std::span<double> out) const {
    for (std::size_t r = 0; r < dim_; ++r) {
        double s = 0.0;
        for (std::size_t i = row_start_[r]; i < row_start_[r + 1]; ++i) s += entries_[i].value * in[entries_[i].col];
        out[r] = s;
    }
}

SparseMatrix SparseMatrix::transpose() const {
    std::vector<MatrixEntry> t;
    t.reserve(entries_.size());
    for (const auto& e : entries_) t.push_back({e.col, e.row, e.value});
    return SparseMatrix(dim_, std::move(t));
}

SparseMatrix SparseMatrix::entrywise_abs() const {
    std::vector<MatrixEntry> a(entries_);
    for (auto& e : a) e.value = std::abs(e.value);
    return SparseMatrix(dim_, std::move(a));
}

std::vector<double> SparseMatrix::to_dense() const {
    std::vector<double> d(dim_ * dim_, 0.0);
    for (const auto& e : entries_) d[e.row * dim_ + e.col] = e.value;
    return d;
}

DsOperator certify_ds(SparseMatrix m, double tolerance) {
    if (!(tolerance >= 0.0)) throw PreconditionViolated("certification tolerance must be nonnegative");
    const double row = m.max_abs_row_sum();
    const double col = m.max_abs_col_sum();
    const double limit = 1.0 + tolerance;
    if (row > limit || col > limit) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "not a DS contraction:";
        if (row > limit) msg << " max absolute row sum " << row << " > 1";
        if (col > limit) msg << " max absolute column sum " << col << " > 1";
        throw NotContraction(row, col, msg.str());
    }
    return DsOperator(MatrixForm{std::move(m)}, Certificate{row, col, true});
}

DsOperator DsOperator::shift(ShiftDirection direction) {
    return DsOperator(ShiftForm{direction}, Certificate{1.0, 1.0, true});
}

DsOperator DsOperator::permutation(std::span<const std::size_t> one_based_map) {
    const std::size_t n = one_based_map.size();
    std::vector<std::size_t> map(n);
    std::vector<bool> seen(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t image = one_based_map[i];
        if (image == 0 || image > n || seen[image - 1]) throw InvalidOperator("permutation map is not a bijection of 1..n");
        seen[image - 1] = true;
        map[i] = image - 1;
    }
    return DsOperator(PermutationForm{std::move(map)}, Certificate{n ? 1.0 : 0.0, n ? 1.0 : 0.0, true});
}

DsOperator DsOperator::identity(std::size_t dim) { return certify_ds(SparseMatrix::identity(dim)); }

DsOperator DsOperator::convex_combination(std::vector<double> weights, std::vector<DsOperator> parts) {
    if (weights.size() != parts.size() || parts.empty()) {
        throw InvalidOperator("convex combination needs one weight per part and at least one part");
    }
    double total = 0.0;
    Certificate cert{0.0, 0.0, true};
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) throw InvalidOperator("convex weights must be nonnegative");
        require_certified(parts[i]);
        total += weights[i];
        cert.row_norm += weights[i] * parts[i].certificate().row_norm;
        cert.col_norm += weights[i] * parts[i].certificate().col_norm;
    }
    if (std::abs(total - 1.0) > kNumericalTolerance) throw InvalidOperator("convex weights must sum to 1");
    return DsOperator(ConvexCombinationForm{std::move(weights), std::move(parts)}, cert);
}

DsOperator DsOperator::power(DsOperator base, std::size_t exponent) {
    if (exponent == 0) throw InvalidOperator("operator power must be positive");
    require_certified(base);
    const auto& bc = base.certificate();
    Certificate cert{std::pow(bc.row_norm, static_cast<double>(exponent)),
                     std::pow(bc.col_norm, static_cast<double>(exponent)), true};
    return DsOperator(PowerForm{std::make_shared<const DsOperator>(std::move(base)), exponent}, cert);
}

DsOperator DsOperator::compose(std::vector<DsOperator> parts) {
    if (parts.empty()) throw InvalidOperator("composition needs at least one operator");
    Certificate cert{1.0, 1.0, true};
    for (const auto& p : parts) {
        require_certified(p);
        cert.row_norm *= p.certificate().row_norm;
        cert.col_norm *= p.certificate().col_norm;
    }
    return DsOperator(ComposeForm{std::move(parts)}, cert);
}

const SparseMatrix& DsOperator::matrix() const {
    if (const auto* m = std::get_if<MatrixForm>(&form_)) return m->matrix;
    throw UnsupportedForm("operator is not in matrix form: " + form_name());
}

std::optional<std::size_t> DsOperator::dim() const {
    const auto max_of = [](const std::vector<DsOperator>& parts) -> std::optional<std::size_t> {
        std::size_t d = 0;
        for (const auto& p : parts) {
            const auto pd = p.dim();
            if (!pd) return std::nullopt;
            d = std::max(d, *pd);
        }
        return d;
    };
    return std::visit(Overloaded{
                          [](const MatrixForm& f) -> std::optional<std::size_t> { return f.matrix.dim(); },
                          [](const ShiftForm&) -> std::optional<std::size_t> { return std::nullopt; },
                          [](const PermutationForm& f) -> std::optional<std::size_t> { return f.map.size(); },
                          [&](const ConvexCombinationForm& f) { return max_of(f.parts); },
                          [](const PowerForm& f) { return f.base->dim(); },
                          [&](const ComposeForm& f) { return max_of(f.parts); },
                      },
                      form_);
}

std::string DsOperator::form_name() const {
    return std::visit(Overloaded{
                          [](const MatrixForm&) { return std::string("matrix"); },
                          [](const ShiftForm& f) {
                              return std::string(f.direction == ShiftDirection::Left ? "shift_left" : "shift_right");
                          },
                          [](const PermutationForm&) { return std::string("permutation"); },
                          [](const ConvexCombinationForm&) { return std::string("convex_combination"); },
                          [](const PowerForm&) { return std::string("power"); },
                          [](const ComposeForm&) { return std::string("compose"); },
                      },
                      form_);
}

DsOperator modulus(const DsOperator& op) {
    require_certified(op);
    return std::visit(Overloaded{
                          [](const MatrixForm& f) { return certify_ds(f.matrix.entrywise_abs()); },
                          [&](const ShiftForm&) { return op; },
                          [&](const PermutationForm&) { return op; },
                          [&](const auto&) -> DsOperator {
                              throw UnsupportedForm("modulus of a " + op.form_name() +
                                                    " is not available; flatten with to_matrix first");
                          },
                      },
                      op.form());
}

TruncatedSequence apply(const DsOperator& op, const TruncatedSequence& x) {
    return std::visit(
        Overloaded{
            [&](const MatrixForm& f) { return apply_matrix(f.matrix, x); },
            [&](const ShiftForm& f) {
                const auto v = x.values();
                if (f.direction == ShiftDirection::Left) {
                    if (v.empty()) return x;
                    return TruncatedSequence(std::vector<double>(v.begin() + 1, v.end()), x.tail());
                }
                std::vector<double> out;
                out.reserve(v.size() + 1);
                out.push_back(0.0);
                out.insert(out.end(), v.begin(), v.end());
                return TruncatedSequence(std::move(out), x.tail());
            },
            [&](const PermutationForm& f) {
                if (!x.finitely_supported() || x.support_length() > f.map.size()) {
                    throw IncompatibleSupport("permutation acts on finitely supported sequences within its block");
                }
                std::vector<double> out(f.map.size(), 0.0);
                for (std::size_t i = 0; i < std::min(x.size(), f.map.size()); ++i) out[f.map[i]] = x.values()[i];
                return TruncatedSequence(std::move(out));
            },
            [&](const ConvexCombinationForm& f) {
                std::vector<TruncatedSequence> images;
                images.reserve(f.parts.size());
                for (const auto& p : f.parts) images.push_back(apply(p, x));
                std::vector<const TruncatedSequence*> ptrs;
                for (const auto& img : images) ptrs.push_back(&img);
                return linear_combination(f.weights, ptrs);
            },
            [&](const PowerForm& f) {
                TruncatedSequence y = x;
                for (std::size_t i = 0; i < f.exponent; ++i) y = apply(*f.base, y);
                return y;
            },
            [&](const ComposeForm& f) {
                TruncatedSequence y = x;
                for (auto it = f.parts.rbegin(); it != f.parts.rend(); ++it) y = apply(*it, y);
                return y;
            },
        },
        op.form());
}

DsOperator to_matrix(const DsOperator& op, std::size_t dim, double tolerance) {
    require_certified(op);
    if (const auto* m = std::get_if<MatrixForm>(&op.form()); m && m->matrix.dim() == dim) return op;
    const auto dense = dense_compression(op, dim);
    return certify_ds(SparseMatrix::from_dense(dim, dense), tolerance);
}

DsOperator transpose(const DsOperator& op) {
    const auto& m = op.matrix();
    return certify_ds(m.transpose(), std::max(0.0, std::max(op.certificate().row_norm, op.certificate().col_norm) - 1.0));
}

DsOperator random_ds(std::size_t dim, double density, SignMode sign_mode, std::uint64_t seed) {
    if (dim == 0) throw PreconditionViolated("random_ds requires dim >= 1");
    if (!(density > 0.0 && density <= 1.0)) throw PreconditionViolated("density must lie in (0, 1]");

    Rng rng(seed);
    std::vector<double> a(dim * dim, 0.0);
    for (double& e : a) {
        if (rng.uniform() < density) e = rng.uniform_positive();
    }

    std::vector<double> sums(dim);
    const auto max_deviation = [&]() {
        double dev = 0.0;
        for (std::size_t r = 0; r < dim; ++r) {
            double rs = 0.0;
            double cs = 0.0;
            for (std::size_t c = 0; c < dim; ++c) {
                rs += a[r * dim + c];
                cs += a[c * dim + r];
            }
            if (rs > 0.0) dev = std::max(dev, std::abs(rs - 1.0));
            if (cs > 0.0) dev = std::max(dev, std::abs(cs - 1.0));
        }
        return dev;
    };
    for (int round = 0; round < 100; ++round) {
        for (std::size_t r = 0; r < dim; ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < dim; ++c) s += a[r * dim + c];
            if (s > 0.0) {
                for (std::size_t c = 0; c < dim; ++c) a[r * dim + c] /= s;
            }
        }
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t r = 0; r < dim; ++r) {
            for (std::size_t c = 0; c < dim; ++c) sums[c] += a[r * dim + c];
        }
        for (std::size_t r = 0; r < dim; ++r) {
            for (std::size_t c = 0; c < dim; ++c) {
                if (sums[c] > 0.0) a[r * dim + c] /= sums[c];
            }
        }
        if (max_deviation() <= 1e-15) break;
    }

    if (sign_mode == SignMode::Signed) {
        for (double& e : a) {
            if (e != 0.0 && rng.coin()) e = -e;
        }
    }

    // Final hard scale; repeat with a shrinking factor until rounding can no
    // longer push a sum above 1.
    SparseMatrix m = SparseMatrix::from_dense(dim, a);
    double worst = std::max({1.0, m.max_abs_row_sum(), m.max_abs_col_sum()});
    double shrink = 1.0;
    while (worst > 1.0) {
        for (double& e : a) e = e / worst * shrink;
        m = SparseMatrix::from_dense(dim, a);
        worst = std::max(m.max_abs_row_sum(), m.max_abs_col_sum());
        shrink *= 1.0 - 4.0 * std::numeric_limits<double>::epsilon();
    }
    return certify_ds(std::move(m));
}

DsOperator random_doubly_stochastic(std::size_t dim, std::size_t terms, std::uint64_t seed) {
    if (dim == 0 || terms == 0) throw PreconditionViolated("random_doubly_stochastic requires dim, terms >= 1");
    Rng rng(seed);

    // Integer weights summing to 2^20; each weight / 2^20 is exact.
    constexpr std::uint64_t kScale = 1U << 20;
    if (terms > kScale) throw PreconditionViolated("too many permutation terms");
    std::vector<double> raw(terms);
    double raw_total = 0.0;
    for (double& r : raw) raw_total += (r = rng.uniform_positive());
    std::vector<std::uint64_t> weights(terms, 1);
    std::uint64_t assigned = terms;
    for (std::size_t t = 0; t < terms; ++t) {
        const auto extra = static_cast<std::uint64_t>(raw[t] / raw_total * static_cast<double>(kScale - terms));
        weights[t] += extra;
        assigned += extra;
    }
    weights.back() += kScale - assigned;

    std::vector<std::size_t> perm(dim);
    std::vector<MatrixEntry> entries;
    for (std::size_t t = 0; t < terms; ++t) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = dim; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
        const double w = static_cast<double>(weights[t]) / static_cast<double>(kScale);
        for (std::size_t i = 0; i < dim; ++i) entries.push_back({perm[i], i, w});
    }
    return certify_ds(SparseMatrix(dim, std::move(entries)));
}

double power_coordinate(const DsOperator& op, const TruncatedSequence& x, std::size_t k, std::size_t s) {
    if (s == 0) throw PreconditionViolated("coordinates are 1-based");
    if (const auto* shift = std::get_if<ShiftForm>(&op.form())) {
        if (shift->direction == ShiftDirection::Left) return x.at(s + k);
        return s > k ? x.at(s - k) : 0.0;
    }
    TruncatedSequence y = x;
    for (std::size_t i = 0; i < k; ++i) y = apply(op, y);
    return y.at(s);
}

}  // namespace ergoseq
