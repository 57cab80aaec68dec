#pragma once

// Dunford-Schwartz operators on sequences: simultaneous l1 and l_inf
// contractions, kept either as explicit sparse matrices or as structural rules.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ergoseq/sequence.hpp"

namespace ergoseq {

/// Default tolerance used when certifying operators built by floating-point
/// arithmetic (products, convex sums).
inline constexpr double kNumericalTolerance = 1e-12;

struct MatrixEntry {
    std::size_t row = 0;  // 0-based
    std::size_t col = 0;  // 0-based
    double value = 0.0;

    friend bool operator==(const MatrixEntry&, const MatrixEntry&) = default;
};

/// Square sparse matrix in row-major coordinate order with a CSR row index.
class SparseMatrix {
public:
    SparseMatrix() = default;

    /// Duplicate coordinates are summed; explicit zeros are dropped.
    SparseMatrix(std::size_t dim, std::vector<MatrixEntry> entries);

    static SparseMatrix identity(std::size_t dim);
    /// From a row-major dense array of dim*dim values.
    static SparseMatrix from_dense(std::size_t dim, std::span<const double> dense);

    std::size_t dim() const noexcept { return dim_; }
    std::span<const MatrixEntry> entries() const noexcept { return entries_; }
    std::size_t nonzeros() const noexcept { return entries_.size(); }

    double at(std::size_t row, std::size_t col) const;

    /// Largest absolute row sum (the l_inf -> l_inf norm).
    double max_abs_row_sum() const;
    /// Largest absolute column sum (the l1 -> l1 norm).
    double max_abs_col_sum() const;

    /// out = A * in; both spans must have length dim.
    void multiply(std::span<const double> in, std::span<double> out) const;

    SparseMatrix transpose() const;
    SparseMatrix entrywise_abs() const;
    std::vector<double> to_dense() const;

    friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
        return a.dim_ == b.dim_ && a.entries_ == b.entries_;
    }

private:
    std::size_t dim_ = 0;
    std::vector<MatrixEntry> entries_;
    std::vector<std::size_t> row_start_;
};

struct Certificate {
    double row_norm = 0.0;
    double col_norm = 0.0;
    bool certified = false;
};

enum class ShiftDirection { Left, Right };

class DsOperator;

struct MatrixForm {
    SparseMatrix matrix;
};

/// Left: (Tx)_s = x_{s+1}. Right: (Tx)_1 = 0, (Tx)_s = x_{s-1}.
struct ShiftForm {
    ShiftDirection direction = ShiftDirection::Left;
};

/// (Px)_{map[i]} = x_i on coordinates 0..size-1 (stored 0-based).
struct PermutationForm {
    std::vector<std::size_t> map;
};

struct ConvexCombinationForm {
    std::vector<double> weights;
    std::vector<DsOperator> parts;
};

struct PowerForm {
    std::shared_ptr<const DsOperator> base;
    std::size_t exponent = 1;
};

/// parts[0] ∘ parts[1] ∘ ... : the last part is applied first.
struct ComposeForm {
    std::vector<DsOperator> parts;
};

class DsOperator {
public:
    using Form = std::variant<MatrixForm, ShiftForm, PermutationForm, ConvexCombinationForm, PowerForm, ComposeForm>;

    static DsOperator shift(ShiftDirection direction);
    /// One-based images: map[i-1] = π(i).
    static DsOperator permutation(std::span<const std::size_t> one_based_map);
    static DsOperator identity(std::size_t dim);
    static DsOperator convex_combination(std::vector<double> weights, std::vector<DsOperator> parts);
    static DsOperator power(DsOperator base, std::size_t exponent);
    static DsOperator compose(std::vector<DsOperator> parts);

    const Form& form() const noexcept { return form_; }
    const Certificate& certificate() const noexcept { return cert_; }

    bool is_matrix() const noexcept { return std::holds_alternative<MatrixForm>(form_); }
    /// Throws UnsupportedForm when the operator is not in matrix form.
    const SparseMatrix& matrix() const;

    /// Size of the coordinate block the operator lives on; empty for shifts.
    std::optional<std::size_t> dim() const;

    std::string form_name() const;

private:
    DsOperator(Form form, Certificate cert) : form_(std::move(form)), cert_(cert) {}

    friend DsOperator certify_ds(SparseMatrix m, double tolerance);

    Form form_;
    Certificate cert_;
};

/// Accepts the matrix iff both its l1 and l_inf operator norms are <= 1 + tolerance.
/// Throws NotContraction naming the failing bound otherwise.
DsOperator certify_ds(SparseMatrix m, double tolerance = 0.0);

/// The positive operator |T|: entrywise absolute value for matrices, the
/// operator itself for shifts and permutations.
DsOperator modulus(const DsOperator& op);

TruncatedSequence apply(const DsOperator& op, const TruncatedSequence& x);

/// Compression of the operator to coordinates 1..dim as a certified matrix.
/// The left shift loses the inflow from coordinate dim+1 (its last row is zero).
DsOperator to_matrix(const DsOperator& op, std::size_t dim, double tolerance = kNumericalTolerance);

/// Matrix transpose (the adjoint); matrix form only.
DsOperator transpose(const DsOperator& op);

enum class SignMode { Nonnegative, Signed };

/// Seeded random certified matrix operator: sparse nonnegative sample,
/// alternating row/column normalization, final hard rescale, optional sign flips.
DsOperator random_ds(std::size_t dim, double density, SignMode sign_mode, std::uint64_t seed);

/// Seeded exactly doubly stochastic matrix: a convex combination of `terms`
/// random permutation matrices with dyadic weights, so every row and column
/// sums to 1 without rounding.
DsOperator random_doubly_stochastic(std::size_t dim, std::size_t terms, std::uint64_t seed);

/// (T^k x)_s for 1-based s. Shifts use index arithmetic and work at any
/// horizon; other forms apply the operator k times.
double power_coordinate(const DsOperator& op, const TruncatedSequence& x, std::size_t k, std::size_t s);

}  // namespace ergoseq
