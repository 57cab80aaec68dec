#include "ergoseq/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ergoseq {

namespace {

double l2(std::span<const double> v) {
    double s = 0.0;
    for (double e : v) s += e * e;
    return std::sqrt(s);
}

// Dense row-major helpers for the decomposition; dimensions are small.
std::vector<double> dense_mul(std::size_t n, const std::vector<double>& a, const std::vector<double>& b) {
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

std::vector<double> dense_apply(std::size_t n, const std::vector<double>& a, std::span<const double> x) {
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += a[i * n + j] * x[j];
        y[i] = s;
    }
    return y;
}

std::vector<double> dense_apply_transposed(std::size_t n, const std::vector<double>& a, std::span<const double> x) {
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) y[j] += a[i * n + j] * x[i];
    }
    return y;
}

std::vector<double> padded_prefix(const TruncatedSequence& x, std::size_t dim) {
    if (!x.finitely_supported() || x.support_length() > dim) {
        throw IncompatibleSupport("input must be finitely supported within the operator dimension");
    }
    std::vector<double> v(dim, 0.0);
    std::copy_n(x.values().begin(), std::min(dim, x.size()), v.begin());
    return v;
}

struct FixedPoint {
    std::vector<double> y;
    double defect = 0.0;
    std::size_t order = 1;
    bool converged = false;
};

// y = A(n,T)x with n = 1, 2, 4, ... using C_{2n}x = C_n x + T^n C_n x.
FixedPoint dyadic_cesaro(std::size_t dim, std::vector<double> power, std::span<const double> x, double tol,
                         std::size_t max_iters) {
    const std::vector<double> t = power;
    std::vector<double> sum(x.begin(), x.end());
    FixedPoint fp;
    const std::size_t doublings = std::min<std::size_t>(max_iters, 62);
    for (std::size_t i = 0;; ++i) {
        fp.y = sum;
        for (double& e : fp.y) e /= static_cast<double>(fp.order);
        const auto ty = dense_apply(dim, t, fp.y);
        double defect = 0.0;
        for (std::size_t j = 0; j < dim; ++j) defect = std::max(defect, std::abs(ty[j] - fp.y[j]));
        fp.defect = defect;
        if (defect <= tol) {
            fp.converged = true;
            return fp;
        }
        if (i >= doublings) return fp;
        const auto shifted = dense_apply(dim, power, sum);
        for (std::size_t j = 0; j < dim; ++j) sum[j] += shifted[j];
        power = dense_mul(dim, power, power);
        fp.order *= 2;
    }
}

}  // namespace

AverageState::AverageState(DsOperator op, TruncatedSequence x) : op_(std::move(op)) {
    if (op_.is_matrix() && x.finitely_supported() && x.support_length() <= op_.matrix().dim()) {
        fast_ = true;
        const std::size_t dim = op_.matrix().dim();
        power_.assign(dim, 0.0);
        std::copy_n(x.values().begin(), std::min(dim, x.size()), power_.begin());
        sum_.assign(dim, 0.0);
        compensation_.assign(dim, 0.0);
        maximal_.assign(dim, 0.0);
        scratch_.assign(dim, 0.0);
    } else {
        power_seq_ = std::move(x);
    }
}

void AverageState::step() {
    ++n_;
    const double inv_n = 1.0 / static_cast<double>(n_);
    if (fast_) {
        const std::size_t dim = power_.size();
        for (std::size_t i = 0; i < dim; ++i) {
            // Neumaier summation.
            const double v = power_[i];
            const double t = sum_[i] + v;
            if (std::abs(sum_[i]) >= std::abs(v)) {
                compensation_[i] += (sum_[i] - t) + v;
            } else {
                compensation_[i] += (v - t) + sum_[i];
            }
            sum_[i] = t;
            maximal_[i] = std::max(maximal_[i], std::abs((sum_[i] + compensation_[i]) * inv_n));
        }
        op_.matrix().multiply(power_, scratch_);
        power_.swap(scratch_);
        return;
    }
    sum_seq_ = sum_seq_ + power_seq_;
    maximal_seq_ = max_abs(maximal_seq_, inv_n * sum_seq_);
    power_seq_ = apply(op_, power_seq_);
}

TruncatedSequence AverageState::average() const {
    if (n_ == 0) throw PreconditionViolated("A(n,T)x is defined for n >= 1");
    if (fast_) {
        std::vector<double> out;
        average_into(out);
        return TruncatedSequence(std::move(out));
    }
    return (1.0 / static_cast<double>(n_)) * sum_seq_;
}

bool AverageState::average_into(std::vector<double>& out) const {
    if (!fast_ || n_ == 0) return false;
    out.resize(sum_.size());
    const double inv_n = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < sum_.size(); ++i) out[i] = (sum_[i] + compensation_[i]) * inv_n;
    return true;
}

TruncatedSequence AverageState::power_image() const { return fast_ ? TruncatedSequence(power_) : power_seq_; }

TruncatedSequence AverageState::running_sum() const {
    if (!fast_) return sum_seq_;
    std::vector<double> s(sum_.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = sum_[i] + compensation_[i];
    return TruncatedSequence(std::move(s));
}

TruncatedSequence AverageState::maximal() const { return fast_ ? TruncatedSequence(maximal_) : maximal_seq_; }

ConvergenceReport run_averaging(const DsOperator& op, const TruncatedSequence& x, std::size_t horizon, double tol,
                                std::size_t window) {
    if (window < 2 || horizon < window) throw PreconditionViolated("run_averaging requires horizon >= window >= 2");

    ConvergenceReport report;
    report.tolerance = tol;
    report.window = window;

    AverageState state(op, x);
    TruncatedSequence previous;
    std::size_t next_checkpoint = 1;
    std::size_t passes = 0;
    while (state.n() < horizon) {
        state.step();
        if (state.n() != next_checkpoint) continue;
        next_checkpoint *= 2;

        TruncatedSequence current = state.average();
        if (state.n() == 1) {
            report.residual_trace.push_back({1, 0.0, current});
            previous = std::move(current);
            continue;
        }
        const double residual = sup_distance(current, previous);
        report.residual_trace.push_back({state.n(), residual, current});
        passes = residual <= tol ? passes + 1 : 0;
        previous = std::move(current);
        if (passes >= window) {
            report.converged = true;
            break;
        }
    }
    report.horizon = state.n();
    report.limit_estimate = state.average();
    return report;
}

TruncatedSequence maximal_function(const DsOperator& op, const TruncatedSequence& x, std::size_t horizon) {
    if (horizon == 0) throw PreconditionViolated("maximal_function requires horizon >= 1");
    AverageState state(op, x);
    while (state.n() < horizon) state.step();
    return state.maximal();
}

MaximalCheck check_maximal_inequality(const TruncatedSequence& maximal, const TruncatedSequence& x, double p,
                                      double alpha) {
    if (!(p >= 1.0) || std::isinf(p)) throw PreconditionViolated("p must lie in [1, inf)");
    if (!(alpha > 0.0)) throw PreconditionViolated("alpha must be positive");
    if (!x.finitely_supported()) throw PreconditionViolated("maximal inequality check needs an exact lp norm");
    if (maximal.tail().sup() >= alpha) throw PreconditionViolated("maximal function tail reaches alpha");

    MaximalCheck out;
    const auto m = maximal.values();
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] >= alpha) out.witnesses.push_back(i + 1);
    }
    out.lhs_card = out.witnesses.size();
    out.rhs_bound = std::pow(2.0 * norm(x, p) / alpha, p);
    out.holds = static_cast<double>(out.lhs_card) <= out.rhs_bound;
    out.ratio = out.rhs_bound > 0.0 ? static_cast<double>(out.lhs_card) / out.rhs_bound
                                    : (out.lhs_card == 0 ? 0.0 : kInfinity);
    return out;
}

MaximalCheck check_maximal_inequality(const DsOperator& op, const TruncatedSequence& x, double p, double alpha,
                                      std::size_t horizon) {
    return check_maximal_inequality(maximal_function(op, x, horizon), x, p, alpha);
}

Decomposition mean_ergodic_decompose(const DsOperator& op, const TruncatedSequence& x, double tol,
                                     std::size_t max_iters) {
    const SparseMatrix& m = op.matrix();
    const std::size_t dim = m.dim();
    const std::vector<double> xv = padded_prefix(x, dim);
    const std::vector<double> t = m.to_dense();

    FixedPoint fp = dyadic_cesaro(dim, t, xv, tol, max_iters);

    // CGLS on A = T − I, b = x − y.
    std::vector<double> a = t;
    for (std::size_t i = 0; i < dim; ++i) a[i * dim + i] -= 1.0;
    std::vector<double> b(dim);
    for (std::size_t i = 0; i < dim; ++i) b[i] = xv[i] - fp.y[i];

    const double x_norm = l2(xv);
    std::vector<double> z(dim, 0.0);
    std::vector<double> r = b;
    std::vector<double> s = dense_apply_transposed(dim, a, r);
    std::vector<double> p = s;
    double gamma = std::inner_product(s.begin(), s.end(), s.begin(), 0.0);
    const double gamma0 = gamma;
    std::size_t iters = 0;
    const std::size_t max_cg = 20 * dim + 200;
    while (iters < max_cg && gamma > 0.0 && gamma > 1e-32 * gamma0 && l2(r) > 1e-3 * tol * x_norm) {
        const auto q = dense_apply(dim, a, p);
        const double qq = std::inner_product(q.begin(), q.end(), q.begin(), 0.0);
        if (qq == 0.0) break;
        const double step = gamma / qq;
        for (std::size_t i = 0; i < dim; ++i) {
            z[i] += step * p[i];
            r[i] -= step * q[i];
        }
        s = dense_apply_transposed(dim, a, r);
        const double gamma_next = std::inner_product(s.begin(), s.end(), s.begin(), 0.0);
        const double beta = gamma_next / gamma;
        gamma = gamma_next;
        for (std::size_t i = 0; i < dim; ++i) p[i] = s[i] + beta * p[i];
        ++iters;
    }

    // Exact residual of the reported pair.
    const auto tz = dense_apply(dim, t, z);
    std::vector<double> res(dim);
    for (std::size_t i = 0; i < dim; ++i) res[i] = xv[i] - fp.y[i] - (tz[i] - z[i]);

    Decomposition d;
    d.fixed_part = TruncatedSequence(fp.y);
    d.coboundary_source = TruncatedSequence(z);
    d.residual = l2(res);
    d.fixed_defect = fp.defect;
    d.averaging_order = fp.order;
    d.solver_iterations = iters;

    if (!fp.converged) {
        throw NoConvergence(std::move(d), "Cesàro escalation did not reach ‖Ty − y‖ <= tol within max_iters");
    }
    if (d.residual > tol * x_norm) {
        throw NoConvergence(std::move(d), "least-squares coboundary residual exceeds tol·‖x‖_2");
    }
    return d;
}

TruncatedSequence transpose_fixed_projection(const DsOperator& op, const TruncatedSequence& x, double tol,
                                             std::size_t max_iters) {
    const SparseMatrix tt = op.matrix().transpose();
    const std::size_t dim = tt.dim();
    const auto xv = padded_prefix(x, dim);
    FixedPoint fp = dyadic_cesaro(dim, tt.to_dense(), xv, tol, max_iters);
    if (!fp.converged) {
        Decomposition partial;
        partial.fixed_part = TruncatedSequence(fp.y);
        partial.fixed_defect = fp.defect;
        partial.averaging_order = fp.order;
        throw NoConvergence(std::move(partial), "transpose Cesàro escalation did not converge");
    }
    return TruncatedSequence(std::move(fp.y));
}

}  // namespace ergoseq
