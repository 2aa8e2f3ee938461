#pragma once

/**
 * @file spectral.hpp
 * @brief Perron-type scalar functionals of non-negative matrices.
 *
 * Spectral radius (Gelfand repeated squaring), l^p operator norms, numerical
 * radius, max-times eigenvalue (Karp), matrix exponential and resolvent.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "nnmatrix.hpp"

namespace hadamard {

enum class Method { gelfand, power_iteration, closed_form, karp, oracle };

inline std::string_view to_string(Method m) {
    switch (m) {
        case Method::gelfand: return "gelfand";
        case Method::power_iteration: return "power_iteration";
        case Method::closed_form: return "closed_form";
        case Method::karp: return "karp";
        case Method::oracle: return "oracle";
    }
    return "unknown";
}

struct SpectralEstimate {
    double value = 0.0;
    unsigned iterations = 0;
    double residual = 0.0;  // last-step relative change (Gelfand) or relative residual (power)
    bool converged = true;
    Method method = Method::closed_form;
};

struct ToleranceConfig {
    double rel_tol = 1e-10;
    unsigned max_power_iters = 10000;
    unsigned max_squarings = 60;

    void validate() const {
        if (!(rel_tol > 0.0) || max_power_iters == 0 || max_squarings == 0) {
            throw domain_error("tolerance configuration values must all be positive");
        }
    }
};

enum class NormKind { one, two, inf };

inline std::string_view to_string(NormKind p) {
    switch (p) {
        case NormKind::one: return "1";
        case NormKind::two: return "2";
        case NormKind::inf: return "inf";
    }
    return "?";
}

namespace detail {

inline void require_square(const NonNegativeMatrix& a, const char* op) {
    if (!a.square()) {
        throw dimension_error(std::string(op) + ": square matrix required, got " +
                              std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
}

inline double max_row_sum(std::span<const double> d, std::size_t rows, std::size_t cols) {
    double best = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < cols; ++j) s += d[i * cols + j];
        best = std::max(best, s);
    }
    return best;
}

inline double max_col_sum(std::span<const double> d, std::size_t rows, std::size_t cols) {
    double best = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < rows; ++i) s += d[i * cols + j];
        best = std::max(best, s);
    }
    return best;
}

// c = a * a for an n x n row-major block.
inline void square_into(const std::vector<double>& a, std::vector<double>& c, std::size_t n) {
    std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t l = 0; l < n; ++l) {
            const double v = a[i * n + l];
            if (v == 0.0) continue;
            const double* row = &a[l * n];
            double* out = &c[i * n];
            for (std::size_t j = 0; j < n; ++j) out[j] += v * row[j];
        }
    }
}

/// Squarings needed before the zero pattern of A^(2^k) can have settled:
/// ceil(log2(primitivity index bound (n-1)^2 + 1)) plus a margin of two.
inline unsigned min_gelfand_squarings(std::size_t n) {
    const double bound = static_cast<double>((n - 1) * (n - 1) + 1);
    return static_cast<unsigned>(std::ceil(std::log2(bound))) + 2u;
}

/// Power iteration for the top eigenvalue of a symmetric non-negative matrix
/// (after an optional diagonal shift), started from the all-ones vector.
inline SpectralEstimate symmetric_power_iteration(const std::vector<double>& m, std::size_t n,
                                                  double shift, const ToleranceConfig& cfg) {
    std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> y(n);
    SpectralEstimate est;
    est.method = Method::power_iteration;
    est.converged = false;
    double theta = 0.0;
    for (unsigned it = 1; it <= cfg.max_power_iters; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = shift * x[i];
            for (std::size_t j = 0; j < n; ++j) s += m[i * n + j] * x[j];
            y[i] = s;
        }
        theta = std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
        double res2 = 0.0, ynorm2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - theta * x[i];
            res2 += r * r;
            ynorm2 += y[i] * y[i];
        }
        est.iterations = it;
        if (ynorm2 == 0.0) {
            est.value = 0.0;
            est.residual = 0.0;
            est.converged = true;
            return est;
        }
        est.residual = std::sqrt(res2) / theta;
        const double ynorm = std::sqrt(ynorm2);
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ynorm;
        if (est.residual <= cfg.rel_tol) {
            est.converged = true;
            break;
        }
    }
    est.value = theta;
    return est;
}

}  // namespace detail

/// Spectral radius by Gelfand's formula rho = lim ||A^(2^k)||_inf^(1/2^k).
///
/// Each squaring is rescaled by its row-sum norm and the log of the scale is
/// accumulated, so the iterate never overflows. The sequence is a non-increasing
/// upper bound and converges for reducible, periodic and nilpotent matrices alike.
inline SpectralEstimate spectral_radius(const NonNegativeMatrix& a, const ToleranceConfig& cfg = {}) {
    detail::require_square(a, "spectral_radius");
    cfg.validate();
    const std::size_t n = a.rows();
    SpectralEstimate est;
    est.method = Method::gelfand;

    std::vector<double> b(a.entries().begin(), a.entries().end());
    const double s0 = detail::max_row_sum(b, n, n);
    if (s0 == 0.0) return est;  // zero matrix: exactly 0
    for (double& v : b) v /= s0;
    double log_est = std::log(s0);

    const unsigned min_steps = detail::min_gelfand_squarings(n);
    std::vector<double> c(n * n);
    unsigned small_streak = 0;
    est.converged = false;
    for (unsigned k = 0; k < cfg.max_squarings; ++k) {
        detail::square_into(b, c, n);
        const double norm = detail::max_row_sum(c, n, n);
        est.iterations = k + 1;
        if (norm == 0.0) {  // nilpotent
            est.value = 0.0;
            est.residual = 0.0;
            est.converged = true;
            return est;
        }
        const double delta = std::ldexp(std::log(norm), -static_cast<int>(k + 1));
        log_est += delta;
        for (std::size_t q = 0; q < c.size(); ++q) b[q] = c[q] / norm;
        est.residual = std::fabs(std::expm1(delta));
        small_streak = est.residual <= cfg.rel_tol / 4.0 ? small_streak + 1 : 0;
        if (k + 1 >= min_steps && small_streak >= 2) {
            est.converged = true;
            break;
        }
    }
    est.value = std::exp(log_est);
    return est;
}

/// The k-th rescaled Gelfand iterate ||A^(2^k)||_inf^(1/2^k), with no stopping rule.
inline double spectral_radius_oracle(const NonNegativeMatrix& a, unsigned k) {
    detail::require_square(a, "spectral_radius_oracle");
    if (k > 60) throw domain_error("spectral_radius_oracle: k must be <= 60");
    NonNegativeMatrix p = a;
    double log_scale = 0.0;  // log ||A^(2^j)|| / 2^j accumulated
    double weight = 1.0;
    for (unsigned j = 0;; ++j) {
        const double norm = detail::max_row_sum(p.entries(), p.rows(), p.cols());
        if (norm == 0.0) return 0.0;
        log_scale += weight * std::log(norm);
        if (j == k) break;
        p = p.scaled(1.0 / norm);
        p = matmul(p, p);
        weight *= 0.5;
    }
    return std::exp(log_scale);
}

/// Operator norm on l^1, l^2 or l^inf. p = 1 and p = inf are closed-form column and
/// row sums; p = 2 is sqrt(rho(A^T A)) by power iteration, falling back to Gelfand on
/// A^T A when the iteration does not settle within budget.
inline SpectralEstimate operator_norm(const NonNegativeMatrix& a, NormKind p,
                                      const ToleranceConfig& cfg = {}) {
    cfg.validate();
    SpectralEstimate est;
    est.method = Method::closed_form;
    switch (p) {
        case NormKind::one:
            est.value = detail::max_col_sum(a.entries(), a.rows(), a.cols());
            return est;
        case NormKind::inf:
            est.value = detail::max_row_sum(a.entries(), a.rows(), a.cols());
            return est;
        case NormKind::two: break;
    }
    const NonNegativeMatrix gram = matmul(a.transpose(), a);
    const std::size_t n = gram.rows();
    std::vector<double> g(gram.entries().begin(), gram.entries().end());
    SpectralEstimate pi = detail::symmetric_power_iteration(g, n, 0.0, cfg);
    if (!pi.converged) {
        pi = spectral_radius(gram, cfg);
    }
    pi.value = std::sqrt(std::max(0.0, pi.value));
    return pi;
}

/// Numerical radius w(A) = lambda_max((A + A^T) / 2) for entrywise non-negative A.
///
/// Power iteration runs on S + cI with c = ||S||_inf + 1 so the dominant eigenvalue is
/// lambda_max(S) + c even when S has eigenvalue -lambda_max. If the iteration does not
/// settle, S is non-negative symmetric, so lambda_max(S) = rho(S) and Gelfand takes over.
inline SpectralEstimate numerical_radius(const NonNegativeMatrix& a, const ToleranceConfig& cfg = {}) {
    detail::require_square(a, "numerical_radius");
    cfg.validate();
    const std::size_t n = a.rows();
    std::vector<double> s(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s[i * n + j] = 0.5 * (a(i, j) + a(j, i));
    const double shift = detail::max_row_sum(s, n, n) + 1.0;
    SpectralEstimate est = detail::symmetric_power_iteration(s, n, shift, cfg);
    if (est.converged) {
        est.value = std::max(0.0, est.value - shift);
        return est;
    }
    return spectral_radius(NonNegativeMatrix::from_computed(n, n, std::move(s)), cfg);
}

/// Max-times eigenvalue mu(A): the largest geometric mean of entries along a cycle,
/// by Karp's maximum cycle mean on log-weights (log 0 = -inf). No cycle gives 0.
inline SpectralEstimate max_times_radius(const NonNegativeMatrix& a) {
    detail::require_square(a, "max_times_radius");
    const std::size_t n = a.rows();
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    std::vector<double> w(n * n);
    for (std::size_t q = 0; q < w.size(); ++q) {
        const double v = a.entries()[q];
        w[q] = v > 0.0 ? std::log(v) : neg_inf;
    }
    // best[k][v]: heaviest walk with exactly k edges ending at v, starting anywhere.
    std::vector<std::vector<double>> best(n + 1, std::vector<double>(n, neg_inf));
    std::fill(best[0].begin(), best[0].end(), 0.0);
    for (std::size_t k = 1; k <= n; ++k) {
        for (std::size_t u = 0; u < n; ++u) {
            const double du = best[k - 1][u];
            if (du == neg_inf) continue;
            for (std::size_t v = 0; v < n; ++v) {
                const double wuv = w[u * n + v];
                if (wuv == neg_inf) continue;
                best[k][v] = std::max(best[k][v], du + wuv);
            }
        }
    }
    double lambda = neg_inf;
    for (std::size_t v = 0; v < n; ++v) {
        if (best[n][v] == neg_inf) continue;
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
            if (best[k][v] == neg_inf) continue;
            worst = std::min(worst, (best[n][v] - best[k][v]) / static_cast<double>(n - k));
        }
        lambda = std::max(lambda, worst);
    }
    SpectralEstimate est;
    est.method = Method::karp;
    est.iterations = static_cast<unsigned>(n);
    est.value = lambda == neg_inf ? 0.0 : std::exp(lambda);
    return est;
}

/// exp(A) by scaling and squaring around a truncated Taylor series.
inline NonNegativeMatrix matrix_exp(const NonNegativeMatrix& a, const ToleranceConfig& cfg = {}) {
    detail::require_square(a, "matrix_exp");
    cfg.validate();
    const std::size_t n = a.rows();
    const double norm = detail::max_row_sum(a.entries(), n, n);
    int squarings = 0;
    if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const NonNegativeMatrix x = a.scaled(std::ldexp(1.0, -squarings));

    // ||X|| <= 1/2, so once a term is below eps * ||sum|| the tail is smaller still.
    const double tail_tol = std::min(cfg.rel_tol, 1e-17);
    NonNegativeMatrix sum = NonNegativeMatrix::identity(n);
    NonNegativeMatrix term = NonNegativeMatrix::identity(n);
    for (unsigned j = 1; j <= 200; ++j) {
        term = matmul(term, x).scaled(1.0 / static_cast<double>(j));
        sum = add(sum, term);
        const double tn = detail::max_row_sum(term.entries(), n, n);
        if (tn <= tail_tol * detail::max_row_sum(sum.entries(), n, n)) break;
    }
    for (int s = 0; s < squarings; ++s) sum = matmul(sum, sum);
    return sum;
}

/// (lambda I - A)^{-1} for lambda above the spectral radius, by Gaussian elimination
/// with partial pivoting. The result is entrywise non-negative (Neumann series).
inline NonNegativeMatrix resolvent(const NonNegativeMatrix& a, double lambda,
                                   const ToleranceConfig& cfg = {}) {
    detail::require_square(a, "resolvent");
    if (!std::isfinite(lambda)) throw domain_error("resolvent: lambda must be finite");
    const SpectralEstimate rho = spectral_radius(a, cfg);
    if (!(lambda > rho.value + cfg.rel_tol * std::max(1.0, rho.value))) {
        throw spectral_constraint_error("resolvent: lambda must exceed the spectral radius " +
                                        std::to_string(rho.value));
    }
    const std::size_t n = a.rows();
    std::vector<double> m(n * n), inv(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) m[i * n + j] = (i == j ? lambda : 0.0) - a(i, j);
        inv[i * n + i] = 1.0;
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(m[r * n + col]) > std::fabs(m[piv * n + col])) piv = r;
        if (m[piv * n + col] == 0.0) throw numerical_error("resolvent: singular elimination");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(m[piv * n + j], m[col * n + j]);
                std::swap(inv[piv * n + j], inv[col * n + j]);
            }
        }
        const double p = m[col * n + col];
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = m[r * n + col] / p;
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                m[r * n + j] -= f * m[col * n + j];
                inv[r * n + j] -= f * inv[col * n + j];
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double p = m[i * n + i];
        for (std::size_t j = 0; j < n; ++j) inv[i * n + j] /= p;
    }
    // Rounding may leave entries a hair below zero; anything larger is a breakdown.
    const double scale = *std::max_element(inv.begin(), inv.end());
    for (double& v : inv) {
        if (v < 0.0) {
            if (v < -1e-12 * std::max(1.0, scale)) {
                throw numerical_error("resolvent: elimination produced a negative entry");
            }
            v = 0.0;
        }
    }
    return NonNegativeMatrix::from_computed(n, n, std::move(inv));
}

}  // namespace hadamard
