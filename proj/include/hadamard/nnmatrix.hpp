#pragma once

/**
 * @file nnmatrix.hpp
 * @brief Dense non-negative matrices and the entrywise (Hadamard) algebra on them.
 *
 * Every NonNegativeMatrix holds finite entries >= 0; construction from user data
 * rejects anything else, so the remaining operations can rely on the invariant.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace hadamard {

class NonNegativeMatrix {
public:
    /// Validating constructor: entries are row-major and must be finite and >= 0.
    NonNegativeMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (rows_ == 0 || cols_ == 0) {
            throw dimension_error("matrix must have at least one row and one column");
        }
        if (data_.size() != rows_ * cols_) {
            throw dimension_error("entry count " + std::to_string(data_.size()) +
                                  " does not match shape " + std::to_string(rows_) + "x" +
                                  std::to_string(cols_));
        }
        for (std::size_t k = 0; k < data_.size(); ++k) {
            const double v = data_[k];
            if (!std::isfinite(v) || v < 0.0) {
                throw domain_error("entry (" + std::to_string(k / cols_ + 1) + "," +
                                   std::to_string(k % cols_ + 1) +
                                   ") is not a finite non-negative number");
            }
        }
    }

    NonNegativeMatrix(std::initializer_list<std::initializer_list<double>> rows)
        : NonNegativeMatrix(from_rows(rows)) {}

    static NonNegativeMatrix zeros(std::size_t rows, std::size_t cols) {
        return NonNegativeMatrix(rows, cols, std::vector<double>(rows * cols, 0.0));
    }

    static NonNegativeMatrix ones(std::size_t rows, std::size_t cols) {
        return NonNegativeMatrix(rows, cols, std::vector<double>(rows * cols, 1.0));
    }

    static NonNegativeMatrix identity(std::size_t n) {
        std::vector<double> d(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 1.0;
        return NonNegativeMatrix(n, n, std::move(d));
    }

    static NonNegativeMatrix diagonal(std::span<const double> diag) {
        const std::size_t n = diag.size();
        std::vector<double> d(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) d[i * n + i] = diag[i];
        return NonNegativeMatrix(n, n, std::move(d));
    }

    /// Wraps the result of an internal computation whose entries are known to be >= 0.
    /// Only finiteness is checked; overflow surfaces as range_error.
    static NonNegativeMatrix from_computed(std::size_t rows, std::size_t cols,
                                           std::vector<double> entries) {
        for (double& v : entries) {
            if (!std::isfinite(v)) throw range_error("matrix entry overflowed the finite range");
            if (v < 0.0) v = 0.0;  // -0.0 and nothing else reach here
        }
        return NonNegativeMatrix(trusted{}, rows, cols, std::move(entries));
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }
    std::span<const double> entries() const noexcept { return data_; }

    NonNegativeMatrix transpose() const {
        std::vector<double> t(data_.size());
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t[j * rows_ + i] = data_[i * cols_ + j];
        return NonNegativeMatrix(trusted{}, cols_, rows_, std::move(t));
    }

    double max_entry() const noexcept { return *std::max_element(data_.begin(), data_.end()); }

    /// Multiplies every entry by c >= 0.
    NonNegativeMatrix scaled(double c) const {
        if (!std::isfinite(c) || c < 0.0) throw domain_error("scale factor must be finite and >= 0");
        std::vector<double> d(data_);
        for (double& v : d) v *= c;
        return from_computed(rows_, cols_, std::move(d));
    }

    friend bool operator==(const NonNegativeMatrix&, const NonNegativeMatrix&) = default;

private:
    struct trusted {};
    NonNegativeMatrix(trusted, std::size_t rows, std::size_t cols, std::vector<double> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {}

    static NonNegativeMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        const std::size_t r = rows.size();
        const std::size_t c = r == 0 ? 0 : rows.begin()->size();
        std::vector<double> d;
        d.reserve(r * c);
        for (const auto& row : rows) {
            if (row.size() != c) throw dimension_error("ragged row list");
            d.insert(d.end(), row.begin(), row.end());
        }
        return NonNegativeMatrix(r, c, std::move(d));
    }

    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

/// Positive weights alpha_1..alpha_m with their cached sum.
class WeightVector {
public:
    explicit WeightVector(std::vector<double> alphas) : alphas_(std::move(alphas)) {
        if (alphas_.empty()) throw domain_error("weight vector must not be empty");
        for (double a : alphas_) {
            if (!std::isfinite(a) || a <= 0.0) throw domain_error("weights must be finite and > 0");
        }
        sum_ = std::accumulate(alphas_.begin(), alphas_.end(), 0.0);
    }

    /// m equal weights 1/m.
    static WeightVector uniform(std::size_t m) {
        return WeightVector(std::vector<double>(m, 1.0 / static_cast<double>(m)));
    }

    std::span<const double> alphas() const noexcept { return alphas_; }
    std::size_t size() const noexcept { return alphas_.size(); }
    double operator[](std::size_t k) const noexcept { return alphas_[k]; }
    double sum() const noexcept { return sum_; }

private:
    std::vector<double> alphas_;
    double sum_ = 0.0;
};

inline constexpr double kWeightSumSlack = 1e-12;

namespace detail {

inline void require_same_shape(const NonNegativeMatrix& a, const NonNegativeMatrix& b,
                               const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw dimension_error(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) +
                              "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                              "x" + std::to_string(b.cols()));
    }
}

inline void require_square_family(std::span<const NonNegativeMatrix> mats, const char* op) {
    if (mats.empty()) throw dimension_error(std::string(op) + ": empty matrix list");
    const std::size_t n = mats.front().rows();
    for (const auto& a : mats) {
        if (!a.square() || a.rows() != n) {
            throw dimension_error(std::string(op) + ": operands must be square of one size");
        }
    }
}

}  // namespace detail

inline NonNegativeMatrix hadamard_product(const NonNegativeMatrix& a, const NonNegativeMatrix& b) {
    detail::require_same_shape(a, b, "hadamard_product");
    std::vector<double> d(a.entries().begin(), a.entries().end());
    auto eb = b.entries();
    for (std::size_t k = 0; k < d.size(); ++k) d[k] *= eb[k];
    return NonNegativeMatrix::from_computed(a.rows(), a.cols(), std::move(d));
}

/// A_1 ∘ ... ∘ A_m.
inline NonNegativeMatrix hadamard_product(std::span<const NonNegativeMatrix> mats) {
    if (mats.empty()) throw dimension_error("hadamard_product: empty matrix list");
    NonNegativeMatrix acc = mats.front();
    for (std::size_t k = 1; k < mats.size(); ++k) acc = hadamard_product(acc, mats[k]);
    return acc;
}

/// Entrywise t-th power with 0^0 = 1.
inline NonNegativeMatrix hadamard_power(const NonNegativeMatrix& a, double t) {
    if (!std::isfinite(t) || t < 0.0) throw domain_error("Hadamard exponent must be finite and >= 0");
    std::vector<double> d(a.entries().begin(), a.entries().end());
    for (double& v : d) v = std::pow(v, t);  // std::pow(0, 0) == 1
    return NonNegativeMatrix::from_computed(a.rows(), a.cols(), std::move(d));
}

inline NonNegativeMatrix matmul(const NonNegativeMatrix& a, const NonNegativeMatrix& b) {
    if (a.cols() != b.rows()) {
        throw dimension_error("matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
                              std::to_string(b.rows()) + " differ");
    }
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    std::vector<double> c(n * m, 0.0);
    auto ea = a.entries();
    auto eb = b.entries();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t l = 0; l < k; ++l) {
            const double ail = ea[i * k + l];
            if (ail == 0.0) continue;
            for (std::size_t j = 0; j < m; ++j) c[i * m + j] += ail * eb[l * m + j];
        }
    }
    return NonNegativeMatrix::from_computed(n, m, std::move(c));
}

/// Ordered product A_1 A_2 ... A_m.
inline NonNegativeMatrix product(std::span<const NonNegativeMatrix> mats) {
    if (mats.empty()) throw dimension_error("product: empty matrix list");
    NonNegativeMatrix acc = mats.front();
    for (std::size_t k = 1; k < mats.size(); ++k) acc = matmul(acc, mats[k]);
    return acc;
}

/// Ordinary integer power A^k, k >= 0.
inline NonNegativeMatrix matrix_power(const NonNegativeMatrix& a, unsigned k) {
    if (!a.square()) throw dimension_error("matrix_power: square matrix required");
    NonNegativeMatrix result = NonNegativeMatrix::identity(a.rows());
    NonNegativeMatrix base = a;
    while (k > 0) {
        if (k & 1u) result = matmul(result, base);
        k >>= 1u;
        if (k > 0) base = matmul(base, base);
    }
    return result;
}

inline NonNegativeMatrix add(const NonNegativeMatrix& a, const NonNegativeMatrix& b) {
    detail::require_same_shape(a, b, "add");
    std::vector<double> d(a.entries().begin(), a.entries().end());
    auto eb = b.entries();
    for (std::size_t k = 0; k < d.size(); ++k) d[k] += eb[k];
    return NonNegativeMatrix::from_computed(a.rows(), a.cols(), std::move(d));
}

/// Entrywise prod_k mats[k]^(alpha_k), 0^0 = 1 per factor.
inline NonNegativeMatrix hadamard_weighted_geomean(std::span<const NonNegativeMatrix> mats,
                                                   const WeightVector& w) {
    if (mats.empty()) throw dimension_error("hadamard_weighted_geomean: empty matrix list");
    if (mats.size() != w.size()) {
        throw dimension_error("hadamard_weighted_geomean: " + std::to_string(mats.size()) +
                              " matrices but " + std::to_string(w.size()) + " weights");
    }
    if (w.sum() < 1.0 - kWeightSumSlack) {
        throw domain_error("hadamard_weighted_geomean: weights must sum to at least 1");
    }
    for (const auto& a : mats) detail::require_same_shape(mats.front(), a, "hadamard_weighted_geomean");
    const auto& first = mats.front();
    std::vector<double> d(first.rows() * first.cols(), 1.0);
    for (std::size_t k = 0; k < mats.size(); ++k) {
        auto e = mats[k].entries();
        for (std::size_t q = 0; q < d.size(); ++q) d[q] *= std::pow(e[q], w[k]);
    }
    return NonNegativeMatrix::from_computed(first.rows(), first.cols(), std::move(d));
}

/// The mn x mn matrix with A_i on the i-th block superdiagonal and A_m in the
/// bottom-left block. Its m-th power is block-diagonal with the cyclic products.
inline NonNegativeMatrix block_cyclic(std::span<const NonNegativeMatrix> mats) {
    if (mats.size() < 2) throw dimension_error("block_cyclic: at least two matrices required");
    detail::require_square_family(mats, "block_cyclic");
    const std::size_t m = mats.size();
    const std::size_t n = mats.front().rows();
    const std::size_t big = m * n;
    std::vector<double> d(big * big, 0.0);
    for (std::size_t b = 0; b < m; ++b) {
        const std::size_t row0 = b * n;
        const std::size_t col0 = ((b + 1) % m) * n;
        const auto& a = mats[b];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[(row0 + i) * big + col0 + j] = a(i, j);
    }
    return NonNegativeMatrix::from_computed(big, big, std::move(d));
}

/// The i-th cyclic word A_i A_{i+1} ... A_m A_1 ... A_{i-1} (0-based start).
inline NonNegativeMatrix cyclic_word(std::span<const NonNegativeMatrix> mats, std::size_t start) {
    const std::size_t m = mats.size();
    NonNegativeMatrix acc = mats[start % m];
    for (std::size_t k = 1; k < m; ++k) acc = matmul(acc, mats[(start + k) % m]);
    return acc;
}

/// P_i = A_i^(t) ... A_m^(t) A_1^(t) ... A_{i-1}^(t) for i = 1..m, with t in [1, m].
inline std::vector<NonNegativeMatrix> cyclic_products(std::span<const NonNegativeMatrix> mats,
                                                      double t) {
    detail::require_square_family(mats, "cyclic_products");
    const double m = static_cast<double>(mats.size());
    if (!(t >= 1.0 && t <= m)) {
        throw domain_error("cyclic_products: t must lie in [1, " + std::to_string(mats.size()) + "]");
    }
    std::vector<NonNegativeMatrix> powered;
    powered.reserve(mats.size());
    for (const auto& a : mats) powered.push_back(hadamard_power(a, t));
    std::vector<NonNegativeMatrix> out;
    out.reserve(mats.size());
    for (std::size_t i = 0; i < mats.size(); ++i) out.push_back(cyclic_word(powered, i));
    return out;
}

/// Largest scaled excess max_ij (a_ij - b_ij) / max(1, b_ij); A <= B within tol iff this is <= tol.
inline double max_scaled_excess(const NonNegativeMatrix& a, const NonNegativeMatrix& b) {
    detail::require_same_shape(a, b, "max_scaled_excess");
    auto ea = a.entries();
    auto eb = b.entries();
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < ea.size(); ++k) {
        worst = std::max(worst, (ea[k] - eb[k]) / std::max(1.0, eb[k]));
    }
    return worst;
}

/// a_ij <= b_ij + tol * max(1, b_ij) for all (i, j).
inline bool elementwise_le(const NonNegativeMatrix& a, const NonNegativeMatrix& b, double tol = 1e-9) {
    if (!(tol >= 0.0)) throw domain_error("elementwise_le: tol must be >= 0");
    detail::require_same_shape(a, b, "elementwise_le");
    auto ea = a.entries();
    auto eb = b.entries();
    for (std::size_t k = 0; k < ea.size(); ++k) {
        if (ea[k] > eb[k] + tol * std::max(1.0, eb[k])) return false;
    }
    return true;
}

}  // namespace hadamard
