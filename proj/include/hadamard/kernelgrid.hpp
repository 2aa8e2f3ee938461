#pragma once

// Finite stand-ins for operators on L^2[0,1] and on sequences over N.
//
// A kernel k(x, y) is sampled at midpoints x_i = (i - 1/2)/n; the operator matrix is
// samples * (1/n). Hadamard operations act on the samples, and the weight 1/n is
// attached once afterwards, so the kernel of K^(a) is k^a rather than (k/n)^a.

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chains.hpp"
#include "errors.hpp"
#include "expr.hpp"
#include "nnmatrix.hpp"
#include "spectral.hpp"

namespace hadamard {

struct KernelSpec {
    EntryFormula formula;
    std::string description;

    KernelSpec(std::string_view source, std::string desc = {})
        : formula(parse_entry_expr(source, FormulaDomain::unit_square)), description(std::move(desc)) {}
};

struct TruncatedMatrixSpec {
    EntryFormula formula;
    std::vector<std::size_t> sizes;

    TruncatedMatrixSpec(std::string_view source, std::vector<std::size_t> sz)
        : formula(parse_entry_expr(source, FormulaDomain::indices)), sizes(std::move(sz)) {
        if (sizes.empty()) throw contract_error("truncation sizes must not be empty");
        for (std::size_t k = 0; k < sizes.size(); ++k) {
            if (sizes[k] == 0) throw contract_error("truncation sizes must be positive");
            if (k > 0 && sizes[k] <= sizes[k - 1]) throw contract_error("truncation sizes must be strictly increasing");
        }
    }
};

inline double midpoint(std::size_t i, std::size_t n) {
    return (static_cast<double>(i) + 0.5) / static_cast<double>(n);
}

/// Raw kernel values k(x_i, x_j) on the midpoint grid, without quadrature weight.
inline NonNegativeMatrix sample_kernel(const KernelSpec& k, std::size_t n) {
    if (n == 0) throw contract_error("discretization needs n >= 1");
    std::vector<double> d(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d[i * n + j] = k.formula.checked(midpoint(i, n), midpoint(j, n));
    return NonNegativeMatrix(n, n, std::move(d));
}

/// Attaches the midpoint weight 1/n to kernel samples.
inline NonNegativeMatrix weight_samples(const NonNegativeMatrix& samples) {
    return samples.scaled(1.0 / static_cast<double>(samples.rows()));
}

/// Operator matrix of the kernel on the n-point midpoint grid.
inline NonNegativeMatrix discretize(const KernelSpec& k, std::size_t n) {
    return weight_samples(sample_kernel(k, n));
}

/// rho((k1...km)^{1/m} kernel) <= rho(K1...Km)^{1/m} on the n-point discretization.
inline ChainReport kernel_geomean_check(const std::vector<KernelSpec>& kernels, std::size_t n,
                                        const ToleranceConfig& cfg = {}, double tol = kDefaultChainTol) {
    if (kernels.empty()) throw contract_error("kernel_geomean_check: at least one kernel required");
    std::vector<NonNegativeMatrix> samples, ops;
    for (const auto& k : kernels) {
        samples.push_back(sample_kernel(k, n));
        ops.push_back(weight_samples(samples.back()));
    }
    const double m = static_cast<double>(kernels.size());
    const auto mean = weight_samples(hadamard_weighted_geomean(samples, WeightVector::uniform(kernels.size())));
    const auto lhs = spectral_radius(mean, cfg);
    auto rhs = spectral_radius(product(ops), cfg);
    rhs.value = std::pow(rhs.value, 1.0 / m);

    ChainReport r;
    r.chain = ChainId::geo_mean;
    r.tol = tol;
    r.terms = {{"rho(K1^(1/m)∘...∘Km^(1/m))", lhs.value, lhs}, {"rho^{1/m}(K1...Km)", rhs.value, rhs}};
    assess_report(r);
    return r;
}

struct TruncationPoint {
    std::size_t size = 0;
    SpectralEstimate estimate;
};

/// Leading n x n section of a(i, j), i, j >= 1.
inline NonNegativeMatrix leading_section(const EntryFormula& f, std::size_t n) {
    std::vector<double> d(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d[i * n + j] = f.checked(static_cast<double>(i + 1), static_cast<double>(j + 1));
    return NonNegativeMatrix(n, n, std::move(d));
}

/// Spectral radius of each leading section; non-decreasing in the size.
inline std::vector<TruncationPoint> truncation_sequence(const TruncatedMatrixSpec& spec, const ToleranceConfig& cfg = {}) {
    std::vector<TruncationPoint> out;
    for (std::size_t n : spec.sizes) out.push_back({n, spectral_radius(leading_section(spec.formula, n), cfg)});
    return out;
}

}  // namespace hadamard
