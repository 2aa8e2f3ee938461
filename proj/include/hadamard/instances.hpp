#pragma once

// Random valid instances for every catalog chain, drawn from one SplitMix64 stream.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "chains.hpp"
#include "errors.hpp"
#include "random.hpp"

namespace hadamard {

struct InstanceShape {
    std::size_t n_min = 1;
    std::size_t n_max = 6;
    std::size_t m_max = 5;      // operands (or grid columns) for unbounded arity
    std::size_t k_max = 3;      // grid rows
    double density = 1.0;
};

struct ChainInstance {
    std::vector<NonNegativeMatrix> mats;
    ChainParams params;
};

/// Chains whose terms grow like exp or a power series of the product; their operands
/// are scaled by 1/n so rho(A1...Am) <= 1 and nothing overflows.
inline bool chain_needs_damping(ChainId id) {
    return id == ChainId::spectral_map_exp || id == ChainId::spectral_map_resolvent ||
           id == ChainId::power_series;
}

inline ChainInstance random_chain_instance(ChainId id, const InstanceShape& shape, SplitMix64& rng) {
    const ChainInfo& info = chain_info(id);
    if (shape.n_min < 1 || shape.n_max < shape.n_min) throw contract_error("random_chain_instance: bad n range");
    const std::size_t n = rng.integer(shape.n_min, shape.n_max);

    std::size_t m = info.min_arity;
    if (info.max_arity == 0) m = rng.integer(std::max<std::size_t>(info.min_arity, 1), std::max(shape.m_max, info.min_arity));
    const std::size_t k = info.grid ? rng.integer(1, std::max<std::size_t>(shape.k_max, 1)) : 1;

    ChainInstance inst;
    for (std::size_t i = 0; i < m * k; ++i) {
        auto a = random_matrix(n, n, shape.density, rng);
        if (chain_needs_damping(id)) a = a.scaled(1.0 / static_cast<double>(n));
        inst.mats.push_back(std::move(a));
    }

    const double md = static_cast<double>(m);
    auto weights = [&](double total) {
        std::vector<double> a(m);
        double s = 0.0;
        for (double& v : a) s += (v = rng.uniform(0.05, 1.0));
        for (double& v : a) v *= total / s;
        return a;
    };
    switch (info.param) {
        case ParamKind::none: break;
        case ParamKind::weights_ge1: inst.params.alphas = weights(rng.uniform(1.0, 2.0)); break;
        case ParamKind::weights_eq1: inst.params.alphas = weights(1.0); break;
        case ParamKind::t_ge1: inst.params.t = rng.uniform(1.0, 4.0); break;
        case ParamKind::t_in_1_m: inst.params.t = rng.uniform(1.0, md); break;
        case ParamKind::t_equals_m: inst.params.t = md; break;
        case ParamKind::t_in_1_2: inst.params.t = rng.uniform(1.0, 2.0); break;
        case ParamKind::t_equals_2: inst.params.t = 2.0; break;
        case ParamKind::lambda: break;  // rho(A1...Am) + 1
        case ParamKind::coefficients: {
            const std::size_t deg = rng.integer(0, 5);
            for (std::size_t j = 0; j <= deg; ++j) inst.params.coeffs.push_back(rng.uniform());
            break;
        }
    }
    if (info.uses_p) {
        static constexpr NormKind kinds[] = {NormKind::one, NormKind::two, NormKind::inf};
        inst.params.p = kinds[rng.integer(0, 2)];
    }
    return inst;
}

}  // namespace hadamard
