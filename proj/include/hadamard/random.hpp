#pragma once

// Reproducible instance generation. The generator is SplitMix64 (Steele, Lea and
// Flood) with doubles taken from the top 53 bits, so a seed yields the same stream
// on every platform:
//
//   state += 0x9e3779b97f4a7c15
//   z = (state ^ (state >> 30)) * 0xbf58476d1ce4e5b9
//   z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//   out = z ^ (z >> 31);   uniform = (out >> 11) * 2^-53
//
// A random matrix draws, for each entry in row-major order, a value u then a mask
// draw b; the entry is u when b < density and 0 otherwise.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "nnmatrix.hpp"

namespace hadamard {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi].
    std::size_t integer(std::size_t lo, std::size_t hi) noexcept {
        return lo + static_cast<std::size_t>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    std::uint64_t state() const noexcept { return state_; }

private:
    std::uint64_t state_;
};

/// Seed for the index-th independent stream under a base seed; folding the trial
/// index into the seed makes serial and parallel runs draw the same instances.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
    SplitMix64 g(base + 0x9e3779b97f4a7c15ULL * (index + 1));
    return g.next();
}

inline NonNegativeMatrix random_matrix(std::size_t rows, std::size_t cols, double density,
                                       SplitMix64& rng) {
    if (!(density > 0.0 && density <= 1.0)) throw domain_error("density must lie in (0, 1]");
    if (rows == 0 || cols == 0) throw dimension_error("random_matrix: empty shape");
    std::vector<double> d(rows * cols);
    for (double& v : d) {
        const double u = rng.uniform();
        const double b = rng.uniform();
        v = b < density ? u : 0.0;
    }
    return NonNegativeMatrix(rows, cols, std::move(d));
}

/// n x n matrix with i.i.d. uniform [0,1) entries masked by Bernoulli(density).
inline NonNegativeMatrix random_matrix(std::size_t n, double density, std::uint64_t seed) {
    SplitMix64 rng(seed);
    return random_matrix(n, n, density, rng);
}

}  // namespace hadamard
