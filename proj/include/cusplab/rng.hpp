#ifndef CUSPLAB_RNG_HPP
#define CUSPLAB_RNG_HPP

#include <cstdint>
#include <random>

namespace cusplab {

/// Deterministic random source. mt19937_64 output is fixed by the standard;
/// the float mappings below are explicit so streams are reproducible across
/// standard libraries (std::uniform_real_distribution is not portable).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform in [-1, 1).
    double symmetric() { return 2.0 * uniform() - 1.0; }

    /// Uniform integer in [0, n).
    std::uint64_t index(std::uint64_t n) { return gen_() % n; }

    bool coin() { return (gen_() & 1u) != 0; }

    /// Derive an independent child stream (used to keep experiment sub-tasks
    /// decoupled from draw order).
    Rng fork(std::uint64_t salt) {
        return Rng(gen_() ^ (0x9e3779b97f4a7c15ull * (salt + 1)));
    }

private:
    std::mt19937_64 gen_;
};

} // namespace cusplab

#endif
