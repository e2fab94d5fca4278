#pragma once

#include <cstdint>
#include <cmath>

#include "citytsp/errors.hpp"

namespace citytsp {

namespace detail {

// Stafford mix 13, the finalizer used by splitmix64.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace detail

/// Well-known substream labels. Arbitrary extra salts may be layered with fork().
enum class Stream : std::uint64_t {
    Sampling = 1,
    Selection = 2,
    Trials = 3,
    Bootstrap = 4,
};

/// Counter-based generator: the i-th output is a hash of (key, i), so streams
/// derived from the same 64-bit seed never share state and draws are
/// reproducible regardless of platform or call interleaving across streams.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : key_(detail::mix64(seed + detail::kGolden)) {}

    Rng(std::uint64_t seed, Stream stream) : Rng(seed) { *this = fork(static_cast<std::uint64_t>(stream)); }

    /// Derive an independent stream keyed by `salt`; does not advance this stream.
    Rng fork(std::uint64_t salt) const {
        Rng child = *this;
        child.key_ = detail::mix64(key_ ^ (detail::mix64(salt + detail::kGolden) + detail::kGolden));
        child.ctr_ = 0;
        return child;
    }

    Rng fork(Stream stream) const { return fork(static_cast<std::uint64_t>(stream)); }

    std::uint64_t next_u64() { return detail::mix64(key_ + detail::kGolden * ++ctr_); }

    /// Uniform double in [0,1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    /// Unbiased integer in [0, n) by rejection.
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) throw ParameterError("next_below: n must be positive");
        const std::uint64_t threshold = -n % n;  // 2^64 mod n
        for (;;) {
            const std::uint64_t v = next_u64();
            if (v >= threshold) return v % n;
        }
    }

    /// Poisson draw. Inversion below a cutoff; larger means split additively
    /// (a sum of independent Poissons is Poisson, so the law is exact).
    long poisson(double mean) {
        if (!(mean > 0.0)) throw ParameterError("poisson: mean must be positive");
        long total = 0;
        while (mean > 60.0) {
            total += poisson_inversion(30.0);
            mean -= 30.0;
        }
        return total + poisson_inversion(mean);
    }

    std::uint64_t key() const { return key_; }

  private:
    long poisson_inversion(double mean) {
        const double limit = std::exp(-mean);
        long k = 0;
        double prod = next_unit();
        while (prod > limit) {
            ++k;
            prod *= next_unit();
        }
        return k;
    }

    std::uint64_t key_ = 0;
    std::uint64_t ctr_ = 0;
};

}  // namespace citytsp
