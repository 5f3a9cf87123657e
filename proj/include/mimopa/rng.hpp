// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace mimopa {

/// SplitMix64 step; used both as a bit mixer and to derive substream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic random source with portable output.
///
/// The engine is std::mt19937_64 (fully specified by the standard), but all
/// variate transforms are done by hand because the standard distribution
/// classes are implementation-defined and would break bit-reproducibility
/// across toolchains. Substreams are derived by hashing a (seed, path...)
/// tuple, so Monte Carlo trials can be keyed by index and run in any order
/// or thread without changing results.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    /// Independent substream for a (tag, index, ...) path under a master seed.
    static Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
        return substream_range(seed, path.begin(), path.end());
    }

    static Rng substream(std::uint64_t seed, const std::vector<std::uint64_t>& path) {
        return substream_range(seed, path.begin(), path.end());
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in (0, 1]; never returns 0 so log() is always safe.
    double uniform01() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal pair via the Box-Muller transform.
    void gaussian_pair(double& g0, double& g1) {
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * M_PI * u2;
        g0 = rad * std::cos(ang);
        g1 = rad * std::sin(ang);
    }

    /// Circularly symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> complex_gaussian(double variance) {
        double g0, g1;
        gaussian_pair(g0, g1);
        const double s = std::sqrt(variance / 2.0);
        return {s * g0, s * g1};
    }

  private:
    template <typename It>
    static Rng substream_range(std::uint64_t seed, It first, It last) {
        std::uint64_t h = seed;
        for (; first != last; ++first) {
            h = splitmix64(h ^ splitmix64(*first));
        }
        return Rng(h);
    }

    std::mt19937_64 engine_;
};

}  // namespace mimopa
