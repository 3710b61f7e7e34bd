#pragma once

#include "qisorank/netio.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace qisorank {

/// Seeded RNG with platform-independent draws. std::mt19937_64 produces a
/// pinned bit stream; the double conversion below is fixed arithmetic, so
/// sampled outputs are byte-stable across standard libraries (the
/// std::*_distribution adapters are not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1), 53 mantissa bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return gen_() % n; }

private:
    std::mt19937_64 gen_;
};

/// Inverse-CDF draw from an unnormalised weight vector.
std::size_t sample_index(const std::vector<double>& weights, Rng& rng);

/// Multinomial counts: `shots` independent draws from `weights`.
std::vector<std::uint64_t> multinomial_counts(const std::vector<double>& weights,
                                              std::uint64_t shots, Rng& rng);

/// Connected Erdos-Renyi-style graph on n nodes (p = 0.5, resampled until
/// connected) with labels "<prefix>0".."<prefix>{n-1}".
Network random_connected_network(int n, std::uint64_t seed, const std::string& name,
                                 const std::string& label_prefix = "n");

} // namespace qisorank
