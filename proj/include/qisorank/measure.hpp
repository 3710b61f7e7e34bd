#pragma once

#include "qisorank/netio.hpp"
#include "qisorank/pea.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace qisorank {

/// One conditional measurement: the focus register pinned to
/// condition_value, amplitudes over the remaining registers kept
/// unnormalised (these are the values the probability plots report), plus
/// the normalised conditional distribution derived from them.
struct ConditionalTable {
    int focus = 0;
    int condition_value = 0;
    std::vector<int> rest;                // remaining register ids, tuple order
    std::vector<double> raw_amplitudes;   // |amplitude| per rest tuple, row-major
    std::vector<double> probabilities;    // raw^2 / sum raw^2; empty when marginal == 0
    double marginal = 0.0;                // sum raw^2 == P(focus == condition_value)
    bool sampled = false;
};

/// Tables for every value of the `alone` register against the joint tuples
/// of the `rest` registers, in the given order.
struct GroupedTables {
    int alone = 0;
    std::vector<int> rest;
    std::vector<int> rest_sizes;
    std::vector<ConditionalTable> tables; // indexed by the alone value
    bool sampled = false;
};

/// Born-rule marginal of one network register.
std::vector<double> marginal_distribution(const QuantumState& state, int reg);

/// Collapse on register == value. Zero-probability conditions are an error;
/// callers that sweep all values should use grouped_collapse, which keeps
/// such rows as empty tables instead.
ConditionalTable collapse(const QuantumState& state, int reg, int value);

GroupedTables grouped_collapse(const QuantumState& state, int alone,
                               const std::vector<int>& rest);

/// Same tables estimated from `shots` seeded draws of the joint
/// distribution instead of the analytic amplitudes.
GroupedTables grouped_collapse_sampled(const QuantumState& state, int alone,
                                       const std::vector<int>& rest,
                                       std::uint64_t shots, std::uint64_t seed);

/// Seed-deterministic multinomial counts from a probability (or weight)
/// vector; counts sum to shots.
std::vector<std::uint64_t> sample_counts(const std::vector<double>& distribution,
                                         std::uint64_t shots, std::uint64_t seed);

/// "condition<TAB>outcome<TAB>raw_amplitude<TAB>probability" rows, node
/// labels taken from the networks in register order.
void write_tables_tsv(std::ostream& out, const GroupedTables& tables,
                      const std::vector<Network>& nets);

} // namespace qisorank
