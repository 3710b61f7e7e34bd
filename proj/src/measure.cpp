#include "qisorank/measure.hpp"

#include "qisorank/errors.hpp"
#include "qisorank/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace qisorank {

namespace {

void check_register(const RegisterLayout& layout, int reg) {
    if (reg < 0 || reg >= layout.num_networks())
        throw ValidationError("register " + std::to_string(reg) + " does not exist (" +
                              std::to_string(layout.num_networks()) + " network registers)");
}

// Every register exactly once across {alone} + rest.
void check_partition(const RegisterLayout& layout, int alone, const std::vector<int>& rest) {
    check_register(layout, alone);
    std::vector<char> seen(static_cast<std::size_t>(layout.num_networks()), 0);
    seen[static_cast<std::size_t>(alone)] = 1;
    for (int r : rest) {
        check_register(layout, r);
        if (seen[static_cast<std::size_t>(r)])
            throw ValidationError("register " + std::to_string(r) +
                                  " appears twice in the measurement partition");
        seen[static_cast<std::size_t>(r)] = 1;
    }
    if (!std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; }))
        throw ValidationError("measurement partition does not cover all registers");
}

std::size_t rest_tuple_index(const std::vector<int>& digits, const std::vector<int>& rest,
                             const std::vector<int>& sizes) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < rest.size(); ++k)
        idx = idx * static_cast<std::size_t>(sizes[k]) +
              static_cast<std::size_t>(digits[static_cast<std::size_t>(rest[k])]);
    return idx;
}

void finalize_table(ConditionalTable& table) {
    table.marginal = 0.0;
    for (double raw : table.raw_amplitudes)
        table.marginal += raw * raw;
    table.probabilities.clear();
    if (table.marginal > 0.0) {
        table.probabilities.reserve(table.raw_amplitudes.size());
        for (double raw : table.raw_amplitudes)
            table.probabilities.push_back(raw * raw / table.marginal);
    }
}

GroupedTables grouped_skeleton(const RegisterLayout& layout, int alone,
                               const std::vector<int>& rest) {
    check_partition(layout, alone, rest);
    GroupedTables grouped;
    grouped.alone = alone;
    grouped.rest = rest;
    std::size_t rest_dim = 1;
    for (int r : rest) {
        grouped.rest_sizes.push_back(layout.network_sizes[static_cast<std::size_t>(r)]);
        rest_dim *= static_cast<std::size_t>(grouped.rest_sizes.back());
    }
    const int alone_size = layout.network_sizes[static_cast<std::size_t>(alone)];
    grouped.tables.resize(static_cast<std::size_t>(alone_size));
    for (int a = 0; a < alone_size; ++a) {
        auto& table = grouped.tables[static_cast<std::size_t>(a)];
        table.focus = alone;
        table.condition_value = a;
        table.rest = rest;
        table.raw_amplitudes.assign(rest_dim, 0.0);
    }
    return grouped;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

} // namespace

std::vector<double> marginal_distribution(const QuantumState& state, int reg) {
    const RegisterLayout& layout = state.layout;
    check_register(layout, reg);
    std::vector<double> marginal(
        static_cast<std::size_t>(layout.network_sizes[static_cast<std::size_t>(reg)]), 0.0);
    const std::size_t n = layout.valid_network_dim();
    for (std::size_t i = 0; i < n; ++i) {
        auto digits = layout.decode_valid(i);
        marginal[static_cast<std::size_t>(digits[static_cast<std::size_t>(reg)])] +=
            std::norm(state.amplitudes[static_cast<Eigen::Index>(layout.padded_of_valid(i))]);
    }
    return marginal;
}

ConditionalTable collapse(const QuantumState& state, int reg, int value) {
    const RegisterLayout& layout = state.layout;
    check_register(layout, reg);
    if (value < 0 || value >= layout.network_sizes[static_cast<std::size_t>(reg)])
        throw ValidationError("basis value " + std::to_string(value) +
                              " out of range for register " + std::to_string(reg));
    std::vector<int> rest;
    for (int r = 0; r < layout.num_networks(); ++r)
        if (r != reg)
            rest.push_back(r);
    GroupedTables grouped = grouped_skeleton(layout, reg, rest);

    const std::size_t n = layout.valid_network_dim();
    auto& table = grouped.tables[static_cast<std::size_t>(value)];
    for (std::size_t i = 0; i < n; ++i) {
        auto digits = layout.decode_valid(i);
        if (digits[static_cast<std::size_t>(reg)] != value)
            continue;
        table.raw_amplitudes[rest_tuple_index(digits, rest, grouped.rest_sizes)] = std::abs(
            state.amplitudes[static_cast<Eigen::Index>(layout.padded_of_valid(i))]);
    }
    finalize_table(table);
    if (table.marginal <= 0.0)
        throw ValidationError("degenerate condition: register " + std::to_string(reg) +
                              " == " + std::to_string(value) + " has zero probability");
    return table;
}

GroupedTables grouped_collapse(const QuantumState& state, int alone,
                               const std::vector<int>& rest) {
    const RegisterLayout& layout = state.layout;
    GroupedTables grouped = grouped_skeleton(layout, alone, rest);
    const std::size_t n = layout.valid_network_dim();
    for (std::size_t i = 0; i < n; ++i) {
        auto digits = layout.decode_valid(i);
        auto& table = grouped.tables[static_cast<std::size_t>(
            digits[static_cast<std::size_t>(alone)])];
        table.raw_amplitudes[rest_tuple_index(digits, rest, grouped.rest_sizes)] = std::abs(
            state.amplitudes[static_cast<Eigen::Index>(layout.padded_of_valid(i))]);
    }
    for (auto& table : grouped.tables)
        finalize_table(table);
    return grouped;
}

GroupedTables grouped_collapse_sampled(const QuantumState& state, int alone,
                                       const std::vector<int>& rest,
                                       std::uint64_t shots, std::uint64_t seed) {
    if (shots < 1)
        throw ValidationError("sampled collapse needs shots >= 1");
    const RegisterLayout& layout = state.layout;
    GroupedTables grouped = grouped_skeleton(layout, alone, rest);
    grouped.sampled = true;

    const std::size_t n = layout.valid_network_dim();
    std::vector<double> joint(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        joint[i] = std::norm(
            state.amplitudes[static_cast<Eigen::Index>(layout.padded_of_valid(i))]);
    Rng rng(seed);
    auto counts = multinomial_counts(joint, shots, rng);

    for (std::size_t i = 0; i < n; ++i) {
        if (counts[i] == 0)
            continue;
        auto digits = layout.decode_valid(i);
        auto& table = grouped.tables[static_cast<std::size_t>(
            digits[static_cast<std::size_t>(alone)])];
        // sqrt(count) keeps the raw/probability relationship of the exact
        // tables; dividing by shots later cancels in the normalisation.
        table.raw_amplitudes[rest_tuple_index(digits, rest, grouped.rest_sizes)] =
            std::sqrt(static_cast<double>(counts[i]) / static_cast<double>(shots));
    }
    for (auto& table : grouped.tables) {
        table.sampled = true;
        finalize_table(table);
    }
    return grouped;
}

std::vector<std::uint64_t> sample_counts(const std::vector<double>& distribution,
                                         std::uint64_t shots, std::uint64_t seed) {
    if (shots < 1)
        throw ValidationError("sample_counts needs shots >= 1");
    Rng rng(seed);
    return multinomial_counts(distribution, shots, rng);
}

void write_tables_tsv(std::ostream& out, const GroupedTables& tables,
                      const std::vector<Network>& nets) {
    out << "#condition\toutcome\traw_amplitude\tprobability\n";
    const Network& alone_net = nets.at(static_cast<std::size_t>(tables.alone));
    for (const auto& table : tables.tables) {
        const std::string& cond =
            alone_net.nodes.at(static_cast<std::size_t>(table.condition_value));
        for (std::size_t tup = 0; tup < table.raw_amplitudes.size(); ++tup) {
            std::string outcome;
            std::size_t v = tup;
            std::vector<int> digits(tables.rest.size(), 0);
            for (std::size_t k = tables.rest.size(); k-- > 0;) {
                digits[k] = static_cast<int>(v % static_cast<std::size_t>(tables.rest_sizes[k]));
                v /= static_cast<std::size_t>(tables.rest_sizes[k]);
            }
            for (std::size_t k = 0; k < tables.rest.size(); ++k) {
                if (k)
                    outcome += ',';
                outcome += nets.at(static_cast<std::size_t>(tables.rest[k]))
                               .nodes.at(static_cast<std::size_t>(digits[k]));
            }
            double prob = table.probabilities.empty() ? 0.0 : table.probabilities[tup];
            out << cond << '\t' << outcome << '\t' << fmt(table.raw_amplitudes[tup])
                << '\t' << fmt(prob) << '\n';
        }
    }
}

} // namespace qisorank
