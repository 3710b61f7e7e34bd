#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace qisorank {

/// One row of the separability benchmark: a pair of random connected
/// graphs of the given size, timed through the joint statevector run, the
/// two per-factor runs, and the classical power iteration on the Kronecker
/// operator. Seconds are medians over the repetitions.
struct BenchRow {
    int factor_size = 0;
    std::size_t joint_state_dim = 0;    // product of padded factor dims
    std::size_t factor_state_sum = 0;   // sum of padded factor dims
    double joint_seconds = 0.0;
    double per_factor_seconds = 0.0;
    double classical_seconds = 0.0;
};

std::vector<BenchRow> run_bench(const std::vector<int>& sizes, int repetitions,
                                int phase_qubits, std::uint64_t seed);

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

} // namespace qisorank
