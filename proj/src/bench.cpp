#include "qisorank/bench.hpp"

#include "qisorank/errors.hpp"
#include "qisorank/isorank.hpp"
#include "qisorank/operators.hpp"
#include "qisorank/pea.hpp"
#include "qisorank/random.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ostream>

namespace qisorank {

namespace {

template <typename F>
double median_seconds(int repetitions, F&& body) {
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(repetitions));
    for (int r = 0; r < repetitions; ++r) {
        auto start = std::chrono::steady_clock::now();
        body();
        auto stop = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double>(stop - start).count());
    }
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
}

} // namespace

std::vector<BenchRow> run_bench(const std::vector<int>& sizes, int repetitions,
                                int phase_qubits, std::uint64_t seed) {
    if (repetitions < 1)
        throw ValidationError("bench needs at least one repetition");
    std::vector<BenchRow> rows;
    for (std::size_t idx = 0; idx < sizes.size(); ++idx) {
        const int n = sizes[idx];
        Network g1 = random_connected_network(n, seed + 2 * idx, "bench_a");
        Network g2 = random_connected_network(n, seed + 2 * idx + 1, "bench_b");
        StochasticOperator a1 = column_normalize(g1);
        StochasticOperator a2 = column_normalize(g2);
        StochasticOperator joint = kron_chain({a1, a2});

        HermitianModel joint_model = hermitian_decompose(joint);
        HermitianModel m1 = hermitian_decompose(a1);
        HermitianModel m2 = hermitian_decompose(a2);

        BenchRow row;
        row.factor_size = n;
        {
            RegisterLayout joint_layout =
                make_layout(phase_qubits, {g1.size(), g2.size()});
            row.joint_state_dim = joint_layout.padded_network_dim();
            RegisterLayout f1 = make_layout(phase_qubits, {g1.size()});
            RegisterLayout f2 = make_layout(phase_qubits, {g2.size()});
            row.factor_state_sum = f1.padded_network_dim() + f2.padded_network_dim();
        }
        row.joint_seconds =
            median_seconds(repetitions, [&] { run_pea(joint_model, phase_qubits); });
        row.per_factor_seconds = median_seconds(repetitions, [&] {
            run_pea(m1, phase_qubits);
            run_pea(m2, phase_qubits);
        });
        row.classical_seconds =
            median_seconds(repetitions, [&] { isorank_similarity(joint); });
        rows.push_back(row);
    }
    return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
    out << "factor_size,joint_state_dim,factor_state_sum,joint_seconds,"
           "per_factor_seconds,classical_seconds\n";
    char buf[160];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%zu,%zu,%.6e,%.6e,%.6e\n", row.factor_size,
                      row.joint_state_dim, row.factor_state_sum, row.joint_seconds,
                      row.per_factor_seconds, row.classical_seconds);
        out << buf;
    }
}

} // namespace qisorank
