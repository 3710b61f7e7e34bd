#include "qisorank/isorank.hpp"

#include "qisorank/errors.hpp"

#include <cmath>

namespace qisorank {

namespace {

// Connectivity of the support graph of A + A^T (the Kronecker product of
// bipartite walks splits into parity classes).
bool support_connected(const RealMatrix& a) {
    const Eigen::Index n = a.rows();
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<Eigen::Index> stack{0};
    seen[0] = 1;
    Eigen::Index reached = 1;
    while (!stack.empty()) {
        Eigen::Index u = stack.back();
        stack.pop_back();
        for (Eigen::Index v = 0; v < n; ++v) {
            if (!seen[static_cast<std::size_t>(v)] && (a(u, v) > 0.0 || a(v, u) > 0.0)) {
                seen[static_cast<std::size_t>(v)] = 1;
                ++reached;
                stack.push_back(v);
            }
        }
    }
    return reached == n;
}

} // namespace

SimilarityVector isorank_similarity(const StochasticOperator& a, double tolerance,
                                    int max_iters) {
    SimilarityVector sim;
    if (!support_connected(a.matrix))
        sim.warnings.push_back("Kronecker support is disconnected; stationary scores "
                               "depend on the uniform start");
    PowerResult res = power_iteration(a.matrix, tolerance, max_iters);
    sim.r = res.vector;
    sim.iterations = res.iterations;
    sim.residual = res.residual;
    return sim;
}

double eq1_residual(const SimilarityVector& sim, const Network& g1, const Network& g2) {
    const int n1 = g1.size();
    const int n2 = g2.size();
    if (sim.r.size() != static_cast<Eigen::Index>(n1) * n2)
        throw ValidationError("similarity vector has " + std::to_string(sim.r.size()) +
                              " entries, expected " + std::to_string(n1 * n2));
    double worst = 0.0;
    for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) {
            double sum = 0.0;
            for (int u : g1.adjacency_list[static_cast<std::size_t>(i)])
                for (int v : g2.adjacency_list[static_cast<std::size_t>(j)])
                    sum += sim.r[static_cast<Eigen::Index>(u) * n2 + v] /
                           (static_cast<double>(g1.degree(u)) * g2.degree(v));
            worst = std::max(worst, std::abs(sim.r[static_cast<Eigen::Index>(i) * n2 + j] - sum));
        }
    }
    return worst;
}

GroupedTables similarity_tables(const SimilarityVector& sim, const std::vector<Network>& nets) {
    if (nets.size() < 2)
        throw ValidationError("similarity tables need at least two networks");
    GroupedTables grouped;
    grouped.alone = 0;
    std::size_t rest_dim = 1;
    for (std::size_t k = 1; k < nets.size(); ++k) {
        grouped.rest.push_back(static_cast<int>(k));
        grouped.rest_sizes.push_back(nets[k].size());
        rest_dim *= static_cast<std::size_t>(nets[k].size());
    }
    const auto n0 = static_cast<std::size_t>(nets.front().size());
    if (static_cast<std::size_t>(sim.r.size()) != n0 * rest_dim)
        throw ValidationError("similarity vector does not match the network dimensions");

    grouped.tables.resize(n0);
    for (std::size_t a = 0; a < n0; ++a) {
        auto& table = grouped.tables[a];
        table.focus = 0;
        table.condition_value = static_cast<int>(a);
        table.rest = grouped.rest;
        table.raw_amplitudes.resize(rest_dim);
        double mass = 0.0;
        for (std::size_t t = 0; t < rest_dim; ++t) {
            double value = sim.r[static_cast<Eigen::Index>(a * rest_dim + t)];
            // sqrt keeps the raw->probability squaring of measurement tables;
            // ranking by marginal * conditional then reproduces R itself.
            table.raw_amplitudes[t] = std::sqrt(std::max(value, 0.0));
            mass += std::max(value, 0.0);
        }
        table.marginal = mass;
        if (mass > 0.0) {
            table.probabilities.reserve(rest_dim);
            for (std::size_t t = 0; t < rest_dim; ++t)
                table.probabilities.push_back(
                    table.raw_amplitudes[t] * table.raw_amplitudes[t] / mass);
        }
    }
    return grouped;
}

Alignment baseline_alignment(const SimilarityVector& sim, const std::vector<Network>& nets,
                             const MatchConfig& cfg) {
    GroupedTables tables = similarity_tables(sim, nets);
    Alignment alignment = match_multiway({tables}, nets, cfg);
    alignment.warnings.insert(alignment.warnings.end(), sim.warnings.begin(),
                              sim.warnings.end());
    return alignment;
}

} // namespace qisorank
