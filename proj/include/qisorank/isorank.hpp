#pragma once

#include "qisorank/matching.hpp"
#include "qisorank/operators.hpp"

#include <string>
#include <vector>

namespace qisorank {

/// Stationary similarity scores R = AR over node tuples, L1-normalised.
struct SimilarityVector {
    RealVector r;
    int iterations = 0;
    double residual = 0.0;
    std::vector<std::string> warnings;
};

/// Damped power iteration from the uniform vector, the same scheme the
/// spectral kernel uses, so the classical scores are directly comparable to
/// the quantum-path eigenvector. Warns when the Kronecker support graph is
/// disconnected (both factors bipartite): the stationary vector then depends
/// on the start, and uniform is the documented choice.
SimilarityVector isorank_similarity(const StochasticOperator& a, double tolerance = 1e-10,
                                    int max_iters = 100000);

/// Direct evaluation of the neighbourhood-sum recursion
/// R_ij = sum_{u in N(i)} sum_{v in N(j)} R_uv / (|N(u)||N(v)|),
/// returning the largest absolute mismatch. Independent of the matrix form.
double eq1_residual(const SimilarityVector& sim, const Network& g1, const Network& g2);

/// Reshape R into conditional tables and run the shared matching pipeline.
Alignment baseline_alignment(const SimilarityVector& sim, const std::vector<Network>& nets,
                             const MatchConfig& cfg);

/// The conditional-table form of R, exposed so callers can compare against
/// measurement-derived tables.
GroupedTables similarity_tables(const SimilarityVector& sim, const std::vector<Network>& nets);

} // namespace qisorank
