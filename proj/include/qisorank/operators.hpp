#pragma once

#include "qisorank/linalg.hpp"
#include "qisorank/netio.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qisorank {

/// Column-stochastic walk operator for one network or a Kronecker chain of
/// them. Factors and their networks are kept so downstream code can exploit
/// the product structure (register layout, per-factor runs, degree data).
struct StochasticOperator {
    RealMatrix matrix;               // column sums 1, entries >= 0
    std::vector<RealMatrix> factors; // per-network stochastic matrices
    std::vector<Network> networks;   // aligned with factors
    RealVector column_sums;

    int num_networks() const { return static_cast<int>(factors.size()); }
    Eigen::Index dim() const { return matrix.rows(); }
    bool symmetric(double eps = tol::structure) const;
};

enum class ModelMode { closest_hermitian, exact_stochastic };

/// Hermitian/skew split of a stochastic operator plus the data the phase
/// map needs: Perron column-sum bounds and the scale that keeps every
/// eigenvalue inside [-s, s].
struct HermitianModel {
    RealMatrix h;        // (A + A^T)/2
    RealMatrix s;        // (A - A^T)/2
    double rho_lower = 0.0;
    double rho_upper = 0.0;
    double scale = 1.0;  // phase-map scale; 1 in exact-stochastic mode
    ModelMode mode = ModelMode::closest_hermitian;
    StochasticOperator source;
};

/// Model with optional node-score matrix B attached. Evolution becomes the
/// product exp(i theta H) exp(i theta B); exact only when [H,B] = 0, so the
/// commutator norm is recorded and surfaced as a warning downstream.
struct SimilarityOperator {
    HermitianModel base;
    std::optional<RealMatrix> scores; // Hermitian when present
    double commutator_norm = 0.0;

    bool commuting() const { return commutator_norm <= tol::unitarity; }
    bool has_scores() const { return scores.has_value(); }
};

struct NormalityReport {
    bool is_normal = false;
    double normality_defect = 0.0; // ||A^dag A - A A^dag||_inf
    double commutator_hs = 0.0;    // ||HS - SH||_inf
    double eig_alignment = 0.0;    // multiset distance, Re/Im of eig(A) vs eig(H)/eig(S)
};

/// A_i[u][v] = 1/|N(v)| for (u,v) in E. Requires a connected network with
/// at least two nodes.
StochasticOperator column_normalize(const Network& net);

/// A = A_1 (x) ... (x) A_m. Factor lists concatenate, so chains of chains
/// stay flat.
StochasticOperator kron_chain(const std::vector<StochasticOperator>& factors);

HermitianModel hermitian_decompose(const StochasticOperator& a,
                                   ModelMode mode = ModelMode::closest_hermitian);

NormalityReport normality_report(const StochasticOperator& a);

SimilarityOperator attach_scores(const HermitianModel& model, const RealMatrix& b);
SimilarityOperator without_scores(HermitianModel model);

/// phi = (lambda/s + 1)/4, strictly increasing, [-s, s] -> [0, 0.5].
double phase_map(double lambda, const HermitianModel& model);
/// Inverse of phase_map: lambda = (4 phi - 1) s.
double phase_unmap(double phi, const HermitianModel& model);

/// Product of node degrees per joint tuple index. Degrees diagonalise the
/// walk: D^{-1/2} A D^{1/2} is symmetric, which is what makes the spectrum
/// real and the spectral projections cheap to compute exactly.
RealVector joint_degrees(const StochasticOperator& a);

/// Parse "label1<TAB>label2<TAB>score" lines into a diagonal score matrix
/// on the pairwise Kronecker index. Unknown labels are errors.
RealMatrix parse_scores(const std::string& text, const Network& g1, const Network& g2);
RealMatrix load_scores(const std::string& path, const Network& g1, const Network& g2);

} // namespace qisorank
