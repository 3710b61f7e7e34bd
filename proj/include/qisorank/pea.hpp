#pragma once

#include "qisorank/linalg.hpp"
#include "qisorank/operators.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qisorank {

/// Register geometry of the simulation: a t-qubit phase register followed
/// by one register per network, each padded to a power of two. Valid node
/// states occupy 0..|V_i|-1 of each factor; pad states never acquire
/// amplitude.
struct RegisterLayout {
    int phase_qubits = 0;
    std::vector<int> network_sizes; // |V_i|
    std::vector<int> padded_bits;   // q_i, 2^{q_i} >= |V_i|
    std::size_t total_dim = 0;      // 2^t * prod 2^{q_i}

    int num_networks() const { return static_cast<int>(network_sizes.size()); }
    std::size_t phase_dim() const { return std::size_t{1} << phase_qubits; }
    std::size_t padded_network_dim() const;
    std::size_t valid_network_dim() const; // prod |V_i|

    /// Mixed-radix conversions between the dense "valid tuple" index used
    /// by operator matrices and the padded register index of the state.
    std::size_t padded_of_valid(std::size_t valid) const;
    std::vector<int> decode_valid(std::size_t valid) const;
    std::size_t encode_valid(const std::vector<int>& digits) const;
};

RegisterLayout make_layout(int phase_qubits, const std::vector<int>& network_sizes);

struct QuantumState {
    RegisterLayout layout;
    ComplexVector amplitudes; // length layout.total_dim
    bool normalized = true;
};

/// Phase register |0>, network registers uniform over the valid tuples.
QuantumState equal_superposition(const RegisterLayout& layout);

struct PeaOutcome {
    RegisterLayout layout;
    std::vector<double> phase_distribution; // per phase bin; sums to 1
    int peak_bin = 0;
    double recovered_eigenvalue = 0.0; // peak bin pulled back through the phase map
    QuantumState post_state;           // network registers conditioned on peak_bin
    double success_probability = 0.0;  // analytic mass of the reported bin
    std::vector<std::string> warnings;
};

enum class PeaMode { exact, sampled };

/// Probability that phase estimation started from the equal superposition
/// reports each eigenvector: the normalised squared coefficient sums
/// |1/sqrt(N) sum_i <i|mu_j>|^2. Eigenvalues equal within tol::cluster are
/// treated as one outcome whose representative is the projection of the
/// uniform vector onto the eigenspace (degenerate phases are
/// indistinguishable to the algorithm); the remaining directions in such a
/// cluster report zero. Entries follow eig_oracle order.
std::vector<double> success_probability(const ComplexMatrix& a_or_h);
std::vector<double> success_probability(const RealMatrix& a_or_h);

/// Full phase estimation run: Hadamard wall, controlled powers of
/// U = exp(i 2 pi (H/s + 1)/4) (times exp(i 2 pi B/(4 s)) when scores are
/// attached), inverse Fourier transform, phase measurement. In
/// exact-stochastic mode a symmetric operator is evolved directly (H = A,
/// s = 1); a non-symmetric one cannot be exponentiated unitarily, so the
/// outcome is synthesised from the exact spectral decomposition of A
/// instead, which reproduces the idealised coefficient weights.
/// `sampled` draws `shots` phase measurements with the given seed and
/// reports the empirical distribution; amplitudes stay analytic.
PeaOutcome run_pea(const SimilarityOperator& model, int phase_qubits,
                   PeaMode mode = PeaMode::exact, std::uint64_t shots = 0,
                   std::uint64_t seed = 0);
PeaOutcome run_pea(const HermitianModel& model, int phase_qubits,
                   PeaMode mode = PeaMode::exact, std::uint64_t shots = 0,
                   std::uint64_t seed = 0);

/// Post-measurement amplitudes over the N valid node tuples: global phase
/// fixed, real parts taken, L2-normalised. For connected nonnegative H this
/// is the Perron direction, so entries are nonnegative up to phase-register
/// leakage.
RealVector recovered_eigenvector(const PeaOutcome& outcome);

/// Rescale a nonnegative-direction vector so entries sum to one, for
/// comparisons against stationary distributions.
RealVector l1_normalized(const RealVector& v);

} // namespace qisorank
