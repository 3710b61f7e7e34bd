#include "qisorank/pea.hpp"

#include "qisorank/errors.hpp"
#include "qisorank/random.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace qisorank {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int ceil_log2(int n) {
    int bits = 0;
    while ((1 << bits) < n)
        ++bits;
    return bits;
}

// X[y] = 1/sqrt(M) sum_k x[k] e^{-2 pi i k y / M}; in-place, M a power of two.
void inverse_qft(std::vector<std::complex<double>>& x) {
    const std::size_t m = x.size();
    for (std::size_t i = 1, j = 0; i < m; ++i) {
        std::size_t bit = m >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= m; len <<= 1) {
        const double ang = -kTwoPi / static_cast<double>(len);
        const std::complex<double> wl = std::polar(1.0, ang);
        for (std::size_t i = 0; i < m; i += len) {
            std::complex<double> w{1.0, 0.0};
            for (std::size_t k = 0; k < len / 2; ++k) {
                auto even = x[i + k];
                auto odd = x[i + k + len / 2] * w;
                x[i + k] = even + odd;
                x[i + k + len / 2] = even - odd;
                w *= wl;
            }
        }
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (auto& v : x)
        v *= scale;
}

// Eigenphase form of the evolution operator on the valid joint space:
// U^p = basis diag(e^{i p theta_j}) basis^dagger for any integer p.
struct UnitaryPowers {
    ComplexMatrix basis;        // orthonormal columns
    std::vector<double> phases; // theta_j
    ComplexVector overlaps;     // basis^dagger applied to the uniform vector

    ComplexMatrix power(std::uint64_t p) const {
        ComplexVector d(static_cast<Eigen::Index>(phases.size()));
        for (std::size_t j = 0; j < phases.size(); ++j)
            d[static_cast<Eigen::Index>(j)] =
                std::polar(1.0, static_cast<double>(p) * phases[j]);
        return basis * d.asDiagonal() * basis.adjoint();
    }
};

UnitaryPowers evolution_phases(const SimilarityOperator& model) {
    const HermitianModel& base = model.base;
    const Eigen::Index n = base.h.rows();
    UnitaryPowers up;
    if (!model.has_scores()) {
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(base.h);
        up.basis = es.eigenvectors().cast<std::complex<double>>();
        up.phases.resize(static_cast<std::size_t>(n));
        for (Eigen::Index j = 0; j < n; ++j)
            up.phases[static_cast<std::size_t>(j)] =
                kTwoPi * (es.eigenvalues()[j] / base.scale + 1.0) / 4.0;
    } else {
        ComplexMatrix u = expm_hermitian(base.h, kTwoPi / (4.0 * base.scale)) *
                          std::polar(1.0, kTwoPi / 4.0);
        u *= expm_hermitian(*model.scores, kTwoPi / (4.0 * base.scale));
        // A product of unitaries is unitary, hence normal: its Schur form is
        // diagonal and the Schur vectors are an orthonormal eigenbasis.
        Eigen::ComplexSchur<ComplexMatrix> schur(u);
        if (schur.info() != Eigen::Success)
            throw ConvergenceError("Schur decomposition of the evolution operator failed",
                                   0.0);
        up.basis = schur.matrixU();
        up.phases.resize(static_cast<std::size_t>(n));
        for (Eigen::Index j = 0; j < n; ++j)
            up.phases[static_cast<std::size_t>(j)] = std::arg(schur.matrixT()(j, j));
    }
    ComplexVector uniform =
        ComplexVector::Constant(n, std::complex<double>(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
    up.overlaps = up.basis.adjoint() * uniform;
    return up;
}

double circular_phase_distance(double a, double b) {
    double d = std::abs(a - b);
    d -= std::floor(d);
    return std::min(d, 1.0 - d);
}

// Principal phase = the eigenphase the uniform input overlaps most. Warn if
// any other phase lands within two bins of it at this resolution.
void check_phase_separation(const std::vector<double>& phases,
                            const std::vector<double>& weights, int t,
                            std::vector<std::string>& warnings) {
    if (phases.size() < 2)
        return;
    std::size_t principal = static_cast<std::size_t>(
        std::max_element(weights.begin(), weights.end()) - weights.begin());
    const double bins = static_cast<double>(std::size_t{1} << t);
    double nearest = 1.0;
    for (std::size_t j = 0; j < phases.size(); ++j) {
        double d = circular_phase_distance(phases[j], phases[principal]);
        if (d > tol::residual)
            nearest = std::min(nearest, d);
    }
    if (nearest < 1.0 && nearest * bins < 2.0)
        warnings.push_back("phase resolution: nearest distinct phase is only " +
                           std::to_string(nearest * bins) + " bins from the principal at t=" +
                           std::to_string(t));
}

void fix_real_sign(RealVector& v) {
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v[imax] < 0.0)
        v = -v;
}

QuantumState embed_post_state(const RegisterLayout& run_layout, const ComplexVector& valid) {
    RegisterLayout post = make_layout(0, run_layout.network_sizes);
    QuantumState state;
    state.layout = post;
    state.amplitudes = ComplexVector::Zero(static_cast<Eigen::Index>(post.total_dim));
    const std::size_t n = post.valid_network_dim();
    for (std::size_t i = 0; i < n; ++i)
        state.amplitudes[static_cast<Eigen::Index>(post.padded_of_valid(i))] =
            valid[static_cast<Eigen::Index>(i)];
    double norm = state.amplitudes.norm();
    if (norm <= 0.0)
        throw ConvergenceError("post-measurement state has no amplitude", norm);
    state.amplitudes /= norm;
    state.normalized = true;
    return state;
}

// Analysis route for exactly stochastic operators that are not symmetric:
// there is no unitary e^{iA} to simulate, so the outcome is reconstructed
// from the spectral decomposition. D^{-1/2} A D^{1/2} is symmetric for
// degree-normalised walks, which gives real eigenvalues, an orthonormal
// basis and stable projections even when eigenvalue 1 is degenerate (both
// factor graphs bipartite).
PeaOutcome run_pea_oracle(const SimilarityOperator& model, int t, PeaMode mode,
                          std::uint64_t shots, std::uint64_t seed) {
    const HermitianModel& base = model.base;
    const StochasticOperator& source = base.source;
    const Eigen::Index n = source.dim();
    const std::size_t bins = std::size_t{1} << t;

    RealVector deg = joint_degrees(source);
    RealVector dh = deg.cwiseSqrt();
    RealMatrix sym = dh.cwiseInverse().asDiagonal() * source.matrix * dh.asDiagonal();
    if ((sym - sym.transpose()).cwiseAbs().maxCoeff() > tol::residual)
        throw ContractError("operator is not degree-reversible; cannot analyse exactly");
    sym = 0.5 * (sym + sym.transpose());
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(sym);

    RealVector u = RealVector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    RealVector coeffs = es.eigenvectors().transpose() * RealVector(dh.cwiseInverse().asDiagonal() * u);

    std::vector<int> bin_of(static_cast<std::size_t>(n));
    std::vector<double> phases(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
        double phi = phase_map(std::clamp(es.eigenvalues()[j], -base.scale, base.scale), base);
        phases[static_cast<std::size_t>(j)] = phi;
        bin_of[static_cast<std::size_t>(j)] =
            static_cast<int>(std::llround(phi * static_cast<double>(bins))) %
            static_cast<int>(bins);
    }

    // Eigenvectors of A sharing a phase bin add coherently; their combined
    // weight is the normalised squared coefficient sum of the combination.
    std::vector<RealVector> bin_vectors(bins);
    std::vector<double> weights(bins, 0.0);
    for (Eigen::Index j = 0; j < n; ++j) {
        int b = bin_of[static_cast<std::size_t>(j)];
        RealVector v = coeffs[j] * RealVector(dh.asDiagonal() * es.eigenvectors().col(j));
        if (bin_vectors[static_cast<std::size_t>(b)].size() == 0)
            bin_vectors[static_cast<std::size_t>(b)] = v;
        else
            bin_vectors[static_cast<std::size_t>(b)] += v;
    }
    double total = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
        if (bin_vectors[b].size() == 0)
            continue;
        double norm2 = bin_vectors[b].squaredNorm();
        if (norm2 <= 0.0)
            continue;
        double summed = bin_vectors[b].sum();
        weights[b] = summed * summed / (static_cast<double>(n) * norm2);
        total += weights[b];
    }
    if (total <= 0.0)
        throw ContractError("stochastic analysis produced an empty phase distribution");
    for (auto& w : weights)
        w /= total;

    PeaOutcome outcome;
    outcome.layout = make_layout(t, [&] {
        std::vector<int> sizes;
        for (const auto& net : source.networks)
            sizes.push_back(net.size());
        return sizes;
    }());
    outcome.phase_distribution = weights;
    int analytic_peak = static_cast<int>(
        std::max_element(weights.begin(), weights.end()) - weights.begin());
    int reported_peak = analytic_peak;
    if (mode == PeaMode::sampled) {
        Rng rng(seed);
        auto counts = multinomial_counts(weights, shots, rng);
        outcome.phase_distribution.assign(bins, 0.0);
        for (std::size_t b = 0; b < bins; ++b)
            outcome.phase_distribution[b] =
                static_cast<double>(counts[b]) / static_cast<double>(shots);
        reported_peak = static_cast<int>(
            std::max_element(counts.begin(), counts.end()) - counts.begin());
    }
    outcome.peak_bin = reported_peak;
    outcome.recovered_eigenvalue =
        phase_unmap(static_cast<double>(reported_peak) / static_cast<double>(bins), base);
    outcome.success_probability = weights[static_cast<std::size_t>(reported_peak)];

    RealVector post = bin_vectors[static_cast<std::size_t>(reported_peak)];
    if (post.size() == 0 || post.squaredNorm() <= 0.0)
        throw ConvergenceError("reported phase bin holds no eigenvector mass", 0.0);
    fix_real_sign(post);
    outcome.post_state = embed_post_state(outcome.layout, post.cast<std::complex<double>>());

    std::vector<double> overlap_weights(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j)
        overlap_weights[static_cast<std::size_t>(j)] = coeffs[j] * coeffs[j];
    check_phase_separation(phases, overlap_weights, t, outcome.warnings);
    return outcome;
}

} // namespace

std::size_t RegisterLayout::padded_network_dim() const {
    std::size_t d = 1;
    for (int bits : padded_bits)
        d <<= bits;
    return d;
}

std::size_t RegisterLayout::valid_network_dim() const {
    std::size_t d = 1;
    for (int s : network_sizes)
        d *= static_cast<std::size_t>(s);
    return d;
}

std::size_t RegisterLayout::padded_of_valid(std::size_t valid) const {
    std::size_t padded = 0;
    const auto digits = decode_valid(valid);
    for (std::size_t r = 0; r < digits.size(); ++r) {
        padded <<= padded_bits[r];
        padded |= static_cast<std::size_t>(digits[r]);
    }
    return padded;
}

std::vector<int> RegisterLayout::decode_valid(std::size_t valid) const {
    std::vector<int> digits(network_sizes.size(), 0);
    for (std::size_t r = network_sizes.size(); r-- > 0;) {
        auto base = static_cast<std::size_t>(network_sizes[r]);
        digits[r] = static_cast<int>(valid % base);
        valid /= base;
    }
    return digits;
}

std::size_t RegisterLayout::encode_valid(const std::vector<int>& digits) const {
    std::size_t valid = 0;
    for (std::size_t r = 0; r < digits.size(); ++r)
        valid = valid * static_cast<std::size_t>(network_sizes[r]) +
                static_cast<std::size_t>(digits[r]);
    return valid;
}

RegisterLayout make_layout(int phase_qubits, const std::vector<int>& network_sizes) {
    if (phase_qubits < 0)
        throw ValidationError("phase register cannot have negative qubits");
    if (network_sizes.empty())
        throw ValidationError("layout needs at least one network register");
    RegisterLayout layout;
    layout.phase_qubits = phase_qubits;
    layout.network_sizes = network_sizes;
    std::size_t dim = std::size_t{1} << phase_qubits;
    for (int s : network_sizes) {
        if (s < 1)
            throw ValidationError("network register with no states");
        int bits = ceil_log2(s);
        layout.padded_bits.push_back(bits);
        if (dim > (state_dim_cap() >> bits))
            throw SizeError("state dimension exceeds the cap of " +
                            std::to_string(state_dim_cap()) +
                            " (set QISORANK_MAX_STATE to raise it)");
        dim <<= bits;
    }
    layout.total_dim = dim;
    return layout;
}

QuantumState equal_superposition(const RegisterLayout& layout) {
    QuantumState state;
    state.layout = layout;
    state.amplitudes = ComplexVector::Zero(static_cast<Eigen::Index>(layout.total_dim));
    const std::size_t n = layout.valid_network_dim();
    const double amp = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        state.amplitudes[static_cast<Eigen::Index>(layout.padded_of_valid(i))] = amp;
    state.normalized = true;
    return state;
}

std::vector<double> success_probability(const ComplexMatrix& a_or_h) {
    EigenSystem sys = eig_oracle(a_or_h);
    const Eigen::Index n = a_or_h.rows();
    ComplexVector u = ComplexVector::Constant(
        n, std::complex<double>(1.0 / std::sqrt(static_cast<double>(n)), 0.0));

    auto clusters = cluster_eigenvalues(sys.values);
    // Re-orthonormalise inside each degenerate cluster; same span, far
    // better conditioning for the coefficient solve below.
    ComplexMatrix basis = sys.vectors;
    for (const auto& cluster : clusters) {
        if (cluster.size() < 2)
            continue;
        ComplexMatrix block(n, static_cast<Eigen::Index>(cluster.size()));
        for (std::size_t k = 0; k < cluster.size(); ++k)
            block.col(static_cast<Eigen::Index>(k)) = basis.col(cluster[k]);
        Eigen::HouseholderQR<ComplexMatrix> qr(block);
        ComplexMatrix q = qr.householderQ() *
                          ComplexMatrix::Identity(n, static_cast<Eigen::Index>(cluster.size()));
        for (std::size_t k = 0; k < cluster.size(); ++k)
            basis.col(cluster[k]) = q.col(static_cast<Eigen::Index>(k));
    }

    ComplexVector coeffs;
    if (is_hermitian(a_or_h)) {
        coeffs = basis.adjoint() * u;
    } else {
        coeffs = basis.colPivHouseholderQr().solve(u);
        if ((basis * coeffs - u).norm() > tol::compare)
            throw ContractError("operator is not diagonalizable to working precision");
    }

    std::vector<double> probs(static_cast<std::size_t>(n), 0.0);
    double total = 0.0;
    for (const auto& cluster : clusters) {
        ComplexVector w = ComplexVector::Zero(n);
        for (int j : cluster)
            w += coeffs[j] * basis.col(j);
        double norm2 = w.squaredNorm();
        if (norm2 <= 1e-28)
            continue;
        double p = std::norm(w.sum()) / (static_cast<double>(n) * norm2);
        probs[static_cast<std::size_t>(cluster.front())] = p;
        total += p;
    }
    if (total > 0.0)
        for (auto& p : probs)
            p /= total;
    return probs;
}

std::vector<double> success_probability(const RealMatrix& a_or_h) {
    return success_probability(ComplexMatrix(a_or_h.cast<std::complex<double>>()));
}

PeaOutcome run_pea(const SimilarityOperator& model, int t, PeaMode mode,
                   std::uint64_t shots, std::uint64_t seed) {
    if (t < 2)
        throw ValidationError("phase register needs at least 2 qubits");
    if (mode == PeaMode::sampled && shots < 1)
        throw ValidationError("sampled mode needs shots >= 1");
    const HermitianModel& base = model.base;
    if (base.mode == ModelMode::exact_stochastic) {
        if (model.has_scores())
            throw ValidationError("score matrices require the closest-hermitian model");
        if (!base.source.symmetric())
            return run_pea_oracle(model, t, mode, shots, seed);
    }

    std::vector<int> sizes;
    for (const auto& net : base.source.networks)
        sizes.push_back(net.size());
    RegisterLayout layout = make_layout(t, sizes);
    const std::size_t bins = layout.phase_dim();
    const std::size_t n = layout.valid_network_dim();
    const std::size_t pad_dim = layout.padded_network_dim();

    std::vector<std::size_t> valid_padded(n);
    for (std::size_t i = 0; i < n; ++i)
        valid_padded[i] = layout.padded_of_valid(i);

    UnitaryPowers powers = evolution_phases(model);

    // Hadamard wall: every phase basis value k holds the uniform network
    // state, then each block advances by U^k via the per-qubit controlled
    // powers.
    ComplexVector amps = ComplexVector::Zero(static_cast<Eigen::Index>(layout.total_dim));
    const double wall = 1.0 / std::sqrt(static_cast<double>(bins * n));
    for (std::size_t k = 0; k < bins; ++k)
        for (std::size_t i = 0; i < n; ++i)
            amps[static_cast<Eigen::Index>(k * pad_dim + valid_padded[i])] = wall;

    ComplexVector gathered(static_cast<Eigen::Index>(n));
    for (int q = 0; q < t; ++q) {
        ComplexMatrix uq = powers.power(std::uint64_t{1} << q);
        for (std::size_t k = 0; k < bins; ++k) {
            if (!((k >> q) & 1))
                continue;
            const std::size_t off = k * pad_dim;
            for (std::size_t i = 0; i < n; ++i)
                gathered[static_cast<Eigen::Index>(i)] =
                    amps[static_cast<Eigen::Index>(off + valid_padded[i])];
            gathered = uq * gathered;
            for (std::size_t i = 0; i < n; ++i)
                amps[static_cast<Eigen::Index>(off + valid_padded[i])] =
                    gathered[static_cast<Eigen::Index>(i)];
        }
    }

    std::vector<std::complex<double>> column(bins);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < bins; ++k)
            column[k] = amps[static_cast<Eigen::Index>(k * pad_dim + valid_padded[i])];
        inverse_qft(column);
        for (std::size_t k = 0; k < bins; ++k)
            amps[static_cast<Eigen::Index>(k * pad_dim + valid_padded[i])] = column[k];
    }

    std::vector<double> analytic(bins, 0.0);
    for (std::size_t k = 0; k < bins; ++k) {
        double mass = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            mass += std::norm(amps[static_cast<Eigen::Index>(k * pad_dim + valid_padded[i])]);
        analytic[k] = mass;
    }

    PeaOutcome outcome;
    outcome.layout = layout;
    int reported_peak = static_cast<int>(
        std::max_element(analytic.begin(), analytic.end()) - analytic.begin());
    if (mode == PeaMode::exact) {
        outcome.phase_distribution = analytic;
    } else {
        Rng rng(seed);
        auto counts = multinomial_counts(analytic, shots, rng);
        outcome.phase_distribution.assign(bins, 0.0);
        for (std::size_t b = 0; b < bins; ++b)
            outcome.phase_distribution[b] =
                static_cast<double>(counts[b]) / static_cast<double>(shots);
        reported_peak = static_cast<int>(
            std::max_element(counts.begin(), counts.end()) - counts.begin());
    }
    outcome.peak_bin = reported_peak;
    outcome.recovered_eigenvalue =
        phase_unmap(static_cast<double>(reported_peak) / static_cast<double>(bins), base);
    outcome.success_probability = analytic[static_cast<std::size_t>(reported_peak)];

    ComplexVector post(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        post[static_cast<Eigen::Index>(i)] = amps[static_cast<Eigen::Index>(
            static_cast<std::size_t>(reported_peak) * pad_dim + valid_padded[i])];
    outcome.post_state = embed_post_state(layout, post);

    std::vector<double> weights(powers.phases.size());
    std::vector<double> unit_phases(powers.phases.size());
    for (std::size_t j = 0; j < powers.phases.size(); ++j) {
        weights[j] = std::norm(powers.overlaps[static_cast<Eigen::Index>(j)]);
        unit_phases[j] = powers.phases[j] / kTwoPi;
    }
    check_phase_separation(unit_phases, weights, t, outcome.warnings);
    if (model.has_scores() && !model.commuting())
        outcome.warnings.push_back(
            "approximate evolution: score matrix does not commute with H "
            "(||[H,B]||_inf = " +
            std::to_string(model.commutator_norm) + ")");
    return outcome;
}

PeaOutcome run_pea(const HermitianModel& model, int t, PeaMode mode, std::uint64_t shots,
                   std::uint64_t seed) {
    return run_pea(without_scores(model), t, mode, shots, seed);
}

RealVector recovered_eigenvector(const PeaOutcome& outcome) {
    const RegisterLayout& layout = outcome.post_state.layout;
    const std::size_t n = layout.valid_network_dim();
    ComplexVector valid(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        valid[static_cast<Eigen::Index>(i)] =
            outcome.post_state.amplitudes[static_cast<Eigen::Index>(layout.padded_of_valid(i))];

    Eigen::Index imax = 0;
    valid.cwiseAbs().maxCoeff(&imax);
    double mag = std::abs(valid[imax]);
    if (mag > 0.0)
        valid *= std::conj(valid[imax]) / mag;
    RealVector real = valid.real();
    double norm = real.norm();
    if (norm > 0.0)
        real /= norm;
    return real;
}

RealVector l1_normalized(const RealVector& v) {
    double total = v.lpNorm<1>();
    if (total <= 0.0)
        throw ValidationError("cannot L1-normalise a zero vector");
    return v / total;
}

} // namespace qisorank
