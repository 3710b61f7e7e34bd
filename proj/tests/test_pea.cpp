#include "qisorank/pea.hpp"

#include "qisorank/errors.hpp"
#include "qisorank/random.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace qisorank;

namespace {

RealVector kron_vec(const RealVector& a, const RealVector& b) {
    RealVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        for (Eigen::Index j = 0; j < b.size(); ++j)
            out[i * b.size() + j] = a[i] * b[j];
    return out;
}

double distribution_sum(const PeaOutcome& outcome) {
    return std::accumulate(outcome.phase_distribution.begin(),
                           outcome.phase_distribution.end(), 0.0);
}

} // namespace

TEST_CASE("layout pads register sizes to powers of two") {
    RegisterLayout layout = make_layout(4, {3, 2});
    CHECK(layout.padded_bits == std::vector<int>{2, 1});
    CHECK(layout.total_dim == 16u * 8u);
    CHECK(layout.valid_network_dim() == 6);
    CHECK(layout.padded_network_dim() == 8);

    // valid <-> padded maps are consistent and injective
    std::vector<char> hit(layout.padded_network_dim(), 0);
    for (std::size_t v = 0; v < layout.valid_network_dim(); ++v) {
        std::size_t p = layout.padded_of_valid(v);
        CHECK(p < layout.padded_network_dim());
        CHECK(!hit[p]);
        hit[p] = 1;
        CHECK(layout.encode_valid(layout.decode_valid(v)) == v);
    }
}

TEST_CASE("layout enforces the state cap") {
    CHECK_THROWS_AS(make_layout(12, {5, 5, 5, 5}), SizeError);
}

TEST_CASE("equal superposition is uniform over valid states and zero on padding") {
    RegisterLayout layout = make_layout(2, {3});
    QuantumState state = equal_superposition(layout);
    CHECK(state.amplitudes.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(state.amplitudes[0]) == doctest::Approx(1.0 / std::sqrt(3.0)));
    CHECK(std::abs(state.amplitudes[3]) == 0.0); // pad state of the 3->4 register

    QuantumState flat = equal_superposition(make_layout(2, {2, 2}));
    for (int i = 0; i < 4; ++i)
        CHECK(std::abs(flat.amplitudes[i]) == doctest::Approx(0.5));

    QuantumState big = equal_superposition(make_layout(2, {3, 4}));
    CHECK(std::abs(big.amplitudes[0]) == doctest::Approx(1.0 / std::sqrt(12.0)));
}

TEST_CASE("success probability of an exactly stochastic operator concentrates on one entry") {
    StochasticOperator op = testing::p3_by_k2_operator();
    auto probs = success_probability(op.matrix);
    CHECK(probs[0] >= 1.0 - 1e-10);
    for (std::size_t j = 1; j < probs.size(); ++j)
        CHECK(probs[j] <= 1e-10);
}

TEST_CASE("success probability of the P3 Hermitian part is the hand value") {
    HermitianModel model = hermitian_decompose(column_normalize(testing::p3()));
    auto probs = success_probability(model.h);
    double expected = std::pow((2.0 + std::sqrt(2.0)) / 2.0, 2) / 3.0; // ~0.9714
    CHECK(probs[0] == doctest::Approx(expected).epsilon(1e-9));
    CHECK(std::accumulate(probs.begin(), probs.end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("success probability of the identity sits on the uniform component") {
    auto probs = success_probability(RealMatrix(RealMatrix::Identity(4, 4)));
    CHECK(probs[0] == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t j = 1; j < probs.size(); ++j)
        CHECK(probs[j] <= 1e-12);
}

TEST_CASE("hermitian success probabilities sum to one") {
    Rng rng(51);
    for (int trial = 0; trial < 10; ++trial) {
        StochasticOperator op = kron_chain(
            {column_normalize(random_connected_network(4, rng.next_u64(), "a")),
             column_normalize(random_connected_network(3, rng.next_u64(), "b"))});
        auto probs = success_probability(hermitian_decompose(op).h);
        CHECK(std::accumulate(probs.begin(), probs.end(), 0.0) ==
              doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("dyadic principal phase of K2 x K2 lands whole in one bin") {
    StochasticOperator op = kron_chain(
        {column_normalize(testing::k2("a")), column_normalize(testing::k2("b"))});
    HermitianModel model = hermitian_decompose(op, ModelMode::exact_stochastic);
    PeaOutcome outcome = run_pea(model, 4);
    CHECK(outcome.peak_bin == 8); // phi = 1/2 of 16 bins
    CHECK(outcome.phase_distribution[8] >= 1.0 - 1e-9);
    CHECK(outcome.success_probability >= 1.0 - 1e-9);
    CHECK(outcome.recovered_eigenvalue == doctest::Approx(1.0));
    CHECK(distribution_sum(outcome) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("the P3 x K2 Hermitian run inverts the spectral radius at t = 8") {
    HermitianModel model = hermitian_decompose(testing::p3_by_k2_operator());
    PeaOutcome outcome = run_pea(model, 8);
    double rho = eig_oracle(model.h).values[0].real();
    double phi = phase_map(rho, model);
    CHECK(outcome.peak_bin == static_cast<int>(std::llround(phi * 256.0)));
    CHECK(std::abs(outcome.recovered_eigenvalue - rho) <= model.scale / 128.0);

    RealVector recovered = recovered_eigenvector(outcome);
    RealVector principal = testing::principal_cluster_vector(model.h);
    CHECK(std::abs(recovered.dot(principal)) >= 0.99);
    CHECK(distribution_sum(outcome) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sampled mode reproduces the analytic peak with a pinned seed") {
    HermitianModel model = hermitian_decompose(column_normalize(testing::k2()));
    PeaOutcome exact = run_pea(model, 4);
    PeaOutcome sampled = run_pea(model, 4, PeaMode::sampled, 4096, 12345);
    CHECK(sampled.peak_bin == exact.peak_bin);
    CHECK(distribution_sum(sampled) == doctest::Approx(1.0).epsilon(1e-12));
    // seed determinism
    PeaOutcome again = run_pea(model, 4, PeaMode::sampled, 4096, 12345);
    CHECK(again.phase_distribution == sampled.phase_distribution);
}

TEST_CASE("recovered eigenvector of K2 x K2 is uniform") {
    StochasticOperator op = kron_chain(
        {column_normalize(testing::k2("a")), column_normalize(testing::k2("b"))});
    PeaOutcome outcome = run_pea(hermitian_decompose(op, ModelMode::exact_stochastic), 4);
    RealVector v = recovered_eigenvector(outcome);
    for (int i = 0; i < 4; ++i)
        CHECK(v[i] == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("exact-stochastic analysis of the single P3 matches the stationary vector") {
    HermitianModel model =
        hermitian_decompose(column_normalize(testing::p3()), ModelMode::exact_stochastic);
    PeaOutcome outcome = run_pea(model, 8);
    CHECK(outcome.phase_distribution[128] >= 1.0 - 1e-9);
    RealVector stationary = l1_normalized(recovered_eigenvector(outcome));
    CHECK(stationary[0] == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(stationary[1] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(stationary[2] == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("the P3 Hermitian run recovers the [1, sqrt(2), 1] direction") {
    HermitianModel model = hermitian_decompose(column_normalize(testing::p3()));
    PeaOutcome outcome = run_pea(model, 8);
    RealVector v = recovered_eigenvector(outcome);
    RealVector expected(3);
    expected << 0.5, std::sqrt(0.5), 0.5;
    CHECK((v - expected).cwiseAbs().maxCoeff() <= 5e-3); // phase-register leakage bound
}

TEST_CASE("exact-stochastic analysis handles the degenerate P3 x P3 eigenspace") {
    StochasticOperator op = kron_chain(
        {column_normalize(testing::p3("a")), column_normalize(testing::p3("b"))});
    PeaOutcome outcome = run_pea(hermitian_decompose(op, ModelMode::exact_stochastic), 8);
    CHECK(outcome.phase_distribution[128] >= 1.0 - 1e-9);
    RealVector stationary = l1_normalized(recovered_eigenvector(outcome));
    auto expected = testing::p3xp3_stationary();
    for (int i = 0; i < 9; ++i)
        CHECK(stationary[i] == doctest::Approx(expected[static_cast<std::size_t>(i)])
                                   .epsilon(1e-9));
}

TEST_CASE("probability-one claim holds for stochastic operators at desk scale") {
    Rng rng(61);
    // circuit path: symmetric operators from regular factors
    StochasticOperator sym = kron_chain(
        {column_normalize(testing::c4("a")), column_normalize(testing::triangle("b"))});
    PeaOutcome outcome = run_pea(hermitian_decompose(sym, ModelMode::exact_stochastic), 6);
    CHECK(outcome.phase_distribution[32] >= 1.0 - 1e-9);

    // analysis path: random non-symmetric pairs
    for (int trial = 0; trial < 10; ++trial) {
        StochasticOperator op = kron_chain(
            {column_normalize(random_connected_network(
                 3 + static_cast<int>(rng.below(3)), rng.next_u64(), "a")),
             column_normalize(random_connected_network(
                 3 + static_cast<int>(rng.below(3)), rng.next_u64(), "b"))});
        PeaOutcome o = run_pea(hermitian_decompose(op, ModelMode::exact_stochastic), 6);
        CHECK(o.phase_distribution[32] >= 1.0 - 1e-9);
        for (std::size_t b = 0; b < o.phase_distribution.size(); ++b)
            if (b != 32)
                CHECK(o.phase_distribution[b] <= 1e-9);
    }
}

TEST_CASE("recovered eigenvectors stay nonnegative for connected Hermitian models") {
    Rng rng(67);
    for (int trial = 0; trial < 10; ++trial) {
        StochasticOperator op = kron_chain(
            {column_normalize(random_connected_network(4, rng.next_u64(), "a")),
             column_normalize(random_connected_network(4, rng.next_u64(), "b"))});
        PeaOutcome outcome = run_pea(hermitian_decompose(op), 8);
        CHECK(recovered_eigenvector(outcome).minCoeff() >= -1e-8);
    }
}

TEST_CASE("per-factor runs tensor into the joint run for separable models") {
    // exact-stochastic mode: exact spectral projections, strict tolerance
    Network g1 = testing::p3("a"), g2 = testing::k2("b"), g3 = testing::triangle("c");
    StochasticOperator f1 = column_normalize(g1), f2 = column_normalize(g2),
                       f3 = column_normalize(g3);
    PeaOutcome joint =
        run_pea(hermitian_decompose(kron_chain({f1, f2, f3}), ModelMode::exact_stochastic), 6);
    RealVector product = kron_vec(
        kron_vec(recovered_eigenvector(
                     run_pea(hermitian_decompose(f1, ModelMode::exact_stochastic), 6)),
                 recovered_eigenvector(
                     run_pea(hermitian_decompose(f2, ModelMode::exact_stochastic), 6))),
        recovered_eigenvector(run_pea(hermitian_decompose(f3, ModelMode::exact_stochastic), 6)));
    CHECK((recovered_eigenvector(joint) - product).cwiseAbs().maxCoeff() <= 1e-8);

    // closest-hermitian with dyadic phases (both factors symmetric): exact too
    StochasticOperator k2a = column_normalize(testing::k2("ka"));
    StochasticOperator k2b = column_normalize(testing::k2("kb"));
    PeaOutcome hm_joint = run_pea(hermitian_decompose(kron_chain({k2a, k2b})), 6);
    RealVector hm_product =
        kron_vec(recovered_eigenvector(run_pea(hermitian_decompose(k2a), 6)),
                 recovered_eigenvector(run_pea(hermitian_decompose(k2b), 6)));
    CHECK((recovered_eigenvector(hm_joint) - hm_product).cwiseAbs().maxCoeff() <= 1e-8);

    // closest-hermitian with a non-dyadic phase: agreement up to leakage
    PeaOutcome pk_joint = run_pea(hermitian_decompose(kron_chain({f1, f2})), 8);
    RealVector pk_product =
        kron_vec(recovered_eigenvector(run_pea(hermitian_decompose(f1), 8)),
                 recovered_eigenvector(run_pea(hermitian_decompose(f2), 8)));
    CHECK((recovered_eigenvector(pk_joint) - pk_product).cwiseAbs().maxCoeff() <= 5e-3);
}

TEST_CASE("a cramped phase register warns about resolution") {
    HermitianModel model = hermitian_decompose(column_normalize(testing::p3()));
    PeaOutcome cramped = run_pea(model, 2);
    CHECK_FALSE(cramped.warnings.empty());
    PeaOutcome roomy = run_pea(model, 8);
    CHECK(roomy.warnings.empty());
}

TEST_CASE("run_pea validates its inputs") {
    HermitianModel model = hermitian_decompose(column_normalize(testing::k2()));
    CHECK_THROWS_AS(run_pea(model, 1), ValidationError);
    CHECK_THROWS_AS(run_pea(model, 4, PeaMode::sampled, 0, 0), ValidationError);

    HermitianModel exact =
        hermitian_decompose(testing::p3_by_k2_operator(), ModelMode::exact_stochastic);
    SimilarityOperator with_scores = attach_scores(
        hermitian_decompose(testing::p3_by_k2_operator()), RealMatrix::Zero(6, 6));
    with_scores.base.mode = ModelMode::exact_stochastic;
    CHECK_THROWS_AS(run_pea(with_scores, 4), ValidationError);
}

TEST_CASE("non-commuting scores attach an approximate-evolution warning") {
    HermitianModel model = hermitian_decompose(testing::p3_by_k2_operator());
    RealVector diag(6);
    diag << 0.9, 0.1, 0.2, 0.8, 0.3, 0.4;
    SimilarityOperator op = attach_scores(model, RealMatrix(diag.asDiagonal()));
    PeaOutcome outcome = run_pea(op, 6);
    bool warned = false;
    for (const auto& w : outcome.warnings)
        warned = warned || w.find("approximate evolution") != std::string::npos;
    CHECK(warned);
    CHECK(distribution_sum(outcome) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("commuting scores shift the recovered eigenvalue by the score eigenvalue") {
    HermitianModel model = hermitian_decompose(testing::p3_by_k2_operator());
    RealMatrix b = 0.05 * model.h * model.h;
    SimilarityOperator op = attach_scores(model, b);
    REQUIRE(op.commuting());
    PeaOutcome outcome = run_pea(op, 10);
    EigenSystem sys = eig_oracle(RealMatrix(model.h + b));
    CHECK(std::abs(outcome.recovered_eigenvalue - sys.values[0].real()) <=
          4.0 * model.scale / 1024.0);
    PeaOutcome bare = run_pea(model, 10);
    CHECK(outcome.recovered_eigenvalue > bare.recovered_eigenvalue);
}
