#include "qisorank/linalg.hpp"

#include "qisorank/errors.hpp"
#include "qisorank/operators.hpp"
#include "qisorank/random.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

using namespace qisorank;
using std::complex;

namespace {

RealMatrix random_real(int n, Rng& rng) {
    RealMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = 2.0 * rng.uniform() - 1.0;
    return m;
}

ComplexMatrix random_hermitian(int n, Rng& rng) {
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = complex<double>(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
    return 0.5 * (m + m.adjoint());
}

} // namespace

TEST_CASE("kron with identity is block diagonal") {
    RealMatrix m(2, 2);
    m << 1, 2, 3, 4;
    RealMatrix out = kron(RealMatrix(RealMatrix::Identity(2, 2)), m);
    CHECK(out.rows() == 4);
    CHECK(out.block(0, 0, 2, 2) == m);
    CHECK(out.block(2, 2, 2, 2) == m);
    CHECK(out.block(0, 2, 2, 2).isZero(0.0));
}

TEST_CASE("kron of two swaps is the anti-diagonal block permutation") {
    RealMatrix x(2, 2);
    x << 0, 1, 1, 0;
    RealMatrix out = kron(x, x);
    RealMatrix expected(4, 4);
    expected << 0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 0;
    CHECK((out - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kron matches the index-formula oracle on P3 x K2") {
    RealMatrix a1 = column_normalize(testing::p3()).matrix;
    RealMatrix a2 = column_normalize(testing::k2()).matrix;
    RealMatrix out = kron(a1, a2);
    const int n2 = 2;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    CHECK(out(i * n2 + k, j * n2 + l) == a1(i, j) * a2(k, l));
}

TEST_CASE("kron is associative") {
    Rng rng(21);
    for (int trial = 0; trial < 5; ++trial) {
        RealMatrix a = random_real(2, rng), b = random_real(3, rng), c = random_real(2, rng);
        RealMatrix left = kron(kron(a, b), c);
        RealMatrix right = kron(a, kron(b, c));
        CHECK((left - right).cwiseAbs().maxCoeff() <= tol::structure);
    }
}

TEST_CASE("kron rejects results over the entry cap") {
    RealMatrix tall = RealMatrix::Zero(5000, 1);
    RealMatrix wide = RealMatrix::Zero(1, 4000);
    CHECK_THROWS_AS(kron(tall, wide), SizeError);
}

TEST_CASE("expm of zero is the identity") {
    ComplexMatrix u = expm_hermitian(RealMatrix(RealMatrix::Zero(3, 3)), 1.0);
    CHECK((u - ComplexMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= tol::unitarity);
}

TEST_CASE("expm of a diagonal matrix exponentiates the diagonal") {
    RealMatrix h(2, 2);
    h << 1, 0, 0, -1;
    ComplexMatrix u = expm_hermitian(h, std::numbers::pi);
    CHECK(std::abs(u(0, 0) - complex<double>(-1, 0)) <= 1e-12);
    CHECK(std::abs(u(1, 1) - complex<double>(-1, 0)) <= 1e-12);
    CHECK(std::abs(u(0, 1)) <= 1e-12);
}

TEST_CASE("expm rejects non-Hermitian input") {
    RealMatrix h(2, 2);
    h << 0, 1, 0, 0;
    CHECK_THROWS_AS(expm_hermitian(h, 1.0), ContractError);
}

TEST_CASE("expm output is unitary for random Hermitian matrices") {
    Rng rng(5);
    for (int n : {2, 8, 64}) {
        ComplexMatrix h = random_hermitian(n, rng);
        ComplexMatrix u = expm_hermitian(h, 0.7);
        CHECK((u.adjoint() * u - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff() <=
              tol::unitarity);
    }
}

TEST_CASE("expm advances every eigenpair by its phase") {
    HermitianModel model = hermitian_decompose(
        kron_chain({column_normalize(testing::p3("a")), column_normalize(testing::k2("b"))}));
    ComplexMatrix u = expm_hermitian(model.h, 2.0 * std::numbers::pi);
    EigenSystem sys = eig_oracle(model.h);
    for (int j = 0; j < sys.dim(); ++j) {
        complex<double> phase = std::polar(1.0, 2.0 * std::numbers::pi * sys.values[j].real());
        CHECK((u * sys.vectors.col(j) - phase * sys.vectors.col(j)).cwiseAbs().maxCoeff() <=
              tol::residual);
    }
}

TEST_CASE("power iteration finds the stationary vector of K2 and P3") {
    PowerResult k2 = power_iteration(column_normalize(testing::k2()).matrix, 1e-12, 10000);
    CHECK(k2.eigenvalue == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(k2.vector[0] == doctest::Approx(0.5).epsilon(1e-9));

    PowerResult p3 = power_iteration(column_normalize(testing::p3()).matrix, 1e-12, 10000);
    CHECK(p3.eigenvalue == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(p3.vector[0] == doctest::Approx(0.25).epsilon(1e-8));
    CHECK(p3.vector[1] == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(p3.vector[2] == doctest::Approx(0.25).epsilon(1e-8));
}

TEST_CASE("damping converges on the bipartite C4 where the plain walk oscillates") {
    PowerResult res = power_iteration(column_normalize(testing::c4()).matrix, 1e-12, 10000);
    for (int i = 0; i < 4; ++i)
        CHECK(res.vector[i] == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("power iteration agrees with the eigen oracle on random graphs") {
    Rng rng(31);
    const double tolerance = 1e-11;
    for (int trial = 0; trial < 20; ++trial) {
        int n = 3 + static_cast<int>(rng.below(4));
        Network net = random_connected_network(n, rng.next_u64(), "rand");
        RealMatrix a = column_normalize(net).matrix;
        PowerResult pi = power_iteration(a, tolerance, 200000);
        EigenSystem sys = eig_oracle(a);
        CHECK(std::abs(pi.eigenvalue - sys.values[0].real()) <= 10 * tolerance);
        RealVector oracle_vec = sys.vectors.col(0).real().cwiseAbs();
        oracle_vec /= oracle_vec.lpNorm<1>();
        CHECK((pi.vector - oracle_vec).cwiseAbs().maxCoeff() <= 1e-7);
    }
}

TEST_CASE("power iteration reports non-convergence") {
    RealMatrix a = column_normalize(testing::p3()).matrix;
    CHECK_THROWS_AS(power_iteration(a, 1e-15, 1), ConvergenceError);
}

TEST_CASE("eig oracle sorts by descending real part") {
    RealMatrix d = RealMatrix::Zero(3, 3);
    d(0, 0) = 3;
    d(1, 1) = 1;
    d(2, 2) = 2;
    EigenSystem sys = eig_oracle(d);
    CHECK(sys.values[0].real() == doctest::Approx(3.0));
    CHECK(sys.values[1].real() == doctest::Approx(2.0));
    CHECK(sys.values[2].real() == doctest::Approx(1.0));
}

TEST_CASE("eig oracle on the swap matrix") {
    RealMatrix x(2, 2);
    x << 0, 1, 1, 0;
    EigenSystem sys = eig_oracle(x);
    CHECK(sys.values[0].real() == doctest::Approx(1.0));
    CHECK(sys.values[1].real() == doctest::Approx(-1.0));
    CHECK(std::abs(sys.vectors(0, 0)) == doctest::Approx(std::abs(sys.vectors(1, 0))));
    CHECK(sys.vectors(0, 1).real() * sys.vectors(1, 1).real() < 0.0);
}

TEST_CASE("spectral radius of the P3 Hermitian part is 0.75 * sqrt(2)") {
    HermitianModel model = hermitian_decompose(column_normalize(testing::p3()));
    EigenSystem sys = eig_oracle(model.h);
    CHECK(sys.values[0].real() == doctest::Approx(0.75 * std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("eig oracle residuals stay below tolerance") {
    Rng rng(17);
    for (int trial = 0; trial < 6; ++trial) {
        RealMatrix m = random_real(6, rng);
        EigenSystem sys = eig_oracle(m);
        ComplexMatrix mc = m.cast<complex<double>>();
        for (int j = 0; j < sys.dim(); ++j) {
            CHECK((mc * sys.vectors.col(j) - sys.values[j] * sys.vectors.col(j))
                      .cwiseAbs()
                      .maxCoeff() <= tol::residual);
            CHECK(sys.vectors.col(j).norm() == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("eigenvalues of a Kronecker product are products of factor eigenvalues") {
    Rng rng(13);
    for (int trial = 0; trial < 5; ++trial) {
        RealMatrix a = random_real(3, rng), b = random_real(2, rng);
        EigenSystem sa = eig_oracle(a), sb = eig_oracle(b), sk = eig_oracle(kron(a, b));
        std::vector<double> products, found;
        for (int i = 0; i < sa.dim(); ++i)
            for (int j = 0; j < sb.dim(); ++j)
                products.push_back((sa.values[i] * sb.values[j]).real());
        for (int k = 0; k < sk.dim(); ++k)
            found.push_back(sk.values[k].real());
        std::sort(products.begin(), products.end());
        std::sort(found.begin(), found.end());
        for (std::size_t k = 0; k < found.size(); ++k)
            CHECK(std::abs(products[k] - found[k]) <= tol::compare);
    }
}

TEST_CASE("eig oracle enforces the dimension cap") {
    CHECK_THROWS_AS(eig_oracle(RealMatrix(RealMatrix::Identity(1025, 1025))), SizeError);
}

TEST_CASE("eigenvalue clustering groups equal values") {
    ComplexVector values(4);
    values << 1.0, 1.0 + 1e-12, 0.5, -1.0;
    auto clusters = cluster_eigenvalues(values);
    REQUIRE(clusters.size() == 3);
    CHECK(clusters[0] == std::vector<int>{0, 1});
}
