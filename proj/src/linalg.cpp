#include "qisorank/linalg.hpp"

#include "qisorank/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <string>

namespace qisorank {

namespace {

std::size_t env_cap(std::size_t fallback) {
    if (const char* raw = std::getenv("QISORANK_MAX_STATE")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(raw, &end, 10);
        if (end != raw && v > 0)
            return static_cast<std::size_t>(v);
    }
    return fallback;
}

void check_kron_size(Eigen::Index r1, Eigen::Index c1, Eigen::Index r2, Eigen::Index c2) {
    const auto cap = static_cast<unsigned long long>(kron_entry_cap());
    unsigned long long rows = static_cast<unsigned long long>(r1) * static_cast<unsigned long long>(r2);
    unsigned long long cols = static_cast<unsigned long long>(c1) * static_cast<unsigned long long>(c2);
    if (rows == 0 || cols == 0 || rows > cap / cols)
        throw SizeError("kron result of " + std::to_string(rows) + "x" + std::to_string(cols) +
                        " exceeds the configured cap of " + std::to_string(cap) + " entries");
}

template <typename Mat>
Mat kron_impl(const Mat& a, const Mat& b) {
    check_kron_size(a.rows(), a.cols(), b.rows(), b.cols());
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Rotates each column so its largest-magnitude entry is real positive,
// so eigenvectors compare across runs and solvers.
void fix_column_phases(ComplexMatrix& vecs) {
    for (Eigen::Index c = 0; c < vecs.cols(); ++c) {
        Eigen::Index imax = 0;
        double best = -1.0;
        for (Eigen::Index r = 0; r < vecs.rows(); ++r) {
            double mag = std::abs(vecs(r, c));
            if (mag > best) {
                best = mag;
                imax = r;
            }
        }
        if (best > 0.0)
            vecs.col(c) *= std::conj(vecs(imax, c)) / std::abs(vecs(imax, c));
    }
}

EigenSystem sort_system(ComplexVector values, ComplexMatrix vectors) {
    std::vector<int> order(static_cast<std::size_t>(values.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (values[a].real() != values[b].real())
            return values[a].real() > values[b].real();
        return values[a].imag() > values[b].imag();
    });
    EigenSystem sys;
    sys.values.resize(values.size());
    sys.vectors.resize(vectors.rows(), vectors.cols());
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        sys.values[k] = values[order[static_cast<std::size_t>(k)]];
        sys.vectors.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
    }
    fix_column_phases(sys.vectors);
    return sys;
}

} // namespace

std::size_t kron_entry_cap() {
    static const std::size_t cap = env_cap(std::size_t{1} << 24);
    return cap;
}

std::size_t state_dim_cap() {
    static const std::size_t cap = env_cap(std::size_t{1} << 22);
    return cap;
}

double hermiticity_defect(const ComplexMatrix& m) {
    if (m.rows() != m.cols())
        throw ContractError("hermiticity check needs a square matrix");
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& m, double eps) {
    return m.rows() == m.cols() && hermiticity_defect(m) <= eps;
}

RealMatrix kron(const RealMatrix& a, const RealMatrix& b) { return kron_impl(a, b); }
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) { return kron_impl(a, b); }

ComplexMatrix expm_hermitian(const ComplexMatrix& h, double scale) {
    if (!is_hermitian(h))
        throw ContractError("expm_hermitian: input is not Hermitian (defect " +
                            std::to_string(hermiticity_defect(h)) + ")");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    ComplexVector phases(h.rows());
    for (Eigen::Index k = 0; k < h.rows(); ++k)
        phases[k] = std::polar(1.0, scale * es.eigenvalues()[k]);
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

ComplexMatrix expm_hermitian(const RealMatrix& h, double scale) {
    return expm_hermitian(ComplexMatrix(h.cast<std::complex<double>>()), scale);
}

PowerResult power_iteration(const RealMatrix& a, double tolerance, int max_iters) {
    if (a.rows() != a.cols() || a.rows() == 0)
        throw ContractError("power_iteration: matrix must be square and non-empty");
    if (a.minCoeff() < 0.0)
        throw ContractError("power_iteration: matrix must be nonnegative");

    const Eigen::Index n = a.rows();
    RealMatrix m = 0.5 * (a + RealMatrix::Identity(n, n));
    RealVector x = RealVector::Constant(n, 1.0 / static_cast<double>(n));
    double step = 0.0;
    for (int it = 1; it <= max_iters; ++it) {
        RealVector y = m * x;
        double norm = y.lpNorm<1>();
        if (norm <= 0.0)
            throw ConvergenceError("power_iteration: iterate vanished", norm);
        y /= norm;
        step = (y - x).lpNorm<1>();
        x = y;
        if (step <= tolerance) {
            double damped = x.dot(m * x) / x.dot(x);
            return {2.0 * damped - 1.0, x, it, step};
        }
    }
    throw ConvergenceError("power_iteration: no convergence after " +
                               std::to_string(max_iters) + " iterations (residual " +
                               std::to_string(step) + ")",
                           step);
}

EigenSystem eig_oracle(const ComplexMatrix& m) {
    if (m.rows() != m.cols())
        throw ContractError("eig_oracle: matrix must be square");
    if (m.rows() > 1024)
        throw SizeError("eig_oracle: dimension " + std::to_string(m.rows()) +
                        " exceeds the 1024 cap");

    if (is_hermitian(m)) {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
        return sort_system(es.eigenvalues().cast<std::complex<double>>(), es.eigenvectors());
    }
    Eigen::ComplexEigenSolver<ComplexMatrix> es(m);
    if (es.info() != Eigen::Success)
        throw ConvergenceError("eig_oracle: dense eigensolver failed", 0.0);
    ComplexMatrix vecs = es.eigenvectors();
    for (Eigen::Index c = 0; c < vecs.cols(); ++c)
        vecs.col(c).normalize();
    return sort_system(es.eigenvalues(), vecs);
}

EigenSystem eig_oracle(const RealMatrix& m) {
    return eig_oracle(ComplexMatrix(m.cast<std::complex<double>>()));
}

std::vector<std::vector<int>> cluster_eigenvalues(const ComplexVector& values, double eps) {
    std::vector<std::vector<int>> clusters;
    for (int j = 0; j < values.size(); ++j) {
        bool placed = false;
        for (auto& cluster : clusters) {
            if (std::abs(values[cluster.front()] - values[j]) <= eps) {
                cluster.push_back(j);
                placed = true;
                break;
            }
        }
        if (!placed)
            clusters.push_back({j});
    }
    return clusters;
}

} // namespace qisorank
