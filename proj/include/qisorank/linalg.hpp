#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <vector>

namespace qisorank {

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

// Centralised numeric tolerances. One tuning point for the whole suite.
namespace tol {
inline constexpr double structure = 1e-12;   // hermiticity, stochasticity, reconstruction
inline constexpr double unitarity = 1e-10;
inline constexpr double residual = 1e-9;     // eigenpair residuals
inline constexpr double compare = 1e-8;      // spectrum multiset comparisons
inline constexpr double cluster = 1e-8;      // eigenvalue degeneracy grouping
} // namespace tol

/// Entry cap for materialised operator matrices (rows*cols), overridable
/// via the QISORANK_MAX_STATE environment variable.
std::size_t kron_entry_cap();

/// Statevector dimension cap, same override.
std::size_t state_dim_cap();

double hermiticity_defect(const ComplexMatrix& m); // ||M - M^dagger||_inf, elementwise max
bool is_hermitian(const ComplexMatrix& m, double eps = tol::structure);

/// Kronecker product, block (i,j) of the result equal to a(i,j)*b.
RealMatrix kron(const RealMatrix& a, const RealMatrix& b);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// exp(i*scale*H) for Hermitian H, through the spectral decomposition.
/// The result is unitary to tol::unitarity.
ComplexMatrix expm_hermitian(const ComplexMatrix& h, double scale);
ComplexMatrix expm_hermitian(const RealMatrix& h, double scale);

struct PowerResult {
    double eigenvalue = 0.0;  // undamped estimate
    RealVector vector;        // L1-normalised, entrywise nonnegative
    int iterations = 0;
    double residual = 0.0;    // final L1 step size
};

/// Damped power iteration x <- Mx/||Mx||_1 with M = (A+I)/2, started from
/// the uniform vector. The damping shifts every eigenvalue to (lambda+1)/2,
/// which kills the period-2 oscillation of bipartite walks while keeping
/// eigenvectors intact; the reported eigenvalue is mapped back through
/// 2*lambda - 1.
PowerResult power_iteration(const RealMatrix& a, double tolerance, int max_iters);

struct EigenSystem {
    ComplexVector values;   // sorted by descending real part, then imaginary
    ComplexMatrix vectors;  // unit columns, largest-magnitude entry real positive

    int dim() const { return static_cast<int>(values.size()); }
};

/// Full dense spectrum; the test oracle behind every spectral claim.
/// Hermitian inputs get an orthonormal basis. Capped at dimension 1024.
EigenSystem eig_oracle(const ComplexMatrix& m);
EigenSystem eig_oracle(const RealMatrix& m);

/// Groups indices of eigenvalues equal within eps, preserving order.
std::vector<std::vector<int>> cluster_eigenvalues(const ComplexVector& values,
                                                  double eps = tol::cluster);

} // namespace qisorank
