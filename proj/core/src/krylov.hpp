#pragma once

#include "ellip/operator.hpp"
#include "ellip/semigroup.hpp"

#include <vector>

namespace ellip::detail {

struct KrylovSettings {
  double tol = 1e-10;
  int max_dim = 200;
};

// g_k(L) b (or g_k(L)^* b) for every k from a single Krylov space. Hermitian
// operators use two-pass Lanczos without a stored basis; others use Arnoldi.
// Convergence: successive coefficient vectors, compared every few steps,
// differ by at most tol relative to the result. Throws ConvergenceError
// when max_dim is reached first.
std::vector<Field> krylov_functions(const EllipticOperator& op, bool adjoint,
                                    const std::vector<ScalarFn>& g, const Field& b,
                                    const KrylovSettings& s, int* used_dim);

// Eigen-decomposition of a symmetric tridiagonal matrix (diagonal d,
// off-diagonal e); eigenvectors are returned column-wise.
void tridiagonal_eigen(const std::vector<double>& d, const std::vector<double>& e,
                       Eigen::VectorXd& theta, Eigen::MatrixXd& Q);

}  // namespace ellip::detail
