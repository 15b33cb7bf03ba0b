#pragma once

#include "ellip/operator.hpp"

#include <atomic>
#include <functional>
#include <memory>
#include <vector>

namespace ellip {

using ScalarFn = std::function<cplx(cplx)>;

enum class SemigroupMethod { automatic, spectral, krylov, scaling_squaring };

const char* to_string(SemigroupMethod m);

struct SemigroupOptions {
  SemigroupMethod method = SemigroupMethod::automatic;
  double krylov_tol = 1e-10;
  int krylov_max_dim = 200;   // Arnoldi, which stores its basis
  int lanczos_max_dim = 2000; // two-pass Lanczos (Hermitian L), O(1) vectors
  // Largest number of cells for which the dense eigendecomposition is built.
  long dense_limit = 1024;
  // Sector half-angle mu; non-positive selects pi/2 - theta.
  double sector_angle = 0.0;
};

// Matrix-function actions g(L) f with three backends:
//   spectral          Fourier diagonalisation (constant face matrices) or a
//                     cached dense eigendecomposition (small grids);
//   krylov            two-pass Lanczos (Hermitian L) or Arnoldi, no restarts;
//   scaling_squaring  dense exponential, tiny grids, exponentials only.
class SemigroupEvaluator {
 public:
  explicit SemigroupEvaluator(std::shared_ptr<const EllipticOperator> op, SemigroupOptions opt = {});
  ~SemigroupEvaluator();
  SemigroupEvaluator(const SemigroupEvaluator&) = delete;
  SemigroupEvaluator& operator=(const SemigroupEvaluator&) = delete;

  const EllipticOperator& op() const noexcept { return *op_; }
  std::shared_ptr<const EllipticOperator> op_ptr() const noexcept { return op_; }
  SemigroupMethod method() const noexcept { return method_; }
  double sector_angle() const noexcept { return mu_; }
  const SemigroupOptions& options() const noexcept { return opt_; }

  // Throws SectorError unless z = 0 or |arg z| < mu.
  void check_sector(cplx z) const;

  Field apply(cplx z, const Field& f) const;
  VecField apply_gradient(cplx z, const Field& f) const;
  // sum_k c_k e^{-z_k L} f, evaluated as one scalar function of L.
  Field apply_sum(const std::vector<cplx>& z, const std::vector<cplx>& c, const Field& f) const;
  // e^{-z_k L} f for every k from one factorisation / Krylov space.
  std::vector<Field> apply_each(const std::vector<cplx>& z, const Field& f) const;

  // g(L) f, or g(L)^* f when adjoint is set. Not available for scaling_squaring.
  Field apply_function(const ScalarFn& g, const Field& f, bool adjoint = false) const;
  std::vector<Field> apply_functions(const std::vector<ScalarFn>& g, const Field& f,
                                     bool adjoint = false) const;

  // Eigenvalues of the spectral backend (empty for other backends).
  std::vector<cplx> eigenvalues() const;

  // Krylov dimension used by the most recent Krylov evaluation.
  int last_krylov_dim() const noexcept { return last_dim_; }

 private:
  struct Spectral;
  std::shared_ptr<const EllipticOperator> op_;
  SemigroupOptions opt_;
  SemigroupMethod method_;
  double mu_;
  std::unique_ptr<Spectral> spec_;
  mutable std::atomic<int> last_dim_{0};
};

}  // namespace ellip
