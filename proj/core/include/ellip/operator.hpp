#pragma once

#include "ellip/grid.hpp"

#include <Eigen/Core>

#include <memory>
#include <optional>
#include <vector>

namespace ellip {

using Mat2 = Eigen::Matrix2cd;

// Per-cell n x n complex coefficient matrices (n = 1 uses the (0,0) entry).
class CoefficientField {
 public:
  // Validates uniform ellipticity cell by cell; throws EllipticityError with
  // the first offending cell.
  CoefficientField(const PeriodicGrid& g, std::vector<Mat2> A);

  static CoefficientField identity(const PeriodicGrid& g);
  static CoefficientField constant(const PeriodicGrid& g, const Mat2& A);

  const PeriodicGrid& grid() const noexcept { return grid_; }
  const Mat2& at(long idx) const { return A_[idx]; }
  const std::vector<Mat2>& data() const noexcept { return A_; }

  double lambda() const noexcept { return lambda_; }
  double Lambda() const noexcept { return Lambda_; }
  double theta() const noexcept { return theta_; }
  bool is_real() const noexcept { return real_; }
  bool is_hermitian() const noexcept { return hermitian_; }

 private:
  PeriodicGrid grid_;
  std::vector<Mat2> A_;
  double lambda_ = 0.0;
  double Lambda_ = 0.0;
  double theta_ = 0.0;
  bool real_ = true;
  bool hermitian_ = true;
};

struct MatrixEllipticity {
  double lambda;  // min eigenvalue of the Hermitian part
  double Lambda;  // operator norm
  double theta;   // max |arg <A xi, xi>|
};

// Exact constants of a single n x n block (n = 1 or 2).
MatrixEllipticity matrix_ellipticity(const Mat2& A, int n);

// Quintic smoothstep cutoff: 1 for r <= 1/8, 0 for r >= 1/4, C^2 in between.
double mk_cutoff(double r);

// Pullback coefficients for phi(x) = |x|^beta x, beta = -2/q, evaluated at x
// (uncut). Radial eigenvalue 1/(1+beta), tangential 1+beta.
Eigen::Matrix2d meyers_kenig_matrix(double q, const Point& x);

// Meyers-Kenig field on a 2-D grid, blended to the identity by mk_cutoff.
CoefficientField meyers_kenig(double q, const PeriodicGrid& g);

// L = -div_h(A grad_h) = D^H S D with D the forward-difference gradient and
// S the per-cell face coefficients (harmonic means on the diagonal,
// four-cell arithmetic means off the diagonal).
class EllipticOperator {
 public:
  static EllipticOperator assemble(const CoefficientField& coeffs);

  const PeriodicGrid& grid() const noexcept { return grid_; }
  const CoefficientField& coeffs() const noexcept { return *coeffs_; }
  long size() const noexcept { return grid_.size(); }

  Field apply(const Field& f) const;
  Field apply_adjoint(const Field& f) const;
  void apply(const cplx* in, cplx* out, bool adjoint = false) const;
  // Real arithmetic; requires is_real().
  void apply(const double* in, double* out) const;

  VecField gradient(const Field& f) const;    // forward differences, ncell x n
  Field divergence(const VecField& g) const;  // -(D^H g), the negative adjoint of gradient

  const Mat2& face_matrix(long idx) const { return S_[idx]; }

  bool is_real() const noexcept { return real_; }
  bool is_hermitian() const noexcept { return hermitian_; }
  bool is_constant() const noexcept { return constant_; }

  // Ellipticity of the face matrices; these bound the discrete numerical range.
  double face_lambda() const noexcept { return face_lambda_; }
  double face_Lambda() const noexcept { return face_Lambda_; }
  // Upper bound for the discrete accretivity angle.
  double theta() const noexcept { return theta_; }

  // |lambda| <= lambda_max_bound for every eigenvalue.
  double lambda_max_bound() const noexcept;
  // Re lambda >= lambda_min_bound for every eigenvalue with a mean-zero eigenvector.
  double lambda_min_bound() const noexcept;

  // Fourier symbol for constant face matrices; k are integer wave numbers.
  cplx symbol(int k0, int k1 = 0) const;

  Eigen::MatrixXcd dense() const;  // small grids only

 private:
  EllipticOperator(const CoefficientField& coeffs, std::vector<Mat2> S);
  template <class T>
  void apply_impl(const T* in, T* out, const T* s00, const T* s01, const T* s10,
                  const T* s11) const;

  PeriodicGrid grid_;
  std::shared_ptr<const CoefficientField> coeffs_;
  std::vector<Mat2> S_;
  std::vector<cplx> s00_, s01_, s10_, s11_;
  std::vector<cplx> a00_, a01_, a10_, a11_;  // adjoint entries
  std::vector<double> r00_, r01_, r10_, r11_;
  bool real_ = true;
  bool hermitian_ = true;
  bool constant_ = false;
  double face_lambda_ = 0.0;
  double face_Lambda_ = 0.0;
  double theta_ = 0.0;
};

// |grad_h f| per cell (Euclidean norm of the forward-difference gradient).
RealField gradient_magnitude(const PeriodicGrid& g, const Field& f);

// ( avg_B |f - f_{B,w}|^q dw )^{1/q} / ( r(B) (avg_B |grad f|^p dw)^{1/p} ),
// q defaults to p. Returns 0 when the gradient vanishes on B.
double poincare_check(const Field& f, const Ball& B, double p, const WeightField& w,
                      std::optional<double> q = std::nullopt);

}  // namespace ellip
