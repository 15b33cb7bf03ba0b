#pragma once

// Riesz transform, square root, vertical square functions and commutators,
// all through truncated time integrals of the semigroup.

#include "ellip/semigroup.hpp"

#include <functional>
#include <string>
#include <vector>

namespace ellip {

enum class TimeMeasure { inv_sqrt, inv_t, plain };  // dt/sqrt(t), dt/t, dt

// Log-trapezoid rule for int_eps^T g(t) d(measure) with nodes_per_decade nodes
// per decade; weights already include the measure.
struct TimeQuadrature {
  double eps = 0.0;
  double T = 16.0;
  int nodes_per_decade = 24;
  TimeMeasure measure = TimeMeasure::inv_sqrt;
  std::vector<double> t;
  std::vector<double> w;

  static TimeQuadrature make(double eps, double T, int nodes_per_decade, TimeMeasure measure);
  // eps = min(h^2/16, eps_tol) where eps_tol bounds the t < eps piece of the
  // fastest mode by tol relative; T = max(16, 40 / lambda_min).
  static TimeQuadrature for_operator(const EllipticOperator& L, TimeMeasure measure, double tol = 1e-7,
                                     int nodes_per_decade = 24);
  TimeQuadrature refined() const;             // doubled node density
  TimeQuadrature with_eps(double e) const;    // same density, new lower cutoff

  // Relative size of the dropped pieces [0, eps] and [T, inf) for a mode
  // with eigenvalue magnitude in [lambda_min, lambda_max].
  double tail_estimate(double lambda_min, double lambda_max) const;
};

// Outcome of a truncated singular integral.
template <class V>
struct SingularResult {
  V value;
  cplx removed_mean = 0.0;     // constant mode projected out before the integral
  double tail_estimate = 0.0;  // relative, from TimeQuadrature::tail_estimate
  bool flagged = false;        // tail_estimate above 1%
};

// grad L^{-1/2} f = (1/sqrt(pi)) grad int e^{-tL} f dt/sqrt(t) on the mean-zero part of f.
SingularResult<VecField> riesz_apply(const SemigroupEvaluator& sg, const Field& f, const TimeQuadrature& tq);
SingularResult<VecField> riesz_apply(const SemigroupEvaluator& sg, const Field& f);
// (grad L^{-1/2})^* g = L^{-*/2} grad^* g = -(1/sqrt(pi)) int e^{-tL^*} div g dt/sqrt(t).
Field riesz_adjoint_apply(const SemigroupEvaluator& sg, const VecField& g, const TimeQuadrature& tq);

// L^{1/2} f = (1/sqrt(pi)) int L e^{-tL} f dt/sqrt(t).
SingularResult<Field> sqrt_apply(const SemigroupEvaluator& sg, const Field& f, const TimeQuadrature& tq);
SingularResult<Field> sqrt_apply(const SemigroupEvaluator& sg, const Field& f);

// sum_cells <S grad u, grad u> |cell|, the discrete form <A grad u, grad u>.
double energy(const EllipticOperator& L, const VecField& grad_u);

// g_L f(x) = ( int |(tL)^{1/2} e^{-tL} f(x)|^2 dt/t )^{1/2}.
SingularResult<RealField> g_function(const SemigroupEvaluator& sg, const Field& f, const TimeQuadrature& tq);
SingularResult<RealField> g_function(const SemigroupEvaluator& sg, const Field& f);
// G_L f(x) = ( int |grad e^{-tL} f(x)|^2 dt )^{1/2}.
SingularResult<RealField> big_g_function(const SemigroupEvaluator& sg, const Field& f, const TimeQuadrature& tq);
SingularResult<RealField> big_g_function(const SemigroupEvaluator& sg, const Field& f);

// Values F(., t_k) on the nodes of a dt/t quadrature.
using TimeFamily = std::vector<Field>;
// (tL)^{1/2} e^{-tL} f on every node of tq.
TimeFamily vertical_family(const SemigroupEvaluator& sg, const Field& f, const TimeQuadrature& tq);
// T_L F = int (tL)^{1/2} e^{-tL} F(., t) dt/t; 2 T_L applied to vertical_family(f) reproduces f - mean(f).
Field t_l_operator(const SemigroupEvaluator& sg, const TimeFamily& F, const TimeQuadrature& tq);
// ||F(x, .)||_H, the L^2(dt/t) norm per cell.
RealField family_norm(const TimeFamily& F, const TimeQuadrature& tq);

// A linear operator with `components` output columns (1 for scalar, n for gradients).
struct LinearMap {
  std::string name;
  int components = 1;
  std::function<VecField(const Field&)> apply;

  VecField operator()(const Field& f) const { return apply(f); }

  static LinearMap riesz(const SemigroupEvaluator& sg, TimeQuadrature tq);
  static LinearMap sqrt(const SemigroupEvaluator& sg, TimeQuadrature tq);
  static LinearMap semigroup(const SemigroupEvaluator& sg, cplx z);
  static LinearMap scalar(std::string name, std::function<Field(const Field&)> f);
};

// T_b^k f(x) = T((b(x) - b)^k f)(x) = sum_j C(k,j) (-1)^j b(x)^{k-j} T(b^j f)(x).
VecField commutator(const LinearMap& T, const Field& b, int k, const Field& f);
// T_b^k by the recursion T_b^k f = b T_b^{k-1} f - T_b^{k-1}(b f).
VecField commutator_recursive(const LinearMap& T, const Field& b, int k, const Field& f);

}  // namespace ellip
