#include "ellip/singular.hpp"

#include "ellip/error.hpp"

#include <algorithm>
#include <cmath>

namespace ellip {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::size_t kChunk = 32;  // node fields held at once

double measure_factor(TimeMeasure m, double t) {
  switch (m) {
    case TimeMeasure::inv_sqrt: return 1.0 / std::sqrt(t);
    case TimeMeasure::inv_t: return 1.0 / t;
    case TimeMeasure::plain: return 1.0;
  }
  return 1.0;
}

void require_measure(const TimeQuadrature& tq, TimeMeasure m, const char* who) {
  if (tq.measure != m) throw DomainError(std::string(who) + ": time quadrature has the wrong measure");
  if (tq.t.empty()) throw DomainError(std::string(who) + ": empty time quadrature");
}

double spectral_lo(const EllipticOperator& L) { return L.lambda_min_bound(); }
double spectral_hi(const EllipticOperator& L) { return L.lambda_max_bound(); }

template <class V>
void finish(SingularResult<V>& r, const EllipticOperator& L, const TimeQuadrature& tq) {
  r.tail_estimate = tq.tail_estimate(spectral_lo(L), spectral_hi(L));
  r.flagged = r.tail_estimate > 0.01;
}

}  // namespace

// ---------------------------------------------------------------------------
// Time quadrature

TimeQuadrature TimeQuadrature::make(double eps, double T, int nodes_per_decade, TimeMeasure measure) {
  if (!(eps > 0.0 && T > eps)) throw DomainError("time quadrature: need 0 < eps < T");
  if (nodes_per_decade < 1) throw DomainError("time quadrature: nodes_per_decade must be positive");
  TimeQuadrature q;
  q.eps = eps;
  q.T = T;
  q.nodes_per_decade = nodes_per_decade;
  q.measure = measure;
  const double la = std::log(eps), lb = std::log(T);
  const int k = static_cast<int>(std::ceil(nodes_per_decade * (lb - la) / std::log(10.0))) + 1;
  const double du = (lb - la) / (k - 1);
  q.t.resize(k);
  q.w.resize(k);
  for (int i = 0; i < k; ++i) {
    double t = std::exp(la + i * du);
    q.t[i] = t;
    q.w[i] = du * t * measure_factor(measure, t) * (i == 0 || i == k - 1 ? 0.5 : 1.0);
  }
  return q;
}

TimeQuadrature TimeQuadrature::for_operator(const EllipticOperator& L, TimeMeasure measure, double tol,
                                            int nodes_per_decade) {
  const double h = L.grid().h();
  const double lmax = spectral_hi(L), lmin = spectral_lo(L);
  double eps_tol = measure == TimeMeasure::inv_sqrt ? kPi * tol * tol / (4.0 * lmax) : tol / (2.0 * lmax);
  double eps = std::min(h * h / 16.0, eps_tol);
  double T = std::max(16.0, 40.0 / lmin);
  return make(eps, T, nodes_per_decade, measure);
}

TimeQuadrature TimeQuadrature::refined() const { return make(eps, T, 2 * nodes_per_decade, measure); }

TimeQuadrature TimeQuadrature::with_eps(double e) const { return make(e, T, nodes_per_decade, measure); }

double TimeQuadrature::tail_estimate(double lambda_min, double lambda_max) const {
  switch (measure) {
    case TimeMeasure::inv_sqrt: {
      double lo = 2.0 * std::sqrt(eps * lambda_max / kPi);
      double hi = std::exp(-T * lambda_min) / std::sqrt(kPi * T * lambda_min);
      return lo + hi;
    }
    case TimeMeasure::inv_t:
    case TimeMeasure::plain:
      return 2.0 * eps * lambda_max + std::exp(-2.0 * T * lambda_min);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Riesz transform and square root

namespace {

// (1/sqrt(pi)) sum_k w_k e^{-t_k z}, approximating z^{-1/2}.
ScalarFn inv_sqrt_symbol(const TimeQuadrature& tq) {
  return [t = tq.t, w = tq.w](cplx z) {
    cplx s = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) s += w[k] * std::exp(-t[k] * z);
    return s / std::sqrt(kPi);
  };
}

}  // namespace

SingularResult<VecField> riesz_apply(const SemigroupEvaluator& sg, const Field& f, const TimeQuadrature& tq) {
  require_measure(tq, TimeMeasure::inv_sqrt, "riesz_apply");
  SingularResult<VecField> r;
  r.removed_mean = f.mean();
  Field f0 = f.array() - r.removed_mean;
  r.value = sg.op().gradient(sg.apply_function(inv_sqrt_symbol(tq), f0));
  finish(r, sg.op(), tq);
  return r;
}

SingularResult<VecField> riesz_apply(const SemigroupEvaluator& sg, const Field& f) {
  return riesz_apply(sg, f, TimeQuadrature::for_operator(sg.op(), TimeMeasure::inv_sqrt));
}

Field riesz_adjoint_apply(const SemigroupEvaluator& sg, const VecField& g, const TimeQuadrature& tq) {
  require_measure(tq, TimeMeasure::inv_sqrt, "riesz_adjoint_apply");
  Field d = -sg.op().divergence(g);
  return sg.apply_function(inv_sqrt_symbol(tq), d, true);
}

SingularResult<Field> sqrt_apply(const SemigroupEvaluator& sg, const Field& f, const TimeQuadrature& tq) {
  require_measure(tq, TimeMeasure::inv_sqrt, "sqrt_apply");
  SingularResult<Field> r;
  r.removed_mean = f.mean();
  Field f0 = f.array() - r.removed_mean;
  ScalarFn inv = inv_sqrt_symbol(tq);
  r.value = sg.apply_function([inv](cplx z) { return z * inv(z); }, f0);
  finish(r, sg.op(), tq);
  return r;
}

SingularResult<Field> sqrt_apply(const SemigroupEvaluator& sg, const Field& f) {
  return sqrt_apply(sg, f, TimeQuadrature::for_operator(sg.op(), TimeMeasure::inv_sqrt));
}

double energy(const EllipticOperator& L, const VecField& grad_u) {
  const PeriodicGrid& g = L.grid();
  if (grad_u.rows() != g.size() || grad_u.cols() != g.dim()) throw DomainError("energy: shape mismatch");
  cplx s = 0.0;
  const int n = g.dim();
  for (long i = 0; i < g.size(); ++i) {
    const Mat2& S = L.face_matrix(i);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) s += std::conj(grad_u(i, a)) * S(a, b) * grad_u(i, b);
  }
  return s.real() * g.cell_volume();
}

// ---------------------------------------------------------------------------
// Square functions

namespace {

std::vector<ScalarFn> vertical_symbols(const TimeQuadrature& tq, std::size_t begin, std::size_t end) {
  std::vector<ScalarFn> fns;
  for (std::size_t k = begin; k < end; ++k) {
    double t = tq.t[k];
    fns.push_back([t](cplx z) { return std::sqrt(t * z) * std::exp(-t * z); });
  }
  return fns;
}

}  // namespace

SingularResult<RealField> g_function(const SemigroupEvaluator& sg, const Field& f, const TimeQuadrature& tq) {
  require_measure(tq, TimeMeasure::inv_t, "g_function");
  SingularResult<RealField> r;
  r.removed_mean = f.mean();
  Field f0 = f.array() - r.removed_mean;
  RealField acc = RealField::Zero(f.size());
  for (std::size_t b = 0; b < tq.t.size(); b += kChunk) {
    std::size_t e = std::min(tq.t.size(), b + kChunk);
    auto fields = sg.apply_functions(vertical_symbols(tq, b, e), f0);
    for (std::size_t k = b; k < e; ++k) acc += tq.w[k] * fields[k - b].cwiseAbs2();
  }
  r.value = acc.cwiseSqrt();
  finish(r, sg.op(), tq);
  return r;
}

SingularResult<RealField> g_function(const SemigroupEvaluator& sg, const Field& f) {
  return g_function(sg, f, TimeQuadrature::for_operator(sg.op(), TimeMeasure::inv_t));
}

SingularResult<RealField> big_g_function(const SemigroupEvaluator& sg, const Field& f, const TimeQuadrature& tq) {
  require_measure(tq, TimeMeasure::plain, "big_g_function");
  SingularResult<RealField> r;
  r.removed_mean = f.mean();
  Field f0 = f.array() - r.removed_mean;
  RealField acc = RealField::Zero(f.size());
  for (std::size_t b = 0; b < tq.t.size(); b += kChunk) {
    std::size_t e = std::min(tq.t.size(), b + kChunk);
    std::vector<cplx> z(tq.t.begin() + b, tq.t.begin() + e);
    auto fields = sg.apply_each(z, f0);
    for (std::size_t k = b; k < e; ++k) acc += tq.w[k] * sg.op().gradient(fields[k - b]).cwiseAbs2().rowwise().sum();
  }
  r.value = acc.cwiseSqrt();
  finish(r, sg.op(), tq);
  return r;
}

SingularResult<RealField> big_g_function(const SemigroupEvaluator& sg, const Field& f) {
  return big_g_function(sg, f, TimeQuadrature::for_operator(sg.op(), TimeMeasure::plain));
}

TimeFamily vertical_family(const SemigroupEvaluator& sg, const Field& f, const TimeQuadrature& tq) {
  require_measure(tq, TimeMeasure::inv_t, "vertical_family");
  return sg.apply_functions(vertical_symbols(tq, 0, tq.t.size()), remove_mean(f));
}

Field t_l_operator(const SemigroupEvaluator& sg, const TimeFamily& F, const TimeQuadrature& tq) {
  require_measure(tq, TimeMeasure::inv_t, "t_l_operator");
  if (F.size() != tq.t.size()) throw DomainError("t_l_operator: family is not sampled on the quadrature nodes");
  Field out = Field::Zero(sg.op().size());
  auto fns = vertical_symbols(tq, 0, tq.t.size());
  for (std::size_t k = 0; k < F.size(); ++k) {
    if (F[k].size() != out.size()) throw DomainError("t_l_operator: field size mismatch");
    if (F[k].isZero(0.0)) continue;
    out += tq.w[k] * sg.apply_function(fns[k], F[k]);
  }
  return out;
}

RealField family_norm(const TimeFamily& F, const TimeQuadrature& tq) {
  require_measure(tq, TimeMeasure::inv_t, "family_norm");
  if (F.size() != tq.t.size()) throw DomainError("family_norm: family is not sampled on the quadrature nodes");
  RealField acc = RealField::Zero(F.empty() ? 0 : F[0].size());
  for (std::size_t k = 0; k < F.size(); ++k) acc += tq.w[k] * F[k].cwiseAbs2();
  return acc.cwiseSqrt();
}

// ---------------------------------------------------------------------------
// Commutators

LinearMap LinearMap::riesz(const SemigroupEvaluator& sg, TimeQuadrature tq) {
  LinearMap m;
  m.name = "riesz";
  m.components = sg.op().grid().dim();
  m.apply = [&sg, tq = std::move(tq)](const Field& f) { return riesz_apply(sg, f, tq).value; };
  return m;
}

LinearMap LinearMap::sqrt(const SemigroupEvaluator& sg, TimeQuadrature tq) {
  LinearMap m;
  m.name = "sqrt";
  m.apply = [&sg, tq = std::move(tq)](const Field& f) { return VecField(sqrt_apply(sg, f, tq).value); };
  return m;
}

LinearMap LinearMap::semigroup(const SemigroupEvaluator& sg, cplx z) {
  sg.check_sector(z);
  LinearMap m;
  m.name = "semigroup";
  m.apply = [&sg, z](const Field& f) { return VecField(sg.apply(z, f)); };
  return m;
}

LinearMap LinearMap::scalar(std::string name, std::function<Field(const Field&)> f) {
  LinearMap m;
  m.name = std::move(name);
  m.apply = [f = std::move(f)](const Field& x) { return VecField(f(x)); };
  return m;
}

VecField commutator(const LinearMap& T, const Field& b, int k, const Field& f) {
  if (k < 0) throw DomainError("commutator: order k must be non-negative");
  if (b.size() != f.size()) throw DomainError("commutator: b and f differ in size");
  std::vector<Field> bpow{Field::Ones(b.size())};
  for (int m = 1; m <= k; ++m) bpow.push_back(bpow.back().cwiseProduct(b));
  VecField out;
  double binom = 1.0;
  for (int j = 0; j <= k; ++j) {
    Field coef = (j % 2 ? -binom : binom) * bpow[k - j];
    VecField term = T(bpow[j].cwiseProduct(f)).array().colwise() * coef.array();
    if (j == 0)
      out = term;
    else
      out += term;
    binom = binom * (k - j) / (j + 1);
  }
  return out;
}

VecField commutator_recursive(const LinearMap& T, const Field& b, int k, const Field& f) {
  if (k < 0) throw DomainError("commutator: order k must be non-negative");
  if (b.size() != f.size()) throw DomainError("commutator: b and f differ in size");
  if (k == 0) return T(f);
  VecField a = commutator_recursive(T, b, k - 1, f);
  VecField c = commutator_recursive(T, b, k - 1, f.cwiseProduct(b));
  return (a.array().colwise() * b.array()).matrix() - c;
}

}  // namespace ellip
