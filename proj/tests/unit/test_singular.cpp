#include "doctest.h"

#include "helpers.hpp"

#include "ellip/error.hpp"
#include "ellip/fields.hpp"
#include "ellip/singular.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace ellip;
using namespace testing_support;

namespace {

Field mean_zero_field(const PeriodicGrid& g, std::uint64_t seed) { return remove_mean(random_field(g, seed)); }

double vec_rel(const VecField& a, const VecField& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

RealField real_bounded(const PeriodicGrid& g, std::uint64_t seed) {
  RealField b = random_smooth_field(g, seed).real();
  return b / b.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("time quadrature reproduces the scalar integrals") {
  auto op = laplacian(2, 32);
  const double lmin = op->lambda_min_bound(), lmax = op->lambda_max_bound();
  auto q = TimeQuadrature::for_operator(*op, TimeMeasure::inv_sqrt);
  CHECK(q.eps <= op->grid().h() * op->grid().h() / 16.0);
  CHECK(q.T >= 16.0);
  for (double lam : {lmin, 100.0, 1000.0, lmax}) {
    double s = 0.0;
    for (std::size_t k = 0; k < q.t.size(); ++k) s += q.w[k] * std::exp(-q.t[k] * lam);
    CHECK(std::abs(s / std::sqrt(kPi / lam) - 1.0) < 1e-6);
  }
  auto g = TimeQuadrature::for_operator(*op, TimeMeasure::inv_t);
  for (double lam : {lmin, 100.0, lmax}) {
    double s = 0.0;
    for (std::size_t k = 0; k < g.t.size(); ++k) s += g.w[k] * lam * g.t[k] * std::exp(-2.0 * lam * g.t[k]);
    CHECK(std::abs(s - 0.5) < 1e-6);
  }
  CHECK(q.tail_estimate(lmin, lmax) < 1e-6);
  CHECK(q.refined().t.size() > 2 * q.t.size() - 3);
  CHECK_THROWS_AS(TimeQuadrature::make(1.0, 0.5, 24, TimeMeasure::plain), DomainError);
}

TEST_CASE("Riesz transform of the Laplacian") {
  for (int N : {32, 64}) {
    auto op = laplacian(2, N);
    SemigroupEvaluator sg(op);
    const auto& g = op->grid();
    Field zero = Field::Zero(g.size());
    CHECK(riesz_apply(sg, zero).value.isZero(0.0));
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      Field f = random_field(g, seed);
      auto r = riesz_apply(sg, f);
      CHECK(std::abs(r.removed_mean - f.mean()) < 1e-15);
      CHECK(!r.flagged);
      Field u = laplacian_multiplier(g, [](double l) { return l == 0.0 ? cplx(0.0) : cplx(1.0 / std::sqrt(l)); }, f);
      CHECK(vec_rel(r.value, op->gradient(u)) < 1e-5);
      // Matched stencils: |grad (-Delta)^{-1/2} f| = |f - mean|.
      CHECK(std::abs(r.value.norm() / remove_mean(f).norm() - 1.0) < 1e-4);
    }
  }
}

TEST_CASE("discrete Kato identity for real symmetric coefficients") {
  auto op = mk_operator(32);
  SemigroupEvaluator sg(op);
  const auto& g = op->grid();
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Field f = mean_zero_field(g, seed);
    auto r = riesz_apply(sg, f);
    double lhs = energy(*op, r.value);
    double rhs = std::pow(norm2(g, f), 2);
    CHECK(std::abs(lhs / rhs - 1.0) < 1e-4);
  }
}

TEST_CASE("Riesz adjoint") {
  auto op = accretive(16, 3);
  SemigroupEvaluator sg(op);
  const auto& g = op->grid();
  auto tq = TimeQuadrature::for_operator(*op, TimeMeasure::inv_sqrt);
  Field f = mean_zero_field(g, 4);
  VecField v(g.size(), 2);
  v.col(0) = random_field(g, 5);
  v.col(1) = random_field(g, 6);
  cplx lhs = (riesz_apply(sg, f, tq).value.conjugate().cwiseProduct(v)).sum();
  cplx rhs = f.dot(riesz_adjoint_apply(sg, v, tq));
  CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(rhs));
}

TEST_CASE("square root") {
  auto op = laplacian(2, 32);
  SemigroupEvaluator sg(op);
  const auto& g = op->grid();
  Field f = random_field(g, 7);
  Field oracle = laplacian_multiplier(g, [](double l) { return cplx(std::sqrt(l)); }, f);
  CHECK(rel(sqrt_apply(sg, f).value, oracle) < 1e-5);
  Field twice = sqrt_apply(sg, sqrt_apply(sg, f).value).value;
  CHECK(rel(twice, op->apply(f)) < 1e-4);

  auto nn = accretive(16, 8);
  SemigroupEvaluator sn(nn);
  Field h = random_field(nn->grid(), 9);
  CHECK(rel(sqrt_apply(sn, sqrt_apply(sn, h).value).value, nn->apply(h)) < 1e-4);
}

TEST_CASE("square root is comparable to the gradient on Meyers-Kenig") {
  for (int N : {32, 64}) {
    auto op = mk_operator(N);
    SemigroupEvaluator sg(op);
    const auto& g = op->grid();
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      Field f = random_smooth_field(g, seed, 8);
      double ratio = sqrt_apply(sg, f).value.norm() / op->gradient(f).norm();
      // <L f, f> = <S grad f, grad f> pins the ratio between the face ellipticity bounds.
      CHECK(ratio >= std::sqrt(op->face_lambda()) * (1.0 - 1e-6));
      CHECK(ratio <= std::sqrt(op->face_Lambda()) * (1.0 + 1e-6));
    }
  }
}

TEST_CASE("truncation tails shrink geometrically") {
  auto op = laplacian(2, 32);
  SemigroupEvaluator sg(op);
  Field f = random_field(op->grid(), 10);
  auto tq = TimeQuadrature::for_operator(*op, TimeMeasure::inv_sqrt, 1e-3);
  std::vector<Field> vals;
  for (int i = 0; i < 4; ++i) vals.push_back(sqrt_apply(sg, f, tq.with_eps(tq.eps / std::pow(2.0, i))).value);
  for (int i = 1; i + 1 < 4; ++i) {
    double prev = (vals[i] - vals[i - 1]).norm(), next = (vals[i + 1] - vals[i]).norm();
    // The dropped piece scales like sqrt(eps).
    CHECK(next / prev == doctest::Approx(std::sqrt(0.5)).epsilon(0.02));
  }
}

TEST_CASE("square functions of the Laplacian are isometries up to 2^{-1/2}") {
  auto op = laplacian(2, 32);
  SemigroupEvaluator sg(op);
  const auto& g = op->grid();
  Field one = Field::Ones(g.size());
  CHECK(g_function(sg, one).value.isZero(0.0));
  CHECK(big_g_function(sg, one).value.isZero(0.0));
  auto tg = TimeQuadrature::for_operator(*op, TimeMeasure::inv_t);
  auto tG = TimeQuadrature::for_operator(*op, TimeMeasure::plain);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Field f = mean_zero_field(g, seed);
    double target = f.norm() / std::sqrt(2.0);
    CHECK(std::abs(g_function(sg, f, tg).value.norm() / target - 1.0) < 1e-2);
    CHECK(std::abs(big_g_function(sg, f, tG).value.norm() / target - 1.0) < 1e-2);
    CHECK(std::abs(g_function(sg, f, tg.refined()).value.norm() / target - 1.0) < 1e-3);
    CHECK(std::abs(big_g_function(sg, f, tG.refined()).value.norm() / target - 1.0) < 1e-3);
  }
}

TEST_CASE("square function two-sidedness on Meyers-Kenig") {
  auto op = mk_operator(32);
  SemigroupEvaluator sg(op);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    Field f = mean_zero_field(op->grid(), seed);
    double r = g_function(sg, f).value.norm() / f.norm();
    // Self-adjoint: every eigenmode contributes exactly 1/2.
    CHECK(std::abs(r * std::sqrt(2.0) - 1.0) < 1e-2);
  }
}

TEST_CASE("G-function duality pairing") {
  auto op = mk_operator(32);
  auto lap = laplacian(2, 32);
  SemigroupEvaluator sg(op), sl(lap);
  const auto& g = op->grid();
  double amax = 0.0;
  for (long i = 0; i < g.size(); ++i) amax = std::max(amax, op->face_matrix(i).operatorNorm());
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    Field f = mean_zero_field(g, seed), h = mean_zero_field(g, seed + 50);
    double lhs = std::abs(h.dot(f)) * g.cell_volume();
    double rhs = (1.0 + amax) * big_g_function(sg, f).value.dot(big_g_function(sl, h).value) * g.cell_volume();
    CHECK(lhs <= rhs);
  }
}

TEST_CASE("reproducing formula and duality for T_L") {
  auto op = laplacian(2, 32);
  SemigroupEvaluator sg(op);
  const auto& g = op->grid();
  auto tq = TimeQuadrature::for_operator(*op, TimeMeasure::inv_t);
  TimeFamily zero(tq.t.size(), Field::Zero(g.size()));
  CHECK(t_l_operator(sg, zero, tq).isZero(0.0));
  Field f = random_field(g, 11);
  Field back = 2.0 * t_l_operator(sg, vertical_family(sg, f, tq), tq);
  CHECK(rel(back, remove_mean(f)) < 1e-3);

  auto nn = accretive(16, 12);
  SemigroupEvaluator sn(nn);
  auto tn = TimeQuadrature::for_operator(*nn, TimeMeasure::inv_t);
  Field fn = random_field(nn->grid(), 13);
  CHECK(rel(2.0 * t_l_operator(sn, vertical_family(sn, fn, tn), tn), remove_mean(fn)) < 1e-3);

  // |int T_L F conj(h)| <= int ||F(x, .)||_H g_{L^*} h(x) dx; here L = L^*.
  for (std::uint64_t seed = 20; seed < 23; ++seed) {
    TimeFamily F = vertical_family(sg, random_field(g, seed), tq);
    for (auto& Fk : F) Fk += 0.1 * random_field(g, seed + 7).cwiseProduct(Fk.cwiseAbs().cast<cplx>());
    Field h = random_field(g, seed + 100);
    double lhs = std::abs(h.dot(t_l_operator(sg, F, tq)));
    double rhs = family_norm(F, tq).dot(g_function(sg, h, tq).value);
    CHECK(lhs <= rhs);
  }
}

TEST_CASE("commutators") {
  auto op = laplacian(2, 32);
  SemigroupEvaluator sg(op);
  const auto& g = op->grid();
  auto T = LinearMap::riesz(sg, TimeQuadrature::for_operator(*op, TimeMeasure::inv_sqrt));
  Field f = random_field(g, 14);
  CHECK(commutator(T, Field::Zero(g.size()), 0, f) == T(f));
  CHECK_THROWS_AS(commutator(T, f, -1, f), DomainError);
  const double scale = T(f).norm();
  for (int k : {1, 2, 3}) {
    Field c = Field::Constant(g.size(), cplx(0.7, -0.2));
    CHECK(commutator(T, c, k, f).norm() < 1e-13 * scale);
    CHECK(commutator_recursive(T, c, k, f).norm() < 1e-13 * scale);
  }
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Field b = real_bounded(g, seed).cast<cplx>();
    for (int k : {1, 2, 3}) {
      VecField bin = commutator(T, b, k, f), rec = commutator_recursive(T, b, k, f);
      CHECK(vec_rel(bin, rec) < 1e-12);
      VecField scaled = commutator(T, 2.0 * b, k, f);
      CHECK(vec_rel(scaled, std::pow(2.0, k) * bin) < 1e-12);
    }
    VecField one = commutator(T, b, 1, f);
    VecField direct = (T(f).array().colwise() * b.array()).matrix() - T(b.cwiseProduct(f));
    CHECK(vec_rel(one, direct) < 1e-14);
  }
}
