#include "doctest.h"

#include "ellip/error.hpp"
#include "ellip/fields.hpp"
#include "ellip/grid.hpp"
#include "ellip/operator.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace ellip;

namespace {

constexpr double kPi = 3.14159265358979323846;

Mat2 random_spd(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> ev(lo, hi), ang(0.0, kPi);
  double t = ang(rng);
  Eigen::Matrix2d R;
  R << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  Eigen::Matrix2d D = Eigen::Vector2d(ev(rng), ev(rng)).asDiagonal();
  return (R * D * R.transpose()).cast<cplx>();
}

Mat2 random_accretive(std::mt19937_64& rng) {
  Mat2 a = random_spd(rng, 0.5, 2.0);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  Mat2 k;
  k << cplx(0, u(rng)), cplx(u(rng), u(rng)), cplx(u(rng), u(rng)), cplx(0, u(rng));
  return a + k;
}

Field fourier_mode(const PeriodicGrid& g, int k0, int k1) {
  Field f(g.size());
  int N = g.cells_per_axis();
  for (long i = 0; i < g.size(); ++i) {
    auto m = g.multi_index(i);
    f[i] = std::polar(1.0, 2.0 * kPi * (double(k0) * m[0] + double(k1) * m[1]) / N);
  }
  return f;
}

}  // namespace

TEST_CASE("grid layout") {
  PeriodicGrid g(2, 16);
  CHECK(g.size() == 256);
  CHECK(g.h() == doctest::Approx(1.0 / 16));
  for (long i = 0; i < g.size(); ++i) CHECK(g.radius(i) > 0.0);
  CHECK(g.center(0)[0] == doctest::Approx(-0.5 + 0.5 / 16));
  CHECK(g.index(-1, 0) == g.index(15, 0));
  CHECK(g.shift(g.index(15, 3), 0, 1) == g.index(0, 3));
  CHECK_THROWS_AS(PeriodicGrid(2, 12), DomainError);
  CHECK_THROWS_AS(PeriodicGrid(3, 16), DomainError);
}

TEST_CASE("identity coefficients give the 3-point Laplacian symbol") {
  for (int n : {1, 2}) {
    PeriodicGrid g(n, 32);
    auto L = EllipticOperator::assemble(CoefficientField::identity(g));
    CHECK(L.is_constant());
    CHECK(L.is_hermitian());
    for (auto k : std::vector<std::array<int, 2>>{{0, 0}, {1, 0}, {3, 5}, {16, 7}, {31, 31}}) {
      int k1 = n == 2 ? k[1] : 0;
      Field f = fourier_mode(g, k[0], k1);
      double sym = 0.0;
      for (int kk : {k[0], k1}) sym += 4.0 * std::pow(std::sin(kPi * kk * g.h()), 2) / (g.h() * g.h());
      Field Lf = L.apply(f);
      double err = (Lf - sym * f).norm() / std::max(1.0, sym * f.norm());
      CHECK(err < 1e-12);
      CHECK(std::abs(L.symbol(k[0], k1) - sym) < 1e-9 * std::max(1.0, sym));
    }
  }
}

TEST_CASE("L annihilates constants and gradient/divergence are negative adjoints") {
  std::mt19937_64 rng(3);
  PeriodicGrid g(2, 16);
  std::vector<Mat2> A(g.size());
  for (auto& a : A) a = random_accretive(rng);
  auto L = EllipticOperator::assemble(CoefficientField(g, A));
  CHECK_FALSE(L.is_hermitian());
  Field one = Field::Ones(g.size());
  CHECK(L.apply(one).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(L.apply_adjoint(one).cwiseAbs().maxCoeff() < 1e-9);

  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    Field f(g.size());
    VecField v(g.size(), 2);
    for (long i = 0; i < g.size(); ++i) {
      f[i] = cplx(nd(rng), nd(rng));
      v(i, 0) = cplx(nd(rng), nd(rng));
      v(i, 1) = cplx(nd(rng), nd(rng));
    }
    VecField gf = L.gradient(f);
    cplx lhs = 0.0;
    for (int d = 0; d < 2; ++d) lhs += v.col(d).dot(gf.col(d));
    cplx rhs = -Field(L.divergence(v)).dot(f);
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(lhs) + 1e-9);

    // <L f, g> = <S grad f, grad g>
    Field h(g.size());
    for (long i = 0; i < g.size(); ++i) h[i] = cplx(nd(rng), nd(rng));
    cplx form = 0.0;
    VecField gh = L.gradient(h);
    for (long c = 0; c < g.size(); ++c) {
      Eigen::Vector2cd sf = L.face_matrix(c) * gf.row(c).transpose();
      form += sf.dot(gh.row(c).transpose()) ;
    }
    cplx direct = h.dot(L.apply(f));
    CHECK(std::abs(std::conj(form) - direct) < 1e-9 * std::abs(direct));
  }
}

TEST_CASE("real symmetric coefficients give a Hermitian positive semidefinite matrix") {
  std::mt19937_64 rng(5);
  PeriodicGrid g(2, 16);
  std::vector<Mat2> A(g.size());
  for (auto& a : A) a = random_spd(rng, 0.5, 2.0);
  CoefficientField cf(g, A);
  CHECK(cf.lambda() >= 0.5 - 1e-12);
  CHECK(cf.Lambda() <= 2.0 + 1e-12);
  CHECK(cf.theta() == doctest::Approx(0.0));
  auto L = EllipticOperator::assemble(cf);
  CHECK(L.is_hermitian());
  CHECK(L.is_real());
  Eigen::MatrixXcd D = L.dense();
  CHECK((D - D.adjoint()).norm() == doctest::Approx(0.0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D.real());
  CHECK(es.eigenvalues()(0) > -1e-10 * es.eigenvalues().maxCoeff());
  CHECK(es.eigenvalues().maxCoeff() <= L.lambda_max_bound());
  CHECK(es.eigenvalues()(1) >= L.lambda_min_bound() * (1 - 1e-12));
}

TEST_CASE("ellipticity violations name the cell") {
  PeriodicGrid g(2, 8);
  std::vector<Mat2> A(g.size(), Mat2::Identity());
  A[37] << 1.0, 0.0, 0.0, -0.25;
  try {
    CoefficientField cf(g, A);
    FAIL("expected an ellipticity error");
  } catch (const EllipticityError& e) {
    CHECK(e.cell() == 37);
    CHECK(std::string(e.what()).find("-0.25") != std::string::npos);
  }
}

TEST_CASE("accretivity angle of a single block") {
  Mat2 a;
  a << cplx(1.0, 1.0), 0.0, 0.0, 1.0;
  auto e = matrix_ellipticity(a, 2);
  CHECK(e.lambda == doctest::Approx(1.0));
  CHECK(e.theta == doctest::Approx(kPi / 4));
  CHECK(e.Lambda == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("Meyers-Kenig coefficients match the pullback formula") {
  PeriodicGrid g(2, 64);
  for (double q : {2.5, 4.0, 8.0}) {
    double beta = -2.0 / q;
    auto cf = meyers_kenig(q, g);
    CHECK(cf.lambda() >= 1.0 + beta - 1e-12);
    CHECK(cf.Lambda() <= 1.0 / (1.0 + beta) + 1e-12);
    CHECK(cf.is_real());
    CHECK(cf.is_hermitian());
    for (long i = 0; i < g.size(); i += 97) {
      Point x = g.center(i);
      double r = std::hypot(x[0], x[1]);
      Eigen::Vector2d e(x[0] / r, x[1] / r);
      Eigen::Matrix2d J = std::pow(r, beta) * (Eigen::Matrix2d::Identity() + beta * e * e.transpose());
      Eigen::Matrix2d Jinv = J.inverse();
      Eigen::Matrix2d pull = std::abs(J.determinant()) * Jinv * Jinv.transpose();
      double chi = mk_cutoff(r);
      Eigen::Matrix2d expect = chi * pull + (1 - chi) * Eigen::Matrix2d::Identity();
      CHECK((cf.at(i).real() - expect).norm() < 1e-12);
    }
  }
}

TEST_CASE("Meyers-Kenig coefficients tend to the identity as q grows") {
  PeriodicGrid g(2, 32);
  double prev = HUGE_VAL;
  for (double q : {4.0, 16.0, 64.0, 1024.0}) {
    auto cf = meyers_kenig(q, g);
    double dev = 0.0;
    for (long i = 0; i < g.size(); ++i) dev = std::max(dev, (cf.at(i) - Mat2::Identity()).norm());
    CHECK(dev < prev);
    CHECK(dev < 3.0 / (q - 2.0));
    prev = dev;
  }
  CHECK_THROWS_AS(meyers_kenig(2.0, g), DomainError);
  CHECK_THROWS_AS(meyers_kenig(4.0, PeriodicGrid(1, 32)), DomainError);
}

TEST_CASE("cutoff is C2 and has the documented support") {
  CHECK(mk_cutoff(0.0) == 1.0);
  CHECK(mk_cutoff(0.125) == 1.0);
  CHECK(mk_cutoff(0.25) == 0.0);
  // Central second differences vanish at the junctions up to O(d) and are
  // O(100) in the transition region.
  double d = 1e-6;
  auto second = [&](double r) { return (mk_cutoff(r + d) - 2 * mk_cutoff(r) + mk_cutoff(r - d)) / (d * d); };
  for (double r : {0.125, 0.25}) CHECK(std::abs(second(r)) < 0.02);
  CHECK(std::abs(second(0.15)) > 10.0);
}

TEST_CASE("pullback of x1 is a discrete near-solution away from the origin") {
  double q = 4.0, beta = -2.0 / q;
  std::vector<double> residual;
  for (int N : {64, 128, 256}) {
    PeriodicGrid g(2, N);
    auto L = EllipticOperator::assemble(meyers_kenig(q, g));
    Field u = sample_complex(g, [&](const Point& x) { return std::pow(std::hypot(x[0], x[1]), beta) * x[0]; });
    Field Lu = L.apply(u);
    double worst = 0.0;
    for (long i = 0; i < g.size(); ++i) {
      double r = g.radius(i);
      if (r >= 0.05 && r <= 0.1) worst = std::max(worst, std::abs(Lu[i]));
    }
    residual.push_back(worst);
  }
  // Each flux difference is O(|grad u| / h) ~ 10^2 N; the residual is O(1)
  // and decreases under refinement.
  CHECK(residual[0] < 25.0);
  CHECK(residual[1] < 0.75 * residual[0]);
  CHECK(residual[2] < 0.75 * residual[1]);
}

TEST_CASE("annuli partition the largest admissible ball") {
  PeriodicGrid g(2, 128);
  Ball B{{0.0, 0.0}, 1.0 / 64};
  int J = max_annulus_index(B.radius);
  CHECK(J == 4);
  std::vector<int> count(g.size(), 0);
  for (int j = 1; j <= J; ++j)
    for (long i : Annulus{B, j}.cells(g)) ++count[i];
  Ball outer = Annulus{B, J}.outer();
  for (long i = 0; i < g.size(); ++i) {
    bool inside = g.torus_distance(g.center(i), outer.center) <= outer.radius + 1e-12;
    CHECK(count[i] == (inside ? 1 : 0));
    for (int j = 1; j <= J; ++j) CHECK(Annulus{B, j}.contains(g, i) == (count[i] == 1 && Annulus{B, j}.contains(g, i)));
  }
}

TEST_CASE("ball and annulus averages") {
  PeriodicGrid g(2, 64);
  auto w1 = WeightField::unweighted(g);
  auto wa = WeightField::power(g, 1.0);
  Field c = Field::Constant(g.size(), 3.0);
  Ball B{{0.1, -0.2}, 0.1};
  CHECK(std::abs(weighted_average(c, B, wa) - 3.0) < 1e-12);
  Ball O{{0.0, 0.0}, 1.0 / 32};
  Annulus A{O, 2};
  cplx avg = weighted_average(c, A, wa);
  double wc = weighted_measure(wa, A.cells(g)), wo = ball_measure(wa, A.outer());
  CHECK(std::abs(avg - 3.0 * wc / wo) < 1e-12);
  CHECK(avg.real() <= 3.0);
  CHECK(std::abs(weighted_average(coordinate(g, 0), Ball{{0, 0}, 0.2}, w1)) < 1e-14);
  CHECK_THROWS_AS(weighted_average(c, Ball{{0.0, 0.0}, 1e-4}, w1), DomainError);
}

TEST_CASE("ball enumeration agrees with brute force") {
  PeriodicGrid g(2, 32);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-0.5, 0.5), rad(0.01, 0.7);
  for (int t = 0; t < 40; ++t) {
    Ball b{{u(rng), u(rng)}, rad(rng)};
    auto cells = cells_in_ball(g, b);
    long brute = 0;
    for (long i = 0; i < g.size(); ++i)
      if (g.torus_distance(g.center(i), b.center) <= b.radius) ++brute;
    CHECK(static_cast<long>(cells.size()) == brute);
    std::sort(cells.begin(), cells.end());
    CHECK(std::adjacent_find(cells.begin(), cells.end()) == cells.end());
  }
}

TEST_CASE("Poincare ratio") {
  Ball B{{0.0, 0.0}, 0.25};
  std::vector<double> ratios;
  for (int N : {64, 128, 256}) {
    PeriodicGrid g(2, N);
    auto w = WeightField::unweighted(g);
    CHECK(poincare_check(Field::Constant(g.size(), 2.0), B, 2.0, w) == 0.0);
    ratios.push_back(poincare_check(coordinate(g, 0), B, 2.0, w));
  }
  // avg over a disc of x1^2 is r^2/4, gradient is 1: ratio 1/2.
  for (double r : ratios) CHECK(r == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(ratios[2] - ratios[1]) < 0.005);

  PeriodicGrid g(2, 64);
  auto w = WeightField::power(g, 1.0);
  double worst = 0.0;
  for (int s = 0; s < 100; ++s) {
    Field f = random_smooth_field(g, 1000 + s, 3);
    Ball b{{0.0, 0.0}, 0.0625 * (1 + s % 4)};
    worst = std::max(worst, poincare_check(f, b, 2.0, w));
  }
  CHECK(worst < 2.0);
}
