#include "doctest.h"

#include "ellip/error.hpp"
#include "ellip/fields.hpp"
#include "ellip/semigroup.hpp"

#include <cmath>
#include <random>

using namespace ellip;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::shared_ptr<const EllipticOperator> laplacian(int n, int N) {
  return std::make_shared<EllipticOperator>(EllipticOperator::assemble(CoefficientField::identity(PeriodicGrid(n, N))));
}

std::shared_ptr<const EllipticOperator> mk(int N, double q = 4.0) {
  PeriodicGrid g(2, N);
  return std::make_shared<EllipticOperator>(EllipticOperator::assemble(meyers_kenig(q, g)));
}

std::shared_ptr<const EllipticOperator> accretive(int N, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.25, 0.25);
  PeriodicGrid g(2, N);
  std::vector<Mat2> A(g.size());
  for (auto& a : A) {
    a << cplx(1.0 + u(rng), u(rng)), cplx(u(rng), u(rng)), cplx(u(rng), u(rng)), cplx(1.0 + u(rng), u(rng));
  }
  return std::make_shared<EllipticOperator>(EllipticOperator::assemble(CoefficientField(g, A)));
}

double rel(const Field& a, const Field& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

Field random_field(const PeriodicGrid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Field f(g.size());
  for (long i = 0; i < g.size(); ++i) f[i] = cplx(nd(rng), nd(rng));
  return f;
}

SemigroupOptions krylov_opts(int max_dim = 400) {
  SemigroupOptions o;
  o.method = SemigroupMethod::krylov;
  o.krylov_max_dim = max_dim;
  o.lanczos_max_dim = max_dim;
  return o;
}

}  // namespace

TEST_CASE("zero time is the identity") {
  SemigroupEvaluator sg(mk(16));
  Field f = random_field(sg.op().grid(), 1);
  CHECK(sg.apply(0.0, f) == f);
}

TEST_CASE("Fourier modes decay by the stencil symbol") {
  auto op = laplacian(2, 32);
  SemigroupEvaluator sg(op);
  CHECK(sg.method() == SemigroupMethod::spectral);
  const PeriodicGrid& g = op->grid();
  for (auto k : std::vector<std::array<int, 2>>{{1, 0}, {2, 3}, {16, 5}}) {
    Field f(g.size());
    for (long i = 0; i < g.size(); ++i) {
      auto m = g.multi_index(i);
      f[i] = std::polar(1.0, 2 * kPi * (k[0] * m[0] + k[1] * m[1]) / 32.0);
    }
    double sym = 0.0;
    for (int kk : k) sym += 4.0 * std::pow(std::sin(kPi * kk / 32.0), 2) * 32.0 * 32.0;
    for (double t : {1e-4, 1e-3, 1e-2}) {
      CHECK((sg.apply(t, f) - std::exp(-t * sym) * f).norm() < 1e-12 * f.norm());
    }
  }
}

TEST_CASE("constants are preserved by every backend") {
  auto op = mk(16);
  Field one = Field::Ones(op->size());
  for (auto m : {SemigroupMethod::spectral, SemigroupMethod::krylov, SemigroupMethod::scaling_squaring}) {
    SemigroupOptions o;
    o.method = m;
    SemigroupEvaluator sg(op, o);
    for (double t : {1e-4, 1e-2, 1.0}) CHECK((sg.apply(t, one) - one).cwiseAbs().maxCoeff() < 1e-10);
  }
  SemigroupEvaluator four(laplacian(2, 64));
  Field one64 = Field::Ones(64 * 64);
  CHECK((four.apply(0.3, one64) - one64).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("spectral and Krylov agree on N = 32") {
  auto op = mk(32);
  SemigroupEvaluator dense(op);
  REQUIRE(dense.method() == SemigroupMethod::spectral);
  SemigroupEvaluator kry(op, krylov_opts());
  Field f = random_field(op->grid(), 2);
  for (cplx z : {cplx(1e-4, 0), cplx(1e-3, 5e-4), cplx(1e-2, -1e-2), cplx(0.1, 0)}) {
    CHECK(rel(kry.apply(z, f), dense.apply(z, f)) < 1e-8);
  }
}

TEST_CASE("Arnoldi path agrees with the dense spectral oracle") {
  auto op = accretive(16, 4);
  REQUIRE_FALSE(op->is_hermitian());
  SemigroupEvaluator dense(op);
  SemigroupEvaluator kry(op, krylov_opts(256));
  SemigroupOptions so;
  so.method = SemigroupMethod::scaling_squaring;
  SemigroupEvaluator ss(op, so);
  Field f = random_field(op->grid(), 5);
  for (cplx z : {cplx(1e-3, 0), cplx(1e-2, 2e-3)}) {
    Field ref = dense.apply(z, f);
    CHECK(rel(kry.apply(z, f), ref) < 1e-8);
    CHECK(rel(ss.apply(z, f), ref) < 1e-8);
  }
  // adjoint actions: <e^{-zL} f, g> = <f, (e^{-zL})^* g>
  Field h = random_field(op->grid(), 6);
  auto g = [](cplx l) { return std::exp(-cplx(2e-3, 1e-3) * l); };
  cplx a = h.dot(dense.apply_function(g, f));
  cplx b = dense.apply_function(g, h, true).dot(f);
  CHECK(std::abs(a - b) < 1e-10 * std::abs(a));
  Field kh = kry.apply_function(g, h, true);
  CHECK(rel(kh, dense.apply_function(g, h, true)) < 1e-8);
}

TEST_CASE("semigroup law and contraction") {
  for (auto m : {SemigroupMethod::spectral, SemigroupMethod::krylov}) {
    SemigroupOptions o;
    o.method = m;
    o.krylov_max_dim = 400;
    SemigroupEvaluator sg(mk(32), o);
    Field f = random_field(sg.op().grid(), 7);
    for (int a = 6; a <= 12; a += 3)
      for (int b = 6; b <= 12; b += 3) {
        double s = std::ldexp(1.0, -a), t = std::ldexp(1.0, -b);
        Field lhs = sg.apply(s + t, f);
        Field rhs = sg.apply(s, sg.apply(t, f));
        CHECK((lhs - rhs).norm() / f.norm() < 1e-8);
        CHECK(sg.apply(t, f).norm() <= f.norm() * (1 + 1e-10));
      }
  }
}

TEST_CASE("sector violations cite the angle") {
  SemigroupEvaluator sg(mk(16));
  Field f = random_field(sg.op().grid(), 8);
  CHECK_THROWS_AS(sg.apply(cplx(0.0, 1.0), f), SectorError);
  CHECK_THROWS_AS(sg.apply(cplx(-1.0, 0.0), f), SectorError);
  CHECK_NOTHROW(sg.apply(cplx(1.0, 100.0), f));
  auto op = accretive(16, 9);
  SemigroupEvaluator sa(op);
  CHECK(sa.sector_angle() < kPi / 2);
  double bad = sa.sector_angle() + 1e-3;
  try {
    sa.apply(std::polar(1e-3, bad), random_field(op->grid(), 1));
    FAIL("expected a sector error");
  } catch (const SectorError& e) {
    CHECK(std::string(e.what()).find("theta") != std::string::npos);
  }
}

TEST_CASE("gradient of the semigroup") {
  auto op = laplacian(2, 64);
  SemigroupEvaluator sg(op);
  CHECK(sg.apply_gradient(0.01, Field::Ones(op->size())).cwiseAbs().maxCoeff() < 1e-10);
  const double bound = 1.0 / std::sqrt(2.0 * std::exp(1.0));
  Field f = random_field(op->grid(), 10);
  for (int k = 1; k <= 8; ++k) {
    double t = std::pow(4.0, -k);
    VecField gr = sg.apply_gradient(t, f);
    CHECK(std::sqrt(t) * gr.norm() <= bound * f.norm() * (1 + 1e-12));
  }
}

TEST_CASE("gradient bound for Meyers-Kenig by power iteration") {
  auto op = mk(32);
  SemigroupEvaluator sg(op);
  double worst = 0.0;
  for (int k = 1; k <= 7; ++k) {
    double t = std::pow(4.0, -k);
    Field v = remove_mean(random_field(op->grid(), 11));
    double est = 0.0;
    for (int it = 0; it < 40; ++it) {
      v /= v.norm();
      VecField gr = sg.apply_gradient(t, v);
      est = std::sqrt(t) * gr.norm();
      v = sg.apply(t, Field(-op->divergence(gr)));
    }
    worst = std::max(worst, est);
  }
  // Energy bound: t |grad u|^2 <= t Re<Lu,u> / lambda_face <= 1/(2 e lambda_face).
  double bound = 1.0 / std::sqrt(2.0 * std::exp(1.0) * op->face_lambda());
  CHECK(worst <= bound * (1 + 1e-8));
  CHECK(worst > 0.1);
}

TEST_CASE("Krylov failure is reported, not downgraded") {
  auto op = mk(32);
  SemigroupOptions o = krylov_opts(5);
  o.krylov_tol = 1e-14;
  SemigroupEvaluator sg(op, o);
  CHECK_THROWS_AS(sg.apply(1e-3, random_field(op->grid(), 12)), ConvergenceError);
}

TEST_CASE("batched sums equal the sum of single applications") {
  auto op = mk(16);
  SemigroupEvaluator sg(op);
  Field f = random_field(op->grid(), 13);
  std::vector<cplx> z{1e-3, cplx(2e-3, 1e-3), 4e-2};
  std::vector<cplx> c{0.5, cplx(0.0, 1.0), -2.0};
  Field expect = Field::Zero(f.size());
  for (std::size_t k = 0; k < z.size(); ++k) expect += c[k] * sg.apply(z[k], f);
  CHECK(rel(sg.apply_sum(z, c, f), expect) < 1e-12);
  auto each = sg.apply_each(z, f);
  for (std::size_t k = 0; k < z.size(); ++k) CHECK(rel(each[k], sg.apply(z[k], f)) < 1e-14);
}
