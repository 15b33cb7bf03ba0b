#pragma once

#include "ellip/operator.hpp"
#include "ellip/semigroup.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <random>

namespace testing_support {

using namespace ellip;

inline constexpr double kPi = 3.14159265358979323846;

inline std::shared_ptr<const EllipticOperator> laplacian(int n, int N) {
  return std::make_shared<EllipticOperator>(EllipticOperator::assemble(CoefficientField::identity(PeriodicGrid(n, N))));
}

inline std::shared_ptr<const EllipticOperator> mk_operator(int N, double q = 4.0) {
  return std::make_shared<EllipticOperator>(EllipticOperator::assemble(meyers_kenig(q, PeriodicGrid(2, N))));
}

// Complex coefficients I + E with entries of E uniform in [-amp, amp] (both parts).
inline std::shared_ptr<const EllipticOperator> accretive(int N, std::uint64_t seed, double amp = 0.25) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  PeriodicGrid g(2, N);
  std::vector<Mat2> A(g.size());
  for (auto& a : A)
    a << cplx(1.0 + u(rng), u(rng)), cplx(u(rng), u(rng)), cplx(u(rng), u(rng)), cplx(1.0 + u(rng), u(rng));
  return std::make_shared<EllipticOperator>(EllipticOperator::assemble(CoefficientField(g, A)));
}

inline Field random_field(const PeriodicGrid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Field f(g.size());
  for (long i = 0; i < g.size(); ++i) f[i] = cplx(nd(rng), nd(rng));
  return f;
}

inline double rel(const Field& a, const Field& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

// Applies m(lambda) to every Fourier mode of f on a 2-D grid, lambda the
// symbol of the unit-coefficient stencil. Naive separable DFT.
inline Field laplacian_multiplier(const PeriodicGrid& g, const std::function<cplx(double)>& m, const Field& f) {
  const int N = g.cells_per_axis();
  const double h = 1.0 / N;
  std::vector<cplx> tw(N);
  for (int j = 0; j < N; ++j) tw[j] = std::polar(1.0, -2.0 * kPi * j / N);
  auto dft = [&](Field& v, bool rows, bool inverse) {
    Field out = Field::Zero(v.size());
    for (int a = 0; a < N; ++a)
      for (int k = 0; k < N; ++k) {
        cplx s = 0.0;
        for (int j = 0; j < N; ++j) {
          cplx t = tw[(static_cast<long>(j) * k) % N];
          if (inverse) t = std::conj(t);
          s += t * v[rows ? a * N + j : j * N + a];
        }
        out[rows ? a * N + k : k * N + a] = s;
      }
    v = out;
  };
  Field v = f;
  dft(v, true, false);
  dft(v, false, false);
  for (int k0 = 0; k0 < N; ++k0)
    for (int k1 = 0; k1 < N; ++k1) {
      double lam = 4.0 * (std::pow(std::sin(kPi * k0 * h), 2) + std::pow(std::sin(kPi * k1 * h), 2)) / (h * h);
      v[k0 * N + k1] *= m(lam);
    }
  dft(v, true, true);
  dft(v, false, true);
  return v / static_cast<double>(N) / static_cast<double>(N);
}

}  // namespace testing_support
