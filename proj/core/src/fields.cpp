#include "ellip/fields.hpp"

#include "ellip/error.hpp"

#include <cmath>
#include <random>

namespace ellip {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Field random_smooth_field(const PeriodicGrid& g, std::uint64_t seed, int kmax) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-1.0, 1.0), phase(0.0, 2.0 * kPi);
  struct Mode {
    int k0, k1;
    double a, ph;
  };
  std::vector<Mode> modes;
  int k1max = g.dim() == 2 ? kmax : 0;
  for (int k0 = -kmax; k0 <= kmax; ++k0)
    for (int k1 = -k1max; k1 <= k1max; ++k1) {
      double a = amp(rng), ph = phase(rng);
      double decay = 1.0 / (1.0 + k0 * k0 + k1 * k1);
      modes.push_back({k0, k1, a * decay, ph});
    }
  Field f(g.size());
  for (long i = 0; i < g.size(); ++i) {
    Point x = g.center(i);
    double s = 0.0;
    for (const auto& m : modes) s += m.a * std::cos(2.0 * kPi * (m.k0 * x[0] + m.k1 * x[1]) + m.ph);
    f[i] = s;
  }
  double sup = f.cwiseAbs().maxCoeff();
  if (sup > 0.0) f /= sup;
  return f;
}

Field random_sign_field(const PeriodicGrid& g, const Ball& support, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  Field f = Field::Zero(g.size());
  for (long i : cells_in_ball(g, support)) f[i] = coin(rng) ? 1.0 : -1.0;
  return f;
}

Field indicator(const PeriodicGrid& g, const Ball& b) {
  Field f = Field::Zero(g.size());
  for (long i : cells_in_ball(g, b)) f[i] = 1.0;
  return f;
}

Field smoothed_indicator(const PeriodicGrid& g, const Ball& b, double width) {
  if (!(width > 0.0) || width > b.radius) throw DomainError("smoothed_indicator: need 0 < width <= radius");
  Field f = Field::Zero(g.size());
  for_each_cell_in_ball(g, b, [&](long i, double d) {
    double t = (d - (b.radius - width)) / width;
    if (t <= 0.0) {
      f[i] = 1.0;
    } else if (t < 1.0) {
      f[i] = 1.0 - t * t * (3.0 - 2.0 * t);
    }
  });
  return f;
}

Field bump(const PeriodicGrid& g, const Ball& b) {
  Field f = Field::Zero(g.size());
  for_each_cell_in_ball(g, b, [&](long i, double d) {
    double s = d / b.radius;
    if (s < 1.0) f[i] = std::exp(1.0 - 1.0 / (1.0 - s * s));
  });
  return f;
}

Field coordinate(const PeriodicGrid& g, int d) {
  if (d < 0 || d >= g.dim()) throw DomainError("coordinate: axis out of range");
  Field f(g.size());
  for (long i = 0; i < g.size(); ++i) f[i] = g.center(i)[d];
  return f;
}

}  // namespace ellip
