#pragma once

#include "ellip/czd.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace testing_support {

// One corpus case: a smooth background plus one steep tanh ramp, defined in
// the continuum so it can be sampled at any resolution.
struct CZCase {
  int n = 1;
  double alpha_w = 0.0;  // 0 for w = 1, else |x|^alpha_w
  double p = 2.0;
  double height = 3.0;   // alpha as a multiple of the L^p(w) mean of |grad f|
  std::vector<double> amp, k0, k1, phase;
  double ramp_center0 = 0.0, ramp_center1 = 0.0, ramp_width = 0.03, ramp_amp = 1.0;
  int base_N = 64;

  double eval(const ellip::Point& x) const {
    double v = 0.0;
    for (std::size_t m = 0; m < amp.size(); ++m)
      v += amp[m] * std::cos(2.0 * M_PI * (k0[m] * x[0] + k1[m] * x[1]) + phase[m]);
    double s = x[0] - ramp_center0;
    if (n == 2) s = 0.8 * s + 0.6 * (x[1] - ramp_center1);
    // Periodic ramp: rises near the centre and falls back across the seam.
    v += ramp_amp * 0.5 * (std::tanh(s / ramp_width) - std::tanh((s - 0.5) / (4.0 * ramp_width)) -
                           std::tanh((s + 0.5) / (4.0 * ramp_width)));
    return v;
  }

  ellip::WeightField weight(const ellip::PeriodicGrid& g) const {
    return alpha_w == 0.0 ? ellip::WeightField::unweighted(g) : ellip::WeightField::power(g, alpha_w);
  }

  ellip::Field sample(const ellip::PeriodicGrid& g) const {
    ellip::Field f(g.size());
    for (long i = 0; i < g.size(); ++i) f[i] = eval(g.center(i));
    return f;
  }

  // alpha = height * (int |grad f|^p dw / w(torus))^{1/p} on grid g.
  double alpha(const ellip::PeriodicGrid& g) const {
    auto w = weight(g);
    ellip::RealField m = ellip::forward_gradient(g, sample(g)).cwiseAbs2().rowwise().sum().cwiseSqrt();
    double num = 0.0, den = 0.0;
    for (long i = 0; i < g.size(); ++i) {
      num += std::pow(m[i], p) * w[i];
      den += w[i];
    }
    return height * std::pow(num / den, 1.0 / p);
  }
};

// 50 cases cycling through n in {1, 2}, w in {1, |x|}, p in {1.5, 2, 3}.
inline std::vector<CZCase> cz_corpus(std::uint64_t seed = 2024) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<CZCase> out;
  const double ps[] = {1.5, 2.0, 3.0};
  for (int c = 0; c < 50; ++c) {
    CZCase k;
    k.n = 1 + c % 2;
    k.alpha_w = (c / 2) % 2 == 0 ? 0.0 : 1.0;
    k.p = ps[(c / 4) % 3];
    k.height = 1.5 + 0.75 * (c % 3);
    k.base_N = k.n == 1 ? 512 : 128;
    for (int m = 0; m < 3; ++m) {
      k.amp.push_back(0.2 * U(rng));
      k.k0.push_back(1 + static_cast<int>(3 * U(rng)));
      k.k1.push_back(k.n == 2 ? static_cast<int>(3 * U(rng)) : 0);
      k.phase.push_back(2.0 * M_PI * U(rng));
    }
    k.ramp_center0 = -0.3 + 0.6 * U(rng);
    k.ramp_center1 = -0.3 + 0.6 * U(rng);
    k.ramp_width = 0.01 + 0.03 * U(rng);
    k.ramp_amp = 0.5 + U(rng);
    out.push_back(k);
  }
  return out;
}

}  // namespace testing_support
