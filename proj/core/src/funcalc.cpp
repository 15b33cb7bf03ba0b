#include "ellip/funcalc.hpp"

#include "ellip/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ellip {

namespace {

constexpr double kPi = 3.14159265358979323846;
const cplx kI(0.0, 1.0);

std::vector<double> ray_angles(double mu) { return {0.0, 0.5 * mu, -0.5 * mu, 0.99 * mu, -0.99 * mu}; }

// Log-uniform nodes on [a, b] with trapezoid weights for int g(x) dx = int g(x) x du.
void log_nodes(double a, double b, int per_decade, std::vector<double>& x, std::vector<double>& w) {
  const double la = std::log(a), lb = std::log(b);
  const int k = std::max(2, static_cast<int>(std::ceil(per_decade * (lb - la) / std::log(10.0))) + 1);
  const double du = (lb - la) / (k - 1);
  x.resize(k);
  w.resize(k);
  for (int i = 0; i < k; ++i) {
    x[i] = std::exp(la + i * du);
    w[i] = du * x[i] * (i == 0 || i == k - 1 ? 0.5 : 1.0);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Symbols

double HoloSymbol::verify_decay() const {
  if (!(decay_s > 0.0)) throw DomainError("symbol " + name + " carries no decay exponent");
  if (!(mu > 0.0 && mu < kPi / 2)) throw DomainError("symbol " + name + ": sector angle must lie in (0, pi/2)");
  double cmax = 0.0;
  for (double a : ray_angles(mu)) {
    double q_lo = 0.0, q_mid = 0.0, q_hi = 0.0;
    for (int k = -60; k <= 60; ++k) {
      double r = std::pow(10.0, k / 10.0);
      cplx z = std::polar(r, a);
      double bound = std::pow(r, decay_s) * std::pow(1.0 + r, -2.0 * decay_s);
      double v = std::abs(eval(z));
      if (!std::isfinite(v)) throw DomainError("symbol " + name + " is not finite on the sector");
      double q = v / bound;
      cmax = std::max(cmax, q);
      if (k == -60) q_lo = q;
      if (k == 60) q_hi = q;
      if (k >= -30 && k <= 30) q_mid = std::max(q_mid, q);
    }
    if (q_lo > 10.0 * q_mid + 1e-300 || q_hi > 10.0 * q_mid + 1e-300) {
      std::ostringstream os;
      os << "symbol " << name << " violates |phi(z)| <= c |z|^s (1+|z|)^(-2s) with s = " << decay_s
         << " on the ray arg z = " << a;
      throw DomainError(os.str());
    }
  }
  return cmax;
}

double HoloSymbol::sampled_sup() const {
  double m = 0.0;
  for (double a : ray_angles(mu))
    for (int k = -60; k <= 60; ++k) m = std::max(m, std::abs(eval(std::polar(std::pow(10.0, k / 10.0), a))));
  return m;
}

HoloSymbol HoloSymbol::custom(std::string name, ScalarFn f, double s, double mu) {
  HoloSymbol h;
  h.name = std::move(name);
  h.eval = std::move(f);
  h.decay_s = s;
  h.mu = mu;
  h.sup_norm = h.sampled_sup();
  return h;
}

HoloSymbol HoloSymbol::rational(int a, int b) {
  if (!(a > 0 && b > a)) throw DomainError("rational symbol needs 0 < a < b");
  std::ostringstream nm;
  nm << "z^" << a << "/(1+z)^" << b;
  return custom(nm.str(), [a, b](cplx z) { return std::pow(z, a) / std::pow(1.0 + z, b); },
                std::min(a, b - a));
}

HoloSymbol HoloSymbol::z_exp() {
  return custom("z*exp(-z)", [](cplx z) { return z * std::exp(-z); }, 1.0);
}

HoloSymbol HoloSymbol::psi() { return custom("psi", psi_kernel, 0.5); }

HoloSymbol HoloSymbol::product(const HoloSymbol& a, const HoloSymbol& b) {
  ScalarFn fa = a.eval, fb = b.eval;
  return custom("(" + a.name + ")*(" + b.name + ")", [fa, fb](cplx z) { return fa(z) * fb(z); },
                a.decay_s + b.decay_s, std::min(a.mu, b.mu));
}

HoloSymbol HoloSymbol::sum(const HoloSymbol& a, const HoloSymbol& b) {
  ScalarFn fa = a.eval, fb = b.eval;
  return custom("(" + a.name + ")+(" + b.name + ")", [fa, fb](cplx z) { return fa(z) + fb(z); },
                std::min(a.decay_s, b.decay_s), std::min(a.mu, b.mu));
}

// ---------------------------------------------------------------------------
// Contours

cplx Contour::direction(int sign) const { return std::polar(1.0, sign * (kPi / 2 - theta)); }

Contour Contour::make(double vartheta, double mu, double lambda_min, double lambda_max, const ContourOptions& opt) {
  if (!(vartheta >= 0.0 && vartheta < mu && mu < kPi / 2))
    throw DomainError("contour: need 0 <= vartheta < mu < pi/2");
  if (!(lambda_min > 0.0 && lambda_max >= lambda_min)) throw DomainError("contour: bad spectral bounds");
  if (opt.nodes_per_decade < 1) throw DomainError("contour: nodes_per_decade must be positive");
  Contour c;
  c.vartheta = vartheta;
  c.mu = mu;
  c.theta = opt.theta > 0.0 ? opt.theta : (mu - vartheta) / 4.0 + vartheta;
  c.nu = opt.nu > 0.0 ? opt.nu : (c.theta + mu) / 2.0;
  if (!(vartheta < c.theta && c.theta < c.nu && c.nu < mu)) {
    std::ostringstream os;
    os << "contour: angles must satisfy vartheta < theta < nu < mu, got " << vartheta << ", " << c.theta << ", "
       << c.nu << ", " << mu;
    throw DomainError(os.str());
  }
  c.nodes_per_decade = opt.nodes_per_decade;
  c.tol = opt.tol;
  c.r_min = opt.tol * opt.margin_lo / lambda_max;
  c.r_max = opt.margin_hi / lambda_min;
  log_nodes(c.r_min, c.r_max, c.nodes_per_decade, c.radii, c.weights);
  return c;
}

Contour Contour::for_operator(const SemigroupEvaluator& sg, double mu, const ContourOptions& opt) {
  const EllipticOperator& L = sg.op();
  return make(L.theta(), mu, L.lambda_min_bound(), L.lambda_max_bound(), opt);
}

// ---------------------------------------------------------------------------
// Kernels

cplx eta_kernel(const HoloSymbol& phi, const Contour& ctr, int sign, cplx z) {
  if (sign != 1 && sign != -1) throw DomainError("eta_kernel: sign must be +1 or -1");
  const double r = std::abs(z);
  if (!(r > 0.0)) throw DomainError("eta_kernel: z must be nonzero");
  const double zeta_arg = sign * ctr.nu;
  const double decay = -std::cos(std::arg(z) + zeta_arg);  // Re(z zeta) = -decay |z| rho
  if (!(decay > 0.0)) throw DomainError("eta_kernel: z is not on the ray paired with gamma");
  const double s = phi.decay_s > 0.0 ? phi.decay_s : 1.0;
  const double rho_lo = std::pow(ctr.tol, 1.0 / (s + 1.0)) * std::min(1.0, 1.0 / r);
  const double rho_hi = (std::log(1.0 / ctr.tol) + 10.0) / (r * decay);
  std::vector<double> rho, w;
  // Twice the contour density so the nested half rule runs at the nominal one.
  log_nodes(rho_lo, std::max(rho_hi, 2.0 * rho_lo), 2 * ctr.nodes_per_decade, rho, w);
  const cplx dir = std::polar(1.0, zeta_arg);
  cplx fine = 0.0, coarse = 0.0;
  const std::size_t k = rho.size();
  for (std::size_t i = 0; i < k; ++i) {
    cplx zeta = rho[i] * dir;
    cplx v = std::exp(z * zeta) * phi(zeta) * dir;
    fine += w[i] * v;
  }
  // Nested rule on the even nodes; its endpoint weights need the odd count.
  if (k % 2 == 1) {
    for (std::size_t i = 0; i < k; i += 2) {
      coarse += 2.0 * w[i] * std::exp(z * (rho[i] * dir)) * phi(rho[i] * dir) * dir;
    }
  } else {
    coarse = fine;
  }
  const cplx pref = static_cast<double>(sign) / (2.0 * kPi * kI);
  fine *= pref;
  coarse *= pref;
  const double est = std::abs(fine - coarse);
  if (est > 0.1 * std::max(std::abs(fine), 1e-300) && est > ctr.tol) {
    std::ostringstream os;
    os << "eta_kernel: zeta quadrature not converged at |z| = " << r << " (estimated error " << est << ", value "
       << std::abs(fine) << ")";
    throw ConvergenceError(os.str());
  }
  return fine;
}

EtaTable tabulate(const HoloSymbol& phi, const Contour& ctr) {
  phi.verify_decay();
  if (phi.mu < ctr.mu - 1e-12) throw DomainError("tabulate: contour angle exceeds the symbol's sector");
  EtaTable t;
  for (int sign : {1, -1}) {
    const cplx dir = ctr.direction(sign);
    for (std::size_t j = 0; j < ctr.radii.size(); ++j) {
      cplx z = ctr.radii[j] * dir;
      t.z.push_back(z);
      t.coeff.push_back(ctr.weights[j] * dir * eta_kernel(phi, ctr, sign, z));
    }
  }
  return t;
}

Field holo_calc(const SemigroupEvaluator& sg, const EtaTable& table, const Field& f) {
  const cplx m = f.mean();
  Field f0 = f.array() - m;
  Field out = sg.apply_sum(table.z, table.coeff, f0);
  if (table.phi_at_zero != cplx(0.0, 0.0)) out.array() += table.phi_at_zero * m;
  return out;
}

Field holo_calc(const SemigroupEvaluator& sg, const HoloSymbol& phi, const Contour& ctr, const Field& f) {
  if (ctr.theta <= sg.op().theta()) throw SectorError("holo_calc: contour angle theta does not exceed the operator angle");
  return holo_calc(sg, tabulate(phi, ctr), f);
}

namespace {

double binomial(int m, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (m - k + i) / i;
  return b;
}

}  // namespace

Field approximation_family(const SemigroupEvaluator& sg, double r, int m, const Field& f) {
  if (!(r > 0.0) || m < 1) throw DomainError("approximation_family: need r > 0 and m >= 1");
  std::vector<cplx> z, c;
  for (int k = 1; k <= m; ++k) {
    z.emplace_back(k * r * r, 0.0);
    c.emplace_back((k % 2 == 1 ? 1.0 : -1.0) * binomial(m, k), 0.0);
  }
  if (m == 1) return sg.apply(z[0], f);
  return sg.apply_sum(z, c, f);
}

Field approximation_complement(const SemigroupEvaluator& sg, double r, int m, const Field& f) {
  return f - approximation_family(sg, r, m, f);
}

cplx psi_kernel(cplx z) {
  if (!(z.real() > 0.0)) throw DomainError("psi_kernel: needs Re z > 0");
  // Rotating t = 1 + v / z gives psi(z) = e^{-z} / sqrt(pi) int_0^inf e^{-v} (1 + v/z)^{-1/2} dv.
  const double r = std::abs(z);
  std::vector<double> v, w;
  log_nodes(1e-14 * std::min(1.0, r), 60.0, 40, v, w);
  cplx s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * std::exp(-v[i]) / std::sqrt(1.0 + v[i] / z);
  s += v[0];  // the integrand is 1 + O(v / z) below the first node
  return std::exp(-z) * s / std::sqrt(kPi);
}

}  // namespace ellip
