#pragma once

// Holomorphic functional calculus through the contour representation
//   phi(L) = int_{Gamma+} e^{-zL} eta_+(z) dz + int_{Gamma-} e^{-zL} eta_-(z) dz,
//   eta_{+-}(z) = +-(1 / 2 pi i) int_{gamma+-} e^{zeta z} phi(zeta) dzeta,
// with Gamma+- = R+ e^{+-i(pi/2 - theta)}, gamma+- = R+ e^{+-i nu} (all rays
// oriented outwards) and vartheta < theta < nu < mu < pi/2.

#include "ellip/semigroup.hpp"

#include <string>
#include <vector>

namespace ellip {

struct HoloSymbol {
  std::string name;
  ScalarFn eval;
  double decay_s = 0.0;    // exponent s of |phi(z)| <= c |z|^s (1 + |z|)^{-2s}; 0 for bounded-only symbols
  double sup_norm = 0.0;   // sup over the sector (sampled when not known in closed form)
  double mu = 1.45;        // half-angle of the sector of holomorphy used

  cplx operator()(cplx z) const { return eval(z); }

  // Sampled check of the decay class on rays arg z in {0, +-mu/2, +-0.99 mu},
  // |z| in [1e-6, 1e6]. Returns the fitted c; throws DomainError when the
  // quotient grows towards either end of the sweep.
  double verify_decay() const;
  // Maximum of |phi| over the same sample set.
  double sampled_sup() const;

  static HoloSymbol rational(int a, int b);  // z^a / (1 + z)^b, 0 < a < b, s = min(a, b - a)
  static HoloSymbol z_exp();                 // z e^{-z}, s = 1
  static HoloSymbol psi();                   // sqrt(z) erfc(sqrt(z)) by quadrature, s = 1/2
  static HoloSymbol product(const HoloSymbol& a, const HoloSymbol& b);
  static HoloSymbol sum(const HoloSymbol& a, const HoloSymbol& b);
  // Wraps an arbitrary function; decay_s must be supplied.
  static HoloSymbol custom(std::string name, ScalarFn f, double s, double mu = 1.45);
};

struct ContourOptions {
  int nodes_per_decade = 40;
  double theta = 0.0;   // 0 selects (mu - vartheta)/4 + vartheta
  double nu = 0.0;      // 0 selects (theta + mu)/2
  double margin_lo = 1e-3;
  double margin_hi = 1e3;
  double tol = 1e-10;   // truncation tolerance for both the z and zeta integrals
};

struct Contour {
  double vartheta = 0.0;
  double theta = 0.0;
  double nu = 0.0;
  double mu = 0.0;
  int nodes_per_decade = 40;
  double r_min = 0.0;  // truncation of Gamma+-
  double r_max = 0.0;
  double tol = 1e-10;
  std::vector<double> radii;    // log-uniform nodes on [r_min, r_max]
  std::vector<double> weights;  // trapezoid weights in log r, times r

  cplx direction(int sign) const;  // e^{+-i(pi/2 - theta)}

  // Contour adapted to the operator behind sg and a symbol holomorphic on
  // Sigma_mu. r_max = margin_hi / lambda_min with lambda_min the lower bound on
  // the mean-zero spectrum. The piece of Gamma below r_min contributes about
  // r_min |eta(r_min)| to every mode, against |phi(lambda_max)| ~ lambda_max^{-s},
  // so r_min = tol margin_lo / lambda_max.
  static Contour for_operator(const SemigroupEvaluator& sg, double mu, const ContourOptions& opt = {});
  // Contour for explicit spectral bounds.
  static Contour make(double vartheta, double mu, double lambda_min, double lambda_max,
                      const ContourOptions& opt = {});
};

// eta_{+-}(z) for z on Gamma_{+-} (sign = +1 or -1). The zeta quadrature is
// compared against its nested half-resolution rule; a disagreement above both
// tol and 10% of |eta| throws ConvergenceError with the estimate.
cplx eta_kernel(const HoloSymbol& phi, const Contour& ctr, int sign, cplx z);

// eta_{+-} tabulated on the nodes of Gamma_{+-}, as quadrature coefficients.
struct EtaTable {
  std::vector<cplx> z;      // nodes of Gamma+ then Gamma-
  std::vector<cplx> coeff;  // weight * dz/dr * eta(z)
  cplx phi_at_zero = 0.0;   // value used on the constant mode
};

EtaTable tabulate(const HoloSymbol& phi, const Contour& ctr);

// phi(L) f. The constant mode is an exact eigenvector of L and L^* (eigenvalue
// 0), so f is split into its mean, mapped to phi(0) = 0, and a mean-zero part
// handled by the contour. Throws DomainError for symbols failing verify_decay.
Field holo_calc(const SemigroupEvaluator& sg, const HoloSymbol& phi, const Contour& ctr, const Field& f);
Field holo_calc(const SemigroupEvaluator& sg, const EtaTable& table, const Field& f);

// A_r f = (I - (I - e^{-r^2 L})^m) f = sum_{k=1}^m (-1)^{k+1} C(m,k) e^{-k r^2 L} f.
Field approximation_family(const SemigroupEvaluator& sg, double r, int m, const Field& f);
// I - A_r = (I - e^{-r^2 L})^m.
Field approximation_complement(const SemigroupEvaluator& sg, double r, int m, const Field& f);

// psi(z) = (1/sqrt(pi)) int_1^inf z e^{-tz} dt / sqrt(t) for Re z > 0, by
// log-trapezoid quadrature; equals sqrt(z) erfc(sqrt(z)).
cplx psi_kernel(cplx z);

}  // namespace ellip
