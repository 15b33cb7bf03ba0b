#include "ellip/offdiag.hpp"

#include "ellip/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace ellip {

namespace {

constexpr double kPi = 3.14159265358979323846;

RealField modulus(const VecField& u) { return u.cwiseAbs2().rowwise().sum().cwiseSqrt(); }

// Duality map of L^p restricted to cells: |u|^{p-1} sgn u, or the point mass at
// the maximum for p = 1 (dual exponent infinity).
VecField duality(const VecField& u, const std::vector<long>& cells, double p) {
  VecField v = VecField::Zero(u.rows(), u.cols());
  RealField m = modulus(u);
  if (std::isinf(p) || p == 1.0) {
    // Dual of L^inf or L^1 on a grid: concentrate at the largest entry.
    long best = -1;
    for (long i : cells)
      if (best < 0 || m[i] > m[best]) best = i;
    if (best >= 0 && m[best] > 0.0) v.row(best) = u.row(best) / m[best];
    return v;
  }
  for (long i : cells)
    if (m[i] > 0.0) v.row(i) = u.row(i) * std::pow(m[i], p - 2.0);
  return v;
}

Field restrict(const Field& f, const std::vector<long>& cells) {
  Field out = Field::Zero(f.size());
  for (long i : cells) out[i] = f[i];
  return out;
}

double sq(double x) { return x * x; }

// Dual exponent.
double conj_exp(double p) {
  if (std::isinf(p)) return 1.0;
  if (p == 1.0) return HUGE_VAL;
  return p / (p - 1.0);
}

// Supremum over the corpus (and an ascent run) of
// lhs(f) / rhs(f) where both are supplied as callables.
template <class Lhs, class Rhs>
double probe_sup(const PeriodicGrid& g, const std::vector<long>& support, const OperatorFamily& T, double t,
                 double p, double q, const std::vector<long>& target, const ProbeOptions& po, Lhs&& lhs,
                 Rhs&& rhs) {
  if (support.empty()) return 0.0;
  const bool ascent = static_cast<bool>(T.adjoint) && po.ascent_steps > 0;
  int count = std::max(1, po.count - (ascent ? 1 : 0));
  auto corpus = probe_corpus(g, support, count, po.seed);
  double best = 0.0;
  Field best_f;
  for (const auto& f : corpus) {
    double d = rhs(f);
    if (!(d > 0.0)) continue;
    double v = lhs(T.apply(t, f)) / d;
    if (v > best || best_f.size() == 0) {
      best = std::max(best, v);
      best_f = f;
    }
  }
  if (ascent && best_f.size() > 0) {
    Field f = best_f;
    for (int s = 0; s < po.ascent_steps; ++s) {
      VecField u = T.apply(t, f);
      const double un = u.cwiseAbs().maxCoeff();
      if (!(un > 0.0)) break;
      VecField v = duality(u / un, target, q);
      Field back = restrict(T.adjoint(t, v), support);
      VecField bv = back;
      Field next = duality(bv, support, conj_exp(p)).col(0);
      if (next.isZero(0.0)) break;
      double d = rhs(next);
      if (!(d > 0.0)) break;
      next /= d;  // keeps the iterates from overflowing for large exponents
      best = std::max(best, lhs(T.apply(t, next)));
      f = next;
    }
  }
  return best;
}

void regress(const std::vector<double>& x, const std::vector<double>& y, double& slope, double& r2) {
  const std::size_t n = x.size();
  slope = 0.0;
  r2 = 0.0;
  if (n < 3) return;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += sq(x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += sq(y[i] - my);
  }
  if (sxx <= 0.0) return;
  slope = sxy / sxx;
  r2 = syy > 0.0 ? sq(sxy) / (sxx * syy) : 1.0;
}

}  // namespace

double dec(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("dec: argument must be positive and finite");
  return std::max(s, 1.0 / s);
}

// ---------------------------------------------------------------------------
// Families

OperatorFamily OperatorFamily::heat(const SemigroupEvaluator& sg) {
  OperatorFamily T;
  T.name = "heat";
  T.apply = [&sg](double t, const Field& f) { return VecField(sg.apply(t, f)); };
  T.adjoint = [&sg](double t, const VecField& g) {
    return sg.apply_function([t](cplx z) { return std::exp(-t * z); }, g.col(0), true);
  };
  return T;
}

OperatorFamily OperatorFamily::grad_heat(const SemigroupEvaluator& sg) {
  OperatorFamily T;
  T.name = "grad-heat";
  T.components = sg.op().grid().dim();
  T.apply = [&sg](double t, const Field& f) { return VecField(std::sqrt(t) * sg.apply_gradient(t, f)); };
  T.adjoint = [&sg](double t, const VecField& g) {
    Field d = -sg.op().divergence(g);
    return Field(std::sqrt(t) * sg.apply_function([t](cplx z) { return std::exp(-t * z); }, d, true));
  };
  return T;
}

OperatorFamily OperatorFamily::identity() {
  OperatorFamily T;
  T.name = "identity";
  T.apply = [](double, const Field& f) { return VecField(f); };
  T.adjoint = [](double, const VecField& g) { return Field(g.col(0)); };
  return T;
}

OperatorFamily OperatorFamily::compose(const OperatorFamily& T, const OperatorFamily& S) {
  if (S.components != 1) throw DomainError("compose: inner family must be scalar valued");
  OperatorFamily C;
  C.name = T.name + "*" + S.name;
  C.components = T.components;
  C.apply = [T, S](double t, const Field& f) { return T.apply(t, S.apply(t, f).col(0)); };
  if (T.adjoint && S.adjoint)
    C.adjoint = [T, S](double t, const VecField& g) { return S.adjoint(t, VecField(T.adjoint(t, g))); };
  return C;
}

// ---------------------------------------------------------------------------
// Norms, probes, sets

double lp_norm(const PeriodicGrid& g, const VecField& u, const std::vector<long>& cells, double p) {
  RealField m = modulus(u);
  if (std::isinf(p)) {
    double mx = 0.0;
    for (long i : cells) mx = std::max(mx, m[i]);
    return mx;
  }
  double s = 0.0;
  for (long i : cells) s += std::pow(m[i], p);
  return std::pow(s * g.cell_volume(), 1.0 / p);
}

double weighted_lp_average(const VecField& u, const std::vector<long>& cells, const WeightField& w, double p,
                           double norm) {
  if (!(norm > 0.0)) throw DomainError("weighted_lp_average: normalising measure must be positive");
  RealField m = modulus(u);
  if (std::isinf(p)) {
    double mx = 0.0;
    for (long i : cells)
      if (w[i] > 0.0) mx = std::max(mx, m[i]);
    return mx;
  }
  double s = 0.0;
  for (long i : cells) s += std::pow(m[i], p) * w[i];
  return std::pow(s * w.grid().cell_volume() / norm, 1.0 / p);
}

std::vector<Field> probe_corpus(const PeriodicGrid& g, const std::vector<long>& cells, int count,
                                std::uint64_t seed) {
  std::vector<Field> out;
  if (cells.empty() || count <= 0) return out;
  Field ind = Field::Zero(g.size());
  for (long i : cells) ind[i] = 1.0;
  out.push_back(ind);
  for (int k = 1; k <= 3 && static_cast<int>(out.size()) < count; ++k) {
    Field f = Field::Zero(g.size());
    for (long i : cells) {
      Point x = g.center(i);
      double phase = 2.0 * kPi * k * (x[0] + (g.dim() == 2 ? 0.5 * x[1] : 0.0));
      f[i] = 1.0 + 0.75 * std::cos(phase);
    }
    out.push_back(f);
  }
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin;
  while (static_cast<int>(out.size()) < count) {
    Field f = Field::Zero(g.size());
    for (long i : cells) f[i] = coin(rng) ? 1.0 : -1.0;
    out.push_back(f);
  }
  return out;
}

double set_distance(const PeriodicGrid& g, const std::vector<long>& E, const std::vector<long>& F) {
  const double h = g.h();
  double best = HUGE_VAL;
  for (long a : E) {
    Point pa = g.center(a);
    for (long b : F) {
      Point pb = g.center(b);
      double s = 0.0;
      for (int d = 0; d < g.dim(); ++d) s += sq(std::max(0.0, std::abs(PeriodicGrid::wrap(pa[d] - pb[d])) - h));
      best = std::min(best, s);
      if (best == 0.0) return 0.0;
    }
  }
  return std::sqrt(best);
}

SetPair SetPair::make(const PeriodicGrid& g, std::vector<long> E, std::vector<long> F) {
  SetPair s;
  s.E = std::move(E);
  s.F = std::move(F);
  s.distance = (s.E.empty() || s.F.empty()) ? 0.0 : set_distance(g, s.E, s.F);
  return s;
}

SetPair SetPair::slabs(const PeriodicGrid& g, double a0, double a1, double b0, double b1) {
  std::vector<long> E, F;
  for (long i = 0; i < g.size(); ++i) {
    double x = g.center(i)[0];
    if (x >= a0 && x < a1) E.push_back(i);
    if (x >= b0 && x < b1) F.push_back(i);
  }
  return make(g, std::move(E), std::move(F));
}

// ---------------------------------------------------------------------------
// Full off-diagonal estimates

OffDiagReport verify_full_offdiag(const PeriodicGrid& g, const OperatorFamily& T, double p, double q,
                                  const std::vector<SetPair>& sets, const std::vector<double>& times,
                                  const OffDiagOptions& opt) {
  if (!(p >= 1.0 && q >= p)) throw DomainError("verify_full_offdiag: need 1 <= p <= q");
  if (sets.empty() || times.empty()) throw DomainError("verify_full_offdiag: empty sample geometry");
  const int n = g.dim();
  const double gamma = 0.5 * (n / p - (std::isinf(q) ? 0.0 : n / q));
  OffDiagReport rep;
  std::vector<double> x, y;
  int skipped = 0;
  for (const auto& s : sets) {
    if (s.E.empty() || s.F.empty()) {
      ++skipped;
      continue;
    }
    for (double t : times) {
      if (!(t > 0.0)) throw DomainError("verify_full_offdiag: times must be positive");
      // The diagonal pair (E, E) anchors the constant; the estimate must hold there too.
      for (int diag = 1; diag >= 0; --diag) {
        if (diag && s.distance == 0.0) continue;
        const auto& F = diag ? s.E : s.F;
        double r = probe_sup(
            g, s.E, T, t, p, q, F, opt.probes, [&](const VecField& u) { return lp_norm(g, u, F, q); },
            [&](const Field& f) { return lp_norm(g, VecField(f), s.E, p); });
        OffDiagSample smp;
        smp.kind = diag ? "diag" : "full";
        smp.t = t;
        smp.distance = diag ? 0.0 : s.distance;
        smp.lhs = r;
        rep.samples.push_back(smp);
        x.push_back(sq(smp.distance) / t);
        y.push_back(r > opt.floor ? std::log(r) + gamma * std::log(t) : -HUGE_VAL);
      }
    }
  }
  if (rep.samples.empty()) {
    rep.note = "no usable set pairs";
    return rep;
  }
  double Y0 = *std::max_element(y.begin(), y.end());
  const double c_cap = 1e6;
  double c = c_cap;
  std::vector<double> rx, ry;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) continue;
    if (x[i] > 0.0) {
      c = std::min(c, (Y0 - y[i]) / x[i]);
      rx.push_back(x[i]);
      ry.push_back(y[i]);
    }
  }
  if (!std::isfinite(Y0)) {
    // Every left side vanished: the estimate holds for any c.
    rep.constant = 0.0;
    rep.c = c_cap;
    rep.passed = true;
    rep.note = (skipped ? std::to_string(skipped) + " set pairs with an empty side skipped. " : std::string()) +
               "all sampled left sides are zero";
    return rep;
  }
  rep.c = std::max(c, 0.0);
  rep.constant = std::exp(Y0);
  regress(rx, ry, rep.slope, rep.r_squared);
  rep.regression_points = static_cast<int>(rx.size());
  rep.residual = -HUGE_VAL;
  for (std::size_t i = 0; i < y.size(); ++i) {
    auto& smp = rep.samples[i];
    double model = Y0 - rep.c * x[i];
    smp.rhs_model = std::exp(model - gamma * std::log(smp.t));
    if (std::isfinite(y[i])) rep.residual = std::max(rep.residual, y[i] - model);
  }
  rep.passed = rep.c >= opt.c_min;
  std::ostringstream note;
  if (skipped) note << skipped << " set pairs with an empty side skipped. ";
  note << "C = sampled sup of lhs t^{gamma}, gamma = " << gamma << ".";
  rep.note = note.str();
  return rep;
}

// ---------------------------------------------------------------------------
// Off-diagonal estimates on balls

OffDiagReport verify_ball_offdiag(const OperatorFamily& T, double p, double q, const WeightField& w,
                                  const std::vector<Ball>& balls, const std::vector<double>& times,
                                  const OffDiagOptions& opt) {
  if (!(p >= 1.0 && q >= p)) throw DomainError("verify_ball_offdiag: need 1 <= p <= q");
  if (balls.empty() || times.empty()) throw DomainError("verify_ball_offdiag: empty sample geometry");
  const PeriodicGrid& g = w.grid();
  OffDiagReport rep;
  struct Row {
    double y, a, b, x;
  };
  std::vector<Row> rows;
  double logC = -HUGE_VAL;
  int jcap = 0;
  for (const auto& B : balls) {
    auto bc = cells_in_ball(g, B);
    if (bc.empty()) throw DomainError("verify_ball_offdiag: ball contains no cell centres");
    const double wB = weighted_measure(w, bc);
    const int jmax = max_annulus_index(B.radius);
    jcap = std::max(jcap, jmax);
    for (double t : times) {
      if (!(t > 0.0)) throw DomainError("verify_ball_offdiag: times must be positive");
      double r = probe_sup(
          g, bc, T, t, p, q, bc, opt.probes, [&](const VecField& u) { return weighted_lp_average(u, bc, w, q, wB); },
          [&](const Field& f) { return weighted_lp_average(VecField(f), bc, w, p, wB); });
      OffDiagSample smp{"B-B", B, 1, t, B.radius, r, 0.0};
      rep.samples.push_back(smp);
      if (r > opt.floor) logC = std::max(logC, std::log(r));
      for (int j = 2; j <= jmax; ++j) {
        Annulus A{B, j};
        auto cj = A.cells(g);
        if (cj.empty()) continue;
        const double wOuter = ball_measure(w, A.outer());
        double cb = probe_sup(
            g, cj, T, t, p, q, bc, opt.probes, [&](const VecField& u) { return weighted_lp_average(u, bc, w, q, wB); },
            [&](const Field& f) { return weighted_lp_average(VecField(f), cj, w, p, wOuter); });
        double bcv = probe_sup(
            g, bc, T, t, p, q, cj, opt.probes,
            [&](const VecField& u) { return weighted_lp_average(u, cj, w, q, wOuter); },
            [&](const Field& f) { return weighted_lp_average(VecField(f), bc, w, p, wB); });
        const double s = std::ldexp(B.radius, j);
        for (auto [kind, val] : {std::pair<const char*, double>{"C-B", cb}, {"B-C", bcv}}) {
          rep.samples.push_back(OffDiagSample{kind, B, j, t, s, val, 0.0});
          if (val > opt.floor)
            rows.push_back(Row{std::log(val), j * std::log(2.0), std::log(dec(s / std::sqrt(t))), sq(s) / t});
        }
      }
    }
  }
  std::ostringstream note;
  note << "annuli capped at j <= log2(1/(4r)), here " << jcap << ".";
  if (!std::isfinite(logC)) {
    rep.passed = true;
    rep.c = 1e6;
    rep.note = "all sampled B-B left sides are zero; " + note.str();
    return rep;
  }
  rep.constant = std::exp(logC);
  // Largest c making every annular row hold for given exponents.
  auto c_feasible = [&](double t1, double t2) {
    double c = 1e6;
    for (const auto& r : rows) {
      double slack = logC + t1 * r.a + t2 * r.b - r.y;
      if (r.x <= 0.0) {
        if (slack < 0.0) return -HUGE_VAL;
        continue;
      }
      c = std::min(c, slack / r.x);
    }
    return c;
  };
  const double step = 0.125;
  const int steps = static_cast<int>(std::floor(opt.theta_cap / step + 1e-9));
  bool found = false;
  for (int sum = 0; sum <= 2 * steps && !found; ++sum) {
    double best_c = -HUGE_VAL;
    int best_i = 0;
    for (int i = std::max(0, sum - steps); i <= std::min(sum, steps); ++i) {
      double c = c_feasible(i * step, (sum - i) * step);
      if (c > best_c) {
        best_c = c;
        best_i = i;
      }
    }
    if (best_c >= opt.c_min) {
      found = true;
      rep.theta1 = best_i * step;
      rep.theta2 = (sum - best_i) * step;
      rep.c = best_c;
    }
  }
  if (!found) {
    rep.theta1 = rep.theta2 = opt.theta_cap;
    rep.c = std::max(0.0, c_feasible(opt.theta_cap, opt.theta_cap));
  }
  rep.residual = -HUGE_VAL;
  for (auto& smp : rep.samples) {
    double model = logC;
    if (smp.kind != "B-B")
      model += rep.theta1 * smp.j * std::log(2.0) + rep.theta2 * std::log(dec(smp.distance / std::sqrt(smp.t))) -
               rep.c * sq(smp.distance) / smp.t;
    smp.rhs_model = std::exp(model);
    if (smp.lhs > opt.floor) rep.residual = std::max(rep.residual, std::log(smp.lhs) - model);
  }
  std::vector<double> rx, ry;
  for (const auto& r : rows) {
    rx.push_back(r.x);
    ry.push_back(r.y - rep.theta1 * r.a - rep.theta2 * r.b);
  }
  regress(rx, ry, rep.slope, rep.r_squared);
  rep.regression_points = static_cast<int>(rx.size());
  rep.passed = found;
  rep.note = note.str();
  return rep;
}

// ---------------------------------------------------------------------------
// Criteria

namespace {

// Minimises sum_{j >= j0} G 2^{j (kappa + D)} over kappa with G the least
// constant covering the ratios.
void fit_template(HypothesisFit& h, double D, int j0, double kappa_max) {
  bool any = false;
  for (double r : h.ratio) any = any || r > 0.0;
  if (!any) {
    h.G = 0.0;
    h.kappa = -HUGE_VAL;
    h.weighted_sum = 0.0;
    h.passed = true;
    return;
  }
  double best = HUGE_VAL, best_k = 0.0, best_G = 0.0;
  for (double kappa = -60.0; kappa + D < -1e-3; kappa += 0.01) {
    double G = 0.0;
    for (std::size_t i = 0; i < h.j.size(); ++i)
      if (h.ratio[i] > 0.0) G = std::max(G, h.ratio[i] * std::exp2(-h.j[i] * kappa));
    const double a = kappa + D;
    double total = G * std::exp2(j0 * a) / (1.0 - std::exp2(a));
    if (total < best) {
      best = total;
      best_k = kappa;
      best_G = G;
    }
  }
  h.G = best_G;
  h.kappa = best_k;
  h.weighted_sum = best;
  h.passed = std::isfinite(best) && best_k + D <= kappa_max;
}

double template_value(const HypothesisFit& h, int j) {
  if (h.G == 0.0) return 0.0;
  return h.G * std::exp2(j * h.kappa);
}

double p_avg(const Field& u, const std::vector<long>& cells, const WeightField& mu, double p, double norm) {
  return weighted_lp_average(VecField(u), cells, mu, p, norm);
}

}  // namespace

CriterionReport check_criterion_strong(const LinearOp& T, const ApproxFamily& A, const LinearOp& S, double p0,
                                       double q0, const WeightField& mu, const std::vector<Ball>& balls,
                                       const CriterionOptions& opt) {
  if (!(p0 >= 1.0 && q0 > p0)) throw DomainError("check_criterion_strong: need 1 <= p0 < q0");
  if (balls.empty()) throw DomainError("check_criterion_strong: no balls");
  const PeriodicGrid& g = mu.grid();
  CriterionReport rep;
  HypothesisFit h1, h2;
  h1.name = "T(I-A_r) against S";
  h2.name = "T A_r against T";
  int jmax = 1000;
  for (const auto& B : balls) jmax = std::min(jmax, max_annulus_index(B.radius));
  if (jmax < 1) throw DomainError("check_criterion_strong: balls too large for any annulus");
  rep.j_max = jmax;
  for (int j = 1; j <= jmax; ++j) {
    h1.j.push_back(j);
    h2.j.push_back(j);
    h1.ratio.push_back(0.0);
    h2.ratio.push_back(0.0);
  }
  for (const auto& B : balls) {
    auto bc = cells_in_ball(g, B);
    const double wB = weighted_measure(mu, bc);
    const double r = B.radius;
    for (int j = 1; j <= jmax; ++j) {
      Annulus C{B, j};
      auto cj = C.cells(g);
      auto outer = cells_in_ball(g, C.outer());
      const double wO = weighted_measure(mu, outer);
      for (const auto& f : probe_corpus(g, cj, opt.probes.count, opt.probes.seed + j)) {
        Field u = f - A(r, f);
        double lhs = p_avg(T(u), bc, mu, p0, wB);
        double rhs = p_avg(S(f), outer, mu, p0, wO);
        if (rhs > 0.0) h1.ratio[j - 1] = std::max(h1.ratio[j - 1], lhs / rhs);
        // h plays the role of T f; T A_r f = A_r h by commutation.
        double lhs2 = p_avg(A(r, f), bc, mu, q0, wB);
        double rhs2 = p_avg(f, outer, mu, p0, wO);
        if (rhs2 > 0.0) h2.ratio[j - 1] = std::max(h2.ratio[j - 1], lhs2 / rhs2);
      }
    }
  }
  fit_template(h1, 0.0, 1, opt.kappa_max);
  fit_template(h2, 0.0, 1, opt.kappa_max);
  // Undecomposed probes supported in the largest ball used.
  rep.worst_violation = -HUGE_VAL;
  for (const auto& B : balls) {
    auto bc = cells_in_ball(g, B);
    const double wB = weighted_measure(mu, bc);
    auto support = cells_in_ball(g, B.scaled(std::ldexp(1.0, jmax + 1)));
    for (const auto& f : probe_corpus(g, support, opt.probes.count, opt.probes.seed + 97)) {
      Field Tf = T(f);
      Field Sf = S(f);
      double rhs1 = 0.0, rhs2 = 0.0;
      for (int j = 1; j <= jmax; ++j) {
        auto outer = cells_in_ball(g, B.scaled(std::ldexp(1.0, j + 1)));
        const double wO = weighted_measure(mu, outer);
        rhs1 += template_value(h1, j) * p_avg(Sf, outer, mu, p0, wO);
        rhs2 += template_value(h2, j) * p_avg(Tf, outer, mu, p0, wO);
      }
      double lhs1 = p_avg(T(f - A(B.radius, f)), bc, mu, p0, wB);
      double lhs2 = p_avg(T(A(B.radius, f)), bc, mu, q0, wB);
      for (auto [l, rr] : {std::pair{lhs1, rhs1}, std::pair{lhs2, rhs2}}) {
        ++rep.total_checks;
        if (l <= 0.0) continue;
        double v = rr > 0.0 ? std::log(l / rr) : HUGE_VAL;
        rep.worst_violation = std::max(rep.worst_violation, v);
        if (v > 1e-9) ++rep.violations;
      }
    }
  }
  rep.hypotheses = {h1, h2};
  rep.passed = h1.passed && h2.passed && rep.violations == 0;
  rep.note = "g(j) fitted on annular pieces of f (and of h = T f); the last piece outside 2^{jmax+1}B is not sampled.";
  return rep;
}

CriterionReport check_criterion_weak(const LinearOp& T, const ApproxFamily& A, double p0, double q0,
                                     const WeightField& mu, double doubling, const std::vector<Ball>& balls,
                                     const CriterionOptions& opt) {
  if (!(p0 >= 1.0 && q0 > p0)) throw DomainError("check_criterion_weak: need 1 <= p0 < q0");
  if (balls.empty()) throw DomainError("check_criterion_weak: no balls");
  if (!(doubling >= 0.0)) throw DomainError("check_criterion_weak: doubling order must be non-negative");
  const PeriodicGrid& g = mu.grid();
  CriterionReport rep;
  HypothesisFit h1, h2;
  h1.name = "T(I-A_r) on C_j(B), j >= 2";
  h2.name = "A_r on C_j(B), j >= 1";
  int jmax = 1000;
  for (const auto& B : balls) jmax = std::min(jmax, max_annulus_index(B.radius));
  if (jmax < 2) throw DomainError("check_criterion_weak: balls too large for annuli with j >= 2");
  rep.j_max = jmax;
  for (int j = 1; j <= jmax; ++j) {
    if (j >= 2) {
      h1.j.push_back(j);
      h1.ratio.push_back(0.0);
    }
    h2.j.push_back(j);
    h2.ratio.push_back(0.0);
  }
  for (const auto& B : balls) {
    auto bc = cells_in_ball(g, B);
    const double wB = weighted_measure(mu, bc);
    for (const auto& f : probe_corpus(g, bc, opt.probes.count, opt.probes.seed)) {
      double rhs = p_avg(f, bc, mu, p0, wB);
      if (!(rhs > 0.0)) continue;
      Field Af = A(B.radius, f);
      Field Tu = T(f - Af);
      for (int j = 1; j <= jmax; ++j) {
        Annulus C{B, j};
        auto cj = C.cells(g);
        const double wO = ball_measure(mu, C.outer());
        ++rep.total_checks;
        if (j >= 2) h1.ratio[j - 2] = std::max(h1.ratio[j - 2], p_avg(Tu, cj, mu, p0, wO) / rhs);
        h2.ratio[j - 1] = std::max(h2.ratio[j - 1], p_avg(Af, cj, mu, q0, wO) / rhs);
      }
    }
  }
  fit_template(h1, doubling, 2, opt.kappa_max);
  fit_template(h2, doubling, 1, opt.kappa_max);
  rep.hypotheses = {h1, h2};
  rep.worst_violation = 0.0;
  rep.passed = h1.passed && h2.passed;
  std::ostringstream note;
  note << "weighted sums use D = " << doubling << "; annuli capped at j <= " << jmax << ".";
  rep.note = note.str();
  return rep;
}

}  // namespace ellip
