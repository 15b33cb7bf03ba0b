#include "ellip/weights.hpp"

#include "ellip/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace ellip {

namespace {

void require_resolved(const PeriodicGrid& g, const Ball& b) {
  if (b.radius < g.h()) {
    std::ostringstream os;
    os << "ball of radius " << b.radius << " is below one grid cell (h = " << g.h() << ")";
    throw DomainError(os.str());
  }
}

std::vector<double> ball_values(const WeightField& w, const Ball& b) {
  std::vector<double> v;
  for_each_cell_in_ball(w.grid(), b, [&](long i, double) { v.push_back(w[i]); });
  if (v.empty()) throw DomainError("ball contains no cell centers");
  return v;
}

// (mean of (v/scale)^e) * scale^e computed in logs: returns log(mean v^e).
double log_power_mean(const std::vector<double>& v, double e) {
  double lmax = -HUGE_VAL;
  for (double x : v) lmax = std::max(lmax, e * std::log(x));
  double s = 0.0;
  for (double x : v) s += std::exp(e * std::log(x) - lmax);
  return lmax + std::log(s / static_cast<double>(v.size()));
}

// Cells of the ball with fractional coverage weights: a linear ramp of width h
// across the sphere, which removes most of the lattice-count noise of small
// balls. Coverage of the sub-ball of radius r_in is stored separately.
struct SoftBall {
  std::vector<double> v, cover, inner;
};

SoftBall soft_ball(const WeightField& w, const Ball& b, double r_in) {
  const double h = w.grid().h();
  auto ramp = [h](double r, double d) { return std::clamp((r - d) / h + 0.5, 0.0, 1.0); };
  SoftBall s;
  for_each_cell_in_ball(w.grid(), Ball{b.center, b.radius + h}, [&](long i, double d) {
    double c = ramp(b.radius, d);
    if (c <= 0.0) return;
    s.v.push_back(w[i]);
    s.cover.push_back(c);
    s.inner.push_back(ramp(r_in, d));
  });
  return s;
}

// log of the mean of v^e under the weights m.
double log_power_mean(const std::vector<double>& v, const std::vector<double>& m, double e) {
  double lmax = -HUGE_VAL;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (m[i] > 0.0) lmax = std::max(lmax, e * std::log(v[i]));
  double s = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    s += m[i] * std::exp(e * std::log(v[i]) - lmax);
    mass += m[i];
  }
  return lmax + std::log(s / mass);
}

}  // namespace

double ap_quotient(const WeightField& w, double p, const Ball& b) {
  if (!(p >= 1.0)) throw DomainError("ap_constant: p must be >= 1");
  require_resolved(w.grid(), b);
  auto v = ball_values(w, b);
  double la = log_power_mean(v, 1.0);
  if (p == 1.0) return std::exp(la - std::log(*std::min_element(v.begin(), v.end())));
  double e = -1.0 / (p - 1.0);
  return std::exp(la + (p - 1.0) * log_power_mean(v, e));
}

double rh_quotient(const WeightField& w, double q, const Ball& b) {
  if (!(q >= 1.0)) throw DomainError("rh_constant: q must be >= 1");
  require_resolved(w.grid(), b);
  auto v = ball_values(w, b);
  double la = log_power_mean(v, 1.0);
  if (std::isinf(q)) return std::exp(std::log(*std::max_element(v.begin(), v.end())) - la);
  return std::exp(log_power_mean(v, q) / q - la);
}

double ap_constant(const WeightField& w, const ExponentValue& p, const BallFamily& balls) {
  if (p.is_infinite()) throw DomainError("ap_constant: p must be finite");
  double best = 0.0;
  for (const auto& b : balls.balls) best = std::max(best, ap_quotient(w, p.to_double(), b));
  return best;
}

double rh_constant(const WeightField& w, const ExponentValue& q, const BallFamily& balls) {
  double best = 0.0;
  for (const auto& b : balls.balls) best = std::max(best, rh_quotient(w, q.to_double(), b));
  return best;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::diverging: return "diverging";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

BallFamily verdict_balls(const PeriodicGrid& g) {
  const double r0 = 1.0 / 64.0;
  if (r0 < 2.0 * g.h()) throw DomainError("membership verdicts need N >= 128");
  return BallFamily::origin(r0, 5);
}

namespace {

// Verdict from log g_k, k = 0..4.
void classify_log(MembershipReport& rep, const double* lg) {
  for (int k = 0; k < 5; ++k)
    if (!std::isfinite(lg[k])) {
      rep.verdict = Verdict::diverging;
      rep.increment_ratio = HUGE_VAL;
      return;
    }
  double g[5];
  for (int k = 0; k < 5; ++k) g[k] = std::exp(lg[k] - lg[4]);  // g_4 = 1
  double d[4];
  for (int k = 0; k < 4; ++k) d[k] = g[k + 1] - g[k];
  const double early = d[0] + d[1], late = d[2] + d[3];
  const double tiny = 1e-3;
  rep.increment_ratio = early != 0.0 ? late / early : (late == 0.0 ? 0.0 : HUGE_VAL);
  if (std::abs(d[2]) <= tiny && std::abs(d[3]) <= tiny) {
    rep.verdict = Verdict::stable;
  } else if (late > 0.0 && early >= 0.0 && rep.increment_ratio >= 1.0 - 1e-9) {
    rep.verdict = Verdict::diverging;
  } else if (std::abs(rep.increment_ratio) <= kStableRatio) {
    rep.verdict = Verdict::stable;
  } else {
    rep.verdict = Verdict::inconclusive;
  }
}

}  // namespace

MembershipReport classify_growth(const std::vector<double>& radii, const std::vector<double>& c, double power) {
  if (c.size() != 5) throw DomainError("classify_growth: expects five constants");
  if (!(power > 0.0)) throw DomainError("classify_growth: power must be positive");
  MembershipReport rep;
  rep.radii = radii;
  rep.constants = c;
  double lg[5];
  for (int k = 0; k < 5; ++k) lg[k] = c[k] > 0.0 ? power * std::log(c[k]) : HUGE_VAL;
  classify_log(rep, lg);
  return rep;
}

MembershipReport ap_verdict(const WeightField& w, double p) {
  if (!(p >= 1.0)) throw DomainError("ap_verdict: p must be >= 1");
  BallFamily fam = verdict_balls(w.grid());
  MembershipReport rep;
  double lg[5];
  int k = 0;
  for (const auto& b : fam.balls) {
    rep.radii.push_back(b.radius);
    rep.constants.push_back(ap_quotient(w, p, b));
    SoftBall sb = soft_ball(w, b, 0.0);
    double la = log_power_mean(sb.v, sb.cover, 1.0);
    if (p == 1.0) {
      double mn = HUGE_VAL;
      for (std::size_t i = 0; i < sb.v.size(); ++i)
        if (sb.cover[i] >= 0.5) mn = std::min(mn, sb.v[i]);
      lg[k] = la - std::log(mn);
    } else {
      lg[k] = la / (p - 1.0) + log_power_mean(sb.v, sb.cover, -1.0 / (p - 1.0));
    }
    ++k;
  }
  classify_log(rep, lg);
  return rep;
}

MembershipReport rh_verdict(const WeightField& w, double q) {
  if (!(q >= 1.0)) throw DomainError("rh_verdict: q must be >= 1");
  BallFamily fam = verdict_balls(w.grid());
  MembershipReport rep;
  double lg[5];
  int k = 0;
  for (const auto& b : fam.balls) {
    rep.radii.push_back(b.radius);
    rep.constants.push_back(rh_quotient(w, q, b));
    // The denominator averages over the outer half shell, which carries no
    // contribution from the unresolved centre.
    SoftBall sb = soft_ball(w, b, 0.5 * b.radius);
    std::vector<double> shell(sb.v.size());
    for (std::size_t i = 0; i < shell.size(); ++i) shell[i] = sb.cover[i] - sb.inner[i];
    double ls = log_power_mean(sb.v, shell, 1.0);
    if (std::isinf(q)) {
      double mx = 0.0;
      for (std::size_t i = 0; i < sb.v.size(); ++i)
        if (sb.cover[i] >= 0.5) mx = std::max(mx, sb.v[i]);
      lg[k] = std::log(mx) - ls;
    } else {
      lg[k] = log_power_mean(sb.v, sb.cover, q) - q * ls;
    }
    ++k;
  }
  classify_log(rep, lg);
  return rep;
}

std::string Bracket::to_string() const {
  return "[" + lo.to_string() + ", " + hi.to_string() + "]" + (flagged ? " (inconclusive band)" : "");
}

WeightIndices WeightIndexEstimate::conservative() const {
  WeightIndices w;
  w.r_w = r_w.hi;
  w.s_w = s_w.lo > ExponentValue(1) ? s_w.lo : ExponentValue(1) * ExponentValue(257, 256);
  w.doubling_order = doubling_order;
  w.source = source;
  return w;
}

namespace {

// Smallest x in (a, b] with pred(x), assuming pred(a) false and pred(b) true.
double bisect_up(double a, double b, double res, const std::function<bool(double)>& pred) {
  while (b - a > res) {
    double m = 0.5 * (a + b);
    if (pred(m))
      b = m;
    else
      a = m;
  }
  return b;
}

// Largest x in [a, b) with pred(x), assuming pred(a) true and pred(b) false.
double bisect_down(double a, double b, double res, const std::function<bool(double)>& pred) {
  while (b - a > res) {
    double m = 0.5 * (a + b);
    if (pred(m))
      a = m;
    else
      b = m;
  }
  return a;
}

}  // namespace

WeightIndexEstimate weight_indices(const WeightField& w, const IndexSearch& search) {
  const int n = w.grid().dim();
  WeightIndexEstimate est;
  if (search.allow_analytic && w.power_alpha()) {
    WeightIndices a = WeightIndices::power(n, *w.power_alpha());
    est.r_w = Bracket{a.r_w, a.r_w, false};
    est.s_w = Bracket{a.s_w, a.s_w, false};
    est.doubling_order = a.doubling_order;
    est.source = IndexSource::analytic;
    return est;
  }
  if (!(search.cap > 1.0) || !(search.resolution > 0.0)) throw DomainError("weight_indices: bad search grid");
  const double res = search.resolution, cap = search.cap;
  auto ap_stable = [&](double p) { return ap_verdict(w, p).verdict == Verdict::stable; };
  auto ap_div = [&](double p) { return ap_verdict(w, p).verdict == Verdict::diverging; };
  auto rh_stable = [&](double q) { return rh_verdict(w, q).verdict == Verdict::stable; };
  auto rh_div = [&](double q) { return rh_verdict(w, q).verdict == Verdict::diverging; };

  // r_w
  double hi;
  bool hi_inf = false;
  if (ap_stable(1.0)) {
    hi = 1.0;
  } else if (!ap_stable(cap)) {
    hi = cap;
    hi_inf = true;
  } else {
    hi = bisect_up(1.0, cap, res, ap_stable);
  }
  double lo = 1.0;
  if (hi > 1.0 && ap_div(1.0)) lo = bisect_down(1.0, hi, res, ap_div);
  est.r_w.lo = ExponentValue::from_double(lo);
  est.r_w.hi = hi_inf ? ExponentValue::infinity() : ExponentValue::from_double(hi);
  est.r_w.flagged = hi_inf || hi - lo > 2.0 * res;

  // s_w, bisected in u = 1/q, the variable in which (s_w)' is affine
  if (rh_stable(HUGE_VAL)) {
    est.s_w = Bracket{ExponentValue::infinity(), ExponentValue::infinity(), false};
  } else {
    auto stable_u = [&](double u) { return rh_stable(1.0 / u); };
    auto div_u = [&](double u) { return rh_div(1.0 / u); };
    const double umin = 1.0 / cap, umax = 1.0 - res;
    double ustable, udiv = 0.0;
    bool div_found = false;
    if (stable_u(umin))
      ustable = umin;
    else if (!stable_u(umax))
      ustable = 1.0;
    else
      ustable = bisect_up(umin, umax, res, stable_u);
    if (ustable > umin && div_u(umin)) {
      udiv = bisect_down(umin, ustable, res, div_u);
      div_found = true;
    }
    est.s_w.lo = ExponentValue::from_double(1.0 / ustable);
    est.s_w.hi = div_found ? ExponentValue::from_double(1.0 / udiv) : ExponentValue::infinity();
    est.s_w.flagged = !div_found || ustable - udiv > 2.0 * res;
  }
  est.doubling_order = doubling_order(w);
  est.source = IndexSource::estimated;
  return est;
}

double doubling_order(const WeightField& w) {
  const PeriodicGrid& g = w.grid();
  std::vector<double> radii;
  for (double r = 4.0 * g.h(); r <= 0.25 + 1e-12; r *= 2.0) radii.push_back(r);
  const int K = static_cast<int>(radii.size());
  if (K < 3) throw DomainError("doubling_order: grid too coarse (needs N >= 64)");
  std::vector<Point> centers{{0.0, 0.0}};
  const int m = 8;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < (g.dim() == 2 ? m : 1); ++b)
      centers.push_back({-0.5 + (a + 0.5) / m, g.dim() == 2 ? -0.5 + (b + 0.5) / m : 0.0});
  // env[l] = max over centres and base radii of log(w(2^l B) / w(B)).
  std::vector<double> env(K, -HUGE_VAL), y(K);
  for (const auto& c : centers) {
    for (int i = 0; i < K; ++i) y[i] = std::log(ball_measure(w, Ball{c, radii[i]}));
    for (int i = 0; i < K; ++i)
      for (int j = i; j < K; ++j) env[j - i] = std::max(env[j - i], y[j] - y[i]);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = K - 1;
  for (int l = 1; l < K; ++l) {
    double x = l * std::log(2.0);
    sx += x;
    sy += env[l];
    sxx += x * x;
    sxy += x * env[l];
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

double bmo_norm(const Field& b, const WeightField& mu, const BallFamily* balls) {
  const PeriodicGrid& g = mu.grid();
  if (b.size() != g.size()) throw DomainError("bmo_norm: field size mismatch");
  for (long i = 0; i < b.size(); ++i)
    if (!std::isfinite(b[i].real()) || !std::isfinite(b[i].imag())) throw DomainError("bmo_norm: non-finite value");
  BallFamily fam = balls ? *balls : BallFamily::standard(g);
  double best = 0.0;
  std::vector<long> cells;
  for (const auto& B : fam.balls) {
    cells.clear();
    for_each_cell_in_ball(g, B, [&](long i, double) { cells.push_back(i); });
    if (cells.empty()) continue;
    cplx num = 0.0;
    double den = 0.0;
    for (long i : cells) {
      num += b[i] * mu[i];
      den += mu[i];
    }
    cplx avg = num / den;
    double osc = 0.0;
    for (long i : cells) osc += std::abs(b[i] - avg) * mu[i];
    best = std::max(best, osc / den);
  }
  return best;
}

}  // namespace ellip
