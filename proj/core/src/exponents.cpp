#include "ellip/exponents.hpp"

#include "ellip/error.hpp"

#include <cmath>
#include <sstream>

namespace ellip {

namespace {

Rational exact_from_double(double v) {
  if (!std::isfinite(v)) throw DomainError("exponent: non-finite value");
  int e = 0;
  double m = std::frexp(v, &e);  // v = m * 2^e, 0.5 <= |m| < 1
  // 53 bits of mantissa as an integer.
  auto mi = static_cast<long long>(std::ldexp(m, 53));
  e -= 53;
  Rational r(mi);
  if (e >= 0) {
    r *= Rational(boost::multiprecision::cpp_int(1) << e);
  } else {
    r /= Rational(boost::multiprecision::cpp_int(1) << -e);
  }
  return r;
}

void require_positive(const Rational& v) {
  if (v <= 0) throw DomainError("exponent must be positive");
}

}  // namespace

ExponentValue::ExponentValue() = default;

ExponentValue::ExponentValue(long num, long den) : v_(Rational(num, den)) { require_positive(v_); }

ExponentValue::ExponentValue(const Rational& v) : v_(v) { require_positive(v_); }

ExponentValue ExponentValue::infinity() {
  ExponentValue e;
  e.inf_ = true;
  e.v_ = 0;
  return e;
}

ExponentValue ExponentValue::from_double(double v) {
  if (std::isinf(v) && v > 0) return infinity();
  return ExponentValue(exact_from_double(v));
}

ExponentValue ExponentValue::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "∞") return infinity();
  auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      long a = std::stol(text.substr(0, slash));
      long b = std::stol(text.substr(slash + 1));
      if (b == 0) throw ParseError("exponent: zero denominator in '" + text + "'");
      return ExponentValue(a, b);
    }
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw ParseError("exponent: trailing characters in '" + text + "'");
    return from_double(v);
  } catch (const std::invalid_argument&) {
    throw ParseError("exponent: cannot parse '" + text + "'");
  } catch (const std::out_of_range&) {
    throw ParseError("exponent: out of range '" + text + "'");
  }
}

const Rational& ExponentValue::rational() const {
  if (inf_) throw DomainError("exponent: infinite value has no rational form");
  return v_;
}

double ExponentValue::to_double() const {
  if (inf_) return HUGE_VAL;
  return static_cast<double>(v_);
}

std::string ExponentValue::to_string() const {
  if (inf_) return "inf";
  std::ostringstream os;
  os << v_;
  return os.str();
}

Rational ExponentValue::reciprocal() const {
  if (inf_) return Rational(0);
  return Rational(1) / v_;
}

bool operator==(const ExponentValue& a, const ExponentValue& b) {
  if (a.inf_ || b.inf_) return a.inf_ == b.inf_;
  return a.v_ == b.v_;
}

std::strong_ordering operator<=>(const ExponentValue& a, const ExponentValue& b) {
  if (a.inf_ && b.inf_) return std::strong_ordering::equal;
  if (a.inf_) return std::strong_ordering::greater;
  if (b.inf_) return std::strong_ordering::less;
  if (a.v_ < b.v_) return std::strong_ordering::less;
  if (a.v_ > b.v_) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

ExponentValue operator*(const ExponentValue& a, const ExponentValue& b) {
  if (a.inf_ || b.inf_) return ExponentValue::infinity();
  return ExponentValue(a.v_ * b.v_);
}

ExponentValue operator/(const ExponentValue& a, const ExponentValue& b) {
  if (a.inf_ && b.inf_) throw DomainError("exponent: inf/inf is undefined");
  if (a.inf_) return ExponentValue::infinity();
  if (b.inf_) throw DomainError("exponent: finite/inf leaves the positive exponents");
  return ExponentValue(a.v_ / b.v_);
}

ExponentValue conjugate(const ExponentValue& p) {
  if (p.is_infinite()) return ExponentValue(1);
  const Rational& v = p.rational();
  if (v < 1) throw DomainError("conjugate: exponent below 1: " + p.to_string());
  if (v == 1) return ExponentValue::infinity();
  return ExponentValue(v / (v - 1));
}

WeightIndices WeightIndices::unweighted(int n) {
  WeightIndices w;
  w.doubling_order = n;
  return w;
}

WeightIndices WeightIndices::power(int n, double alpha) {
  if (n < 1) throw DomainError("power weight: dimension must be positive");
  if (!(alpha > -n)) throw DomainError("power weight: |x|^alpha needs alpha > -n");
  WeightIndices w;
  Rational a = alpha == 0.0 ? Rational(0) : exact_from_double(alpha);
  if (a > 0) {
    w.r_w = ExponentValue(Rational(1) + a / n);
    w.s_w = ExponentValue::infinity();
  } else if (a < 0) {
    w.r_w = ExponentValue(1);
    w.s_w = ExponentValue(Rational(n) / (-a));
  }
  w.doubling_order = n + std::max(alpha, 0.0);
  w.source = IndexSource::analytic;
  return w;
}

void WeightIndices::validate() const {
  if (r_w < ExponentValue(1)) throw DomainError("weight indices: r_w < 1");
  if (s_w <= ExponentValue(1)) throw DomainError("weight indices: s_w <= 1");
  if (!(doubling_order >= 0.0)) throw DomainError("weight indices: negative doubling order");
}

bool ExponentRange::empty() const { return lo >= hi; }

bool ExponentRange::contains(const ExponentValue& p) const {
  if (empty()) return false;
  bool above = open_lo ? p > lo : p >= lo;
  bool below = open_hi ? p < hi : p <= hi;
  return above && below;
}

bool ExponentRange::contains(double p) const {
  if (std::isinf(p)) return contains(ExponentValue::infinity());
  return contains(ExponentValue::from_double(p));
}

std::string ExponentRange::to_string() const {
  if (empty()) return "empty";
  return std::string(open_lo ? "(" : "[") + lo.to_string() + ", " + hi.to_string() +
         (open_hi ? ")" : "]");
}

void CriticalExponents::validate(int n) const {
  if (p_minus < ExponentValue(1) || q_minus < ExponentValue(1))
    throw DomainError("critical exponents: lower exponents must be >= 1");
  if (!(p_minus == q_minus)) throw DomainError("critical exponents: p_- != q_-");
  if (q_plus > p_plus) throw DomainError("critical exponents: q_+ > p_+");
  if (p_minus >= p_plus) throw DomainError("critical exponents: p_- >= p_+");
  if (q_minus >= q_plus) throw DomainError("critical exponents: q_- >= q_+");
  if (n >= 2) {
    if (!(p_minus < ExponentValue(2))) throw DomainError("critical exponents: p_- >= 2 with n >= 2");
    if (!(q_plus > ExponentValue(2))) throw DomainError("critical exponents: q_+ <= 2 with n >= 2");
  }
}

ExponentRange ww_interval(const WeightIndices& idx, const ExponentValue& p0,
                          const ExponentValue& q0) {
  if (!(p0 < q0)) throw DomainError("ww_interval: requires p0 < q0");
  ExponentRange r;
  r.lo = p0 * idx.r_w;
  ExponentValue sp = conjugate(idx.s_w);
  r.hi = q0.is_infinite() ? ExponentValue::infinity() : q0 / sp;
  r.open_lo = r.open_hi = true;
  r.provenance = Provenance::certified;
  return r;
}

bool compatibility(const WeightIndices& idx, const CriticalExponents& ce, RangeKind kind) {
  const ExponentValue& lo = kind == RangeKind::J ? ce.p_minus : ce.q_minus;
  const ExponentValue& hi = kind == RangeKind::J ? ce.p_plus : ce.q_plus;
  ExponentValue threshold = idx.r_w * conjugate(idx.s_w);
  if (hi.is_infinite()) return true;
  return hi / lo > threshold;
}

SobolevExponents sobolev_exponents(const ExponentValue& p, const WeightIndices& idx, int n) {
  if (p.is_infinite()) throw DomainError("sobolev_exponents: p must be finite");
  if (n < 1) throw DomainError("sobolev_exponents: n must be positive");
  if (idx.r_w.is_infinite()) throw DomainError("sobolev_exponents: r_w must be finite");
  const Rational& pv = p.rational();
  Rational nr = Rational(n) * idx.r_w.rational();
  SobolevExponents out;
  out.lower = ExponentValue(nr * pv / (nr + pv));
  out.upper = pv >= nr ? ExponentValue::infinity() : ExponentValue(nr * pv / (nr - pv));
  return out;
}

const RangeEntry& RangeReport::find(const std::string& theorem) const {
  for (const auto& e : entries)
    if (e.theorem == theorem) return e;
  throw DomainError("range report: no entry '" + theorem + "'");
}

namespace {

RangeEntry make_entry(const std::string& name, ExponentRange r, const std::string& condition) {
  RangeEntry e;
  e.theorem = name;
  e.range = r;
  e.range.provenance = Provenance::certified;
  e.label = "certified subset";
  if (e.range.empty()) e.violated = condition;
  return e;
}

}  // namespace

RangeReport predicted_ranges(const CriticalExponents& ce, const WeightIndices& idx, int n) {
  ce.validate(n);
  idx.validate();
  ExponentRange wj = ww_interval(idx, ce.p_minus, ce.p_plus);
  ExponentRange wk = ww_interval(idx, ce.q_minus, ce.q_plus);
  const std::string cj = "p_+/p_- > r_w (s_w)' fails";
  const std::string ck = "q_+/q_- > r_w (s_w)' fails";

  RangeReport rep;
  rep.entries.push_back(make_entry("functional_calculus", wj, cj));
  rep.entries.push_back(make_entry("riesz_transform", wk, ck));

  // max{r_w, (p_-hat)_{w,*}} < p < p_+hat with hatted endpoints replaced by W_w(p_-, p_+).
  ExponentRange rs;
  if (wj.empty()) {
    rs = wj;
  } else {
    ExponentValue lower = sobolev_exponents(wj.lo, idx, n).lower;
    rs.lo = std::max(idx.r_w, lower);
    rs.hi = wj.hi;
  }
  rep.entries.push_back(make_entry("reverse_square_root", rs, cj));
  rep.entries.push_back(make_entry("g_function", wj, cj));
  rep.entries.push_back(make_entry("G_function", wk, ck));
  rep.entries.push_back(make_entry("reverse_g_function", wj, cj));
  ExponentRange rg;
  rg.lo = idx.r_w;
  rg.hi = ExponentValue::infinity();
  rep.entries.push_back(make_entry("reverse_G_function", rg, "r_w = inf"));
  rep.entries.push_back(make_entry("commutator_functional_calculus", wj, cj));
  rep.entries.push_back(make_entry("commutator_riesz_transform", wk, ck));
  return rep;
}

bool power_weight_riesz_certified(double p, double alpha, int n, const ExponentValue& q_plus) {
  double qp = q_plus.to_double();
  if (!(p > 1.0 && p < qp)) return false;
  double lo = std::isinf(qp) ? -n : n * (p / qp - 1.0);
  return lo < alpha && alpha < n * (p - 1.0);
}

}  // namespace ellip
