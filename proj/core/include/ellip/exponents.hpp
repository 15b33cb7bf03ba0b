#pragma once

// Extended-rational exponent arithmetic: Hölder conjugates, W_w intervals,
// Sobolev-type exponents and the range bookkeeping for the boundedness
// results. Infinity is a tagged state, never a float.

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <optional>
#include <string>
#include <vector>

namespace ellip {

using Rational = boost::multiprecision::cpp_rational;

class ExponentValue {
 public:
  // Default is 1.
  ExponentValue();
  ExponentValue(long num, long den = 1);
  explicit ExponentValue(const Rational& v);

  static ExponentValue infinity();
  // Exact conversion of a finite double (every double is a dyadic rational).
  static ExponentValue from_double(double v);
  // Parses "3", "3/2", "1.25", "inf".
  static ExponentValue parse(const std::string& text);

  bool is_infinite() const noexcept { return inf_; }
  // Throws DomainError when infinite.
  const Rational& rational() const;
  double to_double() const;  // +inf for infinity
  std::string to_string() const;

  // 1/p, with 1/inf = 0.
  Rational reciprocal() const;

  friend bool operator==(const ExponentValue& a, const ExponentValue& b);
  friend std::strong_ordering operator<=>(const ExponentValue& a, const ExponentValue& b);

  // Products and quotients with the conventions c*inf = inf, inf/c = inf,
  // c/inf = 0 for finite positive c. inf/inf is a DomainError.
  friend ExponentValue operator*(const ExponentValue& a, const ExponentValue& b);
  friend ExponentValue operator/(const ExponentValue& a, const ExponentValue& b);

 private:
  Rational v_{1};
  bool inf_ = false;
};

// Hölder conjugate; requires p >= 1. conjugate(1) = inf, conjugate(inf) = 1.
ExponentValue conjugate(const ExponentValue& p);

enum class IndexSource { analytic, estimated };

struct WeightIndices {
  ExponentValue r_w{1};
  ExponentValue s_w = ExponentValue::infinity();
  double doubling_order = 0.0;
  IndexSource source = IndexSource::analytic;

  // Indices of w = 1 in dimension n.
  static WeightIndices unweighted(int n);
  // Indices of |x|^alpha, -n < alpha, in dimension n.
  static WeightIndices power(int n, double alpha);
  void validate() const;
};

enum class Provenance { certified, probed, declared };

struct ExponentRange {
  ExponentValue lo{1};
  ExponentValue hi = ExponentValue::infinity();
  bool open_lo = true;
  bool open_hi = true;
  Provenance provenance = Provenance::declared;

  bool empty() const;
  bool contains(const ExponentValue& p) const;
  bool contains(double p) const;
  std::string to_string() const;
};

struct CriticalExponents {
  ExponentValue p_minus{1};
  ExponentValue p_plus = ExponentValue::infinity();
  ExponentValue q_minus{1};
  ExponentValue q_plus = ExponentValue::infinity();

  // Throws DomainError naming the violated relation. n <= 0 skips the
  // dimension-dependent check p_- < 2 < q_+.
  void validate(int n = 0) const;
};

// (p0 r_w, q0/(s_w)'), provenance certified.
ExponentRange ww_interval(const WeightIndices& idx, const ExponentValue& p0,
                          const ExponentValue& q0);

enum class RangeKind { J, K };

bool compatibility(const WeightIndices& idx, const CriticalExponents& ce, RangeKind kind);

struct SobolevExponents {
  ExponentValue lower;  // p_{w,*}; may lie below 1
  ExponentValue upper;  // p_w^*; infinite when p >= n r_w
};

SobolevExponents sobolev_exponents(const ExponentValue& p, const WeightIndices& idx, int n);

struct RangeEntry {
  std::string theorem;
  ExponentRange range;
  std::string label;      // always "certified subset"
  std::string violated;   // empty unless the range is empty
};

struct RangeReport {
  std::vector<RangeEntry> entries;
  const RangeEntry& find(const std::string& theorem) const;
};

// Certified inner ranges for functional calculus, Riesz transform, reverse
// square root inequality, g_L, G_L, reverse g/G inequalities and commutators.
RangeReport predicted_ranges(const CriticalExponents& ce, const WeightIndices& idx, int n);

// Power-weight Riesz range test: 1 < p < q_plus and n(p/q_plus - 1) < alpha < n(p-1).
bool power_weight_riesz_certified(double p, double alpha, int n, const ExponentValue& q_plus);

}  // namespace ellip
