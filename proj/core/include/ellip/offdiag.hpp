#pragma once

// Sampled verification of off-diagonal estimates and of the hypotheses of the
// two boundedness criteria (good-lambda type with S, and weak type via
// annular decay).

#include "ellip/funcalc.hpp"
#include "ellip/grid.hpp"

#include <functional>
#include <string>
#include <vector>

namespace ellip {

// max(s, 1/s).
double dec(double s);

// A family t -> T_t of linear maps with scalar input and `components` outputs.
// adjoint is optional; when present the probe corpus adds a norm-ascent field.
struct OperatorFamily {
  std::string name;
  int components = 1;
  std::function<VecField(double t, const Field& f)> apply;
  std::function<Field(double t, const VecField& g)> adjoint;

  static OperatorFamily heat(const SemigroupEvaluator& sg);
  static OperatorFamily grad_heat(const SemigroupEvaluator& sg);  // sqrt(t) grad e^{-tL}
  static OperatorFamily identity();
  // (T o S)_t = T_t S_t; S must be scalar valued.
  static OperatorFamily compose(const OperatorFamily& T, const OperatorFamily& S);
};

// L^p norms with the cell volume as measure, restricted to a cell list;
// p = +inf gives the maximum. Vector fields use the Euclidean modulus per cell.
double lp_norm(const PeriodicGrid& g, const VecField& u, const std::vector<long>& cells, double p);
// (int_cells |u|^p dw / norm)^{1/p}.
double weighted_lp_average(const VecField& u, const std::vector<long>& cells, const WeightField& w, double p,
                           double norm);

// Probe fields supported on `cells`: the indicator, three smooth modulations
// of it and random-sign fields, `count` in total.
std::vector<Field> probe_corpus(const PeriodicGrid& g, const std::vector<long>& cells, int count,
                                std::uint64_t seed);

struct ProbeOptions {
  int count = 32;          // including the ascent field when an adjoint exists
  int ascent_steps = 6;
  std::uint64_t seed = 1;
};

// Closed sets as unions of closed cells.
struct SetPair {
  std::vector<long> E;
  std::vector<long> F;
  double distance = 0.0;  // between the closed cell unions, periodic

  static SetPair make(const PeriodicGrid& g, std::vector<long> E, std::vector<long> F);
  // Cells with centre in [a0, a1) and [b0, b1) along axis 0 (all of axis 1).
  static SetPair slabs(const PeriodicGrid& g, double a0, double a1, double b0, double b1);
};

double set_distance(const PeriodicGrid& g, const std::vector<long>& E, const std::vector<long>& F);

struct OffDiagSample {
  std::string kind;  // "full", "diag", "B-B", "C-B", "B-C"
  Ball ball{};
  int j = 0;
  double t = 0.0;
  double distance = 0.0;  // d(E,F) for full samples, 2^j r for annular ones
  double lhs = 0.0;       // sup over probes of the left side, input norm set to 1
  double rhs_model = 0.0; // fitted bound
};

struct OffDiagReport {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double c = 0.0;         // Gaussian constant
  double constant = 0.0;  // multiplicative constant
  double residual = 0.0;  // max log(lhs / rhs_model); <= 0 when every sample holds
  double slope = 0.0;     // regression of log lhs (+ scaling) against d^2/t
  double r_squared = 0.0;
  int regression_points = 0;
  bool passed = false;
  std::vector<OffDiagSample> samples;
  std::string note;
};

struct OffDiagOptions {
  ProbeOptions probes{};
  double c_min = 1e-3;       // a Gaussian constant below this does not count as decay
  double theta_cap = 8.0;
  double floor = 1e-250;     // smaller left sides are treated as exact zeros
};

// Full off-diagonal estimates: fits the largest c for which every sample
// satisfies lhs <= C t^{-(n/p - n/q)/2} e^{-c d^2/t} with C the sampled
// supremum of the scaled left side. Each separated pair (E, F) also yields a
// diagonal sample (E, E), kind "diag", at every time.
// The verdict is c >= c_min; slope and R^2 of log lhs against d^2/t over the
// separated samples are diagnostics of the Gaussian shape.
OffDiagReport verify_full_offdiag(const PeriodicGrid& g, const OperatorFamily& T, double p, double q,
                                  const std::vector<SetPair>& sets,
                                  const std::vector<double>& times, const OffDiagOptions& opt = {});

// Off-diagonal estimates on balls with weighted averages. C is the supremum of
// the B-B ratios (dec >= 1 makes theta2 irrelevant there). On the C-B and B-C
// samples, treated symmetrically, (theta1, theta2) is the pair of least sum on
// a grid of step 1/8 for which some c >= c_min makes every sample hold, and c
// is the largest such value for that pair.
OffDiagReport verify_ball_offdiag(const OperatorFamily& T, double p, double q, const WeightField& w,
                                  const std::vector<Ball>& balls, const std::vector<double>& times,
                                  const OffDiagOptions& opt = {});

// ---------------------------------------------------------------------------
// Criteria

using LinearOp = std::function<Field(const Field&)>;
using ApproxFamily = std::function<Field(double r, const Field&)>;

// Annular ratios of one hypothesis, fitted by g(j) = G 2^{j kappa}.
struct HypothesisFit {
  std::string name;
  std::vector<int> j;
  std::vector<double> ratio;  // sup over balls and probes at each j
  double G = 0.0;
  double kappa = 0.0;
  double weighted_sum = 0.0;  // sum_{j>=1} g(j) 2^{D j}; +inf when not summable
  bool passed = false;
};

struct CriterionReport {
  std::vector<HypothesisFit> hypotheses;
  int total_checks = 0;       // undecomposed probes tested against the fitted g
  int violations = 0;
  double worst_violation = 0.0;  // max log(lhs / rhs) over the undecomposed probes
  int j_max = 0;
  bool passed = false;
  std::string note;
};

struct CriterionOptions {
  ProbeOptions probes{8, 0, 1};
  double kappa_max = -0.25;  // templates with kappa above this are not accepted as summable
};

// Strong criterion: (T(I - A_r)) against S through annular pieces of f, and
// T A_r against T f through annular pieces of h = T f (A_r must commute with T).
CriterionReport check_criterion_strong(const LinearOp& T, const ApproxFamily& A, const LinearOp& S, double p0,
                                       double q0, const WeightField& mu, const std::vector<Ball>& balls,
                                       const CriterionOptions& opt = {});

// Weak criterion: f supported in B, averages over C_j(B); the fitted g is
// summed against 2^{D j} with D the doubling order.
CriterionReport check_criterion_weak(const LinearOp& T, const ApproxFamily& A, double p0, double q0,
                                     const WeightField& mu, double doubling, const std::vector<Ball>& balls,
                                     const CriterionOptions& opt = {});

}  // namespace ellip
