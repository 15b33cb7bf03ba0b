#pragma once

// Lower-bound estimation of L^p(w) operator norms, (p, alpha, N) sweeps over
// power weights, the Meyers-Kenig witness and report rendering.

#include "ellip/exponents.hpp"
#include "ellip/singular.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ellip {

// (sum |u|^p w |cell|)^{1/p} with |u| the Euclidean modulus per cell.
double weighted_lp_norm(const PeriodicGrid& g, const VecField& u, const WeightField& w, double p);

// An operator with its unweighted L^2 adjoint (optional).
struct NormTarget {
  LinearMap T;
  std::function<Field(const VecField&)> adjoint;

  static NormTarget riesz(const SemigroupEvaluator& sg, const TimeQuadrature& tq);
  static NormTarget scaled_identity(double c);
  // Multiplies Fourier mode (k0, k1) of f by m(k0, k1); k in (-N/2, N/2].
  static NormTarget fourier_multiplier(const PeriodicGrid& g, std::function<cplx(int, int)> m);
};

struct NormBudget {
  int probes = 16;
  int max_iterations = 40;
  double stall_tol = 1e-4;  // relative change over stall_window iterations
  int stall_window = 5;
  std::uint64_t seed = 20240607;
};

struct NormEstimate {
  double value = 0.0;         // lower bound for ||T||_{L^p(w) -> L^p(w)}
  double probe_value = 0.0;   // best over the fixed corpus
  std::string method;         // "probe-corpus" or "duality-ascent"
  int iterations = 0;
  bool converged = false;
  std::uint64_t seed = 0;
};

// Fixed probe corpus: ball indicators and C^1 bumps at several scales around
// the origin (where power weights are singular) and a few other centres,
// then Gaussian random fields. Deterministic given the seed.
std::vector<Field> norm_probes(const PeriodicGrid& g, int count, std::uint64_t seed);

// Best probe ratio, then duality ascent from the best probe when an adjoint
// is available: f <- J^{-1}(T^* J(T f)) normalised, J(u) = |u|^{p-2} u w. The
// value never decreases as probes or iterations are added.
NormEstimate estimate_norm(const NormTarget& T, double p, const WeightField& w, const NormBudget& budget = {});

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepVerdict { inside_stable, outside_growing, boundary, failed };
const char* to_string(SweepVerdict v);

inline constexpr double kGrowthThreshold = 1.5;
inline constexpr double kStableThreshold = 1.1;

// Classifies the values of one (p, alpha) cell along the refinement list:
// growing when the last two ratios are >= 1.5, stable when they are <= 1.1,
// boundary otherwise. With a single ratio, that ratio decides alone.
SweepVerdict classify_refinement(const std::vector<double>& values);

struct SweepConfig {
  std::string operator_kind = "laplacian";  // laplacian | meyers-kenig
  int n = 2;
  double mk_q = 4.0;
  double krylov_tol = 1e-6;
  std::string transform = "riesz";
  std::vector<double> p_list{2.0};
  std::vector<double> alpha_list{0.0};
  std::vector<int> N_list{32, 64};
  NormBudget budget{};
  int threads = 1;
  std::string schedule = "forward";  // forward | reverse | shuffled
  // Declared exponents for the overlay. Unset: q_+ = inf for the Laplacian,
  // q_+ = mk_q for Meyers-Kenig, the other three trivial.
  std::optional<CriticalExponents> ce;

  CriticalExponents exponents() const;

  // Flat "key = value" text, '#' comments. Keys: operator, n, mk_q,
  // krylov_tol, transform, p, alpha, N (comma lists), probes, max_iterations,
  // stall_tol, seed, threads, schedule, p_minus, p_plus, q_minus, q_plus
  // (all four or none). Unknown keys and malformed values throw ParseError.
  static SweepConfig parse(const std::string& text);
  static SweepConfig load(const std::string& path);
  std::string canonical() const;  // sorted key = value lines
  std::uint64_t hash() const;     // FNV-1a of canonical()
};

std::uint64_t fnv1a(const std::string& s);

struct SweepCell {
  double p = 0.0;
  double alpha = 0.0;
  int N = 0;
  NormEstimate estimate;
  std::string error;
};

struct SweepPoint {
  double p = 0.0;
  double alpha = 0.0;
  std::vector<double> values;  // along N_list
  std::vector<double> ratios;
  SweepVerdict verdict = SweepVerdict::boundary;
  bool certified = false;      // inside the certified predicted range
};

struct SweepResult {
  SweepConfig config;
  std::vector<SweepCell> cells;    // index (ip * |alpha| + ia) * |N| + iN
  std::vector<SweepPoint> points;  // index ip * |alpha| + ia
  std::uint64_t config_hash = 0;

  const SweepCell& cell(std::size_t ip, std::size_t ia, std::size_t iN) const;
  const SweepPoint& point(std::size_t ip, std::size_t ia) const;
  // Points classified growing although strictly inside the certified range.
  std::vector<const SweepPoint*> inconsistencies() const;
};

using OperatorBuilder = std::function<std::shared_ptr<const EllipticOperator>(const PeriodicGrid&)>;
OperatorBuilder operator_builder(const SweepConfig& config);

// Builds the operator per N, runs every cell (in the configured schedule,
// on `threads` workers) and classifies each (p, alpha) point. Cell failures
// are recorded and the sweep continues.
SweepResult sweep(const SweepConfig& config);
SweepResult sweep(const SweepConfig& config, const OperatorBuilder& build);
// Recomputes the points from the cell table.
void classify(SweepResult& r);

// ---------------------------------------------------------------------------
// Meyers-Kenig witness

struct WitnessRow {
  int N = 0;
  double p = 0.0;
  double grad_norm = 0.0;  // ||grad v||_p
  double sqrt_norm = 0.0;  // ||L^{1/2} v||_p
};

struct WitnessReport {
  double q = 0.0;
  double beta = 0.0;
  std::vector<WitnessRow> rows;  // for each p, along N
  // Per p: ratios along the refinement list and the limiting ratio of the
  // radial integral, 2^{(p|beta| - 2)/p} for p > q and 1 otherwise.
  std::map<double, std::vector<double>> grad_ratios;
  std::map<double, std::vector<double>> sqrt_ratios;
  std::map<double, double> oracle_ratio;
  std::map<double, bool> grad_growing;  // every ratio > 1 and increasing norms
  std::map<double, bool> sqrt_stable;   // every ratio in [0.9, 1.1]
  double correction_residual = 0.0;     // relative CG residual of the harmonic correction
  std::string note;
};

// v = cutoff(|x|) x_0 |x|^beta with beta = -2/q, corrected near the origin so
// the discrete L v vanishes where the coefficients are pure Meyers-Kenig:
// v <- v - L^{-1}(chi_{|x| < 1/10} L v).
Field witness_field(const EllipticOperator& L, double q, double* residual = nullptr);
WitnessReport witness_check(double q, const std::vector<double>& p_list, const std::vector<int>& N_list);

// Conjugate gradients for the real symmetric L on mean-zero fields.
Field solve_mean_zero(const EllipticOperator& L, const Field& rhs, double tol = 1e-10, int max_iter = 20000,
                      double* residual = nullptr);

// ---------------------------------------------------------------------------
// Reports

void write_sweep_csv(std::ostream& os, const SweepResult& r);
// (p, alpha) plane: one marker per point coloured by verdict, with the
// certified range n(p/q_+ - 1) < alpha < n(p - 1), 1 < p < q_+ shaded.
void write_sweep_svg(std::ostream& os, const SweepResult& r, int n = 2);
// Reads the CSV written above back into cells (config fields other than the
// axes are left at defaults).
SweepResult read_sweep_csv(std::istream& is);

}  // namespace ellip
