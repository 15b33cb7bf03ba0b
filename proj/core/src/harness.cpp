#include "ellip/harness.hpp"

#include "ellip/error.hpp"
#include "ellip/fields.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace ellip {

namespace {

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double row_norm(const VecField& u, long i) {
  double s = 0.0;
  for (long c = 0; c < u.cols(); ++c) s += std::norm(u(i, c));
  return std::sqrt(s);
}

Field gaussian_field(const PeriodicGrid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Field f(g.size());
  for (long i = 0; i < g.size(); ++i) f[i] = nd(rng);
  return f;
}

// In-place DFT along every axis of a row-major grid field.
void fft_grid(const PeriodicGrid& g, Field& f, bool inverse) {
  const int N = g.cells_per_axis();
  Eigen::FFT<double> fft;
  std::vector<cplx> in(N), out(N);
  auto line = [&](long start, long stride) {
    for (int j = 0; j < N; ++j) in[j] = f[start + j * stride];
    if (inverse)
      fft.inv(out, in);
    else
      fft.fwd(out, in);
    for (int j = 0; j < N; ++j) f[start + j * stride] = out[j];
  };
  if (g.dim() == 1) {
    line(0, 1);
    return;
  }
  for (int i = 0; i < N; ++i) line(static_cast<long>(i) * N, 1);
  for (int i = 0; i < N; ++i) line(i, N);
}

}  // namespace

double weighted_lp_norm(const PeriodicGrid& g, const VecField& u, const WeightField& w, double p) {
  double s = 0.0;
  for (long i = 0; i < u.rows(); ++i) s += std::pow(row_norm(u, i), p) * w[i];
  return std::pow(s * g.cell_volume(), 1.0 / p);
}

// ---------------------------------------------------------------------------
// Targets

NormTarget NormTarget::riesz(const SemigroupEvaluator& sg, const TimeQuadrature& tq) {
  NormTarget t;
  t.T = LinearMap::riesz(sg, tq);
  t.adjoint = [&sg, tq](const VecField& v) { return riesz_adjoint_apply(sg, v, tq); };
  return t;
}

NormTarget NormTarget::scaled_identity(double c) {
  NormTarget t;
  t.T = LinearMap::scalar("scaled-identity", [c](const Field& f) { return Field(c * f); });
  t.adjoint = [c](const VecField& v) { return Field(c * v.col(0)); };
  return t;
}

NormTarget NormTarget::fourier_multiplier(const PeriodicGrid& g, std::function<cplx(int, int)> m) {
  const int N = g.cells_per_axis();
  Field symbol(g.size());
  auto wave = [N](int j) { return j <= N / 2 ? j : j - N; };
  for (long idx = 0; idx < g.size(); ++idx) {
    auto mi = g.multi_index(idx);
    symbol[idx] = g.dim() == 1 ? m(wave(mi[0]), 0) : m(wave(mi[0]), wave(mi[1]));
  }
  auto apply = [g, symbol](const Field& f, bool conj) {
    Field x = f;
    fft_grid(g, x, false);
    for (long i = 0; i < x.size(); ++i) x[i] *= conj ? std::conj(symbol[i]) : symbol[i];
    fft_grid(g, x, true);
    return x;
  };
  NormTarget t;
  t.T = LinearMap::scalar("fourier-multiplier", [apply](const Field& f) { return apply(f, false); });
  t.adjoint = [apply](const VecField& v) { return apply(v.col(0), true); };
  return t;
}

// ---------------------------------------------------------------------------
// Estimation

std::vector<Field> norm_probes(const PeriodicGrid& g, int count, std::uint64_t seed) {
  enum Kind { ind, bmp, gauss, smooth };
  struct Spec {
    Kind kind;
    bool origin;
    double radius;  // negative: multiple of h
  };
  const double h = g.h();
  static const Spec structured[] = {
      {ind, true, -2},       {bmp, true, 1.0 / 8},   {gauss, false, 0},     {ind, true, 1.0 / 8},
      {bmp, true, -6},       {smooth, false, 0},     {ind, false, 1.0 / 16}, {bmp, false, 1.0 / 4},
      {ind, true, 1.0 / 32}, {bmp, true, 1.0 / 4},   {gauss, false, 0},     {ind, false, -4},
      {bmp, true, 1.0 / 32}, {smooth, false, 0},     {ind, true, 1.0 / 4},  {bmp, false, 1.0 / 16},
  };
  const Point origin{0.0, 0.0};
  const Point other = g.dim() == 1 ? Point{0.3125, 0.0} : Point{0.3125, -0.1875};
  std::vector<Field> out;
  std::uint64_t next_seed = seed;
  for (int k = 0; k < count; ++k) {
    constexpr int ns = static_cast<int>(std::size(structured));
    Spec s = k < ns ? structured[k] : Spec{(k - ns) % 2 == 0 ? gauss : smooth, false, 0};
    double r = s.radius < 0 ? -s.radius * h : std::max(s.radius, 2.0 * h);
    Ball b{s.origin ? origin : other, r};
    switch (s.kind) {
      case ind: out.push_back(indicator(g, b)); break;
      case bmp: out.push_back(bump(g, b)); break;
      case gauss: out.push_back(gaussian_field(g, next_seed++)); break;
      case smooth: out.push_back(random_smooth_field(g, next_seed++, 2 + 2 * (k % 3))); break;
    }
  }
  return out;
}

NormEstimate estimate_norm(const NormTarget& T, double p, const WeightField& w, const NormBudget& budget) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("estimate_norm: requires 1 < p < inf");
  if (budget.probes < 1) throw DomainError("estimate_norm: needs at least one probe");
  const PeriodicGrid& g = w.grid();
  NormEstimate est;
  est.seed = budget.seed;
  est.method = "probe-corpus";

  VecField best_u;
  double best = -1.0;
  for (const Field& f : norm_probes(g, budget.probes, budget.seed)) {
    double nf = weighted_lp_norm(g, f, w, p);
    if (!(nf > 0.0) || !std::isfinite(nf)) continue;
    VecField u = T.T(f);
    double r = weighted_lp_norm(g, u, w, p) / nf;
    if (std::isfinite(r) && r > best) {
      best = r;
      best_u = u / nf;
    }
  }
  if (best < 0.0) throw ConvergenceError("estimate_norm: every probe produced a non-finite ratio");
  est.value = est.probe_value = best;
  est.converged = true;
  if (!T.adjoint || budget.max_iterations <= 0 || best == 0.0) return est;

  est.method = "duality-ascent";
  est.converged = false;
  const double pc = p / (p - 1.0);
  std::vector<double> history{best};
  VecField u = best_u;
  double val = best;
  for (int it = 1; it <= budget.max_iterations; ++it) {
    // J(u / |u|_p): unit-size entries keep large p from overflowing.
    VecField J(u.rows(), u.cols());
    for (long i = 0; i < u.rows(); ++i) {
      double a = row_norm(u, i) / val;
      double s = a > 0.0 ? std::pow(a, p - 2.0) * w[i] / val : 0.0;
      J.row(i) = s * u.row(i);
    }
    Field v = T.adjoint(J);
    double vmax = v.cwiseAbs().maxCoeff();
    if (!(vmax > 0.0) || !std::isfinite(vmax)) break;
    Field f(v.size());
    for (long i = 0; i < v.size(); ++i) {
      double a = std::abs(v[i]) / vmax;
      f[i] = a > 0.0 ? std::pow(a / w[i], pc - 1.0) * (v[i] / std::abs(v[i])) : cplx(0.0);
    }
    double nf = weighted_lp_norm(g, f, w, p);
    if (!(nf > 0.0) || !std::isfinite(nf)) break;
    f /= nf;
    u = T.T(f);
    val = weighted_lp_norm(g, u, w, p);
    est.iterations = it;
    if (!std::isfinite(val) || val == 0.0) break;
    est.value = std::max(est.value, val);
    history.push_back(val);
    const std::size_t k = history.size() - 1;
    if (k >= static_cast<std::size_t>(budget.stall_window) &&
        std::abs(val - history[k - budget.stall_window]) <= budget.stall_tol * val) {
      est.converged = true;
      break;
    }
  }
  return est;
}

// ---------------------------------------------------------------------------
// Sweeps

const char* to_string(SweepVerdict v) {
  switch (v) {
    case SweepVerdict::inside_stable: return "inside-stable";
    case SweepVerdict::outside_growing: return "outside-growing";
    case SweepVerdict::boundary: return "boundary";
    case SweepVerdict::failed: return "failed";
  }
  return "?";
}

SweepVerdict classify_refinement(const std::vector<double>& values) {
  for (double v : values)
    if (!std::isfinite(v) || !(v > 0.0)) return SweepVerdict::failed;
  if (values.size() < 2) return SweepVerdict::boundary;
  const std::size_t first = values.size() >= 3 ? values.size() - 3 : 0;
  bool grow = true, stable = true;
  for (std::size_t i = first; i + 1 < values.size(); ++i) {
    double r = values[i + 1] / values[i];
    grow = grow && r >= kGrowthThreshold;
    stable = stable && r <= kStableThreshold;
  }
  if (grow) return SweepVerdict::outside_growing;
  if (stable) return SweepVerdict::inside_stable;
  return SweepVerdict::boundary;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

CriticalExponents SweepConfig::exponents() const {
  if (ce) return *ce;
  CriticalExponents e;
  if (operator_kind == "meyers-kenig") e.q_plus = ExponentValue::from_double(mk_q);
  return e;
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  if (v == "inf") return HUGE_VAL;
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ParseError("config: key '" + key + "': not a number: '" + v + "'");
}

long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long d = std::stol(v, &pos);
    if (pos == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ParseError("config: key '" + key + "': not an integer: '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    if constexpr (std::is_same_v<T, double>)
      s += fmt(v[i]);
    else
      s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

SweepConfig SweepConfig::parse(const std::string& text) {
  SweepConfig c;
  std::map<std::string, std::string> ex;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  std::set<std::string> seen;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("config: line " + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ParseError("config: duplicate key '" + key + "'");
    if (key == "operator") {
      if (val != "laplacian" && val != "meyers-kenig")
        throw ParseError("config: operator must be laplacian or meyers-kenig");
      c.operator_kind = val;
    } else if (key == "n") {
      c.n = static_cast<int>(parse_int(key, val));
    } else if (key == "mk_q") {
      c.mk_q = parse_double(key, val);
    } else if (key == "krylov_tol") {
      c.krylov_tol = parse_double(key, val);
    } else if (key == "transform") {
      if (val != "riesz") throw ParseError("config: transform must be riesz");
      c.transform = val;
    } else if (key == "p" || key == "alpha") {
      std::vector<double> v;
      for (const auto& s : split_list(val)) v.push_back(parse_double(key, s));
      (key == "p" ? c.p_list : c.alpha_list) = v;
    } else if (key == "N") {
      c.N_list.clear();
      for (const auto& s : split_list(val)) c.N_list.push_back(static_cast<int>(parse_int(key, s)));
    } else if (key == "probes") {
      c.budget.probes = static_cast<int>(parse_int(key, val));
    } else if (key == "max_iterations") {
      c.budget.max_iterations = static_cast<int>(parse_int(key, val));
    } else if (key == "stall_tol") {
      c.budget.stall_tol = parse_double(key, val);
    } else if (key == "seed") {
      try {
        c.budget.seed = std::stoull(val);
      } catch (const std::exception&) {
        throw ParseError("config: key 'seed': not an unsigned integer: '" + val + "'");
      }
    } else if (key == "threads") {
      c.threads = static_cast<int>(parse_int(key, val));
    } else if (key == "schedule") {
      if (val != "forward" && val != "reverse" && val != "shuffled")
        throw ParseError("config: schedule must be forward, reverse or shuffled");
      c.schedule = val;
    } else if (key == "p_minus" || key == "p_plus" || key == "q_minus" || key == "q_plus") {
      ex[key] = val;
    } else {
      throw ParseError("config: unknown key '" + key + "'");
    }
  }
  if (!ex.empty()) {
    if (ex.size() != 4) throw ParseError("config: give all of p_minus, p_plus, q_minus, q_plus or none");
    try {
      CriticalExponents e;
      e.p_minus = ExponentValue::parse(ex["p_minus"]);
      e.p_plus = ExponentValue::parse(ex["p_plus"]);
      e.q_minus = ExponentValue::parse(ex["q_minus"]);
      e.q_plus = ExponentValue::parse(ex["q_plus"]);
      c.ce = e;
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& err) {
      throw ParseError(std::string("config: critical exponents: ") + err.what());
    }
  }
  if (c.n != 1 && c.n != 2) throw ParseError("config: n must be 1 or 2");
  if (c.operator_kind == "meyers-kenig" && c.n != 2) throw ParseError("config: meyers-kenig requires n = 2");
  if (c.p_list.empty() || c.alpha_list.empty() || c.N_list.empty()) throw ParseError("config: empty axis");
  if (c.threads < 1) throw ParseError("config: threads must be >= 1");
  if (c.budget.probes < 1) throw ParseError("config: probes must be >= 1");
  return c;
}

SweepConfig SweepConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string SweepConfig::canonical() const {
  std::map<std::string, std::string> kv{
      {"operator", operator_kind},
      {"n", std::to_string(n)},
      {"mk_q", fmt(mk_q)},
      {"krylov_tol", fmt(krylov_tol)},
      {"transform", transform},
      {"p", join(p_list)},
      {"alpha", join(alpha_list)},
      {"N", join(N_list)},
      {"probes", std::to_string(budget.probes)},
      {"max_iterations", std::to_string(budget.max_iterations)},
      {"stall_tol", fmt(budget.stall_tol)},
      {"seed", std::to_string(budget.seed)},
  };
  // threads and schedule do not change results and stay out of the hash.
  if (ce) {
    kv["p_minus"] = ce->p_minus.to_string();
    kv["p_plus"] = ce->p_plus.to_string();
    kv["q_minus"] = ce->q_minus.to_string();
    kv["q_plus"] = ce->q_plus.to_string();
  }
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t SweepConfig::hash() const { return fnv1a(canonical()); }

OperatorBuilder operator_builder(const SweepConfig& config) {
  if (config.operator_kind == "meyers-kenig") {
    double q = config.mk_q;
    return [q](const PeriodicGrid& g) {
      return std::make_shared<const EllipticOperator>(EllipticOperator::assemble(meyers_kenig(q, g)));
    };
  }
  return [](const PeriodicGrid& g) {
    return std::make_shared<const EllipticOperator>(EllipticOperator::assemble(CoefficientField::identity(g)));
  };
}

const SweepCell& SweepResult::cell(std::size_t ip, std::size_t ia, std::size_t iN) const {
  const std::size_t na = config.alpha_list.size(), nN = config.N_list.size();
  return cells.at((ip * na + ia) * nN + iN);
}

const SweepPoint& SweepResult::point(std::size_t ip, std::size_t ia) const {
  return points.at(ip * config.alpha_list.size() + ia);
}

std::vector<const SweepPoint*> SweepResult::inconsistencies() const {
  std::vector<const SweepPoint*> out;
  for (const auto& pt : points)
    if (pt.certified && pt.verdict == SweepVerdict::outside_growing) out.push_back(&pt);
  return out;
}

void classify(SweepResult& r) {
  const auto& c = r.config;
  const CriticalExponents ce = c.exponents();
  r.points.clear();
  for (std::size_t ip = 0; ip < c.p_list.size(); ++ip)
    for (std::size_t ia = 0; ia < c.alpha_list.size(); ++ia) {
      SweepPoint pt;
      pt.p = c.p_list[ip];
      pt.alpha = c.alpha_list[ia];
      for (std::size_t iN = 0; iN < c.N_list.size(); ++iN) {
        const SweepCell& cell = r.cell(ip, ia, iN);
        pt.values.push_back(cell.error.empty() ? cell.estimate.value : std::nan(""));
      }
      for (std::size_t i = 0; i + 1 < pt.values.size(); ++i) pt.ratios.push_back(pt.values[i + 1] / pt.values[i]);
      pt.verdict = classify_refinement(pt.values);
      pt.certified = power_weight_riesz_certified(pt.p, pt.alpha, c.n, ce.q_plus);
      r.points.push_back(std::move(pt));
    }
}

SweepResult sweep(const SweepConfig& config) { return sweep(config, operator_builder(config)); }

SweepResult sweep(const SweepConfig& config, const OperatorBuilder& build) {
  if (config.p_list.empty() || config.alpha_list.empty() || config.N_list.empty())
    throw DomainError("sweep: empty axis");
  if (config.transform != "riesz") throw DomainError("sweep: unsupported transform " + config.transform);
  SweepResult r;
  r.config = config;
  r.config_hash = config.hash();
  const std::size_t np = config.p_list.size(), na = config.alpha_list.size(), nN = config.N_list.size();
  r.cells.resize(np * na * nN);

  // Per-resolution operators and evaluators, shared read-only by the workers.
  struct Level {
    std::unique_ptr<SemigroupEvaluator> sg;
    TimeQuadrature tq;
    std::string error;
  };
  std::vector<Level> levels(nN);
  SemigroupOptions so;
  so.krylov_tol = config.krylov_tol;
  for (std::size_t iN = 0; iN < nN; ++iN) {
    try {
      auto op = build(PeriodicGrid(config.n, config.N_list[iN]));
      levels[iN].sg = std::make_unique<SemigroupEvaluator>(op, so);
      levels[iN].tq = TimeQuadrature::for_operator(*op, TimeMeasure::inv_sqrt);
    } catch (const std::exception& e) {
      levels[iN].error = e.what();
    }
  }

  std::vector<std::size_t> order(r.cells.size());
  std::iota(order.begin(), order.end(), 0);
  if (config.schedule == "reverse")
    std::reverse(order.begin(), order.end());
  else if (config.schedule == "shuffled")
    std::shuffle(order.begin(), order.end(), std::mt19937_64(config.budget.seed));

  auto run = [&](std::size_t idx) {
    const std::size_t iN = idx % nN, ia = (idx / nN) % na, ip = idx / (nN * na);
    SweepCell& cell = r.cells[idx];
    cell.p = config.p_list[ip];
    cell.alpha = config.alpha_list[ia];
    cell.N = config.N_list[iN];
    const Level& lv = levels[iN];
    if (!lv.error.empty()) {
      cell.error = lv.error;
      return;
    }
    try {
      const PeriodicGrid& g = lv.sg->op().grid();
      WeightField w = cell.alpha == 0.0 ? WeightField::unweighted(g) : WeightField::power(g, cell.alpha);
      cell.estimate = estimate_norm(NormTarget::riesz(*lv.sg, lv.tq), cell.p, w, config.budget);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < order.size();) run(order[k]);
  };
  const int nt = std::max(1, std::min<int>(config.threads, static_cast<int>(order.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  classify(r);
  return r;
}

// ---------------------------------------------------------------------------
// Witness

Field solve_mean_zero(const EllipticOperator& L, const Field& rhs, double tol, int max_iter, double* residual) {
  if (!L.is_real() || !L.is_hermitian()) throw DomainError("solve_mean_zero: requires real symmetric coefficients");
  if (rhs.imag().cwiseAbs().maxCoeff() > 0.0) throw DomainError("solve_mean_zero: requires a real right-hand side");
  const long n = rhs.size();
  Eigen::VectorXd b = rhs.real();
  b.array() -= b.mean();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n), r = b, d = r, Ad(n);
  const double bn = b.norm();
  double rr = r.squaredNorm();
  double rel = 0.0;
  if (bn > 0.0) {
    rel = 1.0;
    for (int it = 0; it < max_iter && rel > tol; ++it) {
      L.apply(d.data(), Ad.data());
      double a = rr / d.dot(Ad);
      x += a * d;
      r -= a * Ad;
      r.array() -= r.mean();
      double rr_new = r.squaredNorm();
      d = r + (rr_new / rr) * d;
      rr = rr_new;
      rel = std::sqrt(rr) / bn;
    }
    if (rel > tol) {
      std::ostringstream os;
      os << "solve_mean_zero: relative residual " << rel << " after " << max_iter << " iterations";
      throw ConvergenceError(os.str());
    }
  }
  if (residual) *residual = rel;
  x.array() -= x.mean();
  return x.cast<cplx>();
}

Field witness_field(const EllipticOperator& L, double q, double* residual) {
  const PeriodicGrid& g = L.grid();
  if (g.dim() != 2) throw DomainError("witness_field: requires n = 2");
  if (!(q > 2.0)) throw DomainError("witness_field: requires q > 2");
  const double beta = -2.0 / q;
  Field v = sample_complex(g, [beta](const Point& x) {
    double r = std::hypot(x[0], x[1]);
    return cplx(mk_cutoff(r) * x[0] * std::pow(r, beta), 0.0);
  });
  Field Lv = L.apply(v);
  Field rhs = Field::Zero(g.size());
  for (long i = 0; i < g.size(); ++i)
    if (g.radius(i) < 0.1) rhs[i] = Lv[i];
  v -= solve_mean_zero(L, rhs, 1e-10, 50000, residual);
  return v;
}

WitnessReport witness_check(double q, const std::vector<double>& p_list, const std::vector<int>& N_list) {
  if (!(q > 2.0)) throw DomainError("witness_check: requires q > 2");
  WitnessReport rep;
  rep.q = q;
  rep.beta = -2.0 / q;
  std::map<double, std::vector<WitnessRow>> by_p;
  for (int N : N_list) {
    PeriodicGrid g(2, N);
    auto op = std::make_shared<const EllipticOperator>(EllipticOperator::assemble(meyers_kenig(q, g)));
    double res = 0.0;
    Field v = witness_field(*op, q, &res);
    rep.correction_residual = std::max(rep.correction_residual, res);
    SemigroupEvaluator sg(op);
    Field s = sqrt_apply(sg, v).value;
    VecField grad = op->gradient(v);
    WeightField one = WeightField::unweighted(g);
    for (double p : p_list) {
      WitnessRow row{N, p, weighted_lp_norm(g, grad, one, p), weighted_lp_norm(g, s, one, p)};
      rep.rows.push_back(row);
      by_p[p].push_back(row);
    }
  }
  std::ostringstream note;
  for (const auto& [p, rows] : by_p) {
    auto& gr = rep.grad_ratios[p];
    auto& sr = rep.sqrt_ratios[p];
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      gr.push_back(rows[i + 1].grad_norm / rows[i].grad_norm);
      sr.push_back(rows[i + 1].sqrt_norm / rows[i].sqrt_norm);
    }
    rep.oracle_ratio[p] = p > q ? std::pow(2.0, (p * std::abs(rep.beta) - 2.0) / p) : 1.0;
    rep.grad_growing[p] = !gr.empty() && std::all_of(gr.begin(), gr.end(), [](double x) { return x > 1.0; });
    rep.sqrt_stable[p] =
        !sr.empty() && std::all_of(sr.begin(), sr.end(), [](double x) { return x >= 0.9 && x <= 1.1; });
    note << "p=" << fmt(p) << ": grad " << (rep.grad_growing[p] ? "growing" : "not growing") << ", sqrt "
         << (rep.sqrt_stable[p] ? "stable" : "not stable") << "; ";
  }
  rep.note = note.str();
  return rep;
}

// ---------------------------------------------------------------------------
// Reports

void write_sweep_csv(std::ostream& os, const SweepResult& r) {
  os << "p,alpha,N,value,probe_value,method,iterations,converged,seed,verdict,certified,error\n";
  const auto& c = r.config;
  for (std::size_t ip = 0; ip < c.p_list.size(); ++ip)
    for (std::size_t ia = 0; ia < c.alpha_list.size(); ++ia) {
      const SweepPoint* pt = r.points.empty() ? nullptr : &r.point(ip, ia);
      for (std::size_t iN = 0; iN < c.N_list.size(); ++iN) {
        const SweepCell& cell = r.cell(ip, ia, iN);
        std::string err = cell.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        os << fmt(cell.p) << ',' << fmt(cell.alpha) << ',' << cell.N << ',' << fmt(cell.estimate.value) << ','
           << fmt(cell.estimate.probe_value) << ',' << cell.estimate.method << ',' << cell.estimate.iterations << ','
           << (cell.estimate.converged ? 1 : 0) << ',' << cell.estimate.seed << ','
           << (pt ? to_string(pt->verdict) : "") << ',' << (pt && pt->certified ? 1 : 0) << ',' << err << '\n';
      }
    }
}

SweepResult read_sweep_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("p,alpha,N,value", 0) != 0)
    throw ParseError("sweep csv: missing header");
  struct Row {
    double p, alpha;
    int N;
    NormEstimate e;
    std::string error;
  };
  std::vector<Row> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (f.size() == 11) f.emplace_back();
    if (f.size() != 12) throw ParseError("sweep csv: line " + std::to_string(lineno) + ": expected 12 fields");
    Row r;
    r.p = parse_double("p", f[0]);
    r.alpha = parse_double("alpha", f[1]);
    r.N = static_cast<int>(parse_int("N", f[2]));
    r.e.value = f[3] == "nan" ? std::nan("") : parse_double("value", f[3]);
    r.e.probe_value = f[4] == "nan" ? std::nan("") : parse_double("probe_value", f[4]);
    r.e.method = f[5];
    r.e.iterations = static_cast<int>(parse_int("iterations", f[6]));
    r.e.converged = f[7] == "1";
    r.e.seed = std::stoull(f[8]);
    r.error = f[11];
    rows.push_back(std::move(r));
  }
  SweepResult out;
  auto& c = out.config;
  c.p_list.clear();
  c.alpha_list.clear();
  c.N_list.clear();
  for (const auto& r : rows) {
    if (std::find(c.p_list.begin(), c.p_list.end(), r.p) == c.p_list.end()) c.p_list.push_back(r.p);
    if (std::find(c.alpha_list.begin(), c.alpha_list.end(), r.alpha) == c.alpha_list.end())
      c.alpha_list.push_back(r.alpha);
    if (std::find(c.N_list.begin(), c.N_list.end(), r.N) == c.N_list.end()) c.N_list.push_back(r.N);
  }
  if (rows.size() != c.p_list.size() * c.alpha_list.size() * c.N_list.size())
    throw ParseError("sweep csv: rows do not form a full (p, alpha, N) table");
  out.cells.resize(rows.size());
  std::vector<bool> filled(rows.size(), false);
  for (const auto& r : rows) {
    std::size_t ip = std::find(c.p_list.begin(), c.p_list.end(), r.p) - c.p_list.begin();
    std::size_t ia = std::find(c.alpha_list.begin(), c.alpha_list.end(), r.alpha) - c.alpha_list.begin();
    std::size_t iN = std::find(c.N_list.begin(), c.N_list.end(), r.N) - c.N_list.begin();
    std::size_t idx = (ip * c.alpha_list.size() + ia) * c.N_list.size() + iN;
    if (filled[idx]) throw ParseError("sweep csv: duplicate cell");
    filled[idx] = true;
    out.cells[idx] = SweepCell{r.p, r.alpha, r.N, r.e, r.error};
  }
  if (!rows.empty()) c.budget.seed = rows.front().e.seed;
  out.config_hash = c.hash();
  classify(out);
  return out;
}

void write_sweep_svg(std::ostream& os, const SweepResult& r, int n) {
  const auto& c = r.config;
  const double W = 640, H = 480, ml = 70, mr = 170, mt = 30, mb = 60;
  double pmin = *std::min_element(c.p_list.begin(), c.p_list.end());
  double pmax = *std::max_element(c.p_list.begin(), c.p_list.end());
  double amin = *std::min_element(c.alpha_list.begin(), c.alpha_list.end());
  double amax = *std::max_element(c.alpha_list.begin(), c.alpha_list.end());
  pmin = std::min(pmin, 1.0);
  double pspan = std::max(pmax - pmin, 1.0), aspan = std::max(amax - amin, 1.0);
  pmin -= 0.08 * pspan;
  pmax += 0.08 * pspan;
  amin -= 0.08 * aspan;
  amax += 0.08 * aspan;
  auto X = [&](double p) { return ml + (p - pmin) / (pmax - pmin) * (W - ml - mr); };
  auto Y = [&](double a) { return H - mb - (a - amin) / (amax - amin) * (H - mt - mb); };

  os << std::setprecision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<clipPath id=\"plot\"><rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\""
     << H - mt - mb << "\"/></clipPath>\n";

  // Certified range: 1 < p < q_+, n(p/q_+ - 1) < alpha < n(p - 1).
  const ExponentValue qp = c.exponents().q_plus;
  const double pe = qp.is_infinite() ? pmax : std::min(qp.to_double(), pmax);
  auto lower = [&](double p) { return qp.is_infinite() ? -static_cast<double>(n) : n * (p / qp.to_double() - 1.0); };
  if (pe > 1.0) {
    os << "<polygon clip-path=\"url(#plot)\" fill=\"#cfe3f7\" stroke=\"#6a9fd4\" points=\"" << X(1.0) << ','
       << Y(lower(1.0)) << ' ' << X(pe) << ',' << Y(lower(pe)) << ' ' << X(pe) << ',' << Y(n * (pe - 1.0)) << ' '
       << X(1.0) << ',' << Y(0.0) << "\"/>\n";
  }
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\"" << H - mt - mb
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double p : c.p_list)
    os << "<text x=\"" << X(p) << "\" y=\"" << H - mb + 18 << "\" text-anchor=\"middle\">" << fmt(p) << "</text>\n";
  for (double a : c.alpha_list)
    os << "<text x=\"" << ml - 8 << "\" y=\"" << Y(a) + 4 << "\" text-anchor=\"end\">" << fmt(a) << "</text>\n";
  os << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">p</text>\n";
  os << "<text x=\"20\" y=\"" << (mt + H - mb) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
     << (mt + H - mb) / 2 << ")\">alpha</text>\n";

  auto colour = [](SweepVerdict v) {
    switch (v) {
      case SweepVerdict::inside_stable: return "#2e8b57";
      case SweepVerdict::outside_growing: return "#c0392b";
      case SweepVerdict::boundary: return "#e69f00";
      case SweepVerdict::failed: return "#888888";
    }
    return "#000000";
  };
  for (const auto& pt : r.points)
    os << "<circle cx=\"" << X(pt.p) << "\" cy=\"" << Y(pt.alpha) << "\" r=\"6\" fill=\"" << colour(pt.verdict)
       << "\" stroke=\"black\"><title>p=" << fmt(pt.p) << " alpha=" << fmt(pt.alpha) << ' ' << to_string(pt.verdict)
       << "</title></circle>\n";

  const double lx = W - mr + 15;
  double ly = mt + 10;
  for (SweepVerdict v : {SweepVerdict::inside_stable, SweepVerdict::outside_growing, SweepVerdict::boundary,
                         SweepVerdict::failed}) {
    os << "<circle cx=\"" << lx << "\" cy=\"" << ly << "\" r=\"6\" fill=\"" << colour(v) << "\" stroke=\"black\"/>"
       << "<text x=\"" << lx + 12 << "\" y=\"" << ly + 4 << "\">" << to_string(v) << "</text>\n";
    ly += 20;
  }
  os << "<rect x=\"" << lx - 6 << "\" y=\"" << ly - 6 << "\" width=\"12\" height=\"12\" fill=\"#cfe3f7\" "
     << "stroke=\"#6a9fd4\"/><text x=\"" << lx + 12 << "\" y=\"" << ly + 4 << "\">certified range</text>\n";
  os << "<text x=\"" << lx - 6 << "\" y=\"" << ly + 24 << "\">q+ = " << qp.to_string() << "</text>\n";
  os << "</svg>\n";
}

}  // namespace ellip
