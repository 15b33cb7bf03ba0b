#include "ellip/czd.hpp"

#include "ellip/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ellip {

namespace {

int log2_exact(int N) {
  int k = 0;
  while ((1 << k) < N) ++k;
  return k;
}

RealField gradient_modulus(const PeriodicGrid& g, const Field& f) {
  return forward_gradient(g, f).cwiseAbs2().rowwise().sum().cwiseSqrt();
}

// Calls fn(idx) for the cells of the cube with lower corner (i0, i1), side s,
// wrapping periodically.
template <class Fn>
void for_cube_cells(const PeriodicGrid& g, int i0, int i1, int s, Fn&& fn) {
  if (g.dim() == 1) {
    for (int a = 0; a < s; ++a) fn(g.index(i0 + a));
    return;
  }
  for (int a = 0; a < s; ++a)
    for (int b = 0; b < s; ++b) fn(g.index(i0 + a, i1 + b));
}

}  // namespace

VecField forward_gradient(const PeriodicGrid& g, const Field& f) {
  if (f.size() != g.size()) throw DomainError("forward_gradient: field size does not match the grid");
  const int n = g.dim();
  const double inv_h = 1.0 / g.h();
  VecField out(g.size(), n);
  for (long i = 0; i < g.size(); ++i)
    for (int d = 0; d < n; ++d) out(i, d) = (f[g.shift(i, d, 1)] - f[i]) * inv_h;
  return out;
}

RealField dyadic_maximal(const WeightField& w, const RealField& u, int max_level) {
  const PeriodicGrid& g = w.grid();
  const int N = g.cells_per_axis();
  if (u.size() != g.size()) throw DomainError("dyadic_maximal: field size does not match the grid");
  if (max_level < 0 || (1 << max_level) > N) throw DomainError("dyadic_maximal: level out of range");
  RealField M = RealField::Zero(g.size());
  const int n = g.dim();
  for (int k = 0; k <= max_level; ++k) {
    const int s = 1 << k;
    const int cubes = N / s;
    for (int a = 0; a < cubes; ++a)
      for (int b = 0; b < (n == 1 ? 1 : cubes); ++b) {
        double num = 0.0, den = 0.0;
        for_cube_cells(g, a * s, b * s, s, [&](long i) {
          num += u[i] * w[i];
          den += w[i];
        });
        if (!(den > 0.0)) continue;
        const double avg = num / den;
        for_cube_cells(g, a * s, b * s, s, [&](long i) { M[i] = std::max(M[i], avg); });
      }
  }
  return M;
}

Point DyadicCube::center(const PeriodicGrid& g) const {
  const double s = side_cells();
  Point c{-0.5 + (i0 + 0.5 * s) * g.h(), 0.0};
  if (g.dim() == 2) c[1] = -0.5 + (i1 + 0.5 * s) * g.h();
  return c;
}

std::vector<DyadicCube> whitney_cubes(const PeriodicGrid& g, const std::vector<bool>& omega, int max_level) {
  const int N = g.cells_per_axis();
  const int n = g.dim();
  if (static_cast<long>(omega.size()) != g.size()) throw DomainError("whitney_cubes: set size does not match the grid");
  if (max_level < 0 || (1 << max_level) > N) throw DomainError("whitney_cubes: level out of range");
  std::vector<bool> covered(g.size(), false);
  std::vector<DyadicCube> out;
  for (int k = max_level; k >= 0; --k) {
    const int s = 1 << k;
    const int cubes = N / s;
    for (int a = 0; a < cubes; ++a)
      for (int b = 0; b < (n == 1 ? 1 : cubes); ++b) {
        const int i0 = a * s, i1 = n == 1 ? 0 : b * s;
        if (covered[g.index(i0, i1)]) continue;
        bool inside = true;
        for_cube_cells(g, i0, i1, s, [&](long i) { inside = inside && omega[i]; });
        if (!inside) continue;
        if (k > 0) {
          // 3Q wraps periodically; s <= N/4 keeps it from covering itself.
          for_cube_cells(g, i0 - s, n == 1 ? 0 : i1 - s, 3 * s, [&](long i) { inside = inside && omega[i]; });
          if (!inside) continue;
        }
        for_cube_cells(g, i0, i1, s, [&](long i) { covered[i] = true; });
        out.push_back(DyadicCube{k, i0, i1});
      }
  }
  std::sort(out.begin(), out.end(), [](const DyadicCube& x, const DyadicCube& y) {
    if (x.level != y.level) return x.level > y.level;
    if (x.i0 != y.i0) return x.i0 < y.i0;
    return x.i1 < y.i1;
  });
  return out;
}

Ball whitney_ball(const PeriodicGrid& g, const DyadicCube& q, double dilation) {
  const double circ = 0.5 * std::sqrt(static_cast<double>(g.dim())) * q.side(g);
  return Ball{q.center(g), dilation * circ};
}

double whitney_bump(double s, double dilation) {
  const double s0 = 1.0 / dilation;
  if (s <= s0) return 1.0;
  if (s >= 1.0) return 0.0;
  const double u = (s - s0) / (1.0 - s0);
  return 1.0 - u * u * (3.0 - 2.0 * u);
}

int overlap_bound(int n) { return 5 * (1 << n); }

Field CZPart::dense(long size) const {
  Field out = Field::Zero(size);
  for (std::size_t k = 0; k < cells.size(); ++k) out[cells[k]] = values[k];
  return out;
}

CZDecomposition cz_decompose(const Field& f, const WeightField& w, const ExponentValue& p, double alpha,
                             const CZOptions& opt) {
  const PeriodicGrid& g = w.grid();
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("cz_decompose: alpha must be positive and finite");
  if (p.is_infinite() || p.to_double() < 1.0) throw DomainError("cz_decompose: need 1 <= p < inf");
  if (f.size() != g.size()) throw DomainError("cz_decompose: field size does not match the weight grid");
  const int N = g.cells_per_axis();
  if (N < 4) throw DomainError("cz_decompose: grid too coarse");
  const double pd = p.to_double();
  const int n = g.dim();

  CZDecomposition dec;
  dec.grid = g;
  dec.f = f;
  dec.alpha = alpha;
  dec.p = p;
  dec.w = w;
  dec.max_level = opt.max_level_cap >= 0 ? std::min(opt.max_level_cap, log2_exact(N / 4)) : log2_exact(N / 4);

  std::ostringstream note;
  if (w.is_unweighted()) {
    dec.weight_in_ap = true;
  } else if (auto a = w.power_alpha()) {
    dec.weight_in_ap = *a > -n && (pd == 1.0 ? *a <= 0.0 : *a < n * (pd - 1.0));
    if (!dec.weight_in_ap) note << "weight outside A_p; properties are measured regardless. ";
  } else {
    note << "A_p membership of the weight not checked. ";
  }

  // Dividing by alpha before the power makes the level set invariant under
  // f -> lambda f, alpha -> lambda alpha.
  RealField grad = gradient_modulus(g, f);
  RealField u(g.size());
  for (long i = 0; i < g.size(); ++i) {
    if (!std::isfinite(grad[i])) throw DomainError("cz_decompose: gradient is not finite");
    u[i] = std::pow(grad[i] / alpha, pd);
  }
  RealField M = dyadic_maximal(w, u, dec.max_level);
  dec.level_set.assign(g.size(), false);
  double w_omega = 0.0, w_total = 0.0;
  for (long i = 0; i < g.size(); ++i) {
    dec.level_set[i] = M[i] > 1.0;
    if (dec.level_set[i]) w_omega += w[i];
    w_total += w[i];
  }
  if (w_omega > 0.5 * w_total) {
    std::ostringstream os;
    os << "cz_decompose: level set carries " << w_omega / w_total
       << " of the weight; alpha is too small for a decomposition on the torus";
    throw DomainError(os.str());
  }

  const auto cubes = whitney_cubes(g, dec.level_set, dec.max_level);
  dec.g = f;
  if (cubes.empty()) {
    note << "level set empty: g = f.";
    dec.note = note.str();
    return dec;
  }

  RealField phi_sum = RealField::Zero(g.size());
  std::vector<std::vector<double>> phi(cubes.size());
  dec.parts.resize(cubes.size());
  for (std::size_t k = 0; k < cubes.size(); ++k) {
    CZPart& part = dec.parts[k];
    part.cube = cubes[k];
    part.ball = whitney_ball(g, cubes[k]);
    for_each_cell_in_ball(g, part.ball, [&](long i, double d) {
      part.cells.push_back(i);
      phi[k].push_back(whitney_bump(d / part.ball.radius));
    });
    for (std::size_t m = 0; m < part.cells.size(); ++m) phi_sum[part.cells[m]] += phi[k][m];
  }
  for (std::size_t k = 0; k < cubes.size(); ++k) {
    CZPart& part = dec.parts[k];
    cplx num = 0.0;
    double den = 0.0;
    for (long i : part.cells) {
      num += f[i] * w[i];
      den += w[i];
    }
    if (!(den > 0.0)) throw DomainError("cz_decompose: a Whitney ball has zero weight");
    part.average = num / den;
    part.values.resize(part.cells.size());
    for (std::size_t m = 0; m < part.cells.size(); ++m) {
      const long i = part.cells[m];
      part.values[m] = (f[i] - part.average) * (phi[k][m] / phi_sum[i]);
      dec.g[i] -= part.values[m];
    }
  }
  note << cubes.size() << " Whitney balls, cube sides up to 2^" << dec.max_level << " cells.";
  dec.note = note.str();
  return dec;
}

PropertyReport verify_cz(const CZDecomposition& dec, const ExponentValue& q,
                         const std::optional<WeightIndices>& indices) {
  const PeriodicGrid& g = dec.grid;
  const WeightField& w = dec.w;
  const int n = g.dim();
  const double pd = dec.p.to_double();
  const double vol = g.cell_volume();
  const double alpha = dec.alpha;
  if (q.is_infinite() || q.to_double() < 1.0) throw DomainError("verify_cz: need 1 <= q < inf");
  const double qd = q.to_double();

  PropertyReport rep;
  rep.q = q;
  rep.parts = dec.parts.size();
  rep.overlap_limit = overlap_bound(n);
  std::ostringstream note;

  std::optional<WeightIndices> idx = indices;
  if (!idx) {
    if (w.is_unweighted())
      idx = WeightIndices::unweighted(n);
    else if (auto a = w.power_alpha())
      idx = WeightIndices::power(n, *a);
  }
  if (idx) {
    rep.pw_star = sobolev_exponents(dec.p, *idx, n).upper;
    rep.q_in_range = q < rep.pw_star;
    if (!rep.q_in_range) note << "q >= p_w^* = " << rep.pw_star.to_string() << ": oscillation bound out of precondition. ";
  } else {
    note << "weight indices unknown: q range not checked. ";
  }

  // Reconstruction.
  Field sum = dec.g;
  std::vector<int> count(g.size(), 0);
  for (const auto& part : dec.parts)
    for (std::size_t m = 0; m < part.cells.size(); ++m) {
      sum[part.cells[m]] += part.values[m];
      ++count[part.cells[m]];
    }
  const double fmax = std::max(dec.f.cwiseAbs().maxCoeff(), 1e-300);
  rep.reconstruction = (dec.f - sum).cwiseAbs().maxCoeff() / fmax;
  rep.overlap = *std::max_element(count.begin(), count.end());

  // |grad g| <= C alpha.
  rep.grad_g = gradient_modulus(g, dec.g).maxCoeff() / alpha;

  // Sum of w(B_i) against the gradient energy of f.
  RealField gf = gradient_modulus(g, dec.f);
  double ef = 0.0;
  for (long i = 0; i < g.size(); ++i) ef += std::pow(gf[i], pd) * w[i] * vol;

  Field scratch = Field::Zero(g.size());
  double wsum = 0.0;
  for (const auto& part : dec.parts) {
    // Support and the dw-measure of the ball.
    double wB = 0.0;
    for (long i : part.cells) wB += w[i] * vol;
    wsum += wB;
    for (std::size_t m = 0; m < part.cells.size(); ++m)
      if (g.torus_distance(g.center(part.cells[m]), part.ball.center) > part.ball.radius * (1.0 + 1e-12))
        rep.support_excess = std::max(rep.support_excess, std::abs(part.values[m]));

    for (std::size_t m = 0; m < part.cells.size(); ++m) scratch[part.cells[m]] = part.values[m];
    // grad b_i is nonzero only on the support and its backward neighbours.
    std::vector<long> touched = part.cells;
    for (long i : part.cells)
      for (int d = 0; d < n; ++d) touched.push_back(g.shift(i, d, -1));
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    double e = 0.0;
    for (long i : touched) {
      double s2 = 0.0;
      for (int d = 0; d < n; ++d) s2 += std::norm((scratch[g.shift(i, d, 1)] - scratch[i]) / g.h());
      e += std::pow(std::sqrt(s2), pd) * w[i] * vol;
    }
    rep.energy = std::max(rep.energy, e / (std::pow(alpha, pd) * wB));

    double osc = 0.0;
    for (std::size_t m = 0; m < part.cells.size(); ++m)
      osc += std::pow(std::abs(part.values[m]), qd) * w[part.cells[m]] * vol;
    osc = std::pow(osc / wB, 1.0 / qd);
    rep.oscillation = std::max(rep.oscillation, osc / (alpha * part.ball.radius));

    for (long i : part.cells) scratch[i] = 0.0;
  }
  rep.measure = ef > 0.0 ? wsum * std::pow(alpha, pd) / ef : 0.0;
  rep.note = note.str();
  return rep;
}

}  // namespace ellip
