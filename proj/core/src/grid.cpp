#include "ellip/grid.hpp"

#include "ellip/error.hpp"

#include <cmath>
#include <string>

namespace ellip {

PeriodicGrid::PeriodicGrid(int n, int N) : n_(n), N_(N), h_(0.0), size_(0) {
  if (n != 1 && n != 2) throw DomainError("grid: dimension must be 1 or 2");
  if (N < 2 || (N & (N - 1)) != 0) throw DomainError("grid: N must be a power of two >= 2");
  h_ = 1.0 / N;
  size_ = n == 1 ? N : static_cast<long>(N) * N;
}

Point PeriodicGrid::center(long idx) const noexcept {
  if (n_ == 1) return {center_coord(static_cast<int>(idx)), 0.0};
  return {center_coord(static_cast<int>(idx / N_)), center_coord(static_cast<int>(idx % N_))};
}

std::array<int, 2> PeriodicGrid::multi_index(long idx) const noexcept {
  if (n_ == 1) return {static_cast<int>(idx), 0};
  return {static_cast<int>(idx / N_), static_cast<int>(idx % N_)};
}

long PeriodicGrid::index(int i0, int i1) const noexcept {
  i0 = ((i0 % N_) + N_) % N_;
  if (n_ == 1) return i0;
  i1 = ((i1 % N_) + N_) % N_;
  return static_cast<long>(i0) * N_ + i1;
}

long PeriodicGrid::shift(long idx, int d, int step) const noexcept {
  auto m = multi_index(idx);
  m[d] += step;
  return index(m[0], m[1]);
}

double PeriodicGrid::radius(long idx) const noexcept {
  Point p = center(idx);
  return n_ == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]);
}

double PeriodicGrid::wrap(double d) noexcept {
  d -= std::floor(d + 0.5);
  return d;
}

double PeriodicGrid::torus_distance(const Point& a, const Point& b) const noexcept {
  double d0 = wrap(a[0] - b[0]);
  if (n_ == 1) return std::abs(d0);
  double d1 = wrap(a[1] - b[1]);
  return std::hypot(d0, d1);
}

RealField sample(const PeriodicGrid& g, const std::function<double(const Point&)>& fn) {
  RealField out(g.size());
  for (long i = 0; i < g.size(); ++i) out[i] = fn(g.center(i));
  return out;
}

Field sample_complex(const PeriodicGrid& g, const std::function<cplx(const Point&)>& fn) {
  Field out(g.size());
  for (long i = 0; i < g.size(); ++i) out[i] = fn(g.center(i));
  return out;
}

cplx inner(const PeriodicGrid& g, const Field& a, const Field& b) {
  return b.dot(a) * g.cell_volume();  // sum a * conj(b)
}

double norm2(const PeriodicGrid& g, const Field& f) {
  return f.norm() * std::sqrt(g.cell_volume());
}

double mean(const Field& f) { return f.mean().real(); }

Field remove_mean(const Field& f) {
  Field out = f;
  out.array() -= f.mean();
  return out;
}

WeightField::WeightField(const PeriodicGrid& g, RealField values) : grid_(g), w_(std::move(values)) {
  if (w_.size() != g.size()) throw DomainError("weight: size does not match grid");
  for (long i = 0; i < w_.size(); ++i) {
    if (!(w_[i] > 0.0) || !std::isfinite(w_[i]))
      throw DomainError("weight: non-positive or non-finite value at cell " + std::to_string(i));
  }
}

WeightField WeightField::unweighted(const PeriodicGrid& g) {
  WeightField w(g, RealField::Ones(g.size()));
  w.unit_ = true;
  w.alpha_ = 0.0;
  return w;
}

WeightField WeightField::power(const PeriodicGrid& g, double alpha) {
  if (!(alpha > -g.dim())) throw DomainError("weight: |x|^alpha is not locally integrable for alpha <= -n");
  RealField v(g.size());
  for (long i = 0; i < g.size(); ++i) v[i] = std::pow(g.radius(i), alpha);
  WeightField w(g, std::move(v));
  w.alpha_ = alpha;
  w.unit_ = alpha == 0.0;
  return w;
}

void for_each_cell_in_ball(const PeriodicGrid& g, const Ball& b,
                           const std::function<void(long, double)>& fn) {
  const int N = g.cells_per_axis();
  const double h = g.h();
  const double tol = 1e-12;
  auto range = [&](double c, int& lo, int& count) {
    // i with |x_i - c| <= r, x_i = -1/2 + (i + 1/2) h, before wrap.
    lo = static_cast<int>(std::ceil((c - b.radius + 0.5) / h - 0.5 - tol));
    int hi = static_cast<int>(std::floor((c + b.radius + 0.5) / h - 0.5 + tol));
    count = std::min(hi - lo + 1, N);
  };
  int lo0 = 0, c0 = 0, lo1 = 0, c1 = 1;
  range(b.center[0], lo0, c0);
  if (g.dim() == 2) range(b.center[1], lo1, c1);
  for (int a = 0; a < c0; ++a) {
    int i0 = lo0 + a;
    double d0 = PeriodicGrid::wrap(g.center_coord(((i0 % N) + N) % N) - b.center[0]);
    if (g.dim() == 1) {
      double d = std::abs(d0);
      if (d <= b.radius + tol) fn(g.index(i0), d);
      continue;
    }
    for (int c = 0; c < c1; ++c) {
      int i1 = lo1 + c;
      double d1 = PeriodicGrid::wrap(g.center_coord(((i1 % N) + N) % N) - b.center[1]);
      double d = std::hypot(d0, d1);
      if (d <= b.radius + tol) fn(g.index(i0, i1), d);
    }
  }
}

std::vector<long> cells_in_ball(const PeriodicGrid& g, const Ball& b) {
  std::vector<long> out;
  for_each_cell_in_ball(g, b, [&](long i, double) { out.push_back(i); });
  return out;
}

Ball Annulus::outer() const { return base.scaled(std::ldexp(1.0, j + 1)); }

bool Annulus::contains(const PeriodicGrid& g, long idx) const {
  double d = g.torus_distance(g.center(idx), base.center);
  const double tol = 1e-12;
  double ro = std::ldexp(base.radius, j + 1);
  if (d > ro + tol) return false;
  if (j <= 1) return true;
  return d > std::ldexp(base.radius, j) + tol;
}

std::vector<long> Annulus::cells(const PeriodicGrid& g) const {
  std::vector<long> out;
  double inner_r = j <= 1 ? -1.0 : std::ldexp(base.radius, j);
  for_each_cell_in_ball(g, outer(), [&](long i, double d) {
    if (d > inner_r + 1e-12) out.push_back(i);
  });
  return out;
}

int max_annulus_index(double radius) {
  if (!(radius > 0.0)) throw DomainError("annulus: radius must be positive");
  return static_cast<int>(std::floor(std::log2(1.0 / (4.0 * radius)) + 1e-12));
}

BallFamily BallFamily::standard(const PeriodicGrid& g, int max_centers_per_axis) {
  BallFamily fam;
  const int N = g.cells_per_axis();
  int kmax = static_cast<int>(std::lround(std::log2(N / 4.0)));
  for (int k = 0; k <= kmax; ++k) {
    double r = std::ldexp(1.0, -k);
    int m = std::min(1 << k, max_centers_per_axis);
    double step = 1.0 / m;
    int m1 = g.dim() == 2 ? m : 1;
    for (int a = 0; a < m; ++a)
      for (int c = 0; c < m1; ++c) {
        Point ctr{-0.5 + a * step, g.dim() == 2 ? -0.5 + c * step : 0.0};
        fam.balls.push_back(Ball{ctr, r});
      }
  }
  for (int k = 1; std::ldexp(1.0, -k) >= 2.0 * g.h(); ++k)
    fam.balls.push_back(Ball{{0.0, 0.0}, std::ldexp(1.0, -k)});
  return fam;
}

BallFamily BallFamily::origin(double r0, int count) {
  BallFamily fam;
  for (int k = 0; k < count; ++k) fam.balls.push_back(Ball{{0.0, 0.0}, std::ldexp(r0, k)});
  return fam;
}

double weighted_measure(const WeightField& w, const std::vector<long>& cells) {
  double s = 0.0;
  for (long i : cells) s += w[i];
  return s * w.grid().cell_volume();
}

double ball_measure(const WeightField& w, const Ball& b) {
  double s = 0.0;
  for_each_cell_in_ball(w.grid(), b, [&](long i, double) { s += w[i]; });
  return s * w.grid().cell_volume();
}

cplx weighted_average(const Field& f, const Ball& b, const WeightField& w) {
  cplx num = 0.0;
  double den = 0.0;
  for_each_cell_in_ball(w.grid(), b, [&](long i, double) {
    num += f[i] * w[i];
    den += w[i];
  });
  if (den == 0.0) throw DomainError("weighted_average: ball contains no cell centers");
  return num / den;
}

cplx weighted_average(const Field& f, const Annulus& a, const WeightField& w) {
  cplx num = 0.0;
  double den = 0.0;
  bool any = false;
  double inner_r = a.j <= 1 ? -1.0 : std::ldexp(a.base.radius, a.j);
  for_each_cell_in_ball(w.grid(), a.outer(), [&](long i, double d) {
    den += w[i];
    if (d > inner_r + 1e-12) {
      num += f[i] * w[i];
      any = true;
    }
  });
  if (!any) throw DomainError("weighted_average: annulus contains no cell centers");
  return num / den;
}

double weighted_average(const RealField& f, const Ball& b, const WeightField& w) {
  double num = 0.0, den = 0.0;
  for_each_cell_in_ball(w.grid(), b, [&](long i, double) {
    num += f[i] * w[i];
    den += w[i];
  });
  if (den == 0.0) throw DomainError("weighted_average: ball contains no cell centers");
  return num / den;
}

}  // namespace ellip
