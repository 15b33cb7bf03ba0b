#pragma once

#include <Eigen/Core>

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

namespace ellip {

using cplx = std::complex<double>;
using Field = Eigen::VectorXcd;     // one value per cell
using RealField = Eigen::VectorXd;  // one value per cell
using VecField = Eigen::MatrixXcd;  // ncell x n

using Point = std::array<double, 2>;

// Periodic grid on the n-torus [-1/2, 1/2)^n, n in {1, 2}, N a power of two.
// Cell i (per axis) has center -1/2 + (i + 1/2) h, so the origin is a vertex.
// Linear index is row-major with axis 0 slowest: idx = i0 * N + i1.
class PeriodicGrid {
 public:
  PeriodicGrid(int n, int N);

  int dim() const noexcept { return n_; }
  int cells_per_axis() const noexcept { return N_; }
  double h() const noexcept { return h_; }
  long size() const noexcept { return size_; }
  double cell_volume() const noexcept { return n_ == 1 ? h_ : h_ * h_; }

  double center_coord(int i) const noexcept { return -0.5 + (i + 0.5) * h_; }
  Point center(long idx) const noexcept;
  std::array<int, 2> multi_index(long idx) const noexcept;
  long index(int i0, int i1 = 0) const noexcept;
  // Neighbour along axis d with periodic wrap; step is +1 or -1.
  long shift(long idx, int d, int step) const noexcept;
  // |x| of the cell center (Euclidean, no wrap; coordinates are in [-1/2, 1/2)).
  double radius(long idx) const noexcept;

  // Periodic displacement x - c folded into [-1/2, 1/2).
  static double wrap(double d) noexcept;
  double torus_distance(const Point& a, const Point& b) const noexcept;

  bool operator==(const PeriodicGrid& o) const noexcept { return n_ == o.n_ && N_ == o.N_; }

 private:
  int n_;
  int N_;
  double h_;
  long size_;
};

// Sampled fields of coordinates and other helpers.
RealField sample(const PeriodicGrid& g, const std::function<double(const Point&)>& fn);
Field sample_complex(const PeriodicGrid& g, const std::function<cplx(const Point&)>& fn);

// Discrete L^2 inner product and norms with the cell volume as measure.
cplx inner(const PeriodicGrid& g, const Field& a, const Field& b);
double norm2(const PeriodicGrid& g, const Field& f);
double mean(const Field& f);  // plain cell average (Lebesgue)
Field remove_mean(const Field& f);

class WeightField {
 public:
  WeightField(const PeriodicGrid& g, RealField values);
  static WeightField unweighted(const PeriodicGrid& g);
  // |x|^alpha sampled at cell centers; carries the analytic descriptor.
  static WeightField power(const PeriodicGrid& g, double alpha);

  const PeriodicGrid& grid() const noexcept { return grid_; }
  const RealField& values() const noexcept { return w_; }
  double operator[](long i) const noexcept { return w_[i]; }
  std::optional<double> power_alpha() const noexcept { return alpha_; }
  bool is_unweighted() const noexcept { return unit_; }

 private:
  PeriodicGrid grid_;
  RealField w_;
  std::optional<double> alpha_;
  bool unit_ = false;
};

// Closed ball on the torus; membership uses the periodic distance to cell centers.
struct Ball {
  Point center{0.0, 0.0};
  double radius = 0.0;

  Ball scaled(double factor) const { return Ball{center, radius * factor}; }
};

// Calls fn(idx, distance) for every cell whose center lies in the ball.
void for_each_cell_in_ball(const PeriodicGrid& g, const Ball& b,
                           const std::function<void(long, double)>& fn);
std::vector<long> cells_in_ball(const PeriodicGrid& g, const Ball& b);

// Annulus C_j(B): 4B for j = 1 and 2^{j+1}B \ 2^j B for j >= 2.
struct Annulus {
  Ball base;
  int j = 1;

  Ball outer() const;
  bool contains(const PeriodicGrid& g, long idx) const;
  std::vector<long> cells(const PeriodicGrid& g) const;
};

// Largest annulus index with 2^{j+1} r <= 1/2, so the outer ball does not wrap.
int max_annulus_index(double radius);

struct BallFamily {
  std::vector<Ball> balls;

  // Dyadic radii 2^-k, k = 1..log2(N/4), centers on the lattice of spacing
  // equal to the radius (coarsened to at most `max_centers_per_axis`), plus
  // origin-centered balls at every dyadic radius down to 2h.
  static BallFamily standard(const PeriodicGrid& g, int max_centers_per_axis = 8);
  // Origin-centered balls of radius r0 * 2^k, k = 0..count-1.
  static BallFamily origin(double r0, int count);
};

double weighted_measure(const WeightField& w, const std::vector<long>& cells);
double ball_measure(const WeightField& w, const Ball& b);

// Averages with the weight as measure: ball average normalises by w(B),
// annulus average by w(2^{j+1}B). Empty regions throw DomainError.
cplx weighted_average(const Field& f, const Ball& b, const WeightField& w);
cplx weighted_average(const Field& f, const Annulus& a, const WeightField& w);
double weighted_average(const RealField& f, const Ball& b, const WeightField& w);

}  // namespace ellip
