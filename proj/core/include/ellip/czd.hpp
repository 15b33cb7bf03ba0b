#pragma once

// Calderón–Zygmund decomposition of a field at a gradient height alpha with
// respect to a weight, and post-hoc verification of its properties.

#include "ellip/exponents.hpp"
#include "ellip/grid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ellip {

// Forward differences (f(x + h e_d) - f(x)) / h with periodic wrap.
VecField forward_gradient(const PeriodicGrid& g, const Field& f);

// Dyadic maximal function sup_{Q ∋ x} int_Q u dw / w(Q) over dyadic cubes of
// side h .. 2^max_level h.
RealField dyadic_maximal(const WeightField& w, const RealField& u, int max_level);

// A dyadic cube: side 2^level cells, lower corner (i0, i1) in cell indices.
struct DyadicCube {
  int level = 0;
  int i0 = 0;
  int i1 = 0;

  int side_cells() const { return 1 << level; }
  double side(const PeriodicGrid& g) const { return side_cells() * g.h(); }
  Point center(const PeriodicGrid& g) const;
  bool operator==(const DyadicCube& o) const { return level == o.level && i0 == o.i0 && i1 == o.i1; }
};

// Maximal dyadic cubes Q inside the cell set `omega` whose tripled cube 3Q
// also lies in omega (single cells always qualify), side at most 2^max_level
// cells, in lexicographic order (level descending, then i0, i1).
std::vector<DyadicCube> whitney_cubes(const PeriodicGrid& g, const std::vector<bool>& omega, int max_level);

// Ball concentric with the cube, radius dilation * (circumscribed radius).
inline constexpr double kWhitneyDilation = 9.0 / 8.0;
Ball whitney_ball(const PeriodicGrid& g, const DyadicCube& q, double dilation = kWhitneyDilation);

// C^1 bump on [0, 1]: 1 up to 1/dilation, cubic smoothstep down to 0 at 1.
double whitney_bump(double s, double dilation = kWhitneyDilation);

// Bound on sum_i chi_{B_i} for the construction above: balls extend less
// than half a side beyond their cube, so a point meets at most 2^n cubes of
// each admissible size, and touching cubes differ in size by at most 4.
int overlap_bound(int n);

struct CZPart {
  DyadicCube cube;
  Ball ball;
  std::vector<long> cells;  // support of b_i, the cells of ball
  std::vector<cplx> values; // b_i on cells
  cplx average = 0.0;       // c_i, the dw-average of f on the ball

  Field dense(long size) const;
};

struct CZOptions {
  // Cubes of side up to 2^{-2} (a quarter of the torus).
  int max_level_cap = -1;  // -1 selects log2(N / 4)
};

struct CZDecomposition {
  PeriodicGrid grid{1, 4};
  Field f;
  Field g;
  std::vector<CZPart> parts;
  double alpha = 0.0;
  ExponentValue p{2};
  WeightField w{PeriodicGrid(1, 4), RealField::Ones(4)};
  int max_level = 0;
  std::vector<bool> level_set;  // {M_w(|grad f|^p / alpha^p) > 1}
  bool weight_in_ap = true;     // analytic A_p membership when known
  std::string note;
};

// Construction: dyadic maximal function of (|grad f| / alpha)^p with respect
// to w, Whitney cubes of its level set {M > 1}, balls at dilation 9/8, a C^1
// partition of unity chi_i = phi_i / sum_j phi_j, b_i = (f - c_i) chi_i and
// g = f - sum_i b_i.
// Throws DomainError for alpha <= 0, non-finite gradients, or a level set
// covering more than half of the torus in w-measure (alpha too small for the
// periodic setting).
CZDecomposition cz_decompose(const Field& f, const WeightField& w, const ExponentValue& p, double alpha,
                             const CZOptions& opt = {});

struct PropertyReport {
  double reconstruction = 0.0;  // ||f - g - sum b_i||_inf / ||f||_inf
  double grad_g = 0.0;          // max |grad g| / alpha
  double energy = 0.0;          // max_i int |grad b_i|^p dw / (alpha^p w(B_i))
  double measure = 0.0;         // sum_i w(B_i) alpha^p / int |grad f|^p dw
  int overlap = 0;              // max_x sum_i chi_{B_i}(x)
  int overlap_limit = 0;        // overlap_bound(n)
  double oscillation = 0.0;     // max_i (avg_{B_i} |b_i|^q dw)^{1/q} / (alpha r_i)
  double support_excess = 0.0;  // largest stored |b_i| at a cell outside B_i
  ExponentValue q{1};
  ExponentValue pw_star = ExponentValue::infinity();
  bool q_in_range = true;       // q < p_w^*; otherwise oscillation is out of precondition
  std::size_t parts = 0;
  std::string note;
};

// Recomputes every property from the stored fields. The indices of w come
// from its analytic descriptor (unweighted or power) unless supplied.
PropertyReport verify_cz(const CZDecomposition& dec, const ExponentValue& q,
                         const std::optional<WeightIndices>& indices = std::nullopt);

}  // namespace ellip
