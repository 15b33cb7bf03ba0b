#include "ellip/operator.hpp"

#include "ellip/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace ellip {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string describe_cell(const PeriodicGrid& g, long idx) {
  auto m = g.multi_index(idx);
  std::ostringstream os;
  os << "cell " << idx << " (i0=" << m[0];
  if (g.dim() == 2) os << ", i1=" << m[1];
  os << ")";
  return os.str();
}

cplx harmonic_mean(cplx a, cplx b) { return 2.0 * a * b / (a + b); }

}  // namespace

MatrixEllipticity matrix_ellipticity(const Mat2& A, int n) {
  MatrixEllipticity e{};
  if (n == 1) {
    cplx a = A(0, 0);
    e.lambda = a.real();
    e.Lambda = std::abs(a);
    e.theta = e.lambda > 0.0 ? std::abs(std::arg(a)) : kPi / 2;
    return e;
  }
  Mat2 H = 0.5 * (A + A.adjoint());
  Mat2 K = (A - A.adjoint()) / cplx(0.0, 2.0);
  Eigen::SelfAdjointEigenSolver<Mat2> hs(H, Eigen::EigenvaluesOnly);
  e.lambda = hs.eigenvalues()(0);
  Eigen::JacobiSVD<Mat2> svd(A);
  e.Lambda = svd.singularValues()(0);
  if (e.lambda <= 0.0) {
    e.theta = kPi / 2;
    return e;
  }
  if (K.norm() == 0.0) {
    e.theta = 0.0;
    return e;
  }
  // sup |Im <A x,x>| / Re <A x,x> is the spectral radius of the pencil (K, H).
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat2> gs(K, H, Eigen::EigenvaluesOnly);
  double t = std::max(std::abs(gs.eigenvalues()(0)), std::abs(gs.eigenvalues()(1)));
  e.theta = std::atan(t);
  return e;
}

CoefficientField::CoefficientField(const PeriodicGrid& g, std::vector<Mat2> A)
    : grid_(g), A_(std::move(A)) {
  if (static_cast<long>(A_.size()) != g.size())
    throw DomainError("coefficients: size does not match grid");
  const int n = g.dim();
  lambda_ = HUGE_VAL;
  Lambda_ = 0.0;
  theta_ = 0.0;
  for (long i = 0; i < g.size(); ++i) {
    Mat2& a = A_[i];
    if (n == 1) {
      a(0, 1) = a(1, 0) = 0.0;
      a(1, 1) = 1.0;
    }
    if (!a.allFinite()) throw EllipticityError("coefficients: non-finite entry at " + describe_cell(g, i), i);
    auto e = matrix_ellipticity(a, n);
    if (!(e.lambda > 0.0)) {
      std::ostringstream os;
      os << "coefficients: ellipticity fails at " << describe_cell(g, i)
         << ": min eigenvalue of Hermitian part = " << e.lambda;
      throw EllipticityError(os.str(), i);
    }
    lambda_ = std::min(lambda_, e.lambda);
    Lambda_ = std::max(Lambda_, e.Lambda);
    theta_ = std::max(theta_, e.theta);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        if (a(r, c).imag() != 0.0) real_ = false;
    if (!(a - a.adjoint()).isZero(1e-13 * a.norm())) hermitian_ = false;
  }
  // Round-off asymmetry is removed so that L is exactly self-adjoint.
  if (hermitian_)
    for (auto& a : A_) a = 0.5 * (a + a.adjoint()).eval();
}

CoefficientField CoefficientField::identity(const PeriodicGrid& g) {
  return CoefficientField(g, std::vector<Mat2>(g.size(), Mat2::Identity()));
}

CoefficientField CoefficientField::constant(const PeriodicGrid& g, const Mat2& A) {
  return CoefficientField(g, std::vector<Mat2>(g.size(), A));
}

double mk_cutoff(double r) {
  if (r <= 0.125) return 1.0;
  if (r >= 0.25) return 0.0;
  double u = (r - 0.125) / 0.125;
  double s = u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
  return 1.0 - s;
}

Eigen::Matrix2d meyers_kenig_matrix(double q, const Point& x) {
  if (!(q > 2.0)) throw DomainError("meyers_kenig: requires q > 2");
  double beta = -2.0 / q;
  double r = std::hypot(x[0], x[1]);
  Eigen::Matrix2d P = Eigen::Matrix2d::Zero();
  if (r > 0.0) {
    Eigen::Vector2d e(x[0] / r, x[1] / r);
    P = e * e.transpose();
  }
  Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
  return (1.0 + beta) * (I - P) + P / (1.0 + beta);
}

CoefficientField meyers_kenig(double q, const PeriodicGrid& g) {
  if (!(q > 2.0)) throw DomainError("meyers_kenig: requires q > 2");
  if (g.dim() != 2) throw DomainError("meyers_kenig: requires n = 2");
  std::vector<Mat2> A(g.size());
  for (long i = 0; i < g.size(); ++i) {
    Point x = g.center(i);
    double r = std::hypot(x[0], x[1]);
    // The closed form is 0-homogeneous; the clamp only guards the origin.
    double rc = std::max(r, 0.5 * g.h());
    Point xc = r > 0.0 ? Point{x[0] * rc / r, x[1] * rc / r} : Point{rc, 0.0};
    double chi = mk_cutoff(r);
    Eigen::Matrix2d a = chi * meyers_kenig_matrix(q, xc) + (1.0 - chi) * Eigen::Matrix2d::Identity();
    A[i] = a.cast<cplx>();
  }
  return CoefficientField(g, std::move(A));
}

EllipticOperator::EllipticOperator(const CoefficientField& coeffs, std::vector<Mat2> S)
    : grid_(coeffs.grid()), coeffs_(std::make_shared<CoefficientField>(coeffs)), S_(std::move(S)) {}

EllipticOperator EllipticOperator::assemble(const CoefficientField& coeffs) {
  const PeriodicGrid& g = coeffs.grid();
  const int n = g.dim();
  std::vector<Mat2> S(g.size(), Mat2::Identity());
  for (long c = 0; c < g.size(); ++c) {
    const Mat2& Ac = coeffs.at(c);
    long cx = g.shift(c, 0, 1);
    Mat2& s = S[c];
    s.setZero();
    s(0, 0) = harmonic_mean(Ac(0, 0), coeffs.at(cx)(0, 0));
    if (n == 1) {
      s(1, 1) = 1.0;
      continue;
    }
    long cy = g.shift(c, 1, 1);
    long cxy = g.shift(cx, 1, 1);
    s(1, 1) = harmonic_mean(Ac(1, 1), coeffs.at(cy)(1, 1));
    s(0, 1) = 0.25 * (Ac(0, 1) + coeffs.at(cx)(0, 1) + coeffs.at(cy)(0, 1) + coeffs.at(cxy)(0, 1));
    s(1, 0) = 0.25 * (Ac(1, 0) + coeffs.at(cx)(1, 0) + coeffs.at(cy)(1, 0) + coeffs.at(cxy)(1, 0));
  }

  EllipticOperator op(coeffs, std::move(S));
  op.face_lambda_ = HUGE_VAL;
  op.face_Lambda_ = 0.0;
  op.theta_ = 0.0;
  op.real_ = coeffs.is_real();
  op.constant_ = true;
  const long m = g.size();
  op.s00_.resize(m);
  op.s01_.resize(m);
  op.s10_.resize(m);
  op.s11_.resize(m);
  op.a00_.resize(m);
  op.a01_.resize(m);
  op.a10_.resize(m);
  op.a11_.resize(m);
  for (long c = 0; c < m; ++c) {
    const Mat2& s = op.S_[c];
    auto e = matrix_ellipticity(s, n);
    if (!(e.lambda > 0.0)) {
      std::ostringstream os;
      os << "assemble: face coefficients lose ellipticity at " << describe_cell(g, c)
         << ": min eigenvalue of Hermitian part = " << e.lambda;
      throw EllipticityError(os.str(), c);
    }
    op.face_lambda_ = std::min(op.face_lambda_, e.lambda);
    op.face_Lambda_ = std::max(op.face_Lambda_, e.Lambda);
    op.theta_ = std::max(op.theta_, e.theta);
    if (!(s - op.S_[0]).isZero(1e-14 * (1.0 + op.S_[0].norm()))) op.constant_ = false;
    op.s00_[c] = s(0, 0);
    op.s01_[c] = s(0, 1);
    op.s10_[c] = s(1, 0);
    op.s11_[c] = s(1, 1);
    op.a00_[c] = std::conj(s(0, 0));
    op.a01_[c] = std::conj(s(1, 0));
    op.a10_[c] = std::conj(s(0, 1));
    op.a11_[c] = std::conj(s(1, 1));
  }
  op.hermitian_ = true;
  for (long c = 0; c < m && op.hermitian_; ++c) {
    const Mat2& s = op.S_[c];
    if (n == 1) {
      if (s(0, 0).imag() != 0.0) op.hermitian_ = false;
    } else if (s != Mat2(s.adjoint())) {
      op.hermitian_ = false;
    }
  }
  if (op.real_) {
    op.r00_.resize(m);
    op.r01_.resize(m);
    op.r10_.resize(m);
    op.r11_.resize(m);
    for (long c = 0; c < m; ++c) {
      op.r00_[c] = op.s00_[c].real();
      op.r01_[c] = op.s01_[c].real();
      op.r10_[c] = op.s10_[c].real();
      op.r11_[c] = op.s11_[c].real();
    }
  }
  return op;
}

template <class T>
void EllipticOperator::apply_impl(const T* in, T* out, const T* s00, const T* s01, const T* s10,
                                  const T* s11) const {
  const int N = grid_.cells_per_axis();
  const double ih = 1.0 / grid_.h();
  const double ih2 = ih * ih;
  if (grid_.dim() == 1) {
    // flux q(c) = s(c) (f(c+1) - f(c)) / h on the face between c and c+1
    for (int i = 0; i < N; ++i) out[i] = T(0);
    for (int i = 0; i < N; ++i) {
      int ip = i + 1 == N ? 0 : i + 1;
      T q = s00[i] * (in[ip] - in[i]) * ih2;
      out[i] -= q;
      out[ip] += q;
    }
    return;
  }
  const long m = grid_.size();
  for (long c = 0; c < m; ++c) out[c] = T(0);
  for (int i0 = 0; i0 < N; ++i0) {
    int j0 = i0 + 1 == N ? 0 : i0 + 1;
    for (int i1 = 0; i1 < N; ++i1) {
      int j1 = i1 + 1 == N ? 0 : i1 + 1;
      long c = static_cast<long>(i0) * N + i1;
      long cx = static_cast<long>(j0) * N + i1;
      long cy = static_cast<long>(i0) * N + j1;
      T g0 = in[cx] - in[c];
      T g1 = in[cy] - in[c];
      T q0 = (s00[c] * g0 + s01[c] * g1) * ih2;
      T q1 = (s10[c] * g0 + s11[c] * g1) * ih2;
      out[c] -= q0 + q1;
      out[cx] += q0;
      out[cy] += q1;
    }
  }
}

void EllipticOperator::apply(const cplx* in, cplx* out, bool adjoint) const {
  if (adjoint)
    apply_impl(in, out, a00_.data(), a01_.data(), a10_.data(), a11_.data());
  else
    apply_impl(in, out, s00_.data(), s01_.data(), s10_.data(), s11_.data());
}

void EllipticOperator::apply(const double* in, double* out) const {
  if (!real_) throw DomainError("operator: real application needs real coefficients");
  apply_impl(in, out, r00_.data(), r01_.data(), r10_.data(), r11_.data());
}

Field EllipticOperator::apply(const Field& f) const {
  if (f.size() != size()) throw DomainError("operator: field size mismatch");
  Field out(size());
  apply(f.data(), out.data(), false);
  return out;
}

Field EllipticOperator::apply_adjoint(const Field& f) const {
  if (f.size() != size()) throw DomainError("operator: field size mismatch");
  Field out(size());
  apply(f.data(), out.data(), true);
  return out;
}

VecField EllipticOperator::gradient(const Field& f) const {
  if (f.size() != size()) throw DomainError("gradient: field size mismatch");
  const int n = grid_.dim();
  const double ih = 1.0 / grid_.h();
  VecField g(size(), n);
  for (long c = 0; c < size(); ++c)
    for (int d = 0; d < n; ++d) g(c, d) = (f[grid_.shift(c, d, 1)] - f[c]) * ih;
  return g;
}

Field EllipticOperator::divergence(const VecField& g) const {
  const int n = grid_.dim();
  if (g.rows() != size() || g.cols() != n) throw DomainError("divergence: field shape mismatch");
  const double ih = 1.0 / grid_.h();
  Field out = Field::Zero(size());
  for (long c = 0; c < size(); ++c)
    for (int d = 0; d < n; ++d) out[c] += (g(c, d) - g(grid_.shift(c, d, -1), d)) * ih;
  return out;
}

double EllipticOperator::lambda_max_bound() const noexcept {
  double h = grid_.h();
  return 4.0 * grid_.dim() / (h * h) * face_Lambda_;
}

double EllipticOperator::lambda_min_bound() const noexcept {
  double h = grid_.h();
  double s = std::sin(kPi * h);
  return 4.0 * s * s / (h * h) * face_lambda_;
}

cplx EllipticOperator::symbol(int k0, int k1) const {
  const double h = grid_.h();
  const int N = grid_.cells_per_axis();
  const Mat2& s = S_[0];
  cplx d0 = (std::polar(1.0, 2.0 * kPi * k0 / N) - 1.0) / h;
  if (grid_.dim() == 1) return std::conj(d0) * s(0, 0) * d0;
  cplx d1 = (std::polar(1.0, 2.0 * kPi * k1 / N) - 1.0) / h;
  return std::conj(d0) * (s(0, 0) * d0 + s(0, 1) * d1) + std::conj(d1) * (s(1, 0) * d0 + s(1, 1) * d1);
}

Eigen::MatrixXcd EllipticOperator::dense() const {
  const long m = size();
  if (m > 8192) throw DomainError("operator: dense form limited to 8192 cells");
  Eigen::MatrixXcd D(m, m);
  Field e = Field::Zero(m);
  Field col(m);
  for (long j = 0; j < m; ++j) {
    e[j] = 1.0;
    apply(e.data(), col.data(), false);
    D.col(j) = col;
    e[j] = 0.0;
  }
  return D;
}

RealField gradient_magnitude(const PeriodicGrid& g, const Field& f) {
  const int n = g.dim();
  const double ih = 1.0 / g.h();
  RealField out(g.size());
  for (long c = 0; c < g.size(); ++c) {
    double s = 0.0;
    for (int d = 0; d < n; ++d) s += std::norm((f[g.shift(c, d, 1)] - f[c]) * ih);
    out[c] = std::sqrt(s);
  }
  return out;
}

double poincare_check(const Field& f, const Ball& B, double p, const WeightField& w,
                      std::optional<double> q) {
  const PeriodicGrid& g = w.grid();
  if (!(p >= 1.0)) throw DomainError("poincare_check: p must be >= 1");
  double qq = q.value_or(p);
  std::vector<long> cells = cells_in_ball(g, B);
  if (cells.empty()) throw DomainError("poincare_check: ball contains no cell centers");
  RealField grad = gradient_magnitude(g, f);
  double wsum = 0.0;
  cplx fsum = 0.0;
  double gsum = 0.0;
  for (long i : cells) {
    wsum += w[i];
    fsum += f[i] * w[i];
    gsum += std::pow(grad[i], p) * w[i];
  }
  cplx fb = fsum / wsum;
  double rhs = std::pow(gsum / wsum, 1.0 / p);
  if (rhs == 0.0) return 0.0;
  double osc = 0.0;
  for (long i : cells) osc += std::pow(std::abs(f[i] - fb), qq) * w[i];
  double lhs = std::pow(osc / wsum, 1.0 / qq);
  return lhs / (B.radius * rhs);
}

}  // namespace ellip
