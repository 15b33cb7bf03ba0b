#include "krylov.hpp"

#include "ellip/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <sstream>

extern "C" {
void dstevr_(const char* jobz, const char* range, const int* n, double* d, double* e,
             const double* vl, const double* vu, const int* il, const int* iu,
             const double* abstol, int* m, double* w, double* z, const int* ldz, int* isuppz,
             double* work, const int* lwork, int* iwork, const int* liwork, int* info,
             std::size_t jobz_len, std::size_t range_len);
}

namespace ellip::detail {

namespace {

constexpr int kCheckEvery = 10;

// Convergence checks every 10 steps up to 100, then every ~10% of the
// dimension, so the O(m^2) tridiagonal work stays a small share of the total.
bool check_due(int m) {
  const int step = m <= 100 ? kCheckEvery : (m / 10) / kCheckEvery * kCheckEvery;
  return m % step == 0;
}

using CMat = Eigen::MatrixXcd;

void throw_unconverged(int max_dim, double err) {
  std::ostringstream os;
  os << "krylov: no convergence within " << max_dim << " steps (last successive difference "
     << err << "); raise the Krylov dimension cap";
  throw ConvergenceError(os.str());
}

// Relative change between successive coefficient sets, padded with zeros.
double coefficient_change(const CMat& cur, const CMat& prev, double floor) {
  double worst = 0.0;
  for (int k = 0; k < cur.cols(); ++k) {
    double diff2 = 0.0;
    for (int j = 0; j < cur.rows(); ++j) {
      cplx p = j < prev.rows() ? prev(j, k) : cplx(0.0);
      diff2 += std::norm(cur(j, k) - p);
    }
    double den = std::max(cur.col(k).norm(), floor);
    worst = std::max(worst, std::sqrt(diff2) / den);
  }
  return worst;
}

// Coefficients beta0 * Q g(theta) Q^T e1 for each function.
CMat lanczos_coefficients(const std::vector<double>& alpha, const std::vector<double>& beta,
                          const std::vector<ScalarFn>& g, double beta0) {
  const int m = static_cast<int>(alpha.size());
  Eigen::VectorXd theta;
  Eigen::MatrixXd Q;
  std::vector<double> e(beta.begin(), beta.begin() + (m - 1));
  tridiagonal_eigen(alpha, e, theta, Q);
  CMat C(m, static_cast<long>(g.size()));
  Eigen::VectorXd q0 = Q.row(0).transpose();
  for (std::size_t k = 0; k < g.size(); ++k) {
    Eigen::VectorXcd y(m);
    for (int i = 0; i < m; ++i) y[i] = g[k](cplx(theta[i], 0.0)) * q0[i];
    Eigen::VectorXd re = Q * y.real(), im = Q * y.imag();
    C.col(static_cast<long>(k)).real() = beta0 * re;
    C.col(static_cast<long>(k)).imag() = beta0 * im;
  }
  return C;
}

template <class T, class ApplyFn>
void lanczos_two_pass(ApplyFn&& A, const Eigen::Matrix<T, Eigen::Dynamic, 1>& b,
                      const std::vector<ScalarFn>& g, const KrylovSettings& s, cplx scale,
                      std::vector<Field>& out, int* used_dim) {
  using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
  const long n = b.size();
  const double beta0 = b.norm();
  if (beta0 == 0.0) return;
  const int max_dim = static_cast<int>(std::min<long>(s.max_dim, n));

  std::vector<double> alpha, beta;
  Vec v = b / beta0, vprev = Vec::Zero(n), w(n);
  double bprev = 0.0;
  double anorm = 0.0;
  CMat C, Cprev;
  double err = HUGE_VAL;
  bool converged = false;
  for (int j = 0; j < max_dim; ++j) {
    A(v.data(), w.data());
    double a = std::real(cplx(v.dot(w)));
    w -= a * v;
    if (j > 0) w -= bprev * vprev;
    double bn = w.norm();
    alpha.push_back(a);
    beta.push_back(bn);
    anorm = std::max(anorm, std::abs(a) + bn + bprev);
    const int m = j + 1;
    bool breakdown = bn <= 1e-13 * anorm || m == n;
    if (breakdown || check_due(m) || m == max_dim) {
      C = lanczos_coefficients(alpha, beta, g, beta0);
      if (breakdown) {
        converged = true;
        break;
      }
      if (Cprev.size() > 0) {
        err = coefficient_change(C, Cprev, 1e-8 * beta0);
        if (err <= s.tol) {
          converged = true;
          break;
        }
      }
      Cprev = C;
    }
    vprev.swap(v);
    v = w / bn;
    bprev = bn;
  }
  if (!converged) throw_unconverged(s.max_dim, err);
  const int m = static_cast<int>(C.rows());
  if (used_dim) *used_dim = std::max(*used_dim, m);

  // Second pass: regenerate the basis and accumulate.
  v = b / beta0;
  vprev.setZero();
  for (int j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < g.size(); ++k) {
      cplx c = scale * C(j, static_cast<long>(k));
      out[k] += c * v.template cast<cplx>();
    }
    if (j + 1 == m) break;
    A(v.data(), w.data());
    w -= alpha[j] * v;
    if (j > 0) w -= beta[j - 1] * vprev;
    vprev.swap(v);
    v = w / beta[j];
  }
}

void arnoldi(const EllipticOperator& op, bool adjoint, const Field& b,
             const std::vector<ScalarFn>& g, const KrylovSettings& s, std::vector<Field>& out,
             int* used_dim) {
  const long n = b.size();
  const double beta0 = b.norm();
  if (beta0 == 0.0) return;
  const int max_dim = static_cast<int>(std::min<long>(s.max_dim, n));
  CMat V(n, max_dim + 1);
  CMat H = CMat::Zero(max_dim + 1, max_dim);
  V.col(0) = b / beta0;
  Field w(n);
  CMat C, Cprev;
  double err = HUGE_VAL;
  bool converged = false;
  double hnorm = 0.0;
  for (int j = 0; j < max_dim; ++j) {
    op.apply(V.col(j).data(), w.data(), adjoint);
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i <= j; ++i) {
        cplx hij = V.col(i).dot(w);
        H(i, j) += hij;
        w -= hij * V.col(i);
      }
    double hn = w.norm();
    H(j + 1, j) = hn;
    hnorm = std::max(hnorm, H.col(j).norm());
    const int m = j + 1;
    bool breakdown = hn <= 1e-13 * hnorm || m == n;
    if (breakdown || check_due(m) || m == max_dim) {
      CMat Hm = H.topLeftCorner(m, m);
      Eigen::ComplexEigenSolver<CMat> es(Hm);
      CMat X = es.eigenvectors();
      Eigen::PartialPivLU<CMat> lu(X);
      Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(m);
      e1[0] = 1.0;
      Eigen::VectorXcd y = lu.solve(e1);
      C.resize(m, static_cast<long>(g.size()));
      for (std::size_t k = 0; k < g.size(); ++k) {
        Eigen::VectorXcd t(m);
        for (int i = 0; i < m; ++i) t[i] = g[k](es.eigenvalues()[i]) * y[i];
        C.col(static_cast<long>(k)) = beta0 * (X * t);
      }
      if (breakdown) {
        converged = true;
        break;
      }
      if (Cprev.size() > 0) {
        err = coefficient_change(C, Cprev, 1e-8 * beta0);
        if (err <= s.tol) {
          converged = true;
          break;
        }
      }
      Cprev = C;
    }
    V.col(j + 1) = w / hn;
  }
  if (!converged) throw_unconverged(s.max_dim, err);
  const int m = static_cast<int>(C.rows());
  if (used_dim) *used_dim = std::max(*used_dim, m);
  for (std::size_t k = 0; k < g.size(); ++k) out[k] += V.leftCols(m) * C.col(static_cast<long>(k));
}

}  // namespace

void tridiagonal_eigen(const std::vector<double>& d, const std::vector<double>& e,
                       Eigen::VectorXd& theta, Eigen::MatrixXd& Q) {
  const int n = static_cast<int>(d.size());
  theta.resize(n);
  Q.resize(n, n);
  if (n == 1) {
    theta[0] = d[0];
    Q(0, 0) = 1.0;
    return;
  }
  std::vector<double> dd(d), ee(n);
  for (int i = 0; i + 1 < n; ++i) ee[i] = e[i];
  ee[n - 1] = 0.0;
  int m = 0, info = 0, il = 0, iu = 0;
  double vl = 0.0, vu = 0.0, abstol = 0.0;
  std::vector<int> isuppz(2 * n);
  int lwork = 20 * n, liwork = 10 * n;
  std::vector<double> work(lwork);
  std::vector<int> iwork(liwork);
  dstevr_("V", "A", &n, dd.data(), ee.data(), &vl, &vu, &il, &iu, &abstol, &m, theta.data(),
          Q.data(), &n, isuppz.data(), work.data(), &lwork, iwork.data(), &liwork, &info, 1, 1);
  if (info != 0 || m != n) {
    // Fall back to Eigen's implicit QR.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    Eigen::VectorXd dv = Eigen::Map<const Eigen::VectorXd>(d.data(), n);
    Eigen::VectorXd ev = Eigen::Map<const Eigen::VectorXd>(e.data(), n - 1);
    es.computeFromTridiagonal(dv, ev, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw ConvergenceError("krylov: tridiagonal eigensolver failed");
    theta = es.eigenvalues();
    Q = es.eigenvectors();
  }
}

std::vector<Field> krylov_functions(const EllipticOperator& op, bool adjoint,
                                    const std::vector<ScalarFn>& g, const Field& b,
                                    const KrylovSettings& s, int* used_dim) {
  const long n = b.size();
  std::vector<Field> out(g.size(), Field::Zero(n));
  if (used_dim) *used_dim = 0;
  if (g.empty()) return out;
  if (op.is_hermitian() && op.is_real()) {
    auto A = [&op](const double* in, double* o) { op.apply(in, o); };
    Eigen::VectorXd re = b.real(), im = b.imag();
    lanczos_two_pass<double>(A, re, g, s, cplx(1.0, 0.0), out, used_dim);
    lanczos_two_pass<double>(A, im, g, s, cplx(0.0, 1.0), out, used_dim);
  } else if (op.is_hermitian()) {
    auto A = [&op](const cplx* in, cplx* o) { op.apply(in, o, false); };
    lanczos_two_pass<cplx>(A, b, g, s, cplx(1.0, 0.0), out, used_dim);
  } else {
    arnoldi(op, adjoint, b, g, s, out, used_dim);
  }
  return out;
}

}  // namespace ellip::detail
