#include "ellip/semigroup.hpp"

#include "ellip/error.hpp"
#include "krylov.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <unsupported/Eigen/MatrixFunctions>
#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <sstream>

namespace ellip {

namespace {
constexpr double kPi = 3.14159265358979323846;
std::mutex g_fftw_plan_mutex;  // FFTW planning is not thread-safe
}  // namespace

const char* to_string(SemigroupMethod m) {
  switch (m) {
    case SemigroupMethod::automatic: return "automatic";
    case SemigroupMethod::spectral: return "spectral";
    case SemigroupMethod::krylov: return "krylov";
    case SemigroupMethod::scaling_squaring: return "scaling_squaring";
  }
  return "?";
}

struct SemigroupEvaluator::Spectral {
  enum class Kind { fourier, dense_symmetric, dense_general, dense_matrix } kind;

  // fourier
  std::vector<cplx> symbol;  // eigenvalue per FFT index
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  // dense
  Eigen::VectorXd evals_real;
  Eigen::MatrixXd V_real;
  Eigen::VectorXcd evals;
  Eigen::MatrixXcd V, Vinv;
  Eigen::MatrixXcd L;  // scaling and squaring

  ~Spectral() {
    std::lock_guard<std::mutex> lock(g_fftw_plan_mutex);
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

SemigroupEvaluator::SemigroupEvaluator(std::shared_ptr<const EllipticOperator> op, SemigroupOptions opt)
    : op_(std::move(op)), opt_(opt), method_(opt.method), mu_(0.0) {
  if (!op_) throw DomainError("semigroup: null operator");
  double limit = kPi / 2 - op_->theta();
  mu_ = opt_.sector_angle > 0.0 ? opt_.sector_angle : limit;
  if (mu_ > limit) {
    std::ostringstream os;
    os << "semigroup: sector angle " << mu_ << " exceeds pi/2 - theta = " << limit;
    throw SectorError(os.str());
  }
  const long m = op_->size();
  if (method_ == SemigroupMethod::automatic) {
    if (op_->is_constant() || m <= opt_.dense_limit)
      method_ = SemigroupMethod::spectral;
    else
      method_ = SemigroupMethod::krylov;
  }
  if (method_ == SemigroupMethod::spectral) {
    spec_ = std::make_unique<Spectral>();
    const PeriodicGrid& g = op_->grid();
    if (op_->is_constant()) {
      spec_->kind = Spectral::Kind::fourier;
      const int N = g.cells_per_axis();
      spec_->symbol.resize(m);
      for (long i = 0; i < m; ++i) {
        auto k = g.multi_index(i);
        spec_->symbol[i] = op_->symbol(k[0], k[1]);
      }
      std::vector<cplx> buf(m);
      auto* p = reinterpret_cast<fftw_complex*>(buf.data());
      std::lock_guard<std::mutex> lock(g_fftw_plan_mutex);
      unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
      if (g.dim() == 1) {
        spec_->fwd = fftw_plan_dft_1d(N, p, p, FFTW_FORWARD, flags);
        spec_->bwd = fftw_plan_dft_1d(N, p, p, FFTW_BACKWARD, flags);
      } else {
        spec_->fwd = fftw_plan_dft_2d(N, N, p, p, FFTW_FORWARD, flags);
        spec_->bwd = fftw_plan_dft_2d(N, N, p, p, FFTW_BACKWARD, flags);
      }
    } else {
      if (m > opt_.dense_limit) {
        std::ostringstream os;
        os << "semigroup: spectral method needs at most " << opt_.dense_limit << " cells, got " << m;
        throw DomainError(os.str());
      }
      Eigen::MatrixXcd D = op_->dense();
      if (op_->is_hermitian() && op_->is_real()) {
        spec_->kind = Spectral::Kind::dense_symmetric;
        Eigen::MatrixXd Dr = D.real();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Dr);
        spec_->evals_real = es.eigenvalues();
        spec_->V_real = es.eigenvectors();
      } else {
        spec_->kind = Spectral::Kind::dense_general;
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(D);
        if (es.info() != Eigen::Success) throw ConvergenceError("semigroup: eigensolver failed");
        spec_->evals = es.eigenvalues();
        spec_->V = es.eigenvectors();
        spec_->Vinv = spec_->V.partialPivLu().inverse();
      }
    }
  } else if (method_ == SemigroupMethod::scaling_squaring) {
    if (m > 1024) throw DomainError("semigroup: scaling and squaring limited to 1024 cells");
    spec_ = std::make_unique<Spectral>();
    spec_->kind = Spectral::Kind::dense_matrix;
    spec_->L = op_->dense();
  }
}

SemigroupEvaluator::~SemigroupEvaluator() = default;

void SemigroupEvaluator::check_sector(cplx z) const {
  if (z == cplx(0.0, 0.0)) return;
  if (!(std::abs(std::arg(z)) < mu_)) {
    std::ostringstream os;
    os << "semigroup: z = " << z.real() << (z.imag() < 0 ? "" : "+") << z.imag()
       << "i lies outside the sector |arg z| < " << mu_ << " (theta = " << op_->theta() << ")";
    throw SectorError(os.str());
  }
}

std::vector<Field> SemigroupEvaluator::apply_functions(const std::vector<ScalarFn>& g,
                                                       const Field& f, bool adjoint) const {
  const long m = op_->size();
  if (f.size() != m) throw DomainError("semigroup: field size mismatch");
  std::vector<ScalarFn> gg = g;
  if (adjoint) {
    // g(L)^* = g*(L^*) with g*(z) = conj(g(conj z)).
    for (auto& fn : gg) {
      ScalarFn base = fn;
      fn = [base](cplx z) { return std::conj(base(std::conj(z))); };
    }
  }
  std::vector<Field> out;
  switch (method_) {
    case SemigroupMethod::spectral: {
      out.assign(g.size(), Field(m));
      if (spec_->kind == Spectral::Kind::fourier) {
        Field fh = f;
        fftw_execute_dft(spec_->fwd, reinterpret_cast<fftw_complex*>(fh.data()),
                         reinterpret_cast<fftw_complex*>(fh.data()));
        // The symbol of L^* is the conjugate symbol.
        for (std::size_t k = 0; k < gg.size(); ++k) {
          Field& o = out[k];
          for (long i = 0; i < m; ++i) {
            cplx s = adjoint ? std::conj(spec_->symbol[i]) : spec_->symbol[i];
            o[i] = gg[k](s) * fh[i] / static_cast<double>(m);
          }
          fftw_execute_dft(spec_->bwd, reinterpret_cast<fftw_complex*>(o.data()),
                           reinterpret_cast<fftw_complex*>(o.data()));
        }
      } else if (spec_->kind == Spectral::Kind::dense_symmetric) {
        const auto& V = spec_->V_real;
        Eigen::VectorXcd c = V.transpose().cast<cplx>() * f;
        for (std::size_t k = 0; k < gg.size(); ++k) {
          Eigen::VectorXcd y(m);
          for (long i = 0; i < m; ++i) y[i] = gg[k](cplx(spec_->evals_real[i], 0.0)) * c[i];
          out[k] = V.cast<cplx>() * y;
        }
      } else {
        // L = V diag(ev) V^{-1}; L^* = V^{-H} diag(conj ev) V^H.
        Eigen::VectorXcd c = adjoint ? Eigen::VectorXcd(spec_->V.adjoint() * f)
                                     : Eigen::VectorXcd(spec_->Vinv * f);
        for (std::size_t k = 0; k < gg.size(); ++k) {
          Eigen::VectorXcd y(m);
          for (long i = 0; i < m; ++i) {
            cplx ev = adjoint ? std::conj(spec_->evals[i]) : spec_->evals[i];
            y[i] = gg[k](ev) * c[i];
          }
          out[k] = adjoint ? Eigen::VectorXcd(spec_->Vinv.adjoint() * y) : Eigen::VectorXcd(spec_->V * y);
        }
      }
      break;
    }
    case SemigroupMethod::krylov: {
      detail::KrylovSettings s{opt_.krylov_tol, op_->is_hermitian() ? opt_.lanczos_max_dim : opt_.krylov_max_dim};
      int used = 0;
      out = detail::krylov_functions(*op_, adjoint, gg, f, s, &used);
      last_dim_.store(used);
      break;
    }
    case SemigroupMethod::scaling_squaring:
      throw DomainError("semigroup: scaling and squaring evaluates exponentials only");
    case SemigroupMethod::automatic:
      throw DomainError("semigroup: unresolved method");
  }
  return out;
}

Field SemigroupEvaluator::apply_function(const ScalarFn& g, const Field& f, bool adjoint) const {
  return apply_functions({g}, f, adjoint).front();
}

std::vector<Field> SemigroupEvaluator::apply_each(const std::vector<cplx>& z, const Field& f) const {
  for (cplx zk : z) check_sector(zk);
  if (method_ == SemigroupMethod::scaling_squaring) {
    std::vector<Field> out;
    for (cplx zk : z) {
      if (zk == cplx(0.0, 0.0)) {
        out.push_back(f);
        continue;
      }
      Eigen::MatrixXcd E = (-zk * spec_->L).exp();
      out.push_back(E * f);
    }
    return out;
  }
  std::vector<ScalarFn> g;
  g.reserve(z.size());
  for (cplx zk : z) g.push_back([zk](cplx l) { return std::exp(-zk * l); });
  std::vector<Field> out = apply_functions(g, f);
  for (std::size_t k = 0; k < z.size(); ++k)
    if (z[k] == cplx(0.0, 0.0)) out[k] = f;
  return out;
}

Field SemigroupEvaluator::apply(cplx z, const Field& f) const {
  check_sector(z);
  if (z == cplx(0.0, 0.0)) return f;
  return apply_each({z}, f).front();
}

VecField SemigroupEvaluator::apply_gradient(cplx z, const Field& f) const {
  return op_->gradient(apply(z, f));
}

Field SemigroupEvaluator::apply_sum(const std::vector<cplx>& z, const std::vector<cplx>& c,
                                    const Field& f) const {
  if (z.size() != c.size()) throw DomainError("semigroup: node and weight counts differ");
  for (cplx zk : z) check_sector(zk);
  if (method_ == SemigroupMethod::scaling_squaring) {
    Field out = Field::Zero(f.size());
    auto each = apply_each(z, f);
    for (std::size_t k = 0; k < z.size(); ++k) out += c[k] * each[k];
    return out;
  }
  auto zs = std::make_shared<std::vector<cplx>>(z);
  auto cs = std::make_shared<std::vector<cplx>>(c);
  ScalarFn g = [zs, cs](cplx l) {
    cplx s = 0.0;
    for (std::size_t k = 0; k < zs->size(); ++k) s += (*cs)[k] * std::exp(-(*zs)[k] * l);
    return s;
  };
  return apply_function(g, f);
}

std::vector<cplx> SemigroupEvaluator::eigenvalues() const {
  std::vector<cplx> out;
  if (!spec_) return out;
  switch (spec_->kind) {
    case Spectral::Kind::fourier: return spec_->symbol;
    case Spectral::Kind::dense_symmetric:
      for (long i = 0; i < spec_->evals_real.size(); ++i) out.emplace_back(spec_->evals_real[i], 0.0);
      return out;
    case Spectral::Kind::dense_general:
      return std::vector<cplx>(spec_->evals.data(), spec_->evals.data() + spec_->evals.size());
    case Spectral::Kind::dense_matrix: return out;
  }
  return out;
}

}  // namespace ellip
