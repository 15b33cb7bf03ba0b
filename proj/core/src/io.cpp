#include "ellip/io.hpp"

#include "ellip/error.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace ellip {

const char* to_string(FieldKind k) {
  switch (k) {
    case FieldKind::real: return "real";
    case FieldKind::weight: return "weight";
    case FieldKind::complex: return "complex";
    case FieldKind::vector: return "vector";
    case FieldKind::coeff: return "coeff";
  }
  return "?";
}

namespace {

int components(FieldKind k, int n) {
  switch (k) {
    case FieldKind::real:
    case FieldKind::weight:
    case FieldKind::complex: return 1;
    case FieldKind::vector: return n;
    case FieldKind::coeff: return n * n;
  }
  return 0;
}

bool is_real_kind(FieldKind k) { return k == FieldKind::real || k == FieldKind::weight; }

void header(std::ostream& os, const PeriodicGrid& g, FieldKind k) {
  os << "ellipfield v1 " << g.dim() << ' ' << g.cells_per_axis() << ' ' << to_string(k) << '\n';
  os << std::setprecision(17);
}

void put(std::ostream& os, const cplx& v, bool first) {
  if (!first) os << ' ';
  os << v.real() << ' ' << v.imag();
}

}  // namespace

void write_field(std::ostream& os, const PeriodicGrid& g, const RealField& f, FieldKind kind) {
  if (!is_real_kind(kind)) throw DomainError("write_field: real data needs kind real or weight");
  if (f.size() != g.size()) throw DomainError("write_field: size mismatch");
  header(os, g, kind);
  for (long i = 0; i < f.size(); ++i) os << f[i] << '\n';
}

void write_field(std::ostream& os, const PeriodicGrid& g, const Field& f) {
  if (f.size() != g.size()) throw DomainError("write_field: size mismatch");
  header(os, g, FieldKind::complex);
  for (long i = 0; i < f.size(); ++i) {
    put(os, f[i], true);
    os << '\n';
  }
}

void write_field(std::ostream& os, const PeriodicGrid& g, const VecField& f) {
  if (f.rows() != g.size() || f.cols() != g.dim()) throw DomainError("write_field: vector field shape mismatch");
  header(os, g, FieldKind::vector);
  for (long i = 0; i < f.rows(); ++i) {
    for (int d = 0; d < g.dim(); ++d) put(os, f(i, d), d == 0);
    os << '\n';
  }
}

void write_field(std::ostream& os, const WeightField& w) { write_field(os, w.grid(), w.values(), FieldKind::weight); }

void write_field(std::ostream& os, const CoefficientField& a) {
  const PeriodicGrid& g = a.grid();
  const int n = g.dim();
  header(os, g, FieldKind::coeff);
  for (long i = 0; i < g.size(); ++i) {
    const Mat2& m = a.at(i);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) put(os, m(r, c), r == 0 && c == 0);
    os << '\n';
  }
}

FieldDump read_field(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError("field dump: empty input");
  std::istringstream hs(line);
  std::string magic, version, kind;
  FieldDump d;
  if (!(hs >> magic >> version >> d.n >> d.N >> kind) || magic != "ellipfield")
    throw ParseError("field dump line 1: expected 'ellipfield v1 n N kind'");
  if (version != "v1") throw ParseError("field dump line 1: unsupported version " + version);
  if (kind == "real")
    d.kind = FieldKind::real;
  else if (kind == "weight")
    d.kind = FieldKind::weight;
  else if (kind == "complex")
    d.kind = FieldKind::complex;
  else if (kind == "vector")
    d.kind = FieldKind::vector;
  else if (kind == "coeff")
    d.kind = FieldKind::coeff;
  else
    throw ParseError("field dump line 1: unknown kind " + kind);
  PeriodicGrid g(d.n, d.N);  // validates n and N
  const int nc = components(d.kind, d.n);
  const int per_value = is_real_kind(d.kind) ? 1 : 2;
  d.values.resize(g.size(), nc);
  for (long i = 0; i < g.size(); ++i) {
    if (!std::getline(is, line)) throw ParseError("field dump: expected " + std::to_string(g.size()) + " value lines, got " + std::to_string(i));
    std::istringstream ls(line);
    for (int c = 0; c < nc; ++c) {
      double re = 0.0, im = 0.0;
      if (!(ls >> re) || (per_value == 2 && !(ls >> im)))
        throw ParseError("field dump line " + std::to_string(i + 2) + ": too few values");
      d.values(i, c) = cplx(re, im);
    }
    std::string extra;
    if (ls >> extra) throw ParseError("field dump line " + std::to_string(i + 2) + ": trailing data");
  }
  return d;
}

FieldDump read_field_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_field(in);
}

void write_field_file(const std::string& path, const std::function<void(std::ostream&)>& writer) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  writer(out);
  if (!out) throw Error("write failed: " + path);
}

RealField FieldDump::as_real() const {
  if (values.cols() != 1) throw DomainError("field dump: not a scalar field");
  if (values.imag().cwiseAbs().maxCoeff() != 0.0) throw DomainError("field dump: complex values where real expected");
  return values.col(0).real();
}

Field FieldDump::as_complex() const {
  if (values.cols() != 1) throw DomainError("field dump: not a scalar field");
  return values.col(0);
}

VecField FieldDump::as_vector() const {
  if (kind != FieldKind::vector) throw DomainError("field dump: not a vector field");
  return values;
}

WeightField FieldDump::as_weight() const { return WeightField(grid(), as_real()); }

CoefficientField FieldDump::as_coeff() const {
  if (kind != FieldKind::coeff) throw DomainError("field dump: not a coefficient field");
  PeriodicGrid g = grid();
  std::vector<Mat2> A(g.size(), Mat2::Identity());
  for (long i = 0; i < g.size(); ++i)
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) A[i](r, c) = values(i, r * n + c);
  return CoefficientField(g, std::move(A));
}

}  // namespace ellip
