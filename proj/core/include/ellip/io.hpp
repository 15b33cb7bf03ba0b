#pragma once

// Text dumps of grid fields. Format: a header line
//   ellipfield v1 <n> <N> <kind>
// followed by one line per cell in row-major order. Kinds and line contents:
//   real     v
//   weight   v            (positive)
//   complex  re im
//   vector   re_0 im_0 ... re_{n-1} im_{n-1}
//   coeff    re im of A_00 A_01 ... A_{n-1,n-1} (row-major n x n)
// Values are written with 17 significant digits so dumps round-trip exactly.

#include "ellip/grid.hpp"
#include "ellip/operator.hpp"

#include <iosfwd>
#include <string>

namespace ellip {

enum class FieldKind { real, weight, complex, vector, coeff };
const char* to_string(FieldKind k);

struct FieldDump {
  int n = 0;
  int N = 0;
  FieldKind kind = FieldKind::real;
  Eigen::MatrixXcd values;  // cells x components

  PeriodicGrid grid() const { return PeriodicGrid(n, N); }
  RealField as_real() const;  // real, weight; rejects nonzero imaginary parts
  Field as_complex() const;   // real, weight, complex
  VecField as_vector() const;
  WeightField as_weight() const;
  CoefficientField as_coeff() const;
};

void write_field(std::ostream& os, const PeriodicGrid& g, const RealField& f, FieldKind kind = FieldKind::real);
void write_field(std::ostream& os, const PeriodicGrid& g, const Field& f);
void write_field(std::ostream& os, const PeriodicGrid& g, const VecField& f);
void write_field(std::ostream& os, const WeightField& w);
void write_field(std::ostream& os, const CoefficientField& a);

// Throws ParseError on malformed input, naming the line.
FieldDump read_field(std::istream& is);
FieldDump read_field_file(const std::string& path);
void write_field_file(const std::string& path, const std::function<void(std::ostream&)>& writer);

}  // namespace ellip
