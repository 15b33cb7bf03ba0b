#pragma once

#include "ellip/exponents.hpp"
#include "ellip/grid.hpp"
#include "ellip/operator.hpp"
#include "ellip/semigroup.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace ellipctl {

using json = nlohmann::ordered_json;

// Grid and operator selection shared by most subcommands.
struct OperatorArgs {
  int n = 2;
  int N = 32;
  std::string coeff = "identity";  // identity | meyers-kenig:q | path to a coeff dump

  void add(CLI::App* app);
  std::shared_ptr<const ellip::EllipticOperator> build() const;
};

// An input field: a dump file, or a seeded random field when no file is given.
struct FieldArgs {
  std::string path;
  std::uint64_t seed = 1;
  std::string name = "field";

  void add(CLI::App* app, const std::string& flag = "--field");
  ellip::Field load(const ellip::PeriodicGrid& g) const;
};

// Optional weight: a dump file or |x|^alpha; unweighted when neither is set.
struct WeightArgs {
  std::string path;
  double alpha = 0.0;
  bool has_alpha = false;

  void add(CLI::App* app);
  ellip::WeightField load(const ellip::PeriodicGrid& g) const;
};

std::vector<double> parse_list(const std::string& s);

// Full-precision JSON numbers; non-finite values become strings.
json num(double v);
json exponent(const ellip::ExponentValue& e);

// Writes to `path`, or stdout for "" or "-".
void emit(const json& j, const std::string& path);
void write_text(const std::string& path, const std::string& text);

json header(std::uint64_t seed);
std::string hex(std::uint64_t v);

}  // namespace ellipctl
