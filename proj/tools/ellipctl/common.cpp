#include "common.hpp"

#include "ellip/error.hpp"
#include "ellip/exponents.hpp"
#include "ellip/fields.hpp"
#include "ellip/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#ifndef ELLIP_VERSION
#define ELLIP_VERSION "0.0.0"
#endif

namespace ellipctl {

using namespace ellip;

void OperatorArgs::add(CLI::App* app) {
  app->add_option("--n", n, "Dimension (1 or 2)")->check(CLI::IsMember({1, 2}));
  app->add_option("--N", N, "Cells per axis (power of two)");
  app->add_option("--coeff", coeff, "identity | meyers-kenig:q | coefficient dump file");
}

std::shared_ptr<const EllipticOperator> OperatorArgs::build() const {
  if (coeff == "identity")
    return std::make_shared<const EllipticOperator>(EllipticOperator::assemble(CoefficientField::identity(PeriodicGrid(n, N))));
  if (coeff.rfind("meyers-kenig:", 0) == 0) {
    double q = std::stod(coeff.substr(13));
    return std::make_shared<const EllipticOperator>(EllipticOperator::assemble(meyers_kenig(q, PeriodicGrid(2, N))));
  }
  FieldDump d = read_field_file(coeff);
  return std::make_shared<const EllipticOperator>(EllipticOperator::assemble(d.as_coeff()));
}

void FieldArgs::add(CLI::App* app, const std::string& flag) {
  app->add_option(flag, path, "Field dump file (random smooth field when omitted)");
  app->add_option(flag + "-seed", seed, "Seed of the random field");
}

Field FieldArgs::load(const PeriodicGrid& g) const {
  if (path.empty()) return random_smooth_field(g, seed);
  FieldDump d = read_field_file(path);
  if (!(d.grid() == g)) throw DomainError(name + ": dump grid does not match the operator grid");
  return d.as_complex();
}

void WeightArgs::add(CLI::App* app) {
  app->add_option("--weight", path, "Weight dump file");
  app->add_option_function<double>(
      "--power-alpha",
      [this](double a) {
        alpha = a;
        has_alpha = true;
      },
      "Power weight |x|^alpha");
}

WeightField WeightArgs::load(const PeriodicGrid& g) const {
  if (!path.empty()) {
    FieldDump d = read_field_file(path);
    if (!(d.grid() == g)) throw DomainError("weight: dump grid does not match");
    return d.as_weight();
  }
  if (has_alpha) return WeightField::power(g, alpha);
  return WeightField::unweighted(g);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ParseError("not a number: '" + item + "'");
    }
  }
  return out;
}

json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json exponent(const ExponentValue& e) { return e.to_string(); }

void emit(const json& j, const std::string& path) {
  std::string text = j.dump(2) + "\n";
  write_text(path, text);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

std::string hex(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json header(std::uint64_t seed) {
  json j;
  j["version"] = ELLIP_VERSION;
  j["seed"] = seed;
  return j;
}

}  // namespace ellipctl
