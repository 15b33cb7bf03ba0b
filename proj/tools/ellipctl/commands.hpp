#pragma once

#include "ellip/funcalc.hpp"

#include <CLI11.hpp>

#include <vector>

namespace ellipctl {

void register_commands(CLI::App& app);

// Symbols checked by `funcalc-check`; the exponential ones are dilated by
// 1/100 so they are not negligible on the spectrum of a 64^2 grid.
std::vector<ellip::HoloSymbol> funcalc_corpus();

}  // namespace ellipctl
