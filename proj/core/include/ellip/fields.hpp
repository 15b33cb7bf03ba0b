#pragma once

#include "ellip/grid.hpp"

#include <cstdint>

namespace ellip {

// Real trigonometric polynomial with random coefficients on wave numbers
// |k|_inf <= kmax, normalised to unit sup norm. Deterministic in seed.
Field random_smooth_field(const PeriodicGrid& g, std::uint64_t seed, int kmax = 4);

// Independent +-1 values per cell, restricted to a ball (zero outside).
Field random_sign_field(const PeriodicGrid& g, const Ball& support, std::uint64_t seed);

Field indicator(const PeriodicGrid& g, const Ball& b);

// Indicator of b convolved with a C^1 radial profile of width `width`
// (1 inside radius r - width, 0 outside r).
Field smoothed_indicator(const PeriodicGrid& g, const Ball& b, double width);

// C^infinity bump exp(1 - 1/(1 - (|x-c|/r)^2)) supported in b.
Field bump(const PeriodicGrid& g, const Ball& b);

// Coordinate x_d of the cell centers.
Field coordinate(const PeriodicGrid& g, int d);

}  // namespace ellip
