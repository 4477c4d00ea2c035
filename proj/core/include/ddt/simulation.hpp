#pragma once

#include <cstddef>
#include <span>

#include "ddt/domain.hpp"
#include "ddt/random.hpp"

namespace ddt {

// Piecewise-constant surface on [0, 10]^2 with a bump and a smooth ripple.
double sim2d_function(double x1, double x2);

// x1, x2 continuous on [0, 10]; continuous response.
CovariateSchema sim2d_schema();

// Full grid with `per_axis` points per axis (row-major in x1, then x2).
Dataset sim2d_grid(std::size_t per_axis = 51);

// `n` distinct rows of `data`, in the order drawn.
Dataset subsample(const Dataset& data, std::size_t n, Rng& rng);

double mean_squared_difference(std::span<const double> a, std::span<const double> b);

}  // namespace ddt
