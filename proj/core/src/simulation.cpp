#include "ddt/simulation.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "ddt/error.hpp"

namespace ddt {

double sim2d_function(double x1, double x2) {
  double base;
  if (x1 < 3.0) {
    base = x2 < 6.0 ? 10.0 : 28.0;
  } else if (x2 < 4.0) {
    base = x1 < 7.0 ? 36.0 : 20.0;
  } else if (x1 < 6.5) {
    const double r2 = (x1 - 4.8) * (x1 - 4.8) + (x2 - 7.0) * (x2 - 7.0);
    base = 4.0 + 6.0 * std::exp(-r2 / 1.5);
  } else {
    base = x2 < 7.5 ? 15.0 : 30.0;
  }
  return base + 2.0 * std::sin(1.3 * x1) * std::cos(0.9 * x2);
}

CovariateSchema sim2d_schema() {
  return CovariateSchema({{"x1", ContinuousDomain{0.0, 10.0}}, {"x2", ContinuousDomain{0.0, 10.0}}}, ResponseKind{});
}

Dataset sim2d_grid(std::size_t per_axis) {
  if (per_axis < 2) throw ContractError("grid needs at least two points per axis");
  Dataset grid;
  grid.x = RowMatrix(2);
  grid.x.reserve(per_axis * per_axis);
  const double step = 10.0 / static_cast<double>(per_axis - 1);
  for (std::size_t i = 0; i < per_axis; ++i) {
    for (std::size_t j = 0; j < per_axis; ++j) {
      const double row[2] = {static_cast<double>(i) * step, static_cast<double>(j) * step};
      grid.x.push_back(row);
      grid.y.push_back(sim2d_function(row[0], row[1]));
    }
  }
  return grid;
}

Dataset subsample(const Dataset& data, std::size_t n, Rng& rng) {
  if (n > data.size()) throw ContractError("subsample larger than the data");
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Dataset out;
  out.x = RowMatrix(data.x.cols());
  out.provenance = data.provenance;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t pick = k + static_cast<std::size_t>(rng.below(idx.size() - k));
    std::swap(idx[k], idx[pick]);
    out.x.push_back(data.x.row(idx[k]));
    out.y.push_back(data.y[idx[k]]);
  }
  return out;
}

double mean_squared_difference(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw ContractError("mean_squared_difference needs equal non-empty inputs");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

}  // namespace ddt
