#include "ddt/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ddt/error.hpp"

namespace ddt {

namespace {

double density_at(std::span<const double> values, double h, double x) {
  double s = 0.0;
  for (double v : values) {
    const double z = (x - v) / h;
    s += std::exp(-0.5 * z * z);
  }
  return s / (static_cast<double>(values.size()) * h * std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace

double quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw ContractError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = prob * static_cast<double>(values.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= values.size()) return values.back();
  const double w = pos - static_cast<double>(i);
  return values[i] * (1.0 - w) + values[i + 1] * w;
}

double silverman_bandwidth(std::span<const double> values) {
  if (values.empty()) throw ContractError("bandwidth of an empty sample");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
  std::vector<double> copy(values.begin(), values.end());
  const double iqr = quantile(copy, 0.75) - quantile(copy, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0)) spread = sd;
  if (!(spread > 0)) return 1e-12 * std::max(1.0, std::abs(mean));
  return 0.9 * spread * std::pow(n, -0.2);
}

KdeSummary gaussian_kde(std::span<const double> values, double lo, double hi, std::size_t points) {
  if (values.empty()) throw ContractError("kde of an empty sample");
  if (points < 3) throw ContractError("kde grid needs at least 3 points");
  KdeSummary out;
  out.bandwidth = silverman_bandwidth(values);
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  if (*mn == *mx) {
    out.mode = *mn;
    out.grid = {*mn};
    out.density = {1.0};
    return out;
  }
  const double a = std::max(lo, *mn - 3 * out.bandwidth);
  const double b = std::min(hi, *mx + 3 * out.bandwidth);
  out.grid.resize(points);
  out.density.resize(points);
  const double step = (b - a) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    out.grid[i] = a + step * static_cast<double>(i);
    out.density[i] = density_at(values, out.bandwidth, out.grid[i]);
  }
  const auto best = static_cast<std::size_t>(std::max_element(out.density.begin(), out.density.end()) -
                                             out.density.begin());
  const double ra = out.grid[best > 0 ? best - 1 : 0];
  const double rb = out.grid[std::min(best + 1, points - 1)];
  out.mode = out.grid[best];
  double top = out.density[best];
  const double fine = (rb - ra) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    const double x = ra + fine * static_cast<double>(i);
    const double d = density_at(values, out.bandwidth, x);
    if (d > top) {
      top = d;
      out.mode = x;
    }
  }
  return out;
}

}  // namespace ddt
