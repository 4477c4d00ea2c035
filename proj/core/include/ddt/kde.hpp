#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ddt {

// Rule-of-thumb bandwidth 0.9 * min(sd, IQR/1.34) * n^(-1/5), falling back to
// sd, then to 1e-12 * max(1, |x|) for degenerate samples.
double silverman_bandwidth(std::span<const double> values);

struct KdeSummary {
  double bandwidth = 0.0;
  double mode = 0.0;
  std::vector<double> grid;
  std::vector<double> density;
};

// Gaussian kernel density evaluated on `points` equally spaced values
// spanning the sample +- 3 bandwidths, clipped to [lo, hi]. The mode is the
// grid maximum refined by a second grid between its neighbours.
KdeSummary gaussian_kde(std::span<const double> values, double lo, double hi, std::size_t points = 512);

double quantile(std::vector<double> values, double prob);

}  // namespace ddt
