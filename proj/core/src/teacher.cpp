#include "ddt/teacher.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ddt/error.hpp"

namespace ddt {

namespace {

ResponseKind continuous_response() { return ResponseKind{ResponseType::continuous, {}}; }

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

// Tabulated ramp with linear interpolation.
struct Ramp {
  double c = 0, d = 1;
  std::vector<double> f;

  double at(double t) const {
    const double u = (t - c) / (d - c) * static_cast<double>(f.size() - 1);
    const auto i = std::min(static_cast<std::size_t>(std::max(0.0, u)), f.size() - 2);
    const double w = std::clamp(u - static_cast<double>(i), 0.0, 1.0);
    return f[i] * (1.0 - w) + f[i + 1] * w;
  }
};

// Integrates F' = (F/(t-a) + (T-F)/(b-t)) / 2 from c to d with RK4, where F is
// the running integral of the teacher from a. Returns F(d) and the
// tabulated derivative.
std::pair<double, std::vector<double>> integrate_ramp(double a, double b, double c, double d, double low, double total,
                                                      std::size_t steps) {
  auto rhs = [&](double t, double F) { return 0.5 * (F / (t - a) + (total - F) / (b - t)); };
  const double h = (d - c) / static_cast<double>(steps);
  double F = low * (c - a);
  std::vector<double> f;
  f.reserve(steps + 1);
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = c + h * static_cast<double>(i);
    const double k1 = rhs(t, F);
    const double k2 = rhs(t + h / 2, F + h / 2 * k1);
    const double k3 = rhs(t + h / 2, F + h / 2 * k2);
    const double k4 = rhs(t + h, F + h * k3);
    f.push_back(k1);
    F += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  f.push_back(rhs(d, F));
  return {F, std::move(f)};
}

class LatticeLookup {
 public:
  static std::optional<LatticeLookup> build(const CovariateSchema& schema, const Dataset& grid) {
    LatticeLookup out;
    const std::size_t p = schema.size();
    std::size_t cells = 1;
    for (std::size_t j = 0; j < p; ++j) {
      if (!schema[j].is_continuous()) return std::nullopt;
      std::vector<double> axis;
      for (std::size_t i = 0; i < grid.size(); ++i) axis.push_back(grid.x(i, j));
      std::sort(axis.begin(), axis.end());
      axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
      cells *= axis.size();
      if (cells > grid.size()) return std::nullopt;
      out.axes_.push_back(std::move(axis));
    }
    if (cells != grid.size()) return std::nullopt;
    out.values_.assign(cells, NAN);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::size_t flat = 0;
      for (std::size_t j = 0; j < p; ++j) {
        const auto& axis = out.axes_[j];
        const auto k = static_cast<std::size_t>(std::lower_bound(axis.begin(), axis.end(), grid.x(i, j)) - axis.begin());
        flat = flat * axis.size() + k;
      }
      if (!std::isnan(out.values_[flat])) return std::nullopt;
      out.values_[flat] = grid.y[i];
    }
    return out;
  }

  double lookup(std::span<const double> row) const {
    std::size_t flat = 0;
    for (std::size_t j = 0; j < axes_.size(); ++j) {
      const auto& axis = axes_[j];
      auto hi = static_cast<std::size_t>(std::lower_bound(axis.begin(), axis.end(), row[j]) - axis.begin());
      std::size_t k;
      if (hi == 0) {
        k = 0;
      } else if (hi == axis.size()) {
        k = axis.size() - 1;
      } else {
        const double dlo = row[j] - axis[hi - 1];
        const double dhi = axis[hi] - row[j];
        const double tie = 1e-9 * (axis[hi] - axis[hi - 1]);
        k = dhi < dlo - tie ? hi : hi - 1;
      }
      flat = flat * axis.size() + k;
    }
    return values_[flat];
  }

 private:
  std::vector<std::vector<double>> axes_;
  std::vector<double> values_;
};

class GridTeacher : public Teacher {
 public:
  GridTeacher(const CovariateSchema& schema, const Dataset& grid) : schema_(schema), grid_(grid) {
    if (grid.empty()) throw DataError("grid teacher needs at least one row");
    grid.validate(schema);
    lattice_ = LatticeLookup::build(schema, grid);
    for (std::size_t j = 0; j < schema.size(); ++j) {
      double lo = INFINITY, hi = -INFINITY;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        lo = std::min(lo, grid.x(i, j));
        hi = std::max(hi, grid.x(i, j));
      }
      scale_.push_back(hi > lo ? 1.0 / (hi - lo) : 1.0);
    }
  }

  std::vector<double> evaluate(const RowMatrix& rows) const override {
    std::vector<double> out;
    out.reserve(rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i) {
      out.push_back(lattice_ ? lattice_->lookup(rows.row(i)) : nearest(rows.row(i)));
    }
    return out;
  }

  const ResponseKind& response_kind() const override { return schema_.response(); }
  std::string descriptor() const override { return "grid(" + std::to_string(grid_.size()) + " rows)"; }

 private:
  double nearest(std::span<const double> q) const {
    std::size_t best = 0;
    std::size_t best_mismatch = SIZE_MAX;
    double best_dist = INFINITY;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      const auto row = grid_.x.row(i);
      std::size_t mismatch = 0;
      double dist = 0.0;
      for (std::size_t j = 0; j < q.size(); ++j) {
        if (schema_[j].is_continuous()) {
          const double d = (q[j] - row[j]) * scale_[j];
          dist += d * d;
        } else if (q[j] != row[j]) {
          ++mismatch;
        }
      }
      const double tie = 1e-12 * std::max(1.0, best_dist);
      bool take = false;
      if (mismatch != best_mismatch) {
        take = mismatch < best_mismatch;
      } else if (dist < best_dist - tie) {
        take = true;
      } else if (dist <= best_dist + tie) {
        const auto incumbent = grid_.x.row(best);
        take = std::lexicographical_compare(row.begin(), row.end(), incumbent.begin(), incumbent.end());
      }
      if (take) {
        best = i;
        best_mismatch = mismatch;
        best_dist = dist;
      }
    }
    return grid_.y[best];
  }

  CovariateSchema schema_;
  Dataset grid_;
  std::optional<LatticeLookup> lattice_;
  std::vector<double> scale_;
};

}  // namespace

std::vector<double> predict_batch(const Teacher& teacher, const RowMatrix& rows) {
  if (rows.rows() == 0) return {};
  auto out = teacher.evaluate(rows);
  if (out.size() != rows.rows()) {
    throw TeacherError("teacher " + teacher.descriptor() + " returned " + std::to_string(out.size()) +
                       " values for " + std::to_string(rows.rows()) + " rows");
  }
  const auto& kind = teacher.response_kind();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = out[i];
    if (!std::isfinite(v)) throw TeacherError("teacher returned a non-finite value for row " + std::to_string(i));
    if (kind.is_categorical() && (v < 0 || v != std::floor(v) || static_cast<std::size_t>(v) >= kind.class_count())) {
      throw TeacherError("teacher returned an unknown class for row " + std::to_string(i));
    }
  }
  return out;
}

FunctionTeacher::FunctionTeacher(Fn fn, ResponseKind kind, std::string descriptor)
    : fn_(std::move(fn)), kind_(std::move(kind)), descriptor_(std::move(descriptor)) {}

std::vector<double> FunctionTeacher::evaluate(const RowMatrix& rows) const {
  std::vector<double> out;
  out.reserve(rows.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i) out.push_back(fn_(rows.row(i)));
  return out;
}

CovariateSchema unary_schema(double a, double b, const std::string& name) {
  return CovariateSchema({Covariate{name, ContinuousDomain{a, b}}}, continuous_response());
}

TeacherPtr make_step_teacher(double a, double b, double cut, double left, double right) {
  if (!(a < cut && cut < b)) throw ContractError("step teacher needs a < cut < b");
  return std::make_shared<FunctionTeacher>(
      [=](std::span<const double> x) { return x[0] < cut ? left : right; }, continuous_response(),
      "step(cut=" + fmt(cut) + ", " + fmt(left) + "/" + fmt(right) + ")");
}

TeacherPtr make_piecewise_teacher(double a, double b, std::vector<double> breaks, std::vector<double> values) {
  if (values.size() != breaks.size() + 1) throw ContractError("piecewise teacher needs one more value than breaks");
  double prev = a;
  for (double t : breaks) {
    if (!(t > prev)) throw ContractError("piecewise breaks must increase strictly inside (a, b)");
    prev = t;
  }
  if (!(prev < b)) throw ContractError("piecewise breaks must lie inside (a, b)");
  std::string desc = "piecewise(";
  for (std::size_t i = 0; i < breaks.size(); ++i) desc += (i ? "," : "") + fmt(breaks[i]);
  desc += ")";
  return std::make_shared<FunctionTeacher>(
      [breaks = std::move(breaks), values = std::move(values)](std::span<const double> x) {
        const auto k = std::upper_bound(breaks.begin(), breaks.end(), x[0]) - breaks.begin();
        return values[static_cast<std::size_t>(k)];
      },
      continuous_response(), desc);
}

TeacherPtr make_plateau_teacher(double a, double b, double c, double d, double low, double high) {
  if (!(a < c && c < d && d < b)) throw ContractError("plateau teacher needs a < c < d < b");
  if (!(low < high)) throw ContractError("plateau teacher needs low < high");
  constexpr std::size_t steps = 4000;
  auto residual = [&](double total) {
    return integrate_ramp(a, b, c, d, low, total, steps).first + high * (b - d) - total;
  };
  double lo = low * (b - a), hi = high * (b - a);
  double r_lo = residual(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::abs(hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double r = residual(mid);
    if ((r < 0) == (r_lo < 0)) {
      lo = mid;
      r_lo = r;
    } else {
      hi = mid;
    }
  }
  Ramp ramp{c, d, integrate_ramp(a, b, c, d, low, 0.5 * (lo + hi), steps).second};
  return std::make_shared<FunctionTeacher>(
      [=](std::span<const double> x) {
        if (x[0] < c) return low;
        if (x[0] > d) return high;
        return ramp.at(x[0]);
      },
      continuous_response(), "plateau([" + fmt(c) + ", " + fmt(d) + "])");
}

TeacherPtr make_grid_teacher(const CovariateSchema& schema, const Dataset& grid) {
  return std::make_shared<GridTeacher>(schema, grid);
}

}  // namespace ddt
