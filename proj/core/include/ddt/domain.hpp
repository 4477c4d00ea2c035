#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ddt/random.hpp"

namespace ddt {

struct ContinuousDomain {
  double lo = 0.0;
  double hi = 1.0;
};

struct CategoricalDomain {
  std::vector<std::string> levels;
};

struct Covariate {
  std::string name;
  std::variant<ContinuousDomain, CategoricalDomain> domain;

  bool is_continuous() const { return std::holds_alternative<ContinuousDomain>(domain); }
  const ContinuousDomain& continuous() const { return std::get<ContinuousDomain>(domain); }
  const CategoricalDomain& categorical() const { return std::get<CategoricalDomain>(domain); }
  std::size_t level_count() const;
};

enum class ResponseType { continuous, categorical };

struct ResponseKind {
  ResponseType type = ResponseType::continuous;
  std::vector<std::string> classes;  // categorical only

  bool is_categorical() const { return type == ResponseType::categorical; }
  std::size_t class_count() const { return classes.size(); }
  bool operator==(const ResponseKind&) const = default;
};

// Names, kinds and domains of the covariates plus the response kind.
// Categorical values are carried as level codes (0, 1, ...) in rows; the same
// holds for categorical responses.
class CovariateSchema {
 public:
  CovariateSchema(std::vector<Covariate> covariates, ResponseKind response);

  std::size_t size() const { return covariates_.size(); }
  const Covariate& operator[](std::size_t i) const { return covariates_[i]; }
  const std::vector<Covariate>& covariates() const { return covariates_; }
  const ResponseKind& response() const { return response_; }

  std::optional<std::size_t> find(std::string_view name) const;
  // Level code of `level` for covariate i; throws DataError("unknown level").
  std::size_t level_code(std::size_t i, std::string_view level) const;
  std::size_t class_code(std::string_view label) const;
  // Human-readable response value ("3.5" or the class label).
  std::string format_response(double value) const;

  bool operator==(const CovariateSchema&) const;

 private:
  std::vector<Covariate> covariates_;
  ResponseKind response_;
};

// Interval restriction of a continuous covariate. Membership is
// lo <= v < hi, or lo <= v <= hi when hi_closed (the schema's topmost bound).
struct IntervalBound {
  double lo = 0.0;
  double hi = 1.0;
  bool hi_closed = true;

  double width() const { return hi - lo; }
  bool contains(double v) const { return v >= lo && (v < hi || (hi_closed && v == hi)); }
  bool operator==(const IntervalBound&) const = default;
};

// Non-empty subset of a categorical covariate's levels, indexed by level code.
struct LevelSubset {
  std::vector<bool> allowed;

  bool contains(std::size_t level) const { return level < allowed.size() && allowed[level]; }
  std::size_t count() const;
  std::vector<std::size_t> codes() const;
  bool operator==(const LevelSubset&) const = default;
};

using Restriction = std::variant<IntervalBound, LevelSubset>;

struct ThresholdCut {
  double threshold = 0.0;
  bool operator==(const ThresholdCut&) const = default;
};

struct LevelCut {
  std::size_t level = 0;
  bool operator==(const LevelCut&) const = default;
};

// A (covariate, cut) pair. Continuous rows with value < threshold go left;
// categorical rows equal to the level go left (one-vs-rest).
struct SplitRule {
  std::size_t covariate = 0;
  std::variant<ThresholdCut, LevelCut> cut;

  bool goes_left(std::span<const double> row) const;
  bool is_continuous() const { return std::holds_alternative<ThresholdCut>(cut); }
  double threshold() const { return std::get<ThresholdCut>(cut).threshold; }
  std::size_t level() const { return std::get<LevelCut>(cut).level; }
  bool operator==(const SplitRule&) const = default;
};

// Sampling region: one restriction per covariate of the schema.
class Region {
 public:
  Region() = default;
  explicit Region(std::vector<Restriction> bounds);

  static Region full(const CovariateSchema& schema);

  std::size_t size() const { return bounds_.size(); }
  const Restriction& operator[](std::size_t i) const { return bounds_[i]; }
  const IntervalBound& interval(std::size_t i) const { return std::get<IntervalBound>(bounds_[i]); }
  const LevelSubset& levels(std::size_t i) const { return std::get<LevelSubset>(bounds_[i]); }
  bool is_interval(std::size_t i) const { return std::holds_alternative<IntervalBound>(bounds_[i]); }

  // Throws ContractError on dimension mismatch.
  bool contains(std::span<const double> row) const;
  // True when every restriction of this region lies inside `other`'s.
  bool is_subset_of(const Region& other) const;
  // Probability mass of this region under uniform sampling of `root`.
  double mass_within(const Region& root) const;
  void validate_within(const CovariateSchema& schema) const;

  bool operator==(const Region&) const = default;

 private:
  std::vector<Restriction> bounds_;
};

bool region_contains(const Region& region, std::span<const double> row);

// Children of `region` under `rule`: continuous gives ([lo, cut), [cut, hi));
// categorical gives ({k}, rest). Throws ContractError when the cut is not
// strictly inside the interval or the level is not in the subset (or is the
// only level left).
std::pair<Region, Region> split_region(const Region& region, const SplitRule& rule);

// Nested chain of regions R_i ⊃ ... ⊃ R_j.
class SamplingPath {
 public:
  SamplingPath() = default;
  explicit SamplingPath(std::vector<Region> regions);

  void push(Region region);
  const std::vector<Region>& regions() const { return regions_; }
  bool empty() const { return regions_.empty(); }
  // Two paths intersect if a region of one contains a region of the other.
  bool intersects(const SamplingPath& other) const;

 private:
  std::vector<Region> regions_;
};

// Row-major matrix of covariate values.
class RowMatrix {
 public:
  RowMatrix() = default;
  explicit RowMatrix(std::size_t cols) : cols_(cols) {}
  RowMatrix(std::size_t rows, std::size_t cols) : cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return cols_ == 0 ? 0 : data_.size() / cols_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  void push_back(std::span<const double> row);
  void reserve(std::size_t rows) { data_.reserve(rows * cols_); }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const RowMatrix&) const = default;

 private:
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class Provenance { observed, pseudo };

struct Dataset {
  RowMatrix x;
  std::vector<double> y;
  Provenance provenance = Provenance::observed;

  std::size_t size() const { return y.size(); }
  bool empty() const { return y.empty(); }
  // Checks equal lengths and that every row lies in the schema domain.
  void validate(const CovariateSchema& schema) const;
};

// Draws `count` rows uniformly from `region`.
RowMatrix sample_region(const Region& region, std::size_t count, Rng& rng);

struct LoadOptions {
  // Continuous domains are [min, max] widened by this fraction of the range
  // on each side.
  double domain_margin = 0.0;
  // Forces the response kind when inference from the column is not wanted.
  std::optional<ResponseType> response_type;
};

// Reads a comma-separated file with a header row. The last column is the
// response. With a schema hint, columns are matched by name and validated.
std::pair<CovariateSchema, Dataset> load_dataset(const std::filesystem::path& path,
                                                 const std::optional<CovariateSchema>& schema_hint = {},
                                                 const LoadOptions& options = {});

// Covariate rows only (no response column), validated against `schema`.
RowMatrix load_rows(const std::filesystem::path& path, const CovariateSchema& schema);

void write_dataset(const std::filesystem::path& path, const CovariateSchema& schema,
                   const Dataset& data);

}  // namespace ddt
