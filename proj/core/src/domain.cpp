#include "ddt/domain.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "ddt/error.hpp"

namespace ddt {

std::size_t Covariate::level_count() const {
  return is_continuous() ? 0 : categorical().levels.size();
}

CovariateSchema::CovariateSchema(std::vector<Covariate> covariates, ResponseKind response)
    : covariates_(std::move(covariates)), response_(std::move(response)) {
  if (covariates_.empty()) throw DataError("schema has no covariates");
  std::set<std::string> names;
  for (const auto& c : covariates_) {
    if (c.name.empty()) throw DataError("covariate with empty name");
    if (!names.insert(c.name).second) throw DataError("duplicate covariate name '" + c.name + "'");
    if (c.is_continuous()) {
      const auto& d = c.continuous();
      if (!std::isfinite(d.lo) || !std::isfinite(d.hi) || !(d.lo < d.hi)) {
        throw DataError("covariate '" + c.name + "' needs finite lo < hi");
      }
    } else {
      const auto& levels = c.categorical().levels;
      std::set<std::string> distinct(levels.begin(), levels.end());
      if (distinct.size() != levels.size()) throw DataError("covariate '" + c.name + "' repeats a level");
      if (levels.size() < 2) throw DataError("covariate '" + c.name + "' needs at least 2 levels");
    }
  }
  if (response_.is_categorical()) {
    std::set<std::string> distinct(response_.classes.begin(), response_.classes.end());
    if (response_.classes.empty() || distinct.size() != response_.classes.size()) {
      throw DataError("categorical response needs distinct class labels");
    }
  } else {
    response_.classes.clear();
  }
}

std::optional<std::size_t> CovariateSchema::find(std::string_view name) const {
  for (std::size_t i = 0; i < covariates_.size(); ++i) {
    if (covariates_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t CovariateSchema::level_code(std::size_t i, std::string_view level) const {
  const auto& levels = covariates_.at(i).categorical().levels;
  const auto it = std::find(levels.begin(), levels.end(), level);
  if (it == levels.end()) {
    throw DataError("unknown level '" + std::string(level) + "' for covariate '" + covariates_[i].name + "'");
  }
  return static_cast<std::size_t>(it - levels.begin());
}

std::size_t CovariateSchema::class_code(std::string_view label) const {
  const auto it = std::find(response_.classes.begin(), response_.classes.end(), label);
  if (it == response_.classes.end()) throw DataError("unknown class '" + std::string(label) + "'");
  return static_cast<std::size_t>(it - response_.classes.begin());
}

std::string CovariateSchema::format_response(double value) const {
  if (response_.is_categorical()) {
    const auto code = static_cast<std::size_t>(value);
    if (value >= 0 && code < response_.classes.size()) return response_.classes[code];
    return "?";
  }
  std::ostringstream out;
  out.precision(6);
  out << value;
  return out.str();
}

bool CovariateSchema::operator==(const CovariateSchema& other) const {
  if (response_ != other.response_ || covariates_.size() != other.covariates_.size()) return false;
  for (std::size_t i = 0; i < covariates_.size(); ++i) {
    const auto& a = covariates_[i];
    const auto& b = other.covariates_[i];
    if (a.name != b.name || a.is_continuous() != b.is_continuous()) return false;
    if (a.is_continuous()) {
      if (a.continuous().lo != b.continuous().lo || a.continuous().hi != b.continuous().hi) return false;
    } else if (a.categorical().levels != b.categorical().levels) {
      return false;
    }
  }
  return true;
}

std::size_t LevelSubset::count() const {
  return static_cast<std::size_t>(std::count(allowed.begin(), allowed.end(), true));
}

std::vector<std::size_t> LevelSubset::codes() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < allowed.size(); ++i) {
    if (allowed[i]) out.push_back(i);
  }
  return out;
}

bool SplitRule::goes_left(std::span<const double> row) const {
  const double v = row[covariate];
  if (const auto* t = std::get_if<ThresholdCut>(&cut)) return v < t->threshold;
  return static_cast<std::size_t>(v) == std::get<LevelCut>(cut).level;
}

Region::Region(std::vector<Restriction> bounds) : bounds_(std::move(bounds)) {
  for (const auto& b : bounds_) {
    if (const auto* iv = std::get_if<IntervalBound>(&b)) {
      if (!(iv->lo < iv->hi)) throw ContractError("region interval must satisfy lo < hi");
    } else if (std::get<LevelSubset>(b).count() == 0) {
      throw ContractError("region level subset must be non-empty");
    }
  }
}

Region Region::full(const CovariateSchema& schema) {
  std::vector<Restriction> bounds;
  bounds.reserve(schema.size());
  for (const auto& c : schema.covariates()) {
    if (c.is_continuous()) {
      bounds.emplace_back(IntervalBound{c.continuous().lo, c.continuous().hi, true});
    } else {
      bounds.emplace_back(LevelSubset{std::vector<bool>(c.level_count(), true)});
    }
  }
  return Region(std::move(bounds));
}

bool Region::contains(std::span<const double> row) const {
  if (row.size() != bounds_.size()) {
    throw ContractError("row has " + std::to_string(row.size()) + " values, region has " +
                        std::to_string(bounds_.size()) + " covariates");
  }
  for (std::size_t i = 0; i < bounds_.size(); ++i) {
    const double v = row[i];
    if (const auto* iv = std::get_if<IntervalBound>(&bounds_[i])) {
      if (!iv->contains(v)) return false;
    } else {
      if (v < 0 || v != std::floor(v)) return false;
      if (!std::get<LevelSubset>(bounds_[i]).contains(static_cast<std::size_t>(v))) return false;
    }
  }
  return true;
}

bool Region::is_subset_of(const Region& other) const {
  if (other.size() != size()) return false;
  for (std::size_t i = 0; i < bounds_.size(); ++i) {
    if (is_interval(i) != other.is_interval(i)) return false;
    if (is_interval(i)) {
      const auto& a = interval(i);
      const auto& b = other.interval(i);
      if (a.lo < b.lo || a.hi > b.hi) return false;
      if (a.hi == b.hi && a.hi_closed && !b.hi_closed) return false;
    } else {
      const auto& a = levels(i);
      const auto& b = other.levels(i);
      for (std::size_t k = 0; k < a.allowed.size(); ++k) {
        if (a.allowed[k] && !b.contains(k)) return false;
      }
    }
  }
  return true;
}

double Region::mass_within(const Region& root) const {
  double mass = 1.0;
  for (std::size_t i = 0; i < bounds_.size(); ++i) {
    if (is_interval(i)) {
      mass *= interval(i).width() / root.interval(i).width();
    } else {
      mass *= static_cast<double>(levels(i).count()) / static_cast<double>(root.levels(i).count());
    }
  }
  return mass;
}

void Region::validate_within(const CovariateSchema& schema) const {
  if (!is_subset_of(Region::full(schema))) throw ContractError("region is not contained in the schema domain");
}

bool region_contains(const Region& region, std::span<const double> row) { return region.contains(row); }

std::pair<Region, Region> split_region(const Region& region, const SplitRule& rule) {
  if (rule.covariate >= region.size()) throw ContractError("split covariate out of range");
  std::vector<Restriction> left(region.size()), right(region.size());
  for (std::size_t i = 0; i < region.size(); ++i) left[i] = right[i] = region[i];

  if (rule.is_continuous()) {
    if (!region.is_interval(rule.covariate)) throw ContractError("threshold split on a categorical covariate");
    const auto& iv = region.interval(rule.covariate);
    const double cut = rule.threshold();
    if (!(cut > iv.lo && cut < iv.hi)) {
      std::ostringstream msg;
      msg << "cut " << cut << " outside region interval [" << iv.lo << ", " << iv.hi << "]";
      throw ContractError(msg.str());
    }
    left[rule.covariate] = IntervalBound{iv.lo, cut, false};
    right[rule.covariate] = IntervalBound{cut, iv.hi, iv.hi_closed};
  } else {
    if (region.is_interval(rule.covariate)) throw ContractError("level split on a continuous covariate");
    const auto& subset = region.levels(rule.covariate);
    const std::size_t k = rule.level();
    if (!subset.contains(k)) throw ContractError("level " + std::to_string(k) + " not in region subset");
    if (subset.count() < 2) throw ContractError("cannot split a single-level subset");
    LevelSubset l{std::vector<bool>(subset.allowed.size(), false)};
    l.allowed[k] = true;
    LevelSubset r = subset;
    r.allowed[k] = false;
    left[rule.covariate] = std::move(l);
    right[rule.covariate] = std::move(r);
  }
  return {Region(std::move(left)), Region(std::move(right))};
}

SamplingPath::SamplingPath(std::vector<Region> regions) {
  for (auto& r : regions) push(std::move(r));
}

void SamplingPath::push(Region region) {
  if (!regions_.empty()) {
    const Region& last = regions_.back();
    if (!region.is_subset_of(last) || region == last) {
      throw ContractError("sampling path regions must be strictly nested");
    }
  }
  regions_.push_back(std::move(region));
}

bool SamplingPath::intersects(const SamplingPath& other) const {
  for (const auto& a : regions_) {
    for (const auto& b : other.regions_) {
      if (a.is_subset_of(b) || b.is_subset_of(a)) return true;
    }
  }
  return false;
}

void RowMatrix::push_back(std::span<const double> row) {
  if (row.size() != cols_) throw ContractError("row width mismatch");
  data_.insert(data_.end(), row.begin(), row.end());
}

void Dataset::validate(const CovariateSchema& schema) const {
  if (x.rows() != y.size()) throw DataError("rows and responses differ in length");
  if (!empty() && x.cols() != schema.size()) throw DataError("row width does not match the schema");
  const Region domain = Region::full(schema);
  for (std::size_t i = 0; i < size(); ++i) {
    if (!domain.contains(x.row(i))) throw DataError("row " + std::to_string(i) + " lies outside the schema domain");
    if (schema.response().is_categorical()) {
      const double c = y[i];
      if (c < 0 || c != std::floor(c) || static_cast<std::size_t>(c) >= schema.response().class_count()) {
        throw DataError("response " + std::to_string(i) + " is not a known class");
      }
    } else if (!std::isfinite(y[i])) {
      throw DataError("response " + std::to_string(i) + " is not finite");
    }
  }
}

RowMatrix sample_region(const Region& region, std::size_t count, Rng& rng) {
  RowMatrix out(count, region.size());
  std::vector<std::vector<std::size_t>> codes(region.size());
  for (std::size_t j = 0; j < region.size(); ++j) {
    if (!region.is_interval(j)) codes[j] = region.levels(j).codes();
  }
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < region.size(); ++j) {
      if (region.is_interval(j)) {
        const auto& iv = region.interval(j);
        out(i, j) = rng.uniform(iv.lo, iv.hi);
      } else {
        out(i, j) = static_cast<double>(codes[j][rng.below(codes[j].size())]);
      }
    }
  }
  return out;
}

}  // namespace ddt
