#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ddt/odt.hpp"
#include "ddt/teacher.hpp"

namespace ddt {

struct ForestConfig {
  std::size_t trees = 200;
  std::size_t max_depth = 32;
  std::size_t min_leaf = 1;
  double feature_fraction = 1.0;
  bool bootstrap = true;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

// Bagged CART ensemble. Regression averages tree outputs; classification
// takes the majority vote with ties going to the smallest class code.
class ForestTeacher : public Teacher {
 public:
  ForestTeacher(CovariateSchema schema, std::vector<OdtSubtree> trees, std::string descriptor);

  std::vector<double> evaluate(const RowMatrix& rows) const override;
  const ResponseKind& response_kind() const override { return schema_.response(); }
  std::string descriptor() const override { return descriptor_; }

  std::size_t tree_count() const { return trees_.size(); }
  const std::vector<OdtSubtree>& trees() const { return trees_; }
  // Mean impurity decrease per covariate over all trees, normalised to sum 1.
  std::vector<double> impurity_importance() const;

 private:
  // Compact copy of all trees for prediction; leaves have left < 0.
  struct FlatNode {
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint32_t covariate = 0;
    bool level_cut = false;
    double cut = 0.0;  // threshold, or level code
    double value = 0.0;
  };
  double tree_value(std::size_t tree, std::span<const double> row) const;

  CovariateSchema schema_;
  std::vector<OdtSubtree> trees_;
  std::string descriptor_;
  std::vector<FlatNode> flat_;
  std::vector<std::size_t> roots_;
};

struct ForestFit {
  std::shared_ptr<const Teacher> teacher;
  std::vector<std::string> warnings;
};

// Throws DataError on empty data. Single-class categorical data yields a
// constant teacher and a warning.
ForestFit fit_forest_teacher(const CovariateSchema& schema, const Dataset& data, const ForestConfig& config);

}  // namespace ddt
