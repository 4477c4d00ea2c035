#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ddt/tree.hpp"

namespace ddt {

// Observed-share threshold under which a node is flagged as weakly supported.
inline constexpr double kWeakSupportShare = 0.02;

// XI for interpretable nodes and PXI for predictive nodes, normalised by
// their total. Observed sources need `observed`; an Observed impurity source
// with an empty node raises DataError.
ExplanationSummary compute_indices(const DdtTree& tree, const Dataset* observed, Source weight_source,
                                   Source impurity_source);

// Sum of XI from `from` down to the parent of `to`.
double path_xi(const ExplanationSummary& summary, std::uint64_t from, std::uint64_t to);

// (path_xi / (path_xi + pxi), pxi / (path_xi + pxi)).
std::pair<double, double> interpretation_degree(double path_xi, double pxi);

// Weighted impurity decrease per covariate over interpretable splits and the
// splits inside predictive subtrees, normalised to 1. All zero when the tree
// has no split.
std::vector<double> variable_importance(const DdtTree& tree, const ExplanationSummary& summary);

}  // namespace ddt
