#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "ddt/stability.hpp"
#include "ddt/tree.hpp"

namespace ddt {

inline constexpr int kTreeFormatVersion = 1;

// Tree document: schema, config echo, nodes by id, stability reports and the
// explanation summary. Reading and re-writing a document reproduces it byte
// for byte.
std::string tree_to_json(const DdtTree& tree);
// Throws DataError on malformed documents.
DdtTree tree_from_json(std::string_view text);

std::string schema_to_json(const CovariateSchema& schema);
CovariateSchema schema_from_json(std::string_view text);

// Standalone report for one node.
std::string stability_to_json(const StabilityReport& report, const CovariateSchema& schema, const Region& region,
                              std::uint64_t node_id);
// One line per repeat that produced a split: repeat,covariate,value,criterion.
std::string stability_draws_csv(const StabilityReport& report, const CovariateSchema& schema);

// One row per node with its kind, rule, weights and indices.
std::string explanation_csv(const DdtTree& tree);

// Graphviz rendering with one graph node per tree node, ordered by id.
std::string export_dot(const DdtTree& tree);

// Human-readable rule, e.g. "x1 < 3.5" or "colour = red".
std::string describe_rule(const SplitRule& rule, const CovariateSchema& schema);

}  // namespace ddt
