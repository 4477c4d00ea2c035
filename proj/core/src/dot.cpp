#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "ddt/serialization.hpp"

namespace ddt {

namespace {

std::string percent(double share) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * share);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string export_dot(const DdtTree& tree) {
  std::ostringstream out;
  out << "digraph ddt {\n  node [shape=box, fontname=\"Helvetica\"];\n";
  for (const auto& [id, node] : tree.nodes) {
    const NodeIndex* ix = tree.explanation.find(id);
    std::vector<std::string> lines{"#" + std::to_string(id)};
    switch (node.kind) {
      case NodeKind::interpretable:
        lines.push_back(describe_rule(node.split->rule, tree.schema));
        if (ix) lines.push_back("XI " + percent(ix->index));
        break;
      case NodeKind::predictive:
        lines.push_back("subtree (" + std::to_string(node.subtree->split_count()) + " splits)");
        if (ix) lines.push_back("PXI " + percent(ix->index));
        lines.push_back("value " + tree.schema.format_response(node.value));
        break;
      case NodeKind::leaf:
        lines.push_back("value " + tree.schema.format_response(node.value));
        break;
    }
    if (ix) lines.push_back("observed " + percent(ix->observed_percent) + (ix->weak_support ? " [weak support]" : ""));
    std::string label;
    for (const auto& l : lines) label += (label.empty() ? "" : "\\n") + escape(l);
    const char* style = node.kind == NodeKind::interpretable ? "" : ", style=rounded";
    out << "  n" << id << " [label=\"" << label << "\"" << style << "];\n";
  }
  for (const auto& [id, node] : tree.nodes) {
    if (node.kind != NodeKind::interpretable) continue;
    out << "  n" << id << " -> n" << left_id(id) << " [label=\"yes\"];\n";
    out << "  n" << id << " -> n" << right_id(id) << " [label=\"no\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace ddt
