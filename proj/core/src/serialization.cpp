#include "ddt/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "ddt/error.hpp"

namespace ddt {

using nlohmann::json;

namespace {

std::string fmt(double v, int digits = 17) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double finite(double v) { return std::isfinite(v) ? v : 0.0; }

const json& at(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw DataError(std::string("missing field \"") + key + "\"");
  return *it;
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return at(j, key).get<T>();
  } catch (const json::exception& e) {
    throw DataError(std::string("field \"") + key + "\": " + e.what());
  }
}

// Schema

json schema_json(const CovariateSchema& schema) {
  json cov = json::array();
  for (const auto& c : schema.covariates()) {
    if (c.is_continuous()) {
      cov.push_back({{"name", c.name}, {"kind", "continuous"}, {"lo", c.continuous().lo}, {"hi", c.continuous().hi}});
    } else {
      cov.push_back({{"name", c.name}, {"kind", "categorical"}, {"levels", c.categorical().levels}});
    }
  }
  json resp{{"kind", schema.response().is_categorical() ? "categorical" : "continuous"}};
  if (schema.response().is_categorical()) resp["classes"] = schema.response().classes;
  return {{"covariates", cov}, {"response", resp}};
}

CovariateSchema schema_parse(const json& j) {
  std::vector<Covariate> cov;
  for (const auto& c : at(j, "covariates")) {
    const auto kind = get<std::string>(c, "kind");
    if (kind == "continuous") {
      cov.push_back({get<std::string>(c, "name"), ContinuousDomain{get<double>(c, "lo"), get<double>(c, "hi")}});
    } else if (kind == "categorical") {
      cov.push_back({get<std::string>(c, "name"), CategoricalDomain{get<std::vector<std::string>>(c, "levels")}});
    } else {
      throw DataError("unknown covariate kind \"" + kind + "\"");
    }
  }
  const json& r = at(j, "response");
  ResponseKind resp;
  const auto kind = get<std::string>(r, "kind");
  if (kind == "categorical") {
    resp.type = ResponseType::categorical;
    resp.classes = get<std::vector<std::string>>(r, "classes");
  } else if (kind != "continuous") {
    throw DataError("unknown response kind \"" + kind + "\"");
  }
  return CovariateSchema(std::move(cov), std::move(resp));
}

// Rules, regions, statistics

json rule_json(const SplitRule& rule, const CovariateSchema& schema) {
  json j{{"covariate", schema[rule.covariate].name}};
  if (rule.is_continuous()) {
    j["threshold"] = rule.threshold();
  } else {
    j["level"] = schema[rule.covariate].categorical().levels.at(rule.level());
  }
  return j;
}

SplitRule rule_parse(const json& j, const CovariateSchema& schema) {
  const auto name = get<std::string>(j, "covariate");
  const auto idx = schema.find(name);
  if (!idx) throw DataError("rule names unknown covariate \"" + name + "\"");
  SplitRule rule;
  rule.covariate = *idx;
  if (j.contains("threshold")) {
    if (!schema[*idx].is_continuous()) throw DataError("threshold on categorical covariate \"" + name + "\"");
    rule.cut = ThresholdCut{get<double>(j, "threshold")};
  } else {
    if (schema[*idx].is_continuous()) throw DataError("level cut on continuous covariate \"" + name + "\"");
    rule.cut = LevelCut{schema.level_code(*idx, get<std::string>(j, "level"))};
  }
  return rule;
}

json region_json(const Region& region, const CovariateSchema& schema) {
  json out = json::array();
  for (std::size_t i = 0; i < region.size(); ++i) {
    if (region.is_interval(i)) {
      const auto& b = region.interval(i);
      out.push_back({{"lo", b.lo}, {"hi", b.hi}, {"hi_closed", b.hi_closed}});
    } else {
      std::vector<std::string> names;
      for (auto code : region.levels(i).codes()) names.push_back(schema[i].categorical().levels.at(code));
      out.push_back({{"levels", names}});
    }
  }
  return out;
}

Region region_parse(const json& j, const CovariateSchema& schema) {
  if (!j.is_array() || j.size() != schema.size()) throw DataError("region does not match the schema");
  std::vector<Restriction> bounds;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const json& b = j[i];
    if (schema[i].is_continuous()) {
      bounds.emplace_back(IntervalBound{get<double>(b, "lo"), get<double>(b, "hi"), get<bool>(b, "hi_closed")});
    } else {
      LevelSubset s{std::vector<bool>(schema[i].level_count(), false)};
      for (const auto& name : get<std::vector<std::string>>(b, "levels")) s.allowed[schema.level_code(i, name)] = true;
      bounds.emplace_back(std::move(s));
    }
  }
  return Region(std::move(bounds));
}

json stat_json(const NodeStat& s) {
  json j{{"count", s.count}};
  if (s.is_categorical()) {
    j["classes"] = s.classes.counts;
  } else {
    j["mean"] = s.mean;
    j["sse"] = s.sse;
  }
  return j;
}

NodeStat stat_parse(const json& j) {
  NodeStat s;
  s.count = get<std::size_t>(j, "count");
  if (j.contains("classes")) {
    s.classes = ClassDistribution(get<std::vector<std::uint64_t>>(j, "classes"));
  } else {
    s.mean = get<double>(j, "mean");
    s.sse = get<double>(j, "sse");
  }
  return s;
}

json candidate_json(const SplitCandidate& c, const CovariateSchema& schema) {
  return {{"rule", rule_json(c.rule, schema)},
          {"criterion_value", c.criterion_value},
          {"left", stat_json(c.left)},
          {"right", stat_json(c.right)}};
}

SplitCandidate candidate_parse(const json& j, const CovariateSchema& schema) {
  SplitCandidate c;
  c.rule = rule_parse(at(j, "rule"), schema);
  c.criterion_value = get<double>(j, "criterion_value");
  c.left = stat_parse(at(j, "left"));
  c.right = stat_parse(at(j, "right"));
  return c;
}

// Stability

const char* oscillation_name(OscillationKind k) {
  switch (k) {
    case OscillationKind::finite_points: return "finite_points";
    case OscillationKind::interval: return "interval";
    default: return "none";
  }
}

OscillationKind oscillation_parse(const std::string& s) {
  if (s == "none") return OscillationKind::none;
  if (s == "finite_points") return OscillationKind::finite_points;
  if (s == "interval") return OscillationKind::interval;
  throw DataError("unknown oscillation kind \"" + s + "\"");
}

json oscillation_json(const Oscillation& o) {
  json atoms = json::array();
  for (const auto& a : o.atoms) atoms.push_back({{"value", a.value}, {"mass", a.mass}});
  json j{{"kind", oscillation_name(o.kind)}, {"atoms", atoms}, {"ks_uniform", finite(o.ks_uniform)}, {"note", o.note}};
  if (o.kind == OscillationKind::interval) j["interval"] = {{"lo", o.interval.lo}, {"hi", o.interval.hi}};
  return j;
}

Oscillation oscillation_from(const json& j) {
  Oscillation o;
  o.kind = oscillation_parse(get<std::string>(j, "kind"));
  for (const auto& a : at(j, "atoms")) o.atoms.push_back({get<double>(a, "value"), get<double>(a, "mass")});
  o.ks_uniform = get<double>(j, "ks_uniform");
  o.note = get<std::string>(j, "note");
  if (j.contains("interval")) o.interval = {get<double>(j["interval"], "lo"), get<double>(j["interval"], "hi")};
  return o;
}

json stability_json(const StabilityReport& r, const CovariateSchema& schema) {
  json first = json::array();
  for (std::size_t k = 0; k < r.first_level.size(); ++k) {
    first.push_back({{"covariate", schema[k].name}, {"mass", r.first_level[k]}});
  }
  json second = json::array();
  for (const auto& s : r.second_level) {
    json e{{"covariate", schema[s.covariate].name}, {"count", s.count}, {"continuous", s.continuous}};
    if (s.continuous) {
      e["histogram_edges"] = s.histogram_edges;
      e["histogram_counts"] = s.histogram_counts;
      e["bandwidth"] = s.bandwidth;
      e["mode"] = s.mode;
      e["iqr"] = s.iqr;
    } else {
      json mass = json::array();
      for (std::size_t l = 0; l < s.level_mass.size(); ++l) {
        mass.push_back({{"level", schema[s.covariate].categorical().levels.at(l)}, {"mass", s.level_mass[l]}});
      }
      e["level_mass"] = mass;
    }
    second.push_back(e);
  }
  json draws = json::array();
  for (const auto& d : r.draws) draws.push_back(json::array({d.covariate, d.value, d.criterion}));
  json j{{"repeats", r.repeats},
         {"pseudo_sample_size", r.pseudo_sample_size},
         {"informative", r.informative},
         {"first_level", first},
         {"second_level", second},
         {"draws", draws},
         {"chosen", candidate_json(r.chosen, schema)},
         {"first_level_tie", r.first_level_tie},
         {"second_level_tie", r.second_level_tie},
         {"escalated", r.escalated},
         {"oscillation", oscillation_json(r.oscillation)},
         {"notes", r.notes}};
  if (r.ci) {
    j["ci"] = {{"lo", r.ci->lo}, {"hi", r.ci->hi}, {"approximate", true}};
  } else {
    j["ci"] = nullptr;
  }
  return j;
}

std::size_t covariate_index(const json& j, const CovariateSchema& schema) {
  const auto name = get<std::string>(j, "covariate");
  const auto idx = schema.find(name);
  if (!idx) throw DataError("unknown covariate \"" + name + "\"");
  return *idx;
}

StabilityReport stability_parse(const json& j, const CovariateSchema& schema) {
  StabilityReport r;
  r.repeats = get<std::size_t>(j, "repeats");
  r.pseudo_sample_size = get<std::size_t>(j, "pseudo_sample_size");
  r.informative = get<std::size_t>(j, "informative");
  r.first_level.assign(schema.size(), 0.0);
  for (const auto& e : at(j, "first_level")) r.first_level[covariate_index(e, schema)] = get<double>(e, "mass");
  for (const auto& e : at(j, "second_level")) {
    SecondLevel s;
    s.covariate = covariate_index(e, schema);
    s.count = get<std::size_t>(e, "count");
    s.continuous = get<bool>(e, "continuous");
    if (s.continuous) {
      s.histogram_edges = get<std::vector<double>>(e, "histogram_edges");
      s.histogram_counts = get<std::vector<std::size_t>>(e, "histogram_counts");
      s.bandwidth = get<double>(e, "bandwidth");
      s.mode = get<double>(e, "mode");
      s.iqr = get<double>(e, "iqr");
    } else {
      s.level_mass.assign(schema[s.covariate].level_count(), 0.0);
      for (const auto& m : at(e, "level_mass")) {
        s.level_mass[schema.level_code(s.covariate, get<std::string>(m, "level"))] = get<double>(m, "mass");
      }
    }
    r.second_level.push_back(std::move(s));
  }
  for (const auto& d : at(j, "draws")) {
    if (!d.is_array() || d.size() != 3) throw DataError("malformed stability draw");
    r.draws.push_back({d[0].get<std::size_t>(), d[1].get<double>(), d[2].get<double>()});
  }
  r.chosen = candidate_parse(at(j, "chosen"), schema);
  r.first_level_tie = get<bool>(j, "first_level_tie");
  r.second_level_tie = get<bool>(j, "second_level_tie");
  r.escalated = get<bool>(j, "escalated");
  if (!at(j, "ci").is_null()) r.ci = Interval{get<double>(j["ci"], "lo"), get<double>(j["ci"], "hi")};
  r.oscillation = oscillation_from(at(j, "oscillation"));
  r.notes = get<std::vector<std::string>>(j, "notes");
  return r;
}

// Subtrees

json subtree_json(const OdtSubtree& t, const CovariateSchema& schema) {
  json nodes = json::array();
  for (const auto& n : t.nodes) {
    json e{{"depth", n.depth}, {"stat", stat_json(n.stat)}};
    if (n.rule) {
      e["rule"] = rule_json(*n.rule, schema);
      e["left"] = n.left;
      e["right"] = n.right;
    }
    if (n.eval) e["eval"] = stat_json(*n.eval);
    nodes.push_back(e);
  }
  return {{"max_depth", t.max_depth}, {"min_leaf", t.min_leaf}, {"nodes", nodes}};
}

OdtSubtree subtree_parse(const json& j, const CovariateSchema& schema) {
  OdtSubtree t;
  t.max_depth = get<std::size_t>(j, "max_depth");
  t.min_leaf = get<std::size_t>(j, "min_leaf");
  const json& nodes = at(j, "nodes");
  for (const auto& e : nodes) {
    OdtNode n;
    n.depth = get<std::size_t>(e, "depth");
    n.stat = stat_parse(at(e, "stat"));
    if (e.contains("rule")) {
      n.rule = rule_parse(e["rule"], schema);
      n.left = get<int>(e, "left");
      n.right = get<int>(e, "right");
      const auto size = static_cast<int>(nodes.size());
      if (n.left <= 0 || n.right <= 0 || n.left >= size || n.right >= size) {
        throw DataError("subtree child index out of range");
      }
    }
    if (e.contains("eval")) n.eval = stat_parse(e["eval"]);
    t.nodes.push_back(std::move(n));
  }
  if (t.nodes.empty()) throw DataError("empty subtree");
  return t;
}

// Explanation

NodeKind kind_parse(const std::string& s) {
  if (s == "interpretable") return NodeKind::interpretable;
  if (s == "predictive") return NodeKind::predictive;
  if (s == "leaf") return NodeKind::leaf;
  throw DataError("unknown node kind \"" + s + "\"");
}

Source source_parse(const std::string& s) {
  if (s == "observed") return Source::observed;
  if (s == "pseudo") return Source::pseudo;
  throw DataError("unknown source \"" + s + "\"");
}

json explanation_json(const ExplanationSummary& e, const CovariateSchema& schema) {
  json nodes = json::array();
  for (const auto& n : e.nodes) {
    nodes.push_back({{"id", n.id},
                     {"kind", to_string(n.kind)},
                     {"weight", n.weight},
                     {"delta", n.delta},
                     {"index", n.index},
                     {"observed_percent", n.observed_percent},
                     {"weak_support", n.weak_support}});
  }
  json paths = json::array();
  for (const auto& p : e.paths) {
    paths.push_back({{"id", p.id},
                     {"path_xi", p.path_xi},
                     {"pxi", p.pxi},
                     {"degree_interpretable", p.degree_interpretable},
                     {"degree_predictive", p.degree_predictive}});
  }
  json imp = json::array();
  for (std::size_t k = 0; k < e.variable_importance.size(); ++k) {
    imp.push_back({{"covariate", schema[k].name}, {"importance", e.variable_importance[k]}});
  }
  return {{"weight_source", to_string(e.weight_source)},
          {"impurity_source", to_string(e.impurity_source)},
          {"weight_fallback", e.weight_fallback},
          {"delta_total", e.delta_total},
          {"nodes", nodes},
          {"paths", paths},
          {"variable_importance", imp},
          {"warnings", e.warnings}};
}

ExplanationSummary explanation_parse(const json& j, const CovariateSchema& schema) {
  ExplanationSummary e;
  e.weight_source = source_parse(get<std::string>(j, "weight_source"));
  e.impurity_source = source_parse(get<std::string>(j, "impurity_source"));
  e.weight_fallback = get<bool>(j, "weight_fallback");
  e.delta_total = get<double>(j, "delta_total");
  for (const auto& n : at(j, "nodes")) {
    e.nodes.push_back({get<std::uint64_t>(n, "id"), kind_parse(get<std::string>(n, "kind")), get<double>(n, "weight"),
                       get<double>(n, "delta"), get<double>(n, "index"), get<double>(n, "observed_percent"),
                       get<bool>(n, "weak_support")});
  }
  for (const auto& p : at(j, "paths")) {
    e.paths.push_back({get<std::uint64_t>(p, "id"), get<double>(p, "path_xi"), get<double>(p, "pxi"),
                       get<double>(p, "degree_interpretable"), get<double>(p, "degree_predictive")});
  }
  e.variable_importance.assign(schema.size(), 0.0);
  const json& imp = at(j, "variable_importance");
  if (!imp.empty()) {
    for (const auto& v : imp) e.variable_importance[covariate_index(v, schema)] = get<double>(v, "importance");
  } else {
    e.variable_importance.clear();
  }
  e.warnings = get<std::vector<std::string>>(j, "warnings");
  return e;
}

// Nodes

json node_json(const DdtNode& n, const CovariateSchema& schema) {
  json j{{"id", n.id},
         {"kind", to_string(n.kind)},
         {"depth", n.depth},
         {"region", region_json(n.region, schema)},
         {"observed_count", n.observed_count},
         {"value", n.value},
         {"value_label", schema.format_response(n.value)},
         {"eval", stat_json(n.eval)},
         {"provisional_pxi", n.provisional_pxi},
         {"stop_reason", n.stop_reason}};
  if (n.split) j["split"] = candidate_json(*n.split, schema);
  if (n.stability) j["stability"] = stability_json(*n.stability, schema);
  if (n.subtree) j["subtree"] = subtree_json(*n.subtree, schema);
  if (n.eval_left) j["eval_left"] = stat_json(*n.eval_left);
  if (n.eval_right) j["eval_right"] = stat_json(*n.eval_right);
  return j;
}

DdtNode node_parse(const json& j, const CovariateSchema& schema) {
  DdtNode n;
  n.id = get<std::uint64_t>(j, "id");
  if (n.id == 0) throw DataError("node id 0 is invalid");
  n.kind = kind_parse(get<std::string>(j, "kind"));
  n.depth = get<std::size_t>(j, "depth");
  if (n.depth != depth_of(n.id)) throw DataError("node " + std::to_string(n.id) + " has an inconsistent depth");
  n.region = region_parse(at(j, "region"), schema);
  n.observed_count = get<std::size_t>(j, "observed_count");
  n.value = get<double>(j, "value");
  n.eval = stat_parse(at(j, "eval"));
  n.provisional_pxi = get<double>(j, "provisional_pxi");
  n.stop_reason = get<std::string>(j, "stop_reason");
  if (j.contains("split")) n.split = candidate_parse(j["split"], schema);
  if (j.contains("stability")) n.stability = stability_parse(j["stability"], schema);
  if (j.contains("subtree")) n.subtree = subtree_parse(j["subtree"], schema);
  if (j.contains("eval_left")) n.eval_left = stat_parse(j["eval_left"]);
  if (j.contains("eval_right")) n.eval_right = stat_parse(j["eval_right"]);
  if (n.kind == NodeKind::interpretable && (!n.split || !n.eval_left || !n.eval_right)) {
    throw DataError("interpretable node " + std::to_string(n.id) + " lacks its split");
  }
  if (n.kind == NodeKind::predictive && !n.subtree) {
    throw DataError("predictive node " + std::to_string(n.id) + " lacks its subtree");
  }
  return n;
}

json parse_document(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed JSON: ") + e.what());
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string describe_rule(const SplitRule& rule, const CovariateSchema& schema) {
  const auto& cov = schema[rule.covariate];
  if (rule.is_continuous()) return cov.name + " < " + fmt(rule.threshold(), 6);
  return cov.name + " = " + cov.categorical().levels.at(rule.level());
}

std::string schema_to_json(const CovariateSchema& schema) { return schema_json(schema).dump(2) + "\n"; }

CovariateSchema schema_from_json(std::string_view text) {
  try {
    return schema_parse(parse_document(text));
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed schema: ") + e.what());
  }
}

std::string tree_to_json(const DdtTree& tree) {
  json nodes = json::array();
  for (const auto& [id, node] : tree.nodes) nodes.push_back(node_json(node, tree.schema));
  json doc{{"format_version", kTreeFormatVersion},
           {"schema", schema_json(tree.schema)},
           {"criterion", tree.criterion.name()},
           {"weighted_children", tree.criterion.weighted_children},
           {"teacher", tree.teacher},
           {"seed", tree.seed},
           {"observed_total", tree.observed_total},
           {"config", parse_document(tree.config_echo)},
           {"nodes", nodes},
           {"explanation", explanation_json(tree.explanation, tree.schema)},
           {"warnings", tree.warnings}};
  return doc.dump(2) + "\n";
}

DdtTree tree_from_json(std::string_view text) {
  const json doc = parse_document(text);
  try {
    if (!doc.is_object()) throw DataError("tree document must be a JSON object");
    const int version = get<int>(doc, "format_version");
    if (version != kTreeFormatVersion) {
      throw DataError("unsupported tree format version " + std::to_string(version));
    }
    DdtTree tree{schema_parse(at(doc, "schema")), {}, {}, 0, 0, {}, {}, {}};
    try {
      tree.criterion = SplitCriterion::parse(get<std::string>(doc, "criterion"));
    } catch (const ConfigError& e) {
      throw DataError(e.what());
    }
    tree.criterion.weighted_children = get<bool>(doc, "weighted_children");
    tree.teacher = get<std::string>(doc, "teacher");
    tree.seed = get<std::uint64_t>(doc, "seed");
    tree.observed_total = get<std::size_t>(doc, "observed_total");
    tree.config_echo = at(doc, "config").dump();
    for (const auto& j : at(doc, "nodes")) {
      DdtNode n = node_parse(j, tree.schema);
      const auto id = n.id;
      if (!tree.nodes.emplace(id, std::move(n)).second) throw DataError("duplicate node id " + std::to_string(id));
    }
    if (!tree.nodes.contains(1)) throw DataError("tree has no root node");
    for (const auto& [id, node] : tree.nodes) {
      if (id > 1) {
        auto parent = tree.nodes.find(parent_id(id));
        if (parent == tree.nodes.end() || parent->second.kind != NodeKind::interpretable) {
          throw DataError("node " + std::to_string(id) + " has no interpretable parent");
        }
      }
      if (node.kind == NodeKind::interpretable &&
          (!tree.nodes.contains(left_id(id)) || !tree.nodes.contains(right_id(id)))) {
        throw DataError("interpretable node " + std::to_string(id) + " lacks a child");
      }
    }
    tree.explanation = explanation_parse(at(doc, "explanation"), tree.schema);
    tree.warnings = get<std::vector<std::string>>(doc, "warnings");
    return tree;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed tree document: ") + e.what());
  } catch (const ContractError& e) {
    throw DataError(std::string("inconsistent tree document: ") + e.what());
  }
}

std::string stability_to_json(const StabilityReport& report, const CovariateSchema& schema, const Region& region,
                              std::uint64_t node_id) {
  json doc = stability_json(report, schema);
  doc["node"] = node_id;
  doc["region"] = region_json(region, schema);
  return doc.dump(2) + "\n";
}

std::string stability_draws_csv(const StabilityReport& report, const CovariateSchema& schema) {
  std::ostringstream out;
  out << "draw,covariate,value,criterion\n";
  for (std::size_t i = 0; i < report.draws.size(); ++i) {
    const auto& d = report.draws[i];
    const auto& cov = schema[d.covariate];
    const std::string value = cov.is_continuous()
                                  ? fmt(d.value)
                                  : cov.categorical().levels.at(static_cast<std::size_t>(d.value));
    out << i << ',' << csv_field(cov.name) << ',' << csv_field(value) << ',' << fmt(d.criterion) << '\n';
  }
  return out.str();
}

std::string explanation_csv(const DdtTree& tree) {
  std::ostringstream out;
  out << "id,kind,depth,rule,observed_count,observed_percent,weight,delta,index,path_xi,degree_interpretable,"
         "degree_predictive,weak_support,value\n";
  for (const auto& ix : tree.explanation.nodes) {
    const DdtNode& node = tree.node(ix.id);
    const PathIndex* path = nullptr;
    for (const auto& p : tree.explanation.paths) {
      if (p.id == ix.id) path = &p;
    }
    out << ix.id << ',' << to_string(ix.kind) << ',' << node.depth << ','
        << csv_field(node.split ? describe_rule(node.split->rule, tree.schema) : "") << ',' << node.observed_count
        << ',' << fmt(ix.observed_percent) << ',' << fmt(ix.weight) << ',' << fmt(ix.delta) << ',' << fmt(ix.index)
        << ',' << (path ? fmt(path->path_xi) : "") << ',' << (path ? fmt(path->degree_interpretable) : "") << ','
        << (path ? fmt(path->degree_predictive) : "") << ',' << (ix.weak_support ? 1 : 0) << ','
        << csv_field(tree.schema.format_response(node.value)) << '\n';
  }
  return out.str();
}

}  // namespace ddt
