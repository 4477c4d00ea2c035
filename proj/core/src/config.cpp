#include "ddt/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "ddt/error.hpp"
#include "ddt/serialization.hpp"

namespace ddt {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& section, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(section + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError("unknown key \"" + key + "\" in " + section);
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& section) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(section + "." + key + " has the wrong type");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

Source parse_source(const std::string& s, const char* key) {
  if (s == "observed") return Source::observed;
  if (s == "pseudo") return Source::pseudo;
  throw ConfigError(std::string(key) + " must be \"observed\" or \"pseudo\"");
}

TeacherType parse_teacher_type(const std::string& s) {
  if (s == "step") return TeacherType::step;
  if (s == "piecewise") return TeacherType::piecewise;
  if (s == "two_cut") return TeacherType::two_cut;
  if (s == "plateau") return TeacherType::plateau;
  if (s == "grid") return TeacherType::grid;
  if (s == "forest") return TeacherType::forest;
  if (s == "external") return TeacherType::external;
  throw ConfigError("unknown teacher type \"" + s + "\"");
}

TeacherSpec parse_teacher(const json& j, const std::filesystem::path& base) {
  if (!j.is_object() || !j.contains("type")) throw ConfigError("teacher needs a \"type\"");
  TeacherSpec t;
  std::string type;
  read(j, "type", type, "teacher");
  t.type = parse_teacher_type(type);
  const std::string sec = "teacher";
  switch (t.type) {
    case TeacherType::step:
      check_keys(j, sec, {"type", "name", "lo", "hi", "cut", "left", "right"});
      t.lo = 0.0;
      t.hi = 2.0;
      t.cut = 1.0;
      break;
    case TeacherType::piecewise:
      check_keys(j, sec, {"type", "name", "lo", "hi", "breaks", "values"});
      if (!j.contains("breaks") || !j.contains("values")) throw ConfigError("piecewise teacher needs breaks and values");
      break;
    case TeacherType::two_cut:
      check_keys(j, sec, {"type", "name", "lo", "hi", "left", "right"});
      break;
    case TeacherType::plateau:
      check_keys(j, sec, {"type", "name", "lo", "hi", "plateau_lo", "plateau_hi", "left", "right"});
      break;
    case TeacherType::grid:
      check_keys(j, sec, {"type", "data"});
      break;
    case TeacherType::forest:
      check_keys(j, sec, {"type", "data", "trees", "max_depth", "min_leaf", "feature_fraction", "bootstrap", "seed"});
      break;
    case TeacherType::external:
      check_keys(j, sec, {"type", "command", "timeout_ms", "schema"});
      break;
  }
  read(j, "name", t.name, sec);
  read(j, "lo", t.lo, sec);
  read(j, "hi", t.hi, sec);
  read(j, "cut", t.cut, sec);
  read(j, "left", t.left, sec);
  read(j, "right", t.right, sec);
  read(j, "breaks", t.breaks, sec);
  read(j, "values", t.values, sec);
  read(j, "plateau_lo", t.plateau_lo, sec);
  read(j, "plateau_hi", t.plateau_hi, sec);
  if (!(t.lo < t.hi)) throw ConfigError("teacher.lo must be below teacher.hi");
  if (t.type == TeacherType::two_cut) {
    const double w = t.hi - t.lo;
    t.breaks = {t.lo + w / 3.0, t.lo + 2.0 * w / 3.0};
    t.values = {t.left, t.right, t.left};
  }
  if (t.type == TeacherType::grid || t.type == TeacherType::forest) {
    std::string data;
    read(j, "data", data, sec);
    if (data.empty()) throw ConfigError("teacher.data is required for " + type + " teachers");
    t.data = resolve(base, data);
  }
  if (t.type == TeacherType::forest) {
    read(j, "trees", t.forest.trees, sec);
    read(j, "max_depth", t.forest.max_depth, sec);
    read(j, "min_leaf", t.forest.min_leaf, sec);
    read(j, "feature_fraction", t.forest.feature_fraction, sec);
    read(j, "bootstrap", t.forest.bootstrap, sec);
    read(j, "seed", t.forest.seed, sec);
  }
  if (t.type == TeacherType::external) {
    read(j, "command", t.command, sec);
    if (t.command.empty()) throw ConfigError("teacher.command is required for external teachers");
    std::int64_t ms = 60000;
    read(j, "timeout_ms", ms, sec);
    if (ms <= 0) throw ConfigError("teacher.timeout_ms must be positive");
    t.timeout = std::chrono::milliseconds(ms);
    if (j.contains("schema")) t.schema_json = j["schema"].dump();
  }
  return t;
}

StrategyKind parse_strategy(const std::string& s) {
  if (s == "breadth_first") return StrategyKind::breadth_first;
  if (s == "path_based") return StrategyKind::path_based;
  if (s == "parallel") return StrategyKind::parallel;
  throw ConfigError("unknown strategy \"" + s + "\"");
}

}  // namespace

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(doc, "config",
             {"seed", "teacher", "observed", "domain_margin", "output", "criterion", "weighted_children", "workers",
              "eval_sample_size", "weight_source", "impurity_source", "stability", "stopping", "odt", "strategy"});
  if (!doc.contains("seed") || !doc["seed"].is_number_unsigned()) {
    throw ConfigError("config must set \"seed\" to a non-negative integer");
  }
  if (!doc.contains("teacher")) throw ConfigError("config must define exactly one \"teacher\"");

  RunConfig rc;
  InductionConfig& ic = rc.induction;
  ic.seed = doc["seed"].get<std::uint64_t>();
  rc.teacher = parse_teacher(doc["teacher"], base_dir);
  if (rc.teacher.type == TeacherType::forest && !doc["teacher"].contains("seed")) rc.teacher.forest.seed = ic.seed;

  std::string s;
  if (doc.contains("observed")) {
    read(doc, "observed", s, "config");
    rc.observed = resolve(base_dir, s);
  }
  if (doc.contains("output")) {
    s.clear();
    read(doc, "output", s, "config");
    rc.output = resolve(base_dir, s);
  }
  read(doc, "domain_margin", rc.domain_margin, "config");
  if (!(rc.domain_margin >= 0.0)) throw ConfigError("domain_margin must be non-negative");

  if (doc.contains("criterion")) {
    s.clear();
    read(doc, "criterion", s, "config");
    ic.criterion = SplitCriterion::parse(s);
  } else {
    ic.criterion = SplitCriterion::sse();
  }
  read(doc, "weighted_children", ic.criterion.weighted_children, "config");
  read(doc, "workers", ic.workers, "config");
  read(doc, "eval_sample_size", ic.eval_sample_size, "config");
  if (doc.contains("weight_source")) {
    read(doc, "weight_source", s, "config");
    ic.weight_source = parse_source(s, "weight_source");
  }
  if (doc.contains("impurity_source")) {
    read(doc, "impurity_source", s, "config");
    ic.impurity_source = parse_source(s, "impurity_source");
  }

  if (doc.contains("stability")) {
    const json& j = doc["stability"];
    const std::string sec = "stability";
    check_keys(j, sec,
               {"repeats", "sample_size", "auto_d_fraction", "max_sample_size", "escalate", "escalation_iqr_factor",
                "min_samples_leaf", "histogram_bins", "oscillation"});
    auto& st = ic.stability;
    read(j, "repeats", st.repeats, sec);
    read(j, "sample_size", st.sample_size, sec);
    read(j, "auto_d_fraction", st.auto_d_fraction, sec);
    read(j, "max_sample_size", st.max_sample_size, sec);
    read(j, "escalate", st.escalate, sec);
    read(j, "escalation_iqr_factor", st.escalation_iqr_factor, sec);
    read(j, "min_samples_leaf", st.min_samples_leaf, sec);
    read(j, "histogram_bins", st.histogram_bins, sec);
    if (j.contains("oscillation")) {
      const json& o = j["oscillation"];
      const std::string osec = "stability.oscillation";
      check_keys(o, osec,
                 {"gap_fraction", "criterion_rel_tol", "min_cluster_mass", "uniform_bins", "uniform_bin_floor",
                  "min_values"});
      read(o, "gap_fraction", st.oscillation.gap_fraction, osec);
      read(o, "criterion_rel_tol", st.oscillation.criterion_rel_tol, osec);
      read(o, "min_cluster_mass", st.oscillation.min_cluster_mass, osec);
      read(o, "uniform_bins", st.oscillation.uniform_bins, osec);
      read(o, "uniform_bin_floor", st.oscillation.uniform_bin_floor, osec);
      read(o, "min_values", st.oscillation.min_values, osec);
    }
  }
  if (doc.contains("stopping")) {
    const json& j = doc["stopping"];
    const std::string sec = "stopping";
    check_keys(j, sec, {"max_interpretable_depth", "max_interpretable_nodes", "pxi_threshold", "min_region_observed"});
    read(j, "max_interpretable_depth", ic.stopping.max_interpretable_depth, sec);
    read(j, "max_interpretable_nodes", ic.stopping.max_interpretable_nodes, sec);
    read(j, "pxi_threshold", ic.stopping.pxi_threshold, sec);
    read(j, "min_region_observed", ic.stopping.min_region_observed, sec);
  }
  if (doc.contains("odt")) {
    const json& j = doc["odt"];
    const std::string sec = "odt";
    check_keys(j, sec, {"max_depth", "min_leaf", "max_splits", "pseudo_sample_size", "feature_fraction"});
    read(j, "max_depth", ic.odt.max_depth, sec);
    read(j, "min_leaf", ic.odt.min_leaf, sec);
    read(j, "max_splits", ic.odt.max_splits, sec);
    read(j, "pseudo_sample_size", ic.odt.pseudo_sample_size, sec);
    read(j, "feature_fraction", ic.odt.feature_fraction, sec);
  }
  if (doc.contains("strategy")) {
    const json& j = doc["strategy"];
    const std::string sec = "strategy";
    check_keys(j, sec, {"kind", "target", "workers"});
    if (j.contains("kind")) {
      read(j, "kind", s, sec);
      ic.strategy.kind = parse_strategy(s);
    }
    read(j, "target", ic.strategy.target, sec);
    read(j, "workers", ic.strategy.workers, sec);
    if (ic.strategy.kind == StrategyKind::path_based) path_target_id(ic.strategy.target);
  }
  ic.validate();
  rc.teacher.forest.workers = ic.workers;
  rc.echo = doc.dump();
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path.parent_path());
}

RunInputs prepare_run(const RunConfig& config) {
  const TeacherSpec& t = config.teacher;
  LoadOptions opts;
  opts.domain_margin = config.domain_margin;
  if (config.induction.criterion.is_regression()) {
    opts.response_type = ResponseType::continuous;
  } else {
    opts.response_type = ResponseType::categorical;
  }

  std::optional<CovariateSchema> schema;
  TeacherPtr teacher;
  std::vector<std::string> warnings;
  auto inferred = [&](const std::filesystem::path& from) {
    char margin[32];
    std::snprintf(margin, sizeof margin, "%g", config.domain_margin);
    warnings.push_back("covariate support inferred from the range of " + from.filename().string() + " (margin " +
                       margin + ")");
  };
  switch (t.type) {
    case TeacherType::step:
      teacher = make_step_teacher(t.lo, t.hi, t.cut, t.left, t.right);
      schema = unary_schema(t.lo, t.hi, t.name);
      break;
    case TeacherType::piecewise:
    case TeacherType::two_cut:
      teacher = make_piecewise_teacher(t.lo, t.hi, t.breaks, t.values);
      schema = unary_schema(t.lo, t.hi, t.name);
      break;
    case TeacherType::plateau:
      teacher = make_plateau_teacher(t.lo, t.hi, t.plateau_lo, t.plateau_hi, t.left, t.right);
      schema = unary_schema(t.lo, t.hi, t.name);
      break;
    case TeacherType::grid: {
      auto [s, grid] = load_dataset(t.data, std::nullopt, opts);
      inferred(t.data);
      teacher = make_grid_teacher(s, grid);
      schema = std::move(s);
      break;
    }
    case TeacherType::forest: {
      auto [s, train] = load_dataset(t.data, std::nullopt, opts);
      inferred(t.data);
      auto fit = fit_forest_teacher(s, train, t.forest);
      teacher = fit.teacher;
      warnings.insert(warnings.end(), fit.warnings.begin(), fit.warnings.end());
      schema = std::move(s);
      break;
    }
    case TeacherType::external:
      if (t.schema_json) {
        try {
          schema = schema_from_json(*t.schema_json);
        } catch (const DataError& e) {
          throw ConfigError(std::string("teacher.schema: ") + e.what());
        }
      }
      break;
  }

  Dataset observed;
  if (config.observed) {
    if (schema) {
      observed = load_dataset(*config.observed, schema, opts).second;
    } else {
      auto [s, d] = load_dataset(*config.observed, std::nullopt, opts);
      inferred(*config.observed);
      schema = std::move(s);
      observed = std::move(d);
    }
  }
  if (!schema) throw ConfigError("external teachers need teacher.schema or an observed dataset");
  if (t.type == TeacherType::external) {
    ExternalTeacherOptions eo;
    eo.timeout = t.timeout;
    teacher = connect_external_teacher(t.command, *schema, eo);
  }
  return RunInputs{std::move(*schema), std::move(teacher), std::move(observed), std::move(warnings)};
}

}  // namespace ddt
