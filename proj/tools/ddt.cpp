#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "ddt/config.hpp"
#include "ddt/error.hpp"
#include "ddt/experiments.hpp"
#include "ddt/induction.hpp"
#include "ddt/parallel.hpp"
#include "ddt/serialization.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { ok = 0, config_error = 2, teacher_error = 3, internal_error = 4 };

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw ddt::ConfigError("cannot write " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ddt::ConfigError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int distill(const std::string& config_path, std::string out_dir) {
  const ddt::RunConfig rc = ddt::load_run_config(config_path);
  if (out_dir.empty()) {
    if (!rc.output) throw ddt::ConfigError("no output directory: pass -o or set \"output\"");
    out_dir = rc.output->string();
  }
  auto inputs = ddt::prepare_run(rc);
  print_warnings(inputs.warnings);
  ddt::DdtTree tree = ddt::induce_ddt(*inputs.teacher, inputs.schema, inputs.observed, rc.induction);
  tree.config_echo = rc.echo;
  tree.warnings.insert(tree.warnings.begin(), inputs.warnings.begin(), inputs.warnings.end());
  print_warnings(tree.explanation.warnings);

  const fs::path dir(out_dir);
  write_file(dir / "tree.json", ddt::tree_to_json(tree));
  write_file(dir / "explanation.csv", ddt::explanation_csv(tree));
  write_file(dir / "tree.dot", ddt::export_dot(tree));
  for (const auto& [id, node] : tree.nodes) {
    if (!node.stability) continue;
    const std::string stem = std::to_string(id);
    write_file(dir / "stability" / (stem + ".json"),
               ddt::stability_to_json(*node.stability, tree.schema, node.region, id));
    write_file(dir / "stability" / (stem + "_draws.csv"), ddt::stability_draws_csv(*node.stability, tree.schema));
  }
  std::cout << "interpretable nodes: " << tree.interpretable_count() << '\n';
  for (const auto& ix : tree.explanation.nodes) {
    const auto& node = tree.node(ix.id);
    std::printf("  node %llu %-13s %s index %.1f%%\n", static_cast<unsigned long long>(ix.id),
                ddt::to_string(ix.kind).c_str(),
                node.split ? ddt::describe_rule(node.split->rule, tree.schema).c_str() : "-", 100.0 * ix.index);
  }
  return ok;
}

std::string directions_to(std::uint64_t id) {
  std::string path;
  for (; id > 1; id /= 2) path.insert(path.begin(), id % 2 == 0 ? 'L' : 'R');
  return path;
}

int stability(const std::string& config_path, std::uint64_t node_id, const std::string& out_dir) {
  if (node_id == 0) throw ddt::ConfigError("node ids start at 1");
  const ddt::RunConfig rc = ddt::load_run_config(config_path);
  auto inputs = ddt::prepare_run(rc);
  print_warnings(inputs.warnings);

  ddt::Region region = ddt::Region::full(inputs.schema);
  if (node_id > 1) {
    ddt::InductionConfig ic = rc.induction;
    ic.strategy.kind = ddt::StrategyKind::path_based;
    ic.strategy.target = directions_to(ddt::parent_id(node_id));
    ic.stopping.max_interpretable_depth = std::max(ic.stopping.max_interpretable_depth, ddt::depth_of(node_id));
    const auto tree = ddt::induce_ddt(*inputs.teacher, inputs.schema, inputs.observed, ic);
    const auto it = tree.nodes.find(node_id);
    if (it == tree.nodes.end()) {
      throw ddt::ConfigError("node " + std::to_string(node_id) + " is not reached by the tree");
    }
    region = it->second.region;
  }
  const std::size_t classes =
      inputs.schema.response().is_categorical() ? inputs.schema.response().class_count() : 0;
  ddt::StabilityContext ctx{rc.induction.seed, node_id, ddt::resolve_workers(rc.induction.workers), classes};
  ddt::StabilityReport report =
      ddt::measure_split_stability(*inputs.teacher, region, rc.induction.criterion, rc.induction.stability, ctx);

  const fs::path dir(out_dir);
  const std::string stem = "stability_" + std::to_string(node_id);
  write_file(dir / (stem + ".json"), ddt::stability_to_json(report, inputs.schema, region, node_id));
  write_file(dir / (stem + "_draws.csv"), ddt::stability_draws_csv(report, inputs.schema));

  std::cout << "node " << node_id << ": " << report.informative << " of " << report.repeats
            << " repeats split, n_i = " << report.pseudo_sample_size << '\n';
  for (std::size_t k = 0; k < report.first_level.size(); ++k) {
    std::printf("  %s first-level %.3f\n", inputs.schema[k].name.c_str(), report.first_level[k]);
  }
  std::cout << "  chosen " << ddt::describe_rule(report.chosen.rule, inputs.schema) << '\n';
  if (report.ci) std::printf("  interval [%.6g, %.6g] (approximate)\n", report.ci->lo, report.ci->hi);
  static const char* kinds[] = {"none", "finite points", "interval"};
  std::cout << "  oscillation " << kinds[static_cast<int>(report.oscillation.kind)];
  if (!report.oscillation.note.empty()) std::cout << " (" << report.oscillation.note << ")";
  std::cout << '\n';
  return ok;
}

int validate(const std::string& suite, bool fast, unsigned workers, const std::string& out_path) {
  std::string csv;
  if (suite == "convergence") {
    ddt::ConvergenceOptions o;
    o.workers = workers;
    if (fast) o.repeats = 50;
    const auto rows = ddt::run_convergence(o);
    for (const auto& r : rows) {
      std::printf("n=%zu median |error|=%.6g ratio=%.3f\n", r.n, r.median_error, r.ratio);
    }
    csv = ddt::convergence_csv(rows);
  } else if (suite == "coverage") {
    ddt::CoverageOptions o;
    o.workers = workers;
    if (fast) {
      o.outer = 10;
      o.inner = 200;
    }
    const auto rows = ddt::run_coverage(o);
    for (const auto& r : rows) {
      std::printf("n=%zu coverage mean=%.4f min=%.4f max=%.4f\n", r.n, r.mean, r.min, r.max);
    }
    csv = ddt::coverage_csv(rows);
  } else if (suite == "interpretation") {
    auto o = ddt::default_interpretation_options();
    o.workers = workers;
    if (fast) o.runs = 10;
    const auto result = ddt::run_interpretation(o);
    std::printf("DDT partition MSE below ODT in %zu of %zu runs\n", result.ddt_wins, result.runs.size());
    csv = ddt::interpretation_csv(result);
  } else {
    throw ddt::ConfigError("unknown suite " + suite);
  }
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    write_file(out_path, csv);
  }
  return ok;
}

int export_dot(const std::string& tree_path) {
  std::cout << ddt::export_dot(ddt::tree_from_json(read_file(tree_path)));
  return ok;
}

int predict(const std::string& tree_path, const std::string& rows_path, bool partition) {
  const auto tree = ddt::tree_from_json(read_file(tree_path));
  const auto rows = ddt::load_rows(rows_path, tree.schema);
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    const double v = partition ? ddt::predict_partition(tree, rows.row(i)) : ddt::predict(tree, rows.row(i));
    std::cout << tree.schema.format_response(v) << '\n';
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distillation decision trees: grow an interpretable tree from a black-box teacher."};
  app.require_subcommand(1);

  std::string config_path, out_dir, suite, tree_path, rows_path, validate_out;
  std::uint64_t node_id = 1;
  bool fast = false, partition = false;
  unsigned workers = 0;

  auto* distill_cmd = app.add_subcommand("distill", "Grow a tree and write its artifacts");
  distill_cmd->add_option("-c,--config", config_path, "Run configuration (JSON)")->required();
  distill_cmd->add_option("-o,--out", out_dir, "Output directory");

  auto* stability_cmd = app.add_subcommand("stability", "Measure split stability at one node");
  stability_cmd->add_option("-c,--config", config_path, "Run configuration (JSON)")->required();
  stability_cmd->add_option("--node", node_id, "Node id (1 = root)");
  stability_cmd->add_option("-o,--out", out_dir, "Output directory")->default_val(".");

  auto* validate_cmd = app.add_subcommand("validate", "Run a simulation suite");
  validate_cmd->add_option("--suite", suite, "convergence, coverage or interpretation")
      ->required()
      ->check(CLI::IsMember({"convergence", "coverage", "interpretation"}));
  validate_cmd->add_flag("--fast", fast, "Reduced repetitions");
  validate_cmd->add_option("--workers", workers, "Worker threads (0 = all cores)");
  validate_cmd->add_option("-o,--out", validate_out, "CSV output path (default stdout)");

  auto* dot_cmd = app.add_subcommand("export-dot", "Render a tree document as Graphviz DOT");
  dot_cmd->add_option("tree", tree_path, "tree.json")->required();

  auto* predict_cmd = app.add_subcommand("predict", "Predict rows with a tree document");
  predict_cmd->add_option("tree", tree_path, "tree.json")->required();
  predict_cmd->add_option("rows", rows_path, "CSV of covariate rows")->required();
  predict_cmd->add_flag("--partition", partition, "Use the interpretable partition only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return config_error;
  }

  try {
    if (distill_cmd->parsed()) return distill(config_path, out_dir);
    if (stability_cmd->parsed()) return stability(config_path, node_id, out_dir);
    if (validate_cmd->parsed()) return validate(suite, fast, workers, validate_out);
    if (dot_cmd->parsed()) return export_dot(tree_path);
    if (predict_cmd->parsed()) return predict(tree_path, rows_path, partition);
  } catch (const ddt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const ddt::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return config_error;
  } catch (const ddt::TeacherError& e) {
    std::cerr << "teacher error: " << e.what() << '\n';
    return teacher_error;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return internal_error;
  }
  return internal_error;
}
