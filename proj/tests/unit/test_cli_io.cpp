#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "support.hpp"

#include "ddt/config.hpp"
#include "ddt/error.hpp"
#include "ddt/induction.hpp"
#include "ddt/serialization.hpp"
#include "ddt/simulation.hpp"
#include "ddt/teacher.hpp"

using namespace ddt;

namespace {

InductionConfig config(std::uint64_t seed) {
  InductionConfig c;
  c.seed = seed;
  c.stability.repeats = 15;
  c.stability.sample_size = 500;
  c.odt.pseudo_sample_size = 1000;
  c.eval_sample_size = 1000;
  c.stopping.max_interpretable_depth = 2;
  c.stopping.pxi_threshold = 1e-6;
  return c;
}

const DdtTree& sim_tree() {
  static const DdtTree t = [] {
    Rng rng(2);
    const Dataset observed = subsample(sim2d_grid(), 50, rng);
    const auto teacher = make_grid_teacher(sim2d_schema(), sim2d_grid());
    return induce_ddt(*teacher, sim2d_schema(), observed, config(3));
  }();
  return t;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(const std::string& args) {
  const std::string cmd = std::string(DDT_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("cli_io") {
  TEST_CASE("tree json round trip is byte identical") {
    const std::string first = tree_to_json(sim_tree());
    const DdtTree back = tree_from_json(first);
    CHECK(tree_to_json(back) == first);
    CHECK(back.nodes.size() == sim_tree().nodes.size());
    CHECK(back.schema == sim_tree().schema);
    Rng rng(5);
    const RowMatrix probe = sample_region(Region::full(sim2d_schema()), 200, rng);
    for (std::size_t i = 0; i < probe.rows(); ++i) {
      REQUIRE(predict(back, probe.row(i)) == predict(sim_tree(), probe.row(i)));
    }
  }

  TEST_CASE("categorical schemas round trip") {
    const CovariateSchema s({{"x", ContinuousDomain{-1.5, 2.0}}, {"colour", CategoricalDomain{{"red", "blue"}}}},
                            ResponseKind{ResponseType::categorical, {"no", "yes"}});
    CHECK(schema_from_json(schema_to_json(s)) == s);
  }

  TEST_CASE("malformed documents") {
    CHECK_THROWS_AS(tree_from_json("{"), DataError);
    CHECK_THROWS_AS(tree_from_json("{}"), DataError);
    std::string doc = tree_to_json(sim_tree());
    const auto pos = doc.find("\"format_version\": 1");
    REQUIRE(pos != std::string::npos);
    doc.replace(pos, 19, "\"format_version\": 9");
    CHECK_THROWS_AS(tree_from_json(doc), DataError);
  }

  TEST_CASE("dot output") {
    const std::string dot = export_dot(sim_tree());
    CHECK(dot == export_dot(sim_tree()));
    CHECK(dot.rfind("digraph ddt {", 0) == 0);
    CHECK(dot.find("n1 ->") != std::string::npos);
    for (const auto& [id, node] : sim_tree().nodes) {
      CHECK(dot.find("n" + std::to_string(id) + " [") != std::string::npos);
    }
  }

  TEST_CASE("dot marks weak support") {
    DdtTree tree = sim_tree();
    bool marked = false;
    for (auto& ix : tree.explanation.nodes) {
      if (ix.id != 1) {
        ix.observed_percent = 0.01;
        ix.weak_support = true;
        marked = true;
        break;
      }
    }
    REQUIRE(marked);
    CHECK(export_dot(tree).find("weak support") != std::string::npos);
  }

  TEST_CASE("single leaf dot") {
    const auto t = make_step_teacher(0.0, 2.0, 1.0, 5.0, 5.0);
    const auto tree = induce_ddt(*t, unary_schema(0.0, 2.0), Dataset{}, config(1));
    const std::string dot = export_dot(tree);
    CHECK(dot.find("n1 [") != std::string::npos);
    CHECK(dot.find("->") == std::string::npos);
  }

  TEST_CASE("explanation csv") {
    const std::string csv = explanation_csv(sim_tree());
    CHECK(csv.rfind("id,kind,depth,rule,", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == sim_tree().nodes.size() + 1);
  }

  TEST_CASE("rule descriptions") {
    const auto schema = testing::mixed_schema();
    CHECK(describe_rule(SplitRule{0, ThresholdCut{1.25}}, schema) == "x1 < 1.25");
    CHECK(describe_rule(SplitRule{1, LevelCut{2}}, schema) == "colour = blue");
  }

  TEST_CASE("config parsing") {
    const RunConfig rc = parse_run_config(
        R"({"seed": 5, "teacher": {"type": "step"}, "criterion": "mse", "stopping": {"pxi_threshold": 0.2},
            "strategy": {"kind": "path_based", "target": "LR"}})");
    CHECK(rc.induction.seed == 5);
    CHECK(rc.induction.criterion == SplitCriterion::mse());
    CHECK(rc.induction.stopping.pxi_threshold == 0.2);
    CHECK(rc.induction.strategy.kind == StrategyKind::path_based);
    CHECK(rc.teacher.type == TeacherType::step);
    CHECK(rc.teacher.cut == 1.0);
  }

  TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse_run_config(R"({"teacher": {"type": "step"}})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"seed": -1, "teacher": {"type": "step"}})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"seed": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"seed": 1, "teacher": {"type": "step"}, "colour": 3})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"seed": 1, "teacher": {"type": "step"}, "stopping": {"pxi_threshold": 0}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_run_config("not json"), ConfigError);
  }

  TEST_CASE("relative paths resolve against the config directory") {
    const RunConfig rc = parse_run_config(R"({"seed": 1, "teacher": {"type": "grid", "data": "g.csv"}})", "/a/b");
    CHECK(rc.teacher.data == std::filesystem::path("/a/b/g.csv"));
  }

  TEST_CASE("cli distill writes its artifacts") {
    const auto dir = testing::scratch_dir("cli_distill");
    REQUIRE(run("distill -c " + std::string(DDT_CONFIG_DIR) + "/step.json -o " + dir.string()) == 0);
    for (const char* f : {"tree.json", "explanation.csv", "tree.dot", "stability/1.json", "stability/1_draws.csv"}) {
      CHECK(std::filesystem::exists(dir / f));
    }
    const DdtTree tree = tree_from_json(slurp(dir / "tree.json"));
    CHECK(tree.interpretable_count() == 1);
    CHECK(std::abs(tree.root().split->rule.threshold() - 1.0) < 0.01);

    testing::write_text(dir / "rows.csv", "x\n0.5\n1.5\n");
    const std::string predict = std::string(DDT_CLI) + " predict " + (dir / "tree.json").string() + " " +
                                (dir / "rows.csv").string() + " > " + (dir / "pred.txt").string();
    REQUIRE(std::system(predict.c_str()) == 0);
    CHECK(slurp(dir / "pred.txt") == "0\n1\n");

    const std::string dot = std::string(DDT_CLI) + " export-dot " + (dir / "tree.json").string() + " > " +
                            (dir / "again.dot").string();
    REQUIRE(std::system(dot.c_str()) == 0);
    CHECK(slurp(dir / "again.dot") == slurp(dir / "tree.dot"));
  }

  TEST_CASE("cli stability on the step teacher") {
    const auto dir = testing::scratch_dir("cli_stability");
    REQUIRE(run("stability -c " + std::string(DDT_CONFIG_DIR) + "/step.json -o " + dir.string()) == 0);
    const std::string report = slurp(dir / "stability_1.json");
    CHECK(report.find("\"first_level\"") != std::string::npos);
  }

  TEST_CASE("cli exit codes") {
    const auto dir = testing::scratch_dir("cli_exit");
    testing::write_text(dir / "noseed.json", R"({"teacher": {"type": "step"}})");
    CHECK(run("distill -c " + (dir / "noseed.json").string() + " -o " + dir.string()) == 2);
    CHECK(run("distill") == 2);
    CHECK(run("distill -c " + (dir / "missing.json").string() + " -o " + dir.string()) == 2);

    const std::string schema = schema_to_json(unary_schema(0.0, 1.0));
    testing::write_text(dir / "silent.json", R"({"seed": 1, "teacher": {"type": "external", "timeout_ms": 2000, "command": ")" +
                                                 std::string(DDT_FAKE_TEACHER) + R"( nohandshake", "schema": )" +
                                                 schema + "}}");
    CHECK(run("distill -c " + (dir / "silent.json").string() + " -o " + dir.string()) == 3);
  }

  TEST_CASE("cli with an external teacher") {
    const auto dir = testing::scratch_dir("cli_external");
    const std::string schema = schema_to_json(CovariateSchema(
        {{"x", ContinuousDomain{0.0, 1.0}}}, ResponseKind{ResponseType::categorical, {"low", "high"}}));
    testing::write_text(dir / "ext.json", R"({"seed": 3, "criterion": "gini", "teacher": {"type": "external", "command": ")" +
                                              std::string(DDT_FAKE_TEACHER) + R"( class", "schema": )" + schema +
                                              R"(}, "stability": {"repeats": 10, "sample_size": 400},
             "stopping": {"max_interpretable_depth": 1}, "odt": {"pseudo_sample_size": 500}, "eval_sample_size": 500})");
    CHECK(run("distill -c " + (dir / "ext.json").string() + " -o " + dir.string()) == 0);
  }
}
