#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "potlab/cli.hpp"
#include "potlab/error.hpp"
#include "potlab/report.hpp"
#include "potlab/svg.hpp"

using namespace potlab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("potlab-unit-" + name);
  fs::remove_all(p);
  return p;
}

json wolff_scenario(const std::string& id) {
  return {{"id", id},
          {"task", "wolff"},
          {"young", {{"family", "power"}, {"p", 3.0}}},
          {"measure", {{"kind", "atoms"}, {"atoms", {{{"point", {0.0, 0.0}}, {"weight", {1.0}}}}}}}};
}

}  // namespace

TEST(Report, FittedConstantAndVerdict) {
  EstimateReport r("demo");
  r.add(1.0, 1.0, 2.0, "a");
  r.add(0.5, 2.0, 2.0, "a");
  EXPECT_EQ(r.verdict(), Verdict::bounded);
  r.add(0.25, 3.0, 2.0, "a");
  EXPECT_DOUBLE_EQ(r.fitted_constant(), 1.5);
  EXPECT_EQ(r.verdict(), Verdict::growing);
  r.add(0.2, 0.0, 0.0, "c");
  EXPECT_EQ(r.undefined_ratios(), 0);
  r.add(0.1, 1.0, 0.0, "b");
  EXPECT_EQ(r.undefined_ratios(), 1);
  std::ostringstream os;
  r.write_csv(os);
  EXPECT_EQ(os.str().substr(0, 25), "series,axis,lhs,rhs,ratio");
}

TEST(Report, NumberFormat) { EXPECT_EQ(format_number(0.5), "5.000000000000e-01"); }

TEST(Svg, WritesPolyline) {
  std::ostringstream os;
  write_svg_plot(os, {{"s", {{1.0, 1.0}, {10.0, 100.0}}}}, {"t", "x", "y", true, true});
  EXPECT_NE(os.str().find("<svg"), std::string::npos);
  EXPECT_NE(os.str().find("polyline"), std::string::npos);
}

TEST(Cli, CatalogIdsUniqueAndParse) {
  const auto& cat = cli::list_builtin_scenarios();
  EXPECT_GE(cat.size(), 8u);
  std::set<std::string> ids;
  for (const auto& e : cat) {
    EXPECT_TRUE(ids.insert(e.id).second) << e.id;
    EXPECT_FALSE(e.description.empty());
    EXPECT_NO_THROW(cli::parse_scenario(e.descriptor)) << e.id;
  }
}

TEST(Cli, ValidationPathsArePrefixed) {
  json bad = wolff_scenario("x");
  bad["young"] = {{"family", "power"}, {"p", "three"}};
  try {
    cli::parse_batch({{"scenarios", {wolff_scenario("ok"), bad}}});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field().rfind("scenarios[1].young", 0), 0u) << e.field();
  }
  EXPECT_THROW(cli::parse_batch({{"scenarios", {wolff_scenario("a"), wolff_scenario("a")}}}), ValidationError);
  json unknown = wolff_scenario("u");
  unknown["params"] = {{"radius", 1.0}};
  EXPECT_THROW(cli::parse_scenario(unknown), ValidationError);
}

TEST(Cli, EmptyBatchSucceeds) {
  const auto out = scratch("empty");
  std::ostringstream log;
  EXPECT_EQ(cli::run_batch(cli::parse_batch({{"scenarios", json::array()}}), out, 2, log), 0);
  std::ifstream in(out / "summary.json");
  const auto s = json::parse(in);
  EXPECT_TRUE(s["scenarios"].empty());
}

TEST(Cli, BuiltinReferenceAndSeedOverride) {
  const auto b = cli::parse_batch({{"seed", 4}, {"scenarios", {{{"builtin", "rearrangement-p3"}}}}});
  ASSERT_EQ(b.scenarios.size(), 1u);
  EXPECT_EQ(b.scenarios[0].seed, 4u);
  ::setenv("POTLAB_SEED", "99", 1);
  const auto c = cli::parse_batch({{"seed", 4}, {"scenarios", {{{"builtin", "rearrangement-p3"}}}}});
  ::unsetenv("POTLAB_SEED");
  EXPECT_EQ(c.scenarios[0].seed, 99u);
}

TEST(Cli, RunWritesArtifacts) {
  const auto out = scratch("run");
  std::ostringstream log;
  const auto batch = cli::parse_batch({{"scenarios", {wolff_scenario("w")}}});
  EXPECT_EQ(cli::run_batch(batch, out, 1, log), 0);
  EXPECT_TRUE(fs::exists(out / "w" / "wolff.csv"));
  EXPECT_TRUE(fs::exists(out / "w" / "potential.svg"));
  std::ifstream in(out / "w" / "summary.json");
  const auto s = json::parse(in);
  EXPECT_EQ(s["status"], "ok");
  // Summary schema.
  for (const char* key : {"id", "task", "description", "status", "diagnostic", "seed", "metrics", "files", "scenario"})
    EXPECT_TRUE(s.contains(key)) << key;
}

TEST(Cli, BoundaryFieldDescriptor) {
  auto mesh = std::make_shared<const Mesh2D>(Mesh2D::rectangle({0.0, 0.0}, {1.0, 1.0}, 2, 2));
  const auto f = cli::boundary_field(mesh, 1, {{"linear", {{2.0, 1.0}}}, {"quadratic", {1.0}}, {"constant", {3.0}}});
  for (std::size_t v = 0; v < mesh->num_vertices(); ++v) {
    const auto p = mesh->vertices()[v];
    EXPECT_DOUBLE_EQ(f.at(v)[0], 2 * p.x + p.y + p.x * p.x - p.y * p.y + 3.0);
  }
}

TEST(Cli, BundledConfigValidates) {
  const auto b = cli::load_batch(fs::path(POTLAB_SOURCE_DIR) / "scenarios" / "bundled.json");
  EXPECT_EQ(b.scenarios.size(), cli::list_builtin_scenarios().size());
}
