#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "orbi/cli.hpp"

using namespace orbi;
using json = nlohmann::ordered_json;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  auto path = std::filesystem::temp_directory_path() / ("orbi_test_" + name + ".json");
  std::ofstream(path) << text;
  return path.string();
}

cli::Outcome run(const std::string& cmd, const std::string& path) {
  cli::JobSpec job;
  job.subcommand = cmd;
  job.inputs = {path};
  return cli::execute(job);
}

std::string error_of(const std::string& text) {
  try {
    io::parse_document(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

json minimal() {
  return json::parse(R"({
    "name": "disc",
    "groups": [{"name": "Z2", "order": 2, "table": [[0, 1], [1, 0]]}],
    "charts": [{"id": "M", "dim": 2, "domain": {"ball": {"dim": 2, "radius": "1/2"}}, "group": "Z2",
                "action": [[[1, 0], [0, 1]], [[-1, 0], [0, -1]]]}],
    "bundle": {"rank": 1, "fiber_actions": {"M": [[[1]], [[-1]]]}},
    "sections": [{"name": "s", "values": {"M": ["x1"]}}]
  })");
}

}  // namespace

TEST(Document, GalleryRoundTrip) {
  for (const auto& name : gallery::example_names()) {
    Document d = gallery::example(name);
    json first = io::to_json(d);
    Document back = io::parse_document(first.dump());
    EXPECT_EQ(io::to_json(back), first) << name;
    bool ok1 = false, ok2 = false;
    EXPECT_EQ(cli::validate_doc(d, 0, ok1), cli::validate_doc(back, 0, ok2)) << name;
    EXPECT_TRUE(ok1 && ok2) << name;
  }
}

TEST(Document, RandomBundlesRoundTrip) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Document d{"r", gallery::random_bundle(seed), {}, {}, {}};
    json first = io::to_json(d);
    EXPECT_EQ(io::to_json(io::parse_document(first.dump())), first) << seed;
  }
}

TEST(Document, MinimalDocument) {
  Document d = io::parse_document(minimal().dump());
  EXPECT_DOUBLE_EQ(d.bundle.base.charts[0].domain.factors[0].radius, 0.5);
  EXPECT_TRUE(validate_atlas(d.bundle.base).ok());
  EXPECT_TRUE(validate_bundle(d.bundle).ok());
  EXPECT_TRUE(validate_section(d.bundle, d.sections[0]).ok());
  EXPECT_EQ(classify(d.bundle).verdict, Verdict::Good);
}

TEST(Document, AffineInjectionsAndProducts) {
  json j = minimal();
  j["charts"].push_back(json::parse(R"({"id": "P", "domain": {"product": [{"ball": {"dim": 1, "radius": "1/8"}}, {"box": [["-1/8", "1/8"]]}]},
                                        "group": "Z2", "action": [[[1, 0], [0, 1]], [[-1, 0], [0, -1]]]})"));
  j["injections"] = json::parse(R"([{"id": "P->M", "src": "P", "dst": "M", "matrix": [[1, 0], [0, 1]], "translation": [0, 0], "lambda": [0, 1]}])");
  j["bundle"]["fiber_actions"]["P"] = json::parse("[[[1]], [[-1]]]");
  j["sections"][0]["values"]["P"] = json::array({"x1"});
  Document d = io::parse_document(j.dump());
  EXPECT_EQ(d.bundle.base.charts[1].domain.dim(), 2);
  EXPECT_TRUE(validate_atlas(d.bundle.base).ok());
  EXPECT_TRUE(validate_bundle(d.bundle).ok());
  EXPECT_TRUE(d.bundle.transition("P->M") == ExprMatrix::identity(1));
}

TEST(Document, ErrorsCarryLocations) {
  json j = minimal();
  j["charts"][0].erase("id");
  EXPECT_NE(error_of(j.dump()).find("charts[0]: missing field 'id'"), std::string::npos);

  j = minimal();
  j["sections"][0]["values"]["M"][0] = "x1 +* 2";
  EXPECT_NE(error_of(j.dump()).find("sections[0].values.M[0]"), std::string::npos);

  j = minimal();
  j["charts"][0]["group"] = "Z9";
  EXPECT_NE(error_of(j.dump()).find("charts[0].group"), std::string::npos);

  j = minimal();
  j["bundle"]["fiber_actions"]["Q"] = json::array();
  EXPECT_NE(error_of(j.dump()).find("bundle.fiber_actions.Q: unknown chart"), std::string::npos);

  j = minimal();
  j["charts"][0]["action"][1][0][0] = "1/0";
  EXPECT_NE(error_of(j.dump()).find("charts[0].action[1][0][0]"), std::string::npos);

  EXPECT_NE(error_of("{\"groups\": [").find("malformed document"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  std::string good = write_temp("good", minimal().dump());
  EXPECT_EQ(run("validate", good).exit, cli::kOk);
  EXPECT_EQ(run("classify", good).exit, cli::kOk);
  EXPECT_EQ(run("sectors", good).exit, cli::kOk);
  EXPECT_EQ(run("nonsense", good).exit, cli::kInputError);
  EXPECT_EQ(run("validate", "/nonexistent/x.json").exit, cli::kInputError);
  EXPECT_EQ(run("validate", write_temp("broken", "{")).exit, cli::kInputError);

  json bad = minimal();
  bad["bundle"]["fiber_actions"]["M"][1] = json::parse("[[1]]");  // fiber action no longer matches the section
  EXPECT_EQ(run("validate", write_temp("bad", bad.dump())).exit, cli::kValidationFailure);
  bad = minimal();
  bad["charts"][0]["action"][1] = json::parse("[[1, 0], [0, -1]]");
  bad["charts"][0]["domain"] = json::parse(R"({"box": [[0, 1], [0, 1]]})");
  EXPECT_EQ(run("validate", write_temp("bad2", bad.dump())).exit, cli::kValidationFailure);

  cli::JobSpec ex;
  ex.subcommand = "example";
  ex.inputs = {"teardrop-x"};
  EXPECT_EQ(cli::execute(ex).exit, cli::kInputError);
}

TEST(Cli, ExampleThenSubcommands) {
  cli::JobSpec ex;
  ex.subcommand = "example";
  ex.inputs = {"s2-z3-bad"};
  auto out = cli::execute(ex);
  ASSERT_EQ(out.exit, cli::kOk);
  std::string path = write_temp("z3", cli::render(out, cli::Format::Structured));
  auto cls = run("classify", path);
  EXPECT_EQ(cls.report["verdict"], "Bad");
  EXPECT_EQ(cls.report["K_b"], "Z3");
  auto vert = run("vertical", path);
  EXPECT_EQ(vert.report["vertical"]["verdict"], "Good");
  EXPECT_LE(vert.report["restriction_certificate"].get<double>(), 1e-12);
  // the emitted VE document is itself a valid input
  std::string ve = write_temp("z3ve", vert.report["document"].dump());
  EXPECT_EQ(run("validate", ve).exit, cli::kOk);
  EXPECT_EQ(run("classify", ve).report["verdict"], "Good");
  auto ob = run("obstruct", path);
  EXPECT_EQ(ob.exit, cli::kValidationFailure);
  EXPECT_TRUE(ob.report["refused"].get<bool>());
}

TEST(Cli, EulerReportForTeardrop) {
  cli::JobSpec ex;
  ex.subcommand = "example";
  ex.inputs = {"teardrop-3"};
  std::string path = write_temp("td3", cli::execute(ex).report.dump());
  auto e = run("euler", path);
  ASSERT_EQ(e.exit, cli::kOk);
  const json& comps = e.report["class"]["components"];
  ASSERT_EQ(comps.size(), 3u);
  EXPECT_NEAR(comps[0]["integral"].get<double>(), 4.0 / 3.0, 1e-3);
  EXPECT_EQ(comps[1]["shift"], "1/3");
  EXPECT_EQ(comps[2]["shift"], "2/3");
  std::string text = cli::render(e, cli::Format::Text);
  EXPECT_NE(text.find("shift: 1/3"), std::string::npos);
}
