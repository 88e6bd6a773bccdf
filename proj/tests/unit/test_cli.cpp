#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "kamlab/cli.hpp"

using namespace kamlab;
using namespace kamlab::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("kamlab_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "kamlab");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return main_entry(static_cast<int>(argv.size()), argv.data());
}

fs::path write_config(const fs::path& dir, const json& doc) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << doc.dump(2);
  return p;
}

json minimal_kam() {
  return {{"mode", "kam-run"},
          {"frequency", {{"omega", {1.0}}, {"gamma", std::numbers::sqrt2}}},
          {"problem", {{"terms", json::array({{{"target", "f"}, {"k", {1}}, {"l", 1}, {"amp", 1e-3}}})}}}};
}

json dioph_doc(double gamma, const fs::path& out) {
  return {{"mode", "dioph"},
          {"frequency", {{"omega", {1.0}}, {"gamma", gamma}}},
          {"certificate", {{"sigma", 1.0}, {"k_max", 200}}},
          {"output", {{"directory", out.string()}}}};
}

json twist_doc(const fs::path& out) {
  return {{"mode", "twist-sim"},
          {"problem",
           {{"map", {{"family", "M"}, {"gamma", 2.0}, {"kick", json::array({{{"k", {1}}, {"amp", 0.05}}})}}},
            {"orbits", {{"y0", {-0.3, -0.1, 0.0, 0.15, 0.3, 0.45}}, {"iterations", 2000}}}}},
          {"output", {{"directory", out.string()}}}};
}

const ConfigIssue* find_issue(const ConfigError& e, const std::string& key) {
  for (const auto& i : e.issues()) {
    if (i.key == key) return &i;
  }
  return nullptr;
}

}  // namespace

TEST(Config, MinimalKamRunFillsDefaults) {
  const auto c = parse_config(minimal_kam());
  EXPECT_EQ(c.mode, "kam-run");
  EXPECT_EQ(c.truncation.k_max, 8);
  EXPECT_EQ(c.schedule.n_max, 8);
  EXPECT_DOUBLE_EQ(c.schedule.epsilon, 1e-3);
  ASSERT_TRUE(c.schedule.sigma.has_value());
  EXPECT_DOUBLE_EQ(*c.schedule.sigma, 1.0 + 0.01 / 100);
  EXPECT_DOUBLE_EQ(c.certificate.sigma, 1.01);
  EXPECT_DOUBLE_EQ(c.kam.radius, 0.02);
  ASSERT_EQ(c.kam.terms.size(), 1u);
  EXPECT_EQ(c.kam.terms[0].kind, "cos");
  EXPECT_EQ(c.output.directory, "out");
}

TEST(Config, SigmaNotAboveMNamesSigma) {
  for (const char* block : {"schedule", "certificate"}) {
    json doc = minimal_kam();
    doc[block]["sigma"] = 1.0;
    try {
      parse_config(doc);
      FAIL() << "accepted sigma = m in " << block;
    } catch (const ConfigError& e) {
      const auto* i = find_issue(e, "sigma");
      ASSERT_NE(i, nullptr);
      EXPECT_EQ(i->kind, ErrorKind::range_violation);
      EXPECT_NE(std::string(e.what()).find("sigma"), std::string::npos);
    }
  }
}

TEST(Config, CollectsEveryIssueWithDottedKeys) {
  json doc = minimal_kam();
  doc["schedule"]["epsilon"] = 2.0;
  doc["schedule"]["eta"] = 1;
  doc["problem"]["terms"][0]["kind"] = "sin";
  doc["frequency"].erase("gamma");
  try {
    parse_config(doc);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.issues().size(), 4u);
    ASSERT_NE(find_issue(e, "schedule.epsilon"), nullptr);
    EXPECT_EQ(find_issue(e, "schedule.epsilon")->kind, ErrorKind::range_violation);
    ASSERT_NE(find_issue(e, "schedule.eta"), nullptr);
    EXPECT_EQ(find_issue(e, "schedule.eta")->kind, ErrorKind::unknown_key);
    ASSERT_NE(find_issue(e, "problem.terms[0].kind"), nullptr);
    ASSERT_NE(find_issue(e, "frequency.gamma"), nullptr);
    EXPECT_EQ(find_issue(e, "frequency.gamma")->kind, ErrorKind::missing_field);
  }
}

TEST(Config, UnknownTopLevelAndSectionForOtherMode) {
  json doc = dioph_doc(std::numbers::sqrt2, "out");
  doc["extra"] = 1;
  doc["schedule"] = json::object();
  try {
    parse_config(doc);
    FAIL();
  } catch (const ConfigError& e) {
    ASSERT_EQ(e.issues().size(), 2u);
    EXPECT_EQ(e.kind(), ErrorKind::unknown_key);
    EXPECT_NE(find_issue(e, "extra"), nullptr);
    EXPECT_NE(find_issue(e, "schedule"), nullptr);
  }
}

TEST(Config, MissingModeAndWrongTypes) {
  try {
    parse_config(json{{"frequency", {{"omega", "fast"}}}});
    FAIL();
  } catch (const ConfigError& e) {
    ASSERT_NE(find_issue(e, "mode"), nullptr);
    EXPECT_EQ(find_issue(e, "mode")->kind, ErrorKind::missing_field);
  }
  json doc = minimal_kam();
  doc["truncation"]["k_max"] = 2.5;
  EXPECT_THROW(parse_config(doc), ConfigError);
}

TEST(Config, MissingFileIsConfigError) {
  EXPECT_THROW(parse_config_file("/nonexistent/kamlab.json"), ConfigError);
}

TEST(Config, RoundTripIsIdentical) {
  std::vector<json> docs{minimal_kam(), dioph_doc(std::numbers::sqrt2, "x"), twist_doc("y"),
                         json{{"mode", "smooth-demo"}}};
  for (const auto& e : fs::directory_iterator(KAMLAB_CONFIG_DIR)) {
    std::ifstream in(e.path());
    docs.push_back(json::parse(in));
  }
  ASSERT_GE(docs.size(), 9u);
  for (const auto& d : docs) {
    const json resolved = to_json(parse_config(d));
    const json again = to_json(parse_config(resolved));
    EXPECT_EQ(resolved.dump(), again.dump()) << d.dump();
    // the resolved document carries every original key with the same value
    for (auto it = d.begin(); it != d.end(); ++it) ASSERT_TRUE(resolved.contains(it.key())) << it.key();
  }
}

TEST(Run, DiophReproducesBruteForceCertificate) {
  const fs::path out = scratch("dioph");
  const auto rep = run_experiment(parse_config(dioph_doc(std::numbers::sqrt2, out)));
  double c0 = INFINITY;
  for (int k = 1; k <= 200; ++k) {
    const double x = k * std::numbers::sqrt2;
    c0 = std::min(c0, k * std::abs(x - std::round(x)));
  }
  EXPECT_NEAR(rep.report["summary"]["c0"].get<double>(), c0, 1e-12);
  EXPECT_NEAR(c0, 2.0 * (3.0 - 2.0 * std::numbers::sqrt2), 1e-12);
  const auto rows = read_csv(out / "dioph.csv");
  ASSERT_EQ(rows.size(), 201u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"k_abs", "min_divisor", "c0_running"}));
  EXPECT_NEAR(std::stod(rows.back()[2]), c0, 1e-12);
  EXPECT_EQ(json::parse(slurp(out / "report.json"))["config"], to_json(parse_config(dioph_doc(std::numbers::sqrt2, out))));
}

TEST(Run, KamRunNormHistoryIsMonotone) {
  const fs::path out = scratch("kam");
  json doc = minimal_kam();
  doc["output"] = {{"directory", out.string()}, {"plot", true}};
  const auto rep = run_experiment(parse_config(doc));
  EXPECT_TRUE(rep.report["summary"]["converged"].get<bool>());
  const auto rows = read_csv(out / "kam_run.csv");
  ASSERT_GE(rows.size(), 4u);
  ASSERT_EQ(rows[0].size(), 12u);
  EXPECT_EQ(rows[0][3], "norm_f_bar");
  for (std::size_t i = 2; i < rows.size(); ++i) EXPECT_LT(std::stod(rows[i][3]), std::stod(rows[i - 1][3]));
  EXPECT_LE(rep.report["summary"]["invariance_residual"].get<double>(), 1e-6);
  EXPECT_EQ(slurp(out / "kam_run.svg").rfind("<svg", 0), 0u);
}

TEST(Run, RepeatedRunsAreByteIdentical) {
  const fs::path a = scratch("rep_a"), b = scratch("rep_b");
  json doc = minimal_kam();
  doc["output"] = {{"directory", "unused"}};
  const auto cfg = parse_config(doc);
  RunOptions oa, ob;
  oa.out_dir = a.string();
  ob.out_dir = a.string();
  run_experiment(cfg, oa);
  const std::string csv1 = slurp(a / "kam_run.csv"), rep1 = slurp(a / "report.json");
  run_experiment(cfg, ob);
  EXPECT_EQ(csv1, slurp(a / "kam_run.csv"));
  EXPECT_EQ(rep1, slurp(a / "report.json"));
  ob.out_dir = b.string();
  run_experiment(cfg, ob);
  EXPECT_EQ(csv1, slurp(b / "kam_run.csv"));
  EXPECT_NE(rep1, slurp(b / "report.json"));  // only the echoed directory differs
  for (const auto& e : fs::directory_iterator(a)) EXPECT_EQ(e.path().filename().string().find(".tmp"), std::string::npos);
}

TEST(Run, ThreadCountDoesNotChangeOutputs) {
  const fs::path out = scratch("threads");
  const auto cfg = parse_config(twist_doc(out));
  RunOptions o1, o4;
  o4.threads = 4;
  run_experiment(cfg, o1);
  const std::string csv1 = slurp(out / "twist_sim.csv"), rep1 = slurp(out / "report.json");
  run_experiment(cfg, o4);
  EXPECT_EQ(csv1, slurp(out / "twist_sim.csv"));
  EXPECT_EQ(rep1, slurp(out / "report.json"));
  const auto rows = read_csv(out / "twist_sim.csv");
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"orbit_id", "y0", "rotation", "err", "y_min", "y_max", "escaped"}));
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(rows[i][0], std::to_string(i - 1));
}

TEST(Run, ApplRunWithoutForcingConservesRadius) {
  const fs::path out = scratch("appl");
  json doc{{"mode", "appl-run"},
           {"frequency", {{"omega0", 1.3}}},
           {"problem", {{"oscillator", json::object()}, {"orbits", {{"amplitudes", {1.0, 5.0, 40.0}}, {"periods", 200}}}}},
           {"output", {{"directory", out.string()}}}};
  const auto rep = run_experiment(parse_config(doc));
  const auto rows = read_csv(out / "appl_run.csv");
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double y0 = std::stod(rows[i][1]);
    EXPECT_NEAR(std::stod(rows[i][4]), y0, 1e-9 * y0);
    EXPECT_NEAR(std::stod(rows[i][5]), y0, 1e-9 * y0);
    EXPECT_EQ(rows[i][6], "0");
  }
  EXPECT_TRUE(rep.report["summary"]["zero_twist"].get<bool>());
}

TEST(Run, SmoothDemoOverrides) {
  const fs::path out = scratch("smooth");
  RunOptions o;
  o.out_dir = out.string();
  o.p = 1.0;
  o.deltas = std::vector<double>{0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125};
  const auto rep = run_experiment(parse_config(json{{"mode", "smooth-demo"}}), o);
  EXPECT_NEAR(rep.report["summary"]["slope"].get<double>(), 1.0, 0.3);
  EXPECT_EQ(read_csv(out / "smooth_demo.csv").size(), 7u);
  o.deltas = std::vector<double>{0.1, 0.05};
  EXPECT_THROW(run_experiment(parse_config(json{{"mode", "smooth-demo"}}), o), ConfigError);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("exit");
  EXPECT_EQ(invoke({}), 1);
  EXPECT_EQ(invoke({"no-such-mode"}), 1);
  EXPECT_EQ(invoke({"dioph", "--config", "/nonexistent.json"}), 1);
  EXPECT_EQ(invoke({"dioph"}), 1);

  const fs::path ok = write_config(dir, dioph_doc(std::numbers::sqrt2, dir / "ok"));
  EXPECT_EQ(invoke({"dioph", "--config", ok.string()}), 0);
  EXPECT_TRUE(fs::exists(dir / "ok" / "dioph.csv"));
  EXPECT_EQ(invoke({"kam-run", "--config", ok.string()}), 1);  // mode mismatch

  json bad = dioph_doc(std::numbers::sqrt2, dir / "bad");
  bad["certificate"]["k_max"] = -3;
  EXPECT_EQ(invoke({"dioph", "--config", write_config(dir, bad).string()}), 1);

  const fs::path resonant = write_config(dir, dioph_doc(0.5, dir / "res"));
  EXPECT_EQ(invoke({"dioph", "--config", resonant.string()}), 2);
  const json err = json::parse(slurp(dir / "res" / "error.json"));
  EXPECT_EQ(err["kind"], "resonance-detected");

  EXPECT_EQ(invoke({"smooth-demo", "--out", (dir / "sm").string(), "--p", "4", "--deltas", "0.2,0.1,0.05,0.025,0.0125,0.00625",
                    "--plot", "--threads", "2"}),
            0);
  EXPECT_TRUE(fs::exists(dir / "sm" / "smooth_demo.svg"));
  EXPECT_TRUE(fs::exists(dir / "sm" / "timing.json"));
  EXPECT_EQ(invoke({"smooth-demo", "--threads", "0"}), 1);
}

TEST(Cli, EscapedOrbitIsRecordedNotFatal) {
  const fs::path dir = scratch("escape");
  json doc = twist_doc(dir / "o");
  doc["problem"]["map"]["kick"][0]["amp"] = 0.8;
  doc["problem"]["orbits"]["y0"] = {0.0, 0.95};
  EXPECT_EQ(invoke({"twist-sim", "--config", write_config(dir, doc).string()}), 0);
  const auto rows = read_csv(dir / "o" / "twist_sim.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[2][6], "1");
  EXPECT_FALSE(fs::exists(dir / "o" / "error.json"));

  doc["problem"]["orbits"]["y0"] = {2.0};
  EXPECT_EQ(invoke({"twist-sim", "--config", write_config(dir, doc).string()}), 1);
}
