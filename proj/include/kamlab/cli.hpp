#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "kamlab/error.hpp"

namespace kamlab::cli {

const char* version();

struct ConfigIssue {
  ErrorKind kind;
  std::string key;  // dotted path, e.g. "schedule.sigma"
  std::string message;
};

/// All validation problems of one document; kind() is that of the first issue.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

struct TermSpec {
  std::string target = "f";  // f | g (kam-run) ; ignored elsewhere
  std::string kind = "cos";  // cos | sin
  std::vector<int> k;
  int l = 0;
  double amp = 0.0;
  std::vector<double> y;  // monomial profile, empty = 1
};

struct FunctionSpec {
  std::string name = "zero";
  double amp = 1.0;
  double scale = 1.0;
};

struct OutputSpec {
  std::string directory = "out";
  bool csv = true;
  bool json = true;
  bool plot = false;
};

/// One experiment. Sections not used by `mode` keep their defaults and are
/// omitted from the resolved document.
struct ExperimentConfig {
  std::string mode;

  struct Frequency {
    std::vector<double> omega;
    double gamma = 0.0;
    std::vector<double> mu;
    double omega0 = 1.0;
  } frequency;

  struct Trunc {
    int k_max = 8;
    int l_max = 8;
    int d_y = 8;
  } truncation;

  struct Schedule {
    double epsilon = 1e-3;
    double mu = 0.01;
    int n_max = 8;
    std::optional<double> sigma;  // default m + μ/100
    double target = 1e-12;
  } schedule;

  struct Certificate {
    double sigma = 0.0;  // default m + 0.01
    int k_max = 200;
  } certificate;

  struct Smooth {
    double p = 2.5;
    std::vector<double> deltas;
    double kernel_a = 1.0;
  } smooth;

  struct KamProblem {
    double radius = 0.02;
    std::vector<TermSpec> terms;
    bool check_invariance = true;
  } kam;

  struct MapProblem {
    std::string family = "M";
    double gamma = 0.0;
    double delta = 1.0;
    double radius = 1.0;
    std::vector<double> twist;  // monomial coefficients of h(y); empty = identity
    std::vector<TermSpec> kick, u0, v0;
  } map;

  struct Orbits {
    double x0 = 0.0;
    std::vector<double> y0;  // initial actions (twist-sim) or amplitudes (appl-run)
    int iterations = 10000;
    double perturbation = 0.0;  // size used by the curve detector
    int reversal_periods = 20;
  } orbits;

  struct Oscillator {
    FunctionSpec phi, f_damp, g_nl;
    std::vector<TermSpec> forcing;
    double r_ceiling = 1e6;
    double tolerance = 1e-12;
    std::vector<double> chain_lambdas;
  } oscillator;

  OutputSpec output;
};

/// Throws ConfigError listing every unknown-key / missing-field / range-violation.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_file(const std::string& path);
/// Fully resolved document (defaults filled) that parses back to the same config.
nlohmann::json to_json(const ExperimentConfig& c);

struct RunOptions {
  int threads = 1;
  std::optional<std::string> out_dir;
  bool force_csv = false;
  bool force_json = false;
  bool force_plot = false;
  /// smooth-demo overrides
  std::optional<double> p;
  std::optional<std::vector<double>> deltas;
};

struct RunReport {
  nlohmann::json report;  // config echo, records, summary, version
  std::vector<std::string> files;
  double wall_seconds = 0.0;
};

/// Dispatches to the module named by `mode` and writes the outputs atomically.
RunReport run_experiment(const ExperimentConfig& config, const RunOptions& opt = {});

/// Command-line entry: 0 success, 2 scientific failure, 1 usage error.
int main_entry(int argc, char** argv);

}  // namespace kamlab::cli
