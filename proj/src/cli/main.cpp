#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "kamlab/cli.hpp"

namespace kamlab::cli {

namespace {

struct Args {
  std::string config;
  std::string out;
  int threads = 1;
  bool csv = false, json = false, plot = false;
  double p = 0.0;
  std::vector<double> deltas;
};

ExperimentConfig defaults_for(const std::string& mode) { return parse_config(nlohmann::json{{"mode", mode}}); }

}  // namespace

int main_entry(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for reversible KAM iterations", "kamlab"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);
  Args a;
  const std::vector<std::pair<std::string, std::string>> modes{
      {"dioph", "Diophantine certificate for (omega, gamma)"},
      {"smooth-demo", "Smoothing error decay on a lacunary probe"},
      {"kam-run", "Full KAM iteration on a perturbation spectrum"},
      {"twist-sim", "Orbits of a reversible twist map"},
      {"appl-run", "Forced oscillator orbits and action-angle chain"}};
  std::map<std::string, CLI::Option*> p_opt, d_opt;
  for (const auto& [name, help] : modes) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", a.config, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", a.out, "output directory (overrides output.directory)");
    sub->add_option("--threads", a.threads, "worker threads for orbit sweeps")->check(CLI::Range(1, 256));
    sub->add_flag("--csv", a.csv, "force CSV output");
    sub->add_flag("--json", a.json, "force JSON output");
    sub->add_flag("--plot", a.plot, "write SVG plots");
    if (name == "smooth-demo") {
      p_opt[name] = sub->add_option("--p", a.p, "Hoelder exponent of the probe");
      d_opt[name] = sub->add_option("--deltas", a.deltas, "smoothing scales")->delimiter(',');
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  const std::string mode = app.get_subcommands().front()->get_name();
  try {
    ExperimentConfig cfg;
    if (!a.config.empty()) {
      cfg = parse_config_file(a.config);
      if (cfg.mode != mode) {
        std::cerr << "config mode '" << cfg.mode << "' does not match subcommand '" << mode << "'\n";
        return 1;
      }
    } else if (mode == "smooth-demo") {
      cfg = defaults_for(mode);
    } else {
      std::cerr << mode << " requires --config\n";
      return 1;
    }
    RunOptions opt;
    opt.threads = a.threads;
    if (!a.out.empty()) opt.out_dir = a.out;
    opt.force_csv = a.csv;
    opt.force_json = a.json;
    opt.force_plot = a.plot;
    if (p_opt.count(mode) && p_opt[mode]->count() > 0) opt.p = a.p;
    if (d_opt.count(mode) && d_opt[mode]->count() > 0) opt.deltas = a.deltas;

    const RunReport rep = run_experiment(cfg, opt);
    std::cout << rep.report.at("summary").dump(2) << "\n";
    for (const auto& f : rep.files) std::cerr << "wrote " << f << "\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return is_scientific_failure(e.kind()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace kamlab::cli
