#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "kamlab/cli.hpp"

namespace kamlab::cli {

using nlohmann::json;

const char* version() { return "kamlab 0.1.0"; }

namespace {

std::string join_issues(const std::vector<ConfigIssue>& issues) {
  std::ostringstream os;
  os << issues.size() << " configuration error(s)";
  for (const auto& i : issues) os << "\n  " << to_string(i.kind) << " '" << i.key << "': " << i.message;
  return os.str();
}

const std::set<std::string> kModes{"dioph", "smooth-demo", "kam-run", "twist-sim", "appl-run"};

class Reader {
 public:
  std::vector<ConfigIssue> issues;

  void add(ErrorKind k, const std::string& key, const std::string& msg) { issues.push_back({k, key, msg}); }
  void range(bool ok, const std::string& key, const std::string& msg) {
    if (!ok) add(ErrorKind::range_violation, key, msg);
  }

  /// Returns the child object (or nullptr) and reports keys outside `allowed`.
  const json* section(const json& parent, const std::string& path, const std::string& key,
                      std::initializer_list<const char*> allowed, bool required = false) {
    const std::string p = join(path, key);
    auto it = parent.find(key);
    if (it == parent.end()) {
      if (required) add(ErrorKind::missing_field, p, "section is required");
      return nullptr;
    }
    if (!it->is_object()) {
      add(ErrorKind::range_violation, p, "expected an object");
      return nullptr;
    }
    keys(*it, p, allowed);
    return &*it;
  }

  void keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || it.key() == a;
      if (!ok) add(ErrorKind::unknown_key, join(path, it.key()), "key is not recognised");
    }
  }

  template <class T>
  bool get(const json* obj, const std::string& path, const std::string& key, T& out, bool required = false) {
    const std::string p = join(path, key);
    if (obj == nullptr || !obj->contains(key)) {
      if (required) add(ErrorKind::missing_field, p, "value is required");
      return false;
    }
    const json& v = obj->at(key);
    try {
      if constexpr (std::is_same_v<T, int>) {
        if (!v.is_number_integer()) throw std::invalid_argument("expected an integer");
      } else if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw std::invalid_argument("expected a number");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::invalid_argument("expected true or false");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw std::invalid_argument("expected a string");
      } else if constexpr (std::is_same_v<T, std::vector<double>>) {
        if (!v.is_array()) throw std::invalid_argument("expected an array of numbers");
        for (const auto& e : v) {
          if (!e.is_number()) throw std::invalid_argument("expected an array of numbers");
        }
      } else if constexpr (std::is_same_v<T, std::vector<int>>) {
        if (!v.is_array()) throw std::invalid_argument("expected an array of integers");
        for (const auto& e : v) {
          if (!e.is_number_integer()) throw std::invalid_argument("expected an array of integers");
        }
      }
      out = v.get<T>();
      return true;
    } catch (const std::exception& e) {
      add(ErrorKind::range_violation, p, e.what());
      return false;
    }
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
};

std::vector<TermSpec> read_terms(Reader& rd, const json* obj, const std::string& path, const std::string& key,
                                 bool with_target, bool with_l, int m) {
  std::vector<TermSpec> out;
  const std::string p = Reader::join(path, key);
  if (obj == nullptr || !obj->contains(key)) return out;
  const json& arr = obj->at(key);
  if (!arr.is_array()) {
    rd.add(ErrorKind::range_violation, p, "expected an array of terms");
    return out;
  }
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string tp = p + "[" + std::to_string(i) + "]";
    if (!arr[i].is_object()) {
      rd.add(ErrorKind::range_violation, tp, "expected an object");
      continue;
    }
    if (with_target && with_l) {
      rd.keys(arr[i], tp, {"target", "kind", "k", "l", "amp", "y"});
    } else {
      rd.keys(arr[i], tp, {"k", "amp"});
    }
    TermSpec t;
    rd.get(&arr[i], tp, "k", t.k, true);
    rd.get(&arr[i], tp, "amp", t.amp, true);
    if (with_target && with_l) {
      rd.get(&arr[i], tp, "target", t.target, true);
      rd.get(&arr[i], tp, "kind", t.kind);
      rd.get(&arr[i], tp, "l", t.l);
      rd.get(&arr[i], tp, "y", t.y);
      rd.range(t.target == "f" || t.target == "g", tp + ".target", "must be \"f\" or \"g\"");
      if (!arr[i].contains("kind")) t.kind = t.target == "g" ? "sin" : "cos";
      rd.range(t.kind == "cos" || t.kind == "sin", tp + ".kind", "must be \"cos\" or \"sin\"");
      rd.range(t.target != "f" || t.kind == "cos", tp + ".kind", "f terms must be even (cos)");
      rd.range(t.target != "g" || t.kind == "sin", tp + ".kind", "g terms must be odd (sin)");
    }
    rd.range(static_cast<int>(t.k.size()) == m, tp + ".k", "needs " + std::to_string(m) + " entries");
    rd.range(std::isfinite(t.amp), tp + ".amp", "must be finite");
    out.push_back(std::move(t));
  }
  return out;
}

json terms_json(const std::vector<TermSpec>& terms, bool full) {
  json a = json::array();
  for (const auto& t : terms) {
    if (full) {
      a.push_back({{"target", t.target}, {"kind", t.kind}, {"k", t.k}, {"l", t.l}, {"amp", t.amp}, {"y", t.y}});
    } else {
      a.push_back({{"k", t.k}, {"amp", t.amp}});
    }
  }
  return a;
}

FunctionSpec read_function(Reader& rd, const json* obj, const std::string& path, const std::string& key) {
  FunctionSpec f;
  const json* s = obj ? rd.section(*obj, path, key, {"name", "amp", "scale"}) : nullptr;
  const std::string p = Reader::join(path, key);
  rd.get(s, p, "name", f.name);
  rd.get(s, p, "amp", f.amp);
  rd.get(s, p, "scale", f.scale);
  static const std::set<std::string> names{"zero", "constant", "arctan", "arctan_square", "tanh"};
  rd.range(names.count(f.name) > 0, p + ".name", "unknown function '" + f.name + "'");
  rd.range(f.scale > 0.0, p + ".scale", "must be positive");
  rd.range(std::isfinite(f.amp), p + ".amp", "must be finite");
  return f;
}

json function_json(const FunctionSpec& f) { return {{"name", f.name}, {"amp", f.amp}, {"scale", f.scale}}; }

void check_positive_list(Reader& rd, const std::vector<double>& v, const std::string& key) {
  for (double x : v) rd.range(x > 0.0 && std::isfinite(x), key, "entries must be positive");
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : Error(issues.empty() ? ErrorKind::invalid_argument : issues.front().kind, join_issues(issues)),
      issues_(std::move(issues)) {}

ExperimentConfig parse_config(const json& doc) {
  Reader rd;
  ExperimentConfig c;
  if (!doc.is_object()) {
    rd.add(ErrorKind::range_violation, "", "configuration must be an object");
    throw ConfigError(rd.issues);
  }
  rd.keys(doc, "", {"mode", "frequency", "truncation", "schedule", "certificate", "problem", "output"});
  rd.get(&doc, "", "mode", c.mode, true);
  if (!c.mode.empty() && kModes.count(c.mode) == 0) rd.add(ErrorKind::range_violation, "mode", "unknown mode '" + c.mode + "'");

  const json* out = rd.section(doc, "", "output", {"directory", "csv", "json", "plot"});
  rd.get(out, "output", "directory", c.output.directory);
  rd.get(out, "output", "csv", c.output.csv);
  rd.get(out, "output", "json", c.output.json);
  rd.get(out, "output", "plot", c.output.plot);
  rd.range(!c.output.directory.empty(), "output.directory", "must not be empty");

  const std::string& mode = c.mode;
  const bool uses_omega = mode == "dioph" || mode == "kam-run" || mode == "twist-sim";
  const bool uses_cert = mode == "dioph" || mode == "kam-run" || mode == "appl-run";
  const json* fr = nullptr;
  if (uses_omega) {
    fr = rd.section(doc, "", "frequency", {"omega", "gamma"}, mode != "twist-sim");
  } else if (mode == "appl-run") {
    fr = rd.section(doc, "", "frequency", {"mu", "omega0"});
  } else if (doc.contains("frequency")) {
    rd.add(ErrorKind::unknown_key, "frequency", "not used by mode '" + mode + "'");
  }
  if (uses_omega) {
    if (mode == "twist-sim") c.frequency.omega = {1.0};
    rd.get(fr, "frequency", "omega", c.frequency.omega, mode != "twist-sim");
    if (mode != "twist-sim") rd.get(fr, "frequency", "gamma", c.frequency.gamma, true);
    rd.range(!c.frequency.omega.empty(), "frequency.omega", "needs at least one frequency");
    std::set<double> seen;
    for (double w : c.frequency.omega) {
      rd.range(w != 0.0 && std::isfinite(w) && seen.insert(w).second, "frequency.omega",
               "entries must be finite, nonzero and distinct");
    }
  }
  if (mode == "appl-run") {
    rd.get(fr, "frequency", "mu", c.frequency.mu);
    rd.get(fr, "frequency", "omega0", c.frequency.omega0);
    rd.range(c.frequency.omega0 > 0.0, "frequency.omega0", "must be positive");
    std::set<double> seen;
    for (double w : c.frequency.mu) {
      rd.range(w != 0.0 && std::isfinite(w) && seen.insert(w).second, "frequency.mu",
               "entries must be finite, nonzero and distinct");
    }
  }
  const int m = mode == "appl-run" ? static_cast<int>(c.frequency.mu.size()) : static_cast<int>(c.frequency.omega.size());

  if (mode == "kam-run") {
    const json* tr = rd.section(doc, "", "truncation", {"k_max", "l_max", "d_y"});
    rd.get(tr, "truncation", "k_max", c.truncation.k_max);
    rd.get(tr, "truncation", "l_max", c.truncation.l_max);
    rd.get(tr, "truncation", "d_y", c.truncation.d_y);
    rd.range(c.truncation.k_max >= 1, "truncation.k_max", "must be >= 1");
    rd.range(c.truncation.l_max >= 0, "truncation.l_max", "must be >= 0");
    rd.range(c.truncation.d_y >= 1, "truncation.d_y", "must be >= 1");

    const json* sc = rd.section(doc, "", "schedule", {"epsilon", "mu", "n_max", "sigma", "target"});
    rd.get(sc, "schedule", "epsilon", c.schedule.epsilon);
    rd.get(sc, "schedule", "mu", c.schedule.mu);
    rd.get(sc, "schedule", "n_max", c.schedule.n_max);
    double sigma = 0.0;
    if (rd.get(sc, "schedule", "sigma", sigma)) {
      c.schedule.sigma = sigma;
      rd.range(sigma > m, "sigma", "schedule.sigma must exceed m = " + std::to_string(m));
    } else {
      c.schedule.sigma = m + c.schedule.mu / 100.0;
    }
    rd.get(sc, "schedule", "target", c.schedule.target);
    rd.range(c.schedule.epsilon > 0.0 && c.schedule.epsilon < 1.0, "schedule.epsilon", "must lie in (0, 1)");
    rd.range(c.schedule.mu > 0.0, "schedule.mu", "must be positive");
    rd.range(c.schedule.n_max >= 1 && c.schedule.n_max <= 64, "schedule.n_max", "must lie in [1, 64]");
    rd.range(c.schedule.target > 0.0, "schedule.target", "must be positive");
  } else {
    for (const char* k : {"truncation", "schedule"}) {
      if (doc.contains(k)) rd.add(ErrorKind::unknown_key, k, "not used by mode '" + mode + "'");
    }
  }

  if (uses_cert) {
    const json* ce = rd.section(doc, "", "certificate", {"sigma", "k_max"});
    c.certificate.sigma = m + 0.01;
    if (rd.get(ce, "certificate", "sigma", c.certificate.sigma)) {
      if (mode == "dioph") {
        rd.range(c.certificate.sigma > 0.0, "sigma", "certificate.sigma must be positive");
      } else {
        rd.range(c.certificate.sigma > m, "sigma", "certificate.sigma must exceed m = " + std::to_string(m));
      }
    }
    rd.get(ce, "certificate", "k_max", c.certificate.k_max);
    rd.range(c.certificate.k_max >= 1 && c.certificate.k_max <= 100000, "certificate.k_max", "must lie in [1, 1e5]");
  } else if (doc.contains("certificate")) {
    rd.add(ErrorKind::unknown_key, "certificate", "not used by mode '" + mode + "'");
  }

  if (mode == "dioph") {
    if (doc.contains("problem")) rd.add(ErrorKind::unknown_key, "problem", "not used by mode 'dioph'");
  } else if (mode == "smooth-demo") {
    const json* pr = rd.section(doc, "", "problem", {"p", "deltas", "kernel_a"});
    c.smooth.deltas = {0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625};
    rd.get(pr, "problem", "p", c.smooth.p);
    rd.get(pr, "problem", "deltas", c.smooth.deltas);
    rd.get(pr, "problem", "kernel_a", c.smooth.kernel_a);
    rd.range(c.smooth.p > 0.0 && c.smooth.p <= 6.0, "problem.p", "must lie in (0, 6]");
    rd.range(c.smooth.deltas.size() >= 4, "problem.deltas", "needs at least 4 values");
    check_positive_list(rd, c.smooth.deltas, "problem.deltas");
    rd.range(c.smooth.kernel_a > 0.0, "problem.kernel_a", "must be positive");
  } else if (mode == "kam-run") {
    const json* pr = rd.section(doc, "", "problem", {"radius", "terms", "check_invariance"}, true);
    rd.get(pr, "problem", "radius", c.kam.radius);
    rd.get(pr, "problem", "check_invariance", c.kam.check_invariance);
    rd.range(c.kam.radius > 0.0, "problem.radius", "must be positive");
    if (pr != nullptr && !pr->contains("terms")) rd.add(ErrorKind::missing_field, "problem.terms", "value is required");
    c.kam.terms = read_terms(rd, pr, "problem", "terms", true, true, m);
    for (std::size_t i = 0; i < c.kam.terms.size(); ++i) {
      const auto& t = c.kam.terms[i];
      const std::string tp = "problem.terms[" + std::to_string(i) + "]";
      int ka = 0;
      for (int v : t.k) ka = std::max(ka, std::abs(v));
      rd.range(ka <= c.truncation.k_max, tp + ".k", "outside truncation.k_max");
      rd.range(std::abs(t.l) <= c.truncation.l_max, tp + ".l", "outside truncation.l_max");
      rd.range(static_cast<int>(t.y.size()) <= c.truncation.d_y + 1, tp + ".y", "degree exceeds truncation.d_y");
    }
  } else if (mode == "twist-sim") {
    const json* pr = rd.section(doc, "", "problem", {"map", "orbits"}, true);
    const json* mp = pr ? rd.section(*pr, "problem", "map", {"family", "gamma", "delta", "radius", "twist", "kick", "u0", "v0"}, true) : nullptr;
    auto& M = c.map;
    rd.get(mp, "problem.map", "family", M.family);
    rd.get(mp, "problem.map", "gamma", M.gamma, true);
    rd.get(mp, "problem.map", "delta", M.delta);
    rd.get(mp, "problem.map", "radius", M.radius);
    rd.get(mp, "problem.map", "twist", M.twist);
    M.kick = read_terms(rd, mp, "problem.map", "kick", false, false, m);
    M.u0 = read_terms(rd, mp, "problem.map", "u0", false, false, m);
    M.v0 = read_terms(rd, mp, "problem.map", "v0", false, false, m);
    rd.range(M.family == "M" || M.family == "M1" || M.family == "M2" || M.family == "M_delta", "problem.map.family",
             "must be M, M1, M2 or M_delta");
    rd.range(M.delta >= 0.0 && M.delta <= 1.0, "problem.map.delta", "must lie in [0, 1]");
    rd.range(M.family != "M" || M.delta == 1.0, "problem.map.delta", "family M has delta = 1");
    rd.range(M.radius > 0.0, "problem.map.radius", "must be positive");
    rd.range(M.family != "M2" || !M.twist.empty(), "problem.map.twist", "family M2 needs a twist polynomial");
    rd.range(M.family == "M2" || M.twist.empty(), "problem.map.twist", "only family M2 takes a twist polynomial");
    rd.range(M.family == "M_delta" || (M.u0.empty() && M.v0.empty()), "problem.map.u0", "u0, v0 belong to M_delta");

    const json* ob = pr ? rd.section(*pr, "problem", "orbits", {"x0", "y0", "iterations", "perturbation"}, true) : nullptr;
    rd.get(ob, "problem.orbits", "x0", c.orbits.x0);
    rd.get(ob, "problem.orbits", "y0", c.orbits.y0, true);
    rd.get(ob, "problem.orbits", "iterations", c.orbits.iterations);
    rd.get(ob, "problem.orbits", "perturbation", c.orbits.perturbation);
    rd.range(!c.orbits.y0.empty(), "problem.orbits.y0", "needs at least one orbit");
    for (double y : c.orbits.y0) rd.range(std::abs(y) <= M.radius, "problem.orbits.y0", "entries must lie in [-radius, radius]");
    rd.range(c.orbits.iterations >= 1 && c.orbits.iterations <= 100000000, "problem.orbits.iterations", "must lie in [1, 1e8]");
    rd.range(c.orbits.perturbation >= 0.0, "problem.orbits.perturbation", "must be >= 0");
  } else if (mode == "appl-run") {
    const json* pr = rd.section(doc, "", "problem", {"oscillator", "orbits", "chain"}, true);
    const json* os = pr ? rd.section(*pr, "problem", "oscillator", {"phi", "f_damp", "g_nl", "forcing", "r_ceiling", "tolerance"}, true) : nullptr;
    auto& O = c.oscillator;
    O.phi = read_function(rd, os, "problem.oscillator", "phi");
    O.f_damp = read_function(rd, os, "problem.oscillator", "f_damp");
    O.g_nl = read_function(rd, os, "problem.oscillator", "g_nl");
    rd.range(O.f_damp.name != "arctan" && O.f_damp.name != "tanh", "problem.oscillator.f_damp.name", "f_damp must be even");
    O.forcing = read_terms(rd, os, "problem.oscillator", "forcing", false, false, m);
    rd.range(O.forcing.empty() || m > 0, "frequency.mu", "forcing terms need frequencies");
    rd.get(os, "problem.oscillator", "r_ceiling", O.r_ceiling);
    rd.get(os, "problem.oscillator", "tolerance", O.tolerance);
    rd.range(O.r_ceiling > 0.0, "problem.oscillator.r_ceiling", "must be positive");
    rd.range(O.tolerance > 0.0 && O.tolerance <= 1e-6, "problem.oscillator.tolerance", "must lie in (0, 1e-6]");

    const json* ob = pr ? rd.section(*pr, "problem", "orbits", {"amplitudes", "periods", "reversal_periods"}, true) : nullptr;
    c.orbits.iterations = 1000;
    rd.get(ob, "problem.orbits", "amplitudes", c.orbits.y0, true);
    rd.get(ob, "problem.orbits", "periods", c.orbits.iterations);
    rd.get(ob, "problem.orbits", "reversal_periods", c.orbits.reversal_periods);
    rd.range(!c.orbits.y0.empty(), "problem.orbits.amplitudes", "needs at least one orbit");
    check_positive_list(rd, c.orbits.y0, "problem.orbits.amplitudes");
    rd.range(c.orbits.iterations >= 1 && c.orbits.iterations <= 10000000, "problem.orbits.periods", "must lie in [1, 1e7]");
    rd.range(c.orbits.reversal_periods >= 0, "problem.orbits.reversal_periods", "must be >= 0");

    const json* ch = pr ? rd.section(*pr, "problem", "chain", {"lambdas"}) : nullptr;
    rd.get(ch, "problem.chain", "lambdas", O.chain_lambdas);
    rd.range(O.chain_lambdas.empty() || O.chain_lambdas.size() >= 3, "problem.chain.lambdas", "needs at least 3 values");
    check_positive_list(rd, O.chain_lambdas, "problem.chain.lambdas");
  }

  if (!rd.issues.empty()) throw ConfigError(rd.issues);
  return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({{ErrorKind::missing_field, "config", "cannot open '" + path + "'"}});
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const std::exception& e) {
    throw ConfigError({{ErrorKind::range_violation, "config", std::string("malformed document: ") + e.what()}});
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["mode"] = c.mode;
  const std::string& mode = c.mode;
  if (mode == "dioph" || mode == "kam-run") {
    j["frequency"] = {{"omega", c.frequency.omega}, {"gamma", c.frequency.gamma}};
  } else if (mode == "twist-sim") {
    j["frequency"] = {{"omega", c.frequency.omega}};
  } else if (mode == "appl-run") {
    j["frequency"] = {{"mu", c.frequency.mu}, {"omega0", c.frequency.omega0}};
  }
  if (mode == "kam-run") {
    j["truncation"] = {{"k_max", c.truncation.k_max}, {"l_max", c.truncation.l_max}, {"d_y", c.truncation.d_y}};
    j["schedule"] = {{"epsilon", c.schedule.epsilon},
                     {"mu", c.schedule.mu},
                     {"n_max", c.schedule.n_max},
                     {"sigma", c.schedule.sigma.value_or(0.0)},
                     {"target", c.schedule.target}};
  }
  if (mode == "dioph" || mode == "kam-run" || mode == "appl-run") {
    j["certificate"] = {{"sigma", c.certificate.sigma}, {"k_max", c.certificate.k_max}};
  }
  if (mode == "smooth-demo") {
    j["problem"] = {{"p", c.smooth.p}, {"deltas", c.smooth.deltas}, {"kernel_a", c.smooth.kernel_a}};
  } else if (mode == "kam-run") {
    j["problem"] = {{"radius", c.kam.radius}, {"terms", terms_json(c.kam.terms, true)},
                    {"check_invariance", c.kam.check_invariance}};
  } else if (mode == "twist-sim") {
    const auto& M = c.map;
    j["problem"] = {{"map",
                     {{"family", M.family},
                      {"gamma", M.gamma},
                      {"delta", M.delta},
                      {"radius", M.radius},
                      {"twist", M.twist},
                      {"kick", terms_json(M.kick, false)},
                      {"u0", terms_json(M.u0, false)},
                      {"v0", terms_json(M.v0, false)}}},
                    {"orbits",
                     {{"x0", c.orbits.x0},
                      {"y0", c.orbits.y0},
                      {"iterations", c.orbits.iterations},
                      {"perturbation", c.orbits.perturbation}}}};
  } else if (mode == "appl-run") {
    const auto& O = c.oscillator;
    j["problem"] = {{"oscillator",
                     {{"phi", function_json(O.phi)},
                      {"f_damp", function_json(O.f_damp)},
                      {"g_nl", function_json(O.g_nl)},
                      {"forcing", terms_json(O.forcing, false)},
                      {"r_ceiling", O.r_ceiling},
                      {"tolerance", O.tolerance}}},
                    {"orbits",
                     {{"amplitudes", c.orbits.y0},
                      {"periods", c.orbits.iterations},
                      {"reversal_periods", c.orbits.reversal_periods}}},
                    {"chain", {{"lambdas", O.chain_lambdas}}}};
  }
  j["output"] = {{"directory", c.output.directory}, {"csv", c.output.csv}, {"json", c.output.json}, {"plot", c.output.plot}};
  return j;
}

}  // namespace kamlab::cli
