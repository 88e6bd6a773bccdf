#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

#include "kamlab/cli.hpp"
#include "kamlab/dioph.hpp"
#include "kamlab/dynlab.hpp"
#include "kamlab/kamengine.hpp"
#include "kamlab/smoothing.hpp"
#include "output.hpp"

namespace kamlab::cli {

using nlohmann::json;
using detail::Csv;
using detail::num;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Sink {
  fs::path dir;
  bool csv, json, plot;
  std::vector<std::string> files;

  void put(const std::string& name, const std::string& content) {
    detail::write_atomic(dir, name, content);
    files.push_back((dir / name).string());
  }
  void csv_file(const std::string& name, const Csv& c) {
    if (csv) put(name, c.str());
  }
  void plot_file(const std::string& name, const detail::PlotSpec& p) {
    if (plot) put(name, detail::svg_plot(p));
  }
};

/// fn(i) for i in [0, n) on up to `threads` workers; the first failure by index is rethrown.
template <class F>
void parallel_for(int n, int threads, F fn) {
  std::vector<std::exception_ptr> err(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        err[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  const int t = std::clamp(threads, 1, std::max(1, n));
  if (t == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < t; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : err) {
    if (e) std::rethrow_exception(e);
  }
}

int k_extent(const std::vector<TermSpec>& terms) {
  int K = 1;
  for (const auto& t : terms) {
    for (int v : t.k) K = std::max(K, std::abs(v));
  }
  return K;
}

QPSeries x_only(const FrequencyData& fr, int K, double radius, Parity parity, const std::vector<TermSpec>& terms,
                bool sine) {
  QPSeries s = QPSeries::zero(fr, {K, 0, 0}, radius, parity);
  for (const auto& t : terms) {
    if (sine) {
      s.add_sin(t.k, 0, t.amp);
    } else {
      s.add_cos(t.k, 0, t.amp);
    }
  }
  return s;
}

json orbit_json(int id, double y0, const OrbitRecord& o) {
  json j{{"orbit_id", id},
         {"y0", y0},
         {"iterations", o.iterations},
         {"y_min", o.action_min},
         {"y_max", o.action_max},
         {"escaped", o.escaped},
         {"reversibility_residual", o.reversibility_residual}};
  if (o.has_rotation) {
    j["rotation"] = o.rotation.value;
    j["err"] = o.rotation.error;
  } else {
    j["rotation"] = nullptr;
    j["err"] = nullptr;
  }
  return j;
}

const std::vector<std::string> kOrbitColumns{"orbit_id", "y0", "rotation", "err", "y_min", "y_max", "escaped"};

void orbit_row(Csv& c, int id, double y0, const OrbitRecord& o) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  c.row({std::to_string(id), num(y0), num(o.has_rotation ? o.rotation.value : nan),
         num(o.has_rotation ? o.rotation.error : nan), num(o.action_min), num(o.action_max), o.escaped ? "1" : "0"});
}

/// Section scatter (angle mod `period`, action) with at most `cap` points per orbit.
detail::PlotSpec section_plot(const std::string& title, const std::string& ylabel, const std::vector<OrbitRecord>& orbits,
                              const std::vector<double>& y0, double period, std::size_t cap = 2000) {
  detail::PlotSpec p{title, "angle", ylabel, false, false, {}};
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    detail::PlotSeries s{"", {}, {}, true};
    const auto& smp = orbits[i].samples;
    const std::size_t stride = std::max<std::size_t>(1, smp.size() / cap);
    for (std::size_t j = 0; j < smp.size(); j += stride) {
      s.x.push_back(smp[j].x - period * std::floor(smp[j].x / period));
      s.y.push_back(smp[j].y);
    }
    if (orbits.size() <= 8) s.label = "y0 = " + num(y0[i]).substr(0, 8);
    p.series.push_back(std::move(s));
  }
  return p;
}

detail::PlotSpec rotation_plot(const std::string& xlabel, const std::vector<OrbitRecord>& orbits,
                               const std::vector<double>& y0) {
  detail::PlotSpec p{"rotation number", xlabel, "rotation", false, false, {}};
  detail::PlotSeries s{"", {}, {}, false};
  std::vector<std::size_t> idx(orbits.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return y0[a] < y0[b]; });
  for (auto i : idx) {
    if (!orbits[i].has_rotation) continue;
    s.x.push_back(y0[i]);
    s.y.push_back(orbits[i].rotation.value);
  }
  s.scatter = s.x.size() < 2;
  p.series.push_back(std::move(s));
  return p;
}

json run_dioph(const ExperimentConfig& c, Sink& out) {
  const FrequencyData fr{c.frequency.omega, c.frequency.gamma};
  const auto cert = certify(fr, c.certificate.sigma, c.certificate.k_max);
  Csv csv({"k_abs", "min_divisor", "c0_running"});
  json shells = json::array();
  detail::PlotSpec plot{"smallest divisor per shell", "|k|", "divisor", true, true, {}};
  detail::PlotSeries div{"min divisor", {}, {}, false}, bound{"c0 / |k|^sigma", {}, {}, false};
  for (const auto& s : cert.shells) {
    csv.row({std::to_string(s.k_abs), num(s.min_divisor), num(s.c0_running)});
    shells.push_back({{"k_abs", s.k_abs}, {"min_divisor", s.min_divisor}, {"c0_running", s.c0_running}});
    div.x.push_back(s.k_abs);
    div.y.push_back(s.min_divisor);
    bound.x.push_back(s.k_abs);
    bound.y.push_back(cert.lower_bound(s.k_abs));
  }
  plot.series = {div, bound};
  out.csv_file("dioph.csv", csv);
  out.plot_file("dioph.svg", plot);
  json summary{{"c0", cert.c0},
               {"sigma", cert.sigma},
               {"k_checked", cert.k_checked},
               {"worst", {{"k", cert.worst.k}, {"l", cert.worst.l}}},
               {"worst_divisor", cert.worst_divisor}};
  return {{"summary", summary}, {"records", shells}};
}

json run_smooth(const ExperimentConfig& c, Sink& out) {
  const auto probe = error_decay_probe(c.smooth.p, c.smooth.deltas, KernelProfile{c.smooth.kernel_a});
  Csv csv({"delta", "sup_error"});
  json rec = json::array();
  for (std::size_t i = 0; i < probe.deltas.size(); ++i) {
    csv.row({num(probe.deltas[i]), num(probe.errors[i])});
    rec.push_back({{"delta", probe.deltas[i]}, {"sup_error", probe.errors[i]}});
  }
  out.csv_file("smooth_demo.csv", csv);
  detail::PlotSpec plot{"smoothing error", "delta", "sup |S_delta f - f|", true, true,
                        {{"measured", probe.deltas, probe.errors, false}}};
  std::vector<double> fit;
  for (double d : probe.deltas) fit.push_back(std::exp(probe.intercept) * std::pow(d, probe.slope));
  plot.series.push_back({"fit slope " + num(probe.slope).substr(0, 6), probe.deltas, fit, false});
  out.plot_file("smooth_demo.svg", plot);
  return {{"summary", {{"p", c.smooth.p}, {"slope", probe.slope}, {"intercept", probe.intercept}}}, {"records", rec}};
}

json run_kam(const ExperimentConfig& c, Sink& out) {
  const FrequencyData fr{c.frequency.omega, c.frequency.gamma};
  const Truncation tr{c.truncation.k_max, c.truncation.l_max, c.truncation.d_y};
  PerturbationPair pert{QPSeries::zero(fr, tr, c.kam.radius, Parity::even),
                        QPSeries::zero(fr, tr, c.kam.radius, Parity::odd)};
  for (const auto& t : c.kam.terms) {
    if (t.target == "f") {
      pert.f_hat.add_cos(t.k, t.l, t.amp, t.y);
    } else {
      pert.g_hat.add_sin(t.k, t.l, t.amp, t.y);
    }
  }
  const auto cert = certify(fr, c.certificate.sigma, c.certificate.k_max);
  RunConfig cfg;
  cfg.epsilon = c.schedule.epsilon;
  cfg.mu = c.schedule.mu;
  cfg.sigma = c.schedule.sigma.value_or(0.0);
  cfg.n_max = c.schedule.n_max;
  cfg.target = c.schedule.target;
  const RunResult res = run(pert, cert, cfg);

  Csv csv({"step", "s", "r", "norm_f_bar", "norm_g_bar", "norm_u", "norm_v", "parity_f", "parity_g", "min_divisor",
           "c_f", "c_g"});
  json rec = json::array();
  double parity_max = 0.0, div_min = std::numeric_limits<double>::infinity();
  detail::PlotSeries fs{"|f_n|", {}, {}, false}, gs{"|g_n|", {}, {}, false};
  for (const auto& d : res.state.history) {
    csv.row({std::to_string(d.n), num(d.s), num(d.r), num(d.norm_f_bar), num(d.norm_g_bar), num(d.norm_u),
             num(d.norm_v), num(d.parity_f), num(d.parity_g), num(d.min_divisor), num(d.c_f), num(d.c_g)});
    rec.push_back({{"step", d.n},
                   {"s", d.s},
                   {"r", d.r},
                   {"norm_f_bar", d.norm_f_bar},
                   {"norm_g_bar", d.norm_g_bar},
                   {"norm_u", d.norm_u},
                   {"norm_v", d.norm_v},
                   {"norm_u_star", d.norm_u_star},
                   {"norm_v_star", d.norm_v_star},
                   {"parity_f", d.parity_f},
                   {"parity_g", d.parity_g},
                   {"parity_u", d.parity_u},
                   {"parity_v", d.parity_v},
                   {"min_divisor", d.min_divisor},
                   {"certificate_margin", d.certificate_margin},
                   {"inversion_sweeps", d.inversion_sweeps},
                   {"compose_residual", d.compose_residual},
                   {"c_f", d.c_f},
                   {"c_g", d.c_g},
                   {"estimate_warning", d.estimate_warning}});
    parity_max = std::max({parity_max, d.parity_f, d.parity_g});
    div_min = std::min(div_min, d.min_divisor);
    fs.x.push_back(d.n), fs.y.push_back(d.norm_f_bar);
    gs.x.push_back(d.n), gs.y.push_back(d.norm_g_bar);
  }
  out.csv_file("kam_run.csv", csv);
  out.plot_file("kam_run.svg", {"norm history", "step", "norm", false, true, {fs, gs}});

  json summary{{"converged", res.converged},
               {"steps", res.state.history.size()},
               {"final_norm_f_bar", res.state.history.empty() ? 0.0 : res.state.history.back().norm_f_bar},
               {"curve_gamma", res.curve.gamma},
               {"curve_deviation", res.curve.deviation},
               {"parity_residual_max", parity_max},
               {"min_divisor", res.state.history.empty() ? 0.0 : div_min},
               {"composition_consistency", composition_consistency(res.state)},
               {"certificate", {{"c0", cert.c0}, {"sigma", cert.sigma}, {"k_checked", cert.k_checked}}},
               {"warnings", res.state.warnings}};
  if (c.kam.check_invariance) {
    if (fr.m() == 1) {
      const FlowSectionMap P(pert.f_hat, pert.g_hat, fr.gamma);
      const double T = kTwoPi / std::abs(fr.omega[0]);
      double worst = 0.0;
      for (int i = 0; i < 8; ++i) {
        const double x = kTwoPi * i / 8.0;
        const auto [ax, ay] = eval_curve(res.curve, x, 0.0);
        const Point2 img = P.advance({ax, ay}, 0.0, T);
        const auto [bx, by] = eval_curve(res.curve, x + T * res.curve.gamma, 0.0);
        worst = std::max({worst, std::abs(img.x - bx), std::abs(img.y - by)});
      }
      summary["invariance_residual"] = worst;
    } else {
      summary["invariance_residual"] = nullptr;
    }
  }
  return {{"summary", summary}, {"records", rec}};
}

json run_twist(const ExperimentConfig& c, const RunOptions& opt, Sink& out) {
  const auto& M = c.map;
  const FrequencyData fr{c.frequency.omega, 0.0};
  ReversibleMapSpec spec;
  spec.family = map_family_from_string(M.family);
  spec.gamma = M.gamma;
  spec.delta = M.delta;
  spec.radius = M.radius;
  if (!M.kick.empty()) spec.kick = x_only(fr, k_extent(M.kick), M.radius, Parity::odd, M.kick, true);
  if (!M.u0.empty()) spec.u0 = x_only(fr, k_extent(M.u0), M.radius, Parity::odd, M.u0, true);
  if (!M.v0.empty()) spec.v0 = x_only(fr, k_extent(M.v0), M.radius, Parity::even, M.v0, false);
  if (!M.twist.empty()) {
    std::vector<cplx> a(M.twist.begin(), M.twist.end());
    spec.twist = YPoly::from_monomial(a, std::max<int>(1, static_cast<int>(a.size()) - 1), M.radius);
  }
  const ReversibleMap map(spec);

  const auto& y0 = c.orbits.y0;
  const int n = static_cast<int>(y0.size());
  std::vector<OrbitRecord> orbits(y0.size());
  parallel_for(n, opt.threads, [&](int i) {
    orbits[static_cast<std::size_t>(i)] = iterate_map(map, {c.orbits.x0, y0[static_cast<std::size_t>(i)]}, c.orbits.iterations, true);
  });

  Csv csv(kOrbitColumns);
  json rec = json::array();
  int escaped = 0, detected = 0;
  for (int i = 0; i < n; ++i) {
    const auto& o = orbits[static_cast<std::size_t>(i)];
    orbit_row(csv, i, y0[static_cast<std::size_t>(i)], o);
    json j = orbit_json(i, y0[static_cast<std::size_t>(i)], o);
    if (c.orbits.perturbation > 0.0 && o.has_rotation) {
      const auto det = detect_invariant_curve(o, c.orbits.perturbation);
      j["curve_detected"] = det.detected;
      j["oscillation"] = det.oscillation;
      detected += det.detected ? 1 : 0;
    }
    escaped += o.escaped ? 1 : 0;
    rec.push_back(std::move(j));
  }
  out.csv_file("twist_sim.csv", csv);
  const double period = kTwoPi / std::abs(fr.omega[0]);
  out.plot_file("twist_section.svg", section_plot("section of " + M.family, "y", orbits, y0, period));
  out.plot_file("twist_rotation.svg", rotation_plot("y0", orbits, y0));

  json summary{{"family", M.family}, {"orbits", n}, {"escaped", escaped}, {"map_reversibility_residual", nullptr}};
  try {
    summary["map_reversibility_residual"] = map.reversibility_residual();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::orbit_escape) throw;
  }
  if (c.orbits.perturbation > 0.0) summary["curves_detected"] = detected;
  return {{"summary", summary}, {"records", rec}};
}

json run_appl(const ExperimentConfig& c, const RunOptions& opt, Sink& out) {
  const auto& O = c.oscillator;
  OscillatorSpec spec;
  spec.omega0 = c.frequency.omega0;
  spec.phi = ScalarFunction::from_name(O.phi.name, O.phi.amp, O.phi.scale);
  spec.f_damp = ScalarFunction::from_name(O.f_damp.name, O.f_damp.amp, O.f_damp.scale);
  spec.g_nl = ScalarFunction::from_name(O.g_nl.name, O.g_nl.amp, O.g_nl.scale);
  spec.r_ceiling = O.r_ceiling;
  spec.tolerance = O.tolerance;
  const bool forced = !c.frequency.mu.empty();
  const FrequencyData fr{c.frequency.mu, 1.0 / c.frequency.omega0};
  if (forced) spec.p_force = x_only(fr, k_extent(O.forcing), 1.0, Parity::even, O.forcing, false);
  spec.validate();

  const auto twist = twist_coefficient(spec);
  const auto& amp = c.orbits.y0;
  const int n = static_cast<int>(amp.size());
  std::vector<OrbitRecord> orbits(amp.size());
  parallel_for(n, opt.threads, [&](int i) {
    orbits[static_cast<std::size_t>(i)] =
        oscillator_poincare(spec, {amp[static_cast<std::size_t>(i)], 0.0}, c.orbits.iterations, c.orbits.reversal_periods);
  });

  Csv csv(kOrbitColumns);
  json rec = json::array();
  int escaped = 0;
  double ratio = 1.0, rev = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto& o = orbits[static_cast<std::size_t>(i)];
    orbit_row(csv, i, amp[static_cast<std::size_t>(i)], o);
    json j = orbit_json(i, amp[static_cast<std::size_t>(i)], o);
    j["action_ratio"] = o.action_max / o.action_min;
    rec.push_back(std::move(j));
    escaped += o.escaped ? 1 : 0;
    ratio = std::max(ratio, o.action_max / o.action_min);
    rev = std::max(rev, o.reversibility_residual);
  }
  out.csv_file("appl_run.csv", csv);
  out.plot_file("appl_section.svg", section_plot("oscillator section", "r", orbits, amp, kTwoPi));
  out.plot_file("appl_rotation.svg", rotation_plot("amplitude", orbits, amp));

  json summary{{"orbits", n},
               {"escaped", escaped},
               {"max_action_ratio", ratio},
               {"reversibility_residual_max", rev},
               {"section_period", spec.section_period()},
               {"gamma1", twist.gamma1},
               {"zero_twist", twist.zero_twist}};

  json chain = json::array();
  if (!O.chain_lambdas.empty()) {
    const DiophCertificate cert = forced ? certify(fr, c.certificate.sigma, c.certificate.k_max) : DiophCertificate{};
    const auto ch = action_angle_chain(spec, cert, O.chain_lambdas);
    Csv cc({"lambda", "j1", "j2", "lambda_j1", "s1_sup", "s2_sup", "phi_remainder", "psi_remainder"});
    for (std::size_t i = 0; i < ch.lambdas.size(); ++i) {
      const double l = ch.lambdas[i];
      cc.row({num(l), num(ch.j1[i]), num(ch.j2[i]), num(l * ch.j1[i]), num(ch.s1_sup[i]), num(ch.s2_sup[i]),
              num(ch.phi_remainder[i]), num(ch.psi_remainder[i])});
      chain.push_back({{"lambda", l},
                       {"j1", ch.j1[i]},
                       {"j2", ch.j2[i]},
                       {"lambda_j1", l * ch.j1[i]},
                       {"s1_sup", ch.s1_sup[i]},
                       {"s2_sup", ch.s2_sup[i]},
                       {"phi_remainder", ch.phi_remainder[i]},
                       {"psi_remainder", ch.psi_remainder[i]}});
    }
    out.csv_file("appl_chain.csv", cc);
    summary["chain"] = {{"j1_limit", ch.j1_limit},
                        {"j2_limit", ch.j2_limit},
                        {"slope_j1", ch.slope_j1},
                        {"slope_j2", ch.slope_j2},
                        {"slope_s1", ch.slope_s1},
                        {"slope_s2", ch.slope_s2},
                        {"slope_phi", ch.slope_phi},
                        {"slope_psi", ch.slope_psi},
                        {"amplitude_floor", ch.amplitude_floor},
                        {"s3_residual", ch.s3_residual},
                        {"s3_min_divisor", ch.s3_min_divisor}};
  }
  return {{"summary", summary}, {"records", rec}, {"chain", chain}};
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& config, const RunOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig c = config;
  if (opt.out_dir) c.output.directory = *opt.out_dir;
  if (opt.p) c.smooth.p = *opt.p;
  if (opt.deltas) c.smooth.deltas = *opt.deltas;
  c.output.csv = c.output.csv || opt.force_csv;
  c.output.json = c.output.json || opt.force_json;
  c.output.plot = c.output.plot || opt.force_plot;
  // Overrides pass through the same validation as the file.
  c = parse_config(to_json(c));

  Sink out{c.output.directory, c.output.csv, c.output.json, c.output.plot, {}};
  RunReport rep;
  json body;
  try {
    if (c.mode == "dioph") {
      body = run_dioph(c, out);
    } else if (c.mode == "smooth-demo") {
      body = run_smooth(c, out);
    } else if (c.mode == "kam-run") {
      body = run_kam(c, out);
    } else if (c.mode == "twist-sim") {
      body = run_twist(c, opt, out);
    } else if (c.mode == "appl-run") {
      body = run_appl(c, opt, out);
    } else {
      throw Error(ErrorKind::invalid_argument, "unknown mode '" + c.mode + "'");
    }
  } catch (const Error& e) {
    const json err{{"version", version()}, {"mode", c.mode}, {"kind", to_string(e.kind())}, {"message", e.what()},
                   {"config", to_json(c)}};
    detail::write_atomic(out.dir, "error.json", err.dump(2) + "\n");
    throw;
  }

  std::error_code ec;
  fs::remove(out.dir / "error.json", ec);
  rep.report = {{"version", version()}, {"mode", c.mode}, {"config", to_json(c)}};
  for (auto it = body.begin(); it != body.end(); ++it) rep.report[it.key()] = it.value();
  if (c.output.json) out.put("report.json", rep.report.dump(2) + "\n");
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.put("timing.json", json{{"wall_seconds", rep.wall_seconds}}.dump(2) + "\n");
  rep.files = out.files;
  return rep;
}

}  // namespace kamlab::cli
