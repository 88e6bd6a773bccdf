#include "kamlab/qpjson.hpp"

#include "kamlab/error.hpp"

namespace kamlab {

nlohmann::json series_to_json(const QPSeries& f) {
  nlohmann::json j;
  j["omega"] = f.freq().omega;
  j["gamma"] = f.freq().gamma;
  j["K_max"] = f.trunc().k_max;
  j["L_max"] = f.trunc().l_max;
  j["D_y"] = f.trunc().d_y;
  j["r"] = f.radius();
  j["parity"] = to_string(f.parity());
  auto terms = nlohmann::json::array();
  const ModeLayout& lay = f.layout();
  for (std::size_t q = 0; q < lay.n_modes(); ++q) {
    const auto slice = f.mode(q);
    bool nz = false;
    for (const auto& v : slice) nz = nz || v != cplx{0.0};
    if (!nz) continue;
    auto cheb = nlohmann::json::array();
    for (const auto& v : slice) cheb.push_back({v.real(), v.imag()});
    terms.push_back({{"k", lay.k_of(lay.kidx_of_mode(q))}, {"l", lay.l_of(q)}, {"cheb", cheb}});
  }
  j["terms"] = terms;
  return j;
}

QPSeries series_from_json(const nlohmann::json& j) {
  try {
    FrequencyData freq{j.at("omega").get<std::vector<double>>(), j.at("gamma").get<double>()};
    freq.validate();
    Truncation tr{j.at("K_max").get<int>(), j.at("L_max").get<int>(), j.at("D_y").get<int>()};
    QPSeries f(freq, tr, j.at("r").get<double>(), parity_from_string(j.at("parity").get<std::string>()));
    for (const auto& term : j.at("terms")) {
      const auto k = term.at("k").get<std::vector<int>>();
      if (static_cast<int>(k.size()) != freq.m()) throw Error(ErrorKind::invalid_argument, "term index length != m");
      auto slice = f.mode(k, term.at("l").get<int>());
      const auto& cheb = term.at("cheb");
      if (cheb.size() > slice.size()) throw Error(ErrorKind::invalid_argument, "term degree exceeds D_y");
      for (std::size_t c = 0; c < cheb.size(); ++c) slice[c] = {cheb[c].at(0).get<double>(), cheb[c].at(1).get<double>()};
    }
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_argument, std::string("malformed series document: ") + e.what());
  }
}

}  // namespace kamlab
