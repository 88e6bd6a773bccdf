#pragma once

#include "json.hpp"

#include "kamlab/qpcore.hpp"

namespace kamlab {

/// {omega, gamma, K_max, L_max, D_y, r, terms: [{k, l, cheb: [[re, im], ...]}], parity}.
/// Only nonzero modes are listed.
nlohmann::json series_to_json(const QPSeries& f);
QPSeries series_from_json(const nlohmann::json& j);

}  // namespace kamlab
