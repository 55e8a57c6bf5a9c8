#pragma once

// JSON forms of the exchanged artifacts. Big integers travel as decimal
// strings.

#include <json.hpp>

#include "tauer/certificates.hpp"

namespace tauer {

nlohmann::json to_json(const PrimeTower& tower);
PrimeTower tower_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TowerRational& t);
TowerRational rational_from_json(const PrimeTower& tower, const nlohmann::json& j);

/// {p, count, bases: [[[re, im], ...] per masa, column-major]}.
nlohmann::json to_json(const OrthoFamily& family);

nlohmann::json to_json(const GapEstimate& gap);
nlohmann::json to_json(const Certificate& cert);
nlohmann::json to_json(const ContinuityReport& report);

}  // namespace tauer
