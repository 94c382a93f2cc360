#pragma once

#include <json.hpp>

#include "trendlex/verdicts.hpp"

namespace trendlex {

nlohmann::json verdict_to_json(const HumanVerdict& v);
HumanVerdict verdict_from_json(const nlohmann::json& j);

}  // namespace trendlex
