#pragma once

#include <json.hpp>

#include "volmoe/config.hpp"

namespace volmoe::detail {

nlohmann::ordered_json config_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& root);

} // namespace volmoe::detail
