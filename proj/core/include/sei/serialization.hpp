#pragma once

// JSON forms of the configuration types. Parsers reject unknown keys and
// missing keys fall back to the struct defaults.

#include <nlohmann/json.hpp>

#include "sei/network.hpp"
#include "sei/operators.hpp"
#include "sei/train.hpp"

namespace sei {

using Json = nlohmann::json;

Json to_json(const ForwardModel& model);
ForwardModel forward_model_from_json(const Json& j);

Json to_json(const NetworkConfig& cfg);
NetworkConfig network_config_from_json(const Json& j);

Json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const Json& j);

/// Throws ValidationError naming the first key of `j` not in `allowed`.
void require_known_keys(const Json& j, std::initializer_list<const char*> allowed,
                        const std::string& context);

}  // namespace sei
