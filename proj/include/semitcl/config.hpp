#pragma once

#include <string>

#include <json.hpp>

#include "semitcl/online_tracker.hpp"
#include "semitcl/pseudo_label.hpp"
#include "semitcl/simgen.hpp"
#include "semitcl/training.hpp"

namespace semitcl {

// Readers are lenient: missing keys keep the struct defaults, bad values
// raise BadConfig.
nlohmann::json load_config_file(const std::string& path);

SimConfig sim_config_from_json(const nlohmann::json& j);
PrimitiveConfig primitive_config_from_json(const nlohmann::json& j);
TrackerConfig tracker_config_from_json(const nlohmann::json& j);
SamplerConfig sampler_config_from_json(const nlohmann::json& j);
LossConfig loss_config_from_json(const nlohmann::json& j);
TrainConfig train_config_from_json(const nlohmann::json& j);
DatasetSpec dataset_spec_from_json(const nlohmann::json& j);

nlohmann::json sim_config_to_json(const SimConfig& cfg);
nlohmann::json primitive_config_to_json(const PrimitiveConfig& cfg);
nlohmann::json tracker_config_to_json(const TrackerConfig& cfg);
nlohmann::json sampler_config_to_json(const SamplerConfig& cfg);
nlohmann::json loss_config_to_json(const LossConfig& cfg);
nlohmann::json train_config_to_json_obj(const TrainConfig& cfg);
nlohmann::json dataset_spec_to_json(const DatasetSpec& spec);

}  // namespace semitcl
