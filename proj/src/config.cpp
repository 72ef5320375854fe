#include "semitcl/config.hpp"

#include <fstream>

#include "semitcl/errors.hpp"

namespace semitcl {

using nlohmann::json;

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw BadConfig(std::string("config parse error: ") + e.what());
  }
  return j;
}

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  try {
    return j.value(key, fallback);
  } catch (const json::exception& e) {
    throw BadConfig(std::string("bad config value for '") + key + "': " + e.what());
  }
}

}  // namespace

SimConfig sim_config_from_json(const json& j) {
  SimConfig c;
  c.name = get_or(j, "name", c.name);
  c.num_objects = get_or(j, "num_objects", c.num_objects);
  c.frames = get_or(j, "frames", c.frames);
  c.image_width = get_or(j, "image_width", c.image_width);
  c.image_height = get_or(j, "image_height", c.image_height);
  c.appearance_dim = get_or(j, "appearance_dim", c.appearance_dim);
  c.appearance_noise_sigma = get_or(j, "appearance_noise_sigma", c.appearance_noise_sigma);
  c.nuisance_noise_sigma = get_or(j, "nuisance_noise_sigma", c.nuisance_noise_sigma);
  c.speed_min = get_or(j, "speed_min", c.speed_min);
  c.speed_max = get_or(j, "speed_max", c.speed_max);
  c.direction_change_prob = get_or(j, "direction_change_prob", c.direction_change_prob);
  c.occlusion_prob = get_or(j, "occlusion_prob", c.occlusion_prob);
  c.occlusion_max_duration = get_or(j, "occlusion_max_duration", c.occlusion_max_duration);
  c.miss_rate = get_or(j, "miss_rate", c.miss_rate);
  c.false_positive_rate = get_or(j, "false_positive_rate", c.false_positive_rate);
  c.box_jitter_sigma = get_or(j, "box_jitter_sigma", c.box_jitter_sigma);
  c.box_width_min = get_or(j, "box_width_min", c.box_width_min);
  c.box_width_max = get_or(j, "box_width_max", c.box_width_max);
  c.box_height_min = get_or(j, "box_height_min", c.box_height_min);
  c.box_height_max = get_or(j, "box_height_max", c.box_height_max);
  c.seed = get_or(j, "seed", c.seed);
  return c;
}

json sim_config_to_json(const SimConfig& c) {
  return json{{"name", c.name},
              {"num_objects", c.num_objects},
              {"frames", c.frames},
              {"image_width", c.image_width},
              {"image_height", c.image_height},
              {"appearance_dim", c.appearance_dim},
              {"appearance_noise_sigma", c.appearance_noise_sigma},
              {"nuisance_noise_sigma", c.nuisance_noise_sigma},
              {"speed_min", c.speed_min},
              {"speed_max", c.speed_max},
              {"direction_change_prob", c.direction_change_prob},
              {"occlusion_prob", c.occlusion_prob},
              {"occlusion_max_duration", c.occlusion_max_duration},
              {"miss_rate", c.miss_rate},
              {"false_positive_rate", c.false_positive_rate},
              {"box_jitter_sigma", c.box_jitter_sigma},
              {"box_width_min", c.box_width_min},
              {"box_width_max", c.box_width_max},
              {"box_height_min", c.box_height_min},
              {"box_height_max", c.box_height_max},
              {"seed", c.seed}};
}

PrimitiveConfig primitive_config_from_json(const json& j) {
  PrimitiveConfig c;
  c.detection_threshold = get_or(j, "detection_threshold", c.detection_threshold);
  c.iou_gate = get_or(j, "iou_gate", c.iou_gate);
  c.max_age = get_or(j, "max_age", c.max_age);
  c.min_track_len = get_or(j, "min_track_len", c.min_track_len);
  if (c.detection_threshold < 0.0 || c.detection_threshold > 1.0)
    throw BadConfig("detection_threshold must lie in [0, 1]");
  if (c.iou_gate <= 0.0 || c.iou_gate > 1.0) throw BadConfig("iou_gate must lie in (0, 1]");
  return c;
}

json primitive_config_to_json(const PrimitiveConfig& c) {
  return json{{"detection_threshold", c.detection_threshold},
              {"iou_gate", c.iou_gate},
              {"max_age", c.max_age},
              {"min_track_len", c.min_track_len}};
}

TrackerConfig tracker_config_from_json(const json& j) {
  TrackerConfig c;
  c.appearance_gate = get_or(j, "appearance_gate", c.appearance_gate);
  c.iou_gate = get_or(j, "iou_gate", c.iou_gate);
  c.max_age = get_or(j, "max_age", c.max_age);
  c.birth_confidence = get_or(j, "birth_confidence", c.birth_confidence);
  c.appearance_weight = get_or(j, "appearance_weight", c.appearance_weight);
  c.ema_enabled = get_or(j, "ema_enabled", c.ema_enabled);
  c.ema_alpha = get_or(j, "ema_alpha", c.ema_alpha);
  if (c.appearance_weight < 0.0 || c.appearance_weight > 1.0)
    throw BadConfig("appearance_weight must lie in [0, 1]");
  if (c.appearance_gate < 0.0 || c.appearance_gate > 2.0)
    throw BadConfig("appearance_gate must lie in [0, 2]");
  return c;
}

json tracker_config_to_json(const TrackerConfig& c) {
  return json{{"appearance_gate", c.appearance_gate},
              {"iou_gate", c.iou_gate},
              {"max_age", c.max_age},
              {"birth_confidence", c.birth_confidence},
              {"appearance_weight", c.appearance_weight},
              {"ema_enabled", c.ema_enabled},
              {"ema_alpha", c.ema_alpha}};
}

SamplerConfig sampler_config_from_json(const json& j) {
  SamplerConfig c;
  c.segment_length = get_or(j, "segment_length", c.segment_length);
  c.segments_labeled = get_or(j, "segments_labeled", c.segments_labeled);
  c.segments_unlabeled = get_or(j, "segments_unlabeled", c.segments_unlabeled);
  c.subtracks_per_track = get_or(j, "subtracks_per_track", c.subtracks_per_track);
  c.subtrack_len_min = get_or(j, "subtrack_len_min", c.subtrack_len_min);
  c.subtrack_len_max = get_or(j, "subtrack_len_max", c.subtrack_len_max);
  c.seed = get_or(j, "seed", c.seed);
  c.anchor_target = get_or(j, "anchor_target", c.anchor_target);
  c.max_growth_rounds = get_or(j, "max_growth_rounds", c.max_growth_rounds);
  if (c.segment_length < 1) throw BadConfig("segment_length must be >= 1");
  if (c.subtracks_per_track < 1) throw BadConfig("subtracks_per_track must be >= 1");
  if (c.subtrack_len_min < 1 || c.subtrack_len_max < c.subtrack_len_min)
    throw BadConfig("sub-track length range must satisfy 1 <= min <= max");
  return c;
}

json sampler_config_to_json(const SamplerConfig& c) {
  return json{{"segment_length", c.segment_length},
              {"segments_labeled", c.segments_labeled},
              {"segments_unlabeled", c.segments_unlabeled},
              {"subtracks_per_track", c.subtracks_per_track},
              {"subtrack_len_min", c.subtrack_len_min},
              {"subtrack_len_max", c.subtrack_len_max},
              {"seed", c.seed},
              {"anchor_target", c.anchor_target},
              {"max_growth_rounds", c.max_growth_rounds}};
}

LossConfig loss_config_from_json(const json& j) {
  LossConfig c;
  c.temperature = get_or(j, "temperature", c.temperature);
  c.margin = get_or(j, "margin", c.margin);
  c.num_classes = get_or(j, "num_classes", c.num_classes);
  c.literal_ratio_form = get_or(j, "literal_ratio_form", c.literal_ratio_form);
  if (c.temperature <= 0.0) throw BadConfig("temperature must be > 0");
  if (c.margin <= 0.0) throw BadConfig("margin must be > 0");
  return c;
}

json loss_config_to_json(const LossConfig& c) {
  return json{{"temperature", c.temperature},
              {"margin", c.margin},
              {"num_classes", c.num_classes},
              {"literal_ratio_form", c.literal_ratio_form}};
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  c.loss = get_or(j, "loss", c.loss);
  c.epochs = get_or(j, "epochs", c.epochs);
  c.steps_per_epoch = get_or(j, "steps_per_epoch", c.steps_per_epoch);
  c.batch_anchor_target = get_or(j, "batch_anchor_target", c.batch_anchor_target);
  c.lr_initial = get_or(j, "lr_initial", c.lr_initial);
  c.lr_final = get_or(j, "lr_final", c.lr_final);
  c.lr_drop_epoch = get_or(j, "lr_drop_epoch", c.lr_drop_epoch);
  c.momentum = get_or(j, "momentum", c.momentum);
  c.seed = get_or(j, "seed", c.seed);
  c.input_dim = get_or(j, "input_dim", c.input_dim);
  c.hidden_dim = get_or(j, "hidden_dim", c.hidden_dim);
  c.embed_dim = get_or(j, "embed_dim", c.embed_dim);
  if (j.contains("sampler")) c.sampler = sampler_config_from_json(j.at("sampler"));
  if (j.contains("loss_cfg")) c.loss_cfg = loss_config_from_json(j.at("loss_cfg"));
  return c;
}

json train_config_to_json_obj(const TrainConfig& c) {
  return json{{"loss", c.loss},
              {"epochs", c.epochs},
              {"steps_per_epoch", c.steps_per_epoch},
              {"batch_anchor_target", c.batch_anchor_target},
              {"lr_initial", c.lr_initial},
              {"lr_final", c.lr_final},
              {"lr_drop_epoch", c.lr_drop_epoch},
              {"momentum", c.momentum},
              {"seed", c.seed},
              {"input_dim", c.input_dim},
              {"hidden_dim", c.hidden_dim},
              {"embed_dim", c.embed_dim},
              {"sampler", sampler_config_to_json(c.sampler)},
              {"loss_cfg", loss_config_to_json(c.loss_cfg)}};
}

DatasetSpec dataset_spec_from_json(const json& j) {
  DatasetSpec spec;
  spec.labeled = get_or(j, "labeled", spec.labeled);
  spec.unlabeled_pool = get_or(j, "unlabeled_pool", spec.unlabeled_pool);
  spec.mined = get_or(j, "mined", spec.mined);
  spec.mining_k = get_or(j, "mining_k", spec.mining_k);
  for (const auto& m : spec.mined) {
    bool in_pool = spec.unlabeled_pool.empty();
    for (const auto& u : spec.unlabeled_pool) {
      if (u == m) {
        in_pool = true;
        break;
      }
    }
    if (!in_pool) throw BadConfig("mined sequence not in unlabeled pool: " + m);
  }
  return spec;
}

json dataset_spec_to_json(const DatasetSpec& spec) {
  return json{{"labeled", spec.labeled},
              {"unlabeled_pool", spec.unlabeled_pool},
              {"mined", spec.mined},
              {"mining_k", spec.mining_k}};
}

}  // namespace semitcl
