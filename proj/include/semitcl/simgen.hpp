#pragma once

#include <cstdint>
#include <string>

#include "semitcl/sampling.hpp"
#include "semitcl/types.hpp"

namespace semitcl {

struct SimConfig {
  std::string name = "sim";
  int num_objects = 10;
  int frames = 100;
  int image_width = 1280;
  int image_height = 720;

  int appearance_dim = 16;
  // Per-dimension gaussian noise added to the latent half of the feature.
  double appearance_noise_sigma = 0.1;
  // Per-dimension noise on the inert half of the feature; these dimensions
  // carry no identity signal, so suppressing them is what an encoder can
  // learn. Defaults to appearance_noise_sigma when negative.
  double nuisance_noise_sigma = -1.0;

  double speed_min = 2.0;
  double speed_max = 8.0;
  double direction_change_prob = 0.05;

  double occlusion_prob = 0.0;
  int occlusion_max_duration = 8;

  double miss_rate = 0.0;
  double false_positive_rate = 0.0;  // expected count per frame
  double box_jitter_sigma = 0.0;

  double box_width_min = 30.0;
  double box_width_max = 60.0;
  double box_height_min = 60.0;
  double box_height_max = 120.0;

  std::uint64_t seed = 0;
};

// Synthetic ground truth plus noisy detections. Each object carries a latent
// unit appearance vector on the first half of the feature dimensions and a
// bouncing constant-velocity trajectory with occasional direction changes.
// Per frame, visible objects emit a detection with probability 1 - miss_rate,
// box jittered and feature = normalize(latent + noise). False positives get
// fresh random latents. Deterministic given the seed.
Scenario generate_scenario(const SimConfig& cfg);

VideoStats scenario_statistics(const Scenario& scenario);

}  // namespace semitcl
