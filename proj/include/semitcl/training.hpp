#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semitcl/checkpoint.hpp"
#include "semitcl/losses.hpp"
#include "semitcl/sampling.hpp"

namespace semitcl {

struct TrainConfig {
  std::string loss = "tcl";  // tcl | scl | ce | margin
  int epochs = 1;
  int steps_per_epoch = 50;
  int batch_anchor_target = 144;
  double lr_initial = 1e-3;
  double lr_final = 1e-4;
  int lr_drop_epoch = 0;  // 0 -> 80% of epochs
  double momentum = 0.9;
  std::uint64_t seed = 0;
  int input_dim = 16;
  int hidden_dim = 32;
  int embed_dim = 64;
  SamplerConfig sampler;
  LossConfig loss_cfg;
};

struct DatasetSpec {
  std::vector<std::string> labeled;         // scenario directories (V_A)
  std::vector<std::string> unlabeled_pool;  // scenario directories (V_U)
  std::vector<std::string> mined;           // subset selected for training (V_R)
  int mining_k = 0;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<double> loss_history;  // one entry per step
};

// Stochastic gradient descent with momentum over the encoder (plus a linear
// identity head when loss == "ce"). Each step builds a batch, evaluates the
// selected loss, and chains embedding gradients back through the encoder.
// Throws DivergenceDetected if the loss leaves the finite range.
TrainResult train(const std::vector<SequenceTracks>& labeled,
                  const std::vector<SequenceTracks>& unlabeled, const TrainConfig& cfg);

// Loads labeled scenarios (annotated gt tracks) and mined scenarios (pseudo
// tracks, which must already be generated) from disk, then trains.
TrainResult train(const DatasetSpec& data, const TrainConfig& cfg);

std::string train_config_to_json(const TrainConfig& cfg);

}  // namespace semitcl
