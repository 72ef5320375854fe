#include <doctest.h>

#include "semitcl/errors.hpp"
#include "semitcl/experiments.hpp"
#include "semitcl/pseudo_label.hpp"
#include "semitcl/simgen.hpp"
#include "semitcl/training.hpp"
#include "test_support.hpp"

using namespace semitcl;

namespace {

std::vector<SequenceTracks> small_labeled(int objects = 5, int frames = 64,
                                          std::uint64_t seed = 61) {
  SimConfig cfg;
  cfg.name = "train_seq";
  cfg.num_objects = objects;
  cfg.frames = frames;
  cfg.appearance_dim = 16;
  cfg.appearance_noise_sigma = 0.1;
  cfg.nuisance_noise_sigma = 0.4;
  cfg.seed = seed;
  Scenario s = generate_scenario(cfg);
  return {SequenceTracks{s.name, s.frames, std::move(s.gt_tracks)}};
}

TrainConfig quick_config(const std::string& loss, std::uint64_t seed = 1) {
  TrainConfig cfg;
  cfg.loss = loss;
  cfg.epochs = 1;
  cfg.steps_per_epoch = 25;
  cfg.batch_anchor_target = 64;
  cfg.seed = seed;
  cfg.sampler.segments_labeled = 1;
  cfg.sampler.segments_unlabeled = 0;
  cfg.sampler.segment_length = 16;
  return cfg;
}

}  // namespace

TEST_CASE("invalid train configs are rejected") {
  const auto labeled = small_labeled();
  TrainConfig cfg = quick_config("tcl");
  cfg.epochs = 0;
  CHECK_THROWS_AS(train(labeled, {}, cfg), BadConfig);
  cfg = quick_config("nonsense");
  CHECK_THROWS_AS(train(labeled, {}, cfg), BadConfig);
  cfg = quick_config("tcl");
  cfg.lr_initial = 0.0;
  CHECK_THROWS_AS(train(labeled, {}, cfg), BadConfig);
}

TEST_CASE("tcl training reduces the loss within 50 steps on clean data") {
  auto labeled = small_labeled(5, 64, 62);
  TrainConfig cfg = quick_config("tcl", 2);
  cfg.steps_per_epoch = 50;
  const TrainResult result = train(labeled, {}, cfg);
  REQUIRE(result.loss_history.size() == 50);
  // Average of the last five steps beats the first step.
  double tail = 0.0;
  for (int k = 0; k < 5; ++k) tail += result.loss_history[49 - k];
  tail /= 5.0;
  CHECK(tail < result.loss_history.front());
}

TEST_CASE("training is deterministic given the seed") {
  auto labeled = small_labeled(4, 48, 63);
  const TrainConfig cfg = quick_config("tcl", 3);
  const TrainResult a = train(labeled, {}, cfg);
  const TrainResult b = train(labeled, {}, cfg);
  REQUIRE(a.loss_history.size() == b.loss_history.size());
  for (std::size_t i = 0; i < a.loss_history.size(); ++i)
    CHECK(a.loss_history[i] == b.loss_history[i]);
  CHECK((a.checkpoint.encoder.w1 - b.checkpoint.encoder.w1).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.checkpoint.encoder.w2 - b.checkpoint.encoder.w2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.checkpoint.rng_state == b.checkpoint.rng_state);
}

TEST_CASE("tcl with singleton sub-tracks matches scl step for step") {
  auto labeled = small_labeled(5, 64, 64);
  TrainConfig tcl_cfg = quick_config("tcl", 4);
  tcl_cfg.sampler.subtrack_len_min = 1;
  tcl_cfg.sampler.subtrack_len_max = 1;
  TrainConfig scl_cfg = tcl_cfg;
  scl_cfg.loss = "scl";
  const TrainResult a = train(labeled, {}, tcl_cfg);
  const TrainResult b = train(labeled, {}, scl_cfg);
  REQUIRE(a.loss_history.size() == b.loss_history.size());
  for (std::size_t i = 0; i < a.loss_history.size(); ++i)
    CHECK(std::abs(a.loss_history[i] - b.loss_history[i]) <= 1e-12);
}

TEST_CASE("every loss mode trains without diverging") {
  for (const std::string loss : {"tcl", "scl", "ce", "margin"}) {
    auto labeled = small_labeled(4, 48, 65);
    const TrainResult result = train(labeled, {}, quick_config(loss, 5));
    for (double v : result.loss_history) CHECK(std::isfinite(v));
  }
}

TEST_CASE("semi-supervised training consumes pseudo-labeled sequences") {
  auto labeled = small_labeled(3, 48, 66);
  SimConfig ucfg;
  ucfg.name = "unlabeled_seq";
  ucfg.num_objects = 6;
  ucfg.frames = 64;
  ucfg.appearance_noise_sigma = 0.1;
  ucfg.nuisance_noise_sigma = 0.4;
  ucfg.seed = 67;
  const Scenario us = generate_scenario(ucfg);
  std::vector<SequenceTracks> unlabeled = {
      SequenceTracks{us.name, us.frames, pseudo_label(us.detections, PrimitiveConfig{})}};

  TrainConfig cfg = quick_config("tcl", 6);
  cfg.sampler.segments_unlabeled = 1;
  const TrainResult result = train(labeled, unlabeled, cfg);
  CHECK(result.loss_history.size() == 25);
  CHECK(std::isfinite(result.checkpoint.running_loss));
}

TEST_CASE("a trained encoder tracks a noiseless scenario perfectly") {
  // End-to-end: training must at least not break exact-appearance matching.
  auto labeled = small_labeled(4, 48, 68);
  TrainConfig cfg = quick_config("tcl", 7);
  const TrainResult result = train(labeled, {}, cfg);

  SimConfig eval_cfg;
  eval_cfg.name = "noiseless_eval";
  eval_cfg.num_objects = 4;
  eval_cfg.frames = 60;
  eval_cfg.speed_min = 1.0;
  eval_cfg.speed_max = 3.0;
  eval_cfg.seed = 11;  // crossing-free seed, verified in the simgen suite
  const Scenario s = generate_scenario(eval_cfg);
  const MetricsReport rep =
      track_and_evaluate(result.checkpoint.encoder, s, TrackerConfig{});
  CHECK(rep.idf1 == doctest::Approx(1.0));
  CHECK(rep.mota == doctest::Approx(1.0));
}
