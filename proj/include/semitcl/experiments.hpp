#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semitcl/metrics.hpp"
#include "semitcl/online_tracker.hpp"
#include "semitcl/simgen.hpp"
#include "semitcl/training.hpp"

namespace semitcl {

// Runs the online tracker over a scenario's detections with the given
// encoder and scores the result against the scenario's ground truth.
MetricsReport track_and_evaluate(const Encoder& encoder, const Scenario& scenario,
                                 const TrackerConfig& cfg);

double median(std::vector<double> values);

// ---------------------------------------------------------------------------
// Standard synthetic benchmark: the fixed scenario suite that the ablation
// runners and the acceptance checks share. Training sequences and the ten
// held-out evaluation sequences use disjoint seeds, so evaluation identities
// are never seen during training.
// ---------------------------------------------------------------------------

SimConfig benchmark_scenario_base();
std::vector<SimConfig> benchmark_eval_configs();    // 10 scenarios, 20 objects
std::vector<SimConfig> benchmark_train_configs();   // 4 labeled scenarios
TrackerConfig benchmark_tracker_config();
TrainConfig benchmark_train_config(const std::string& loss, std::uint64_t seed);

struct MethodScore {
  double idf1 = 0.0;
  double mota = 0.0;
  double ids = 0.0;
};

// Trains on the benchmark's labeled scenarios with the given loss and scores
// the mean over the held-out evaluation suite.
MethodScore run_loss_method(const std::string& loss, std::uint64_t seed);
// Freshly initialized encoder, no training.
MethodScore run_random_baseline(std::uint64_t seed);

// Semi-supervised benchmark: a deliberately small labeled set plus pseudo-
// labeled unlabeled scenarios. `unlabeled_volume` counts unlabeled scenarios
// added (0 trains on labeled data alone).
MethodScore run_semi_method(const std::string& loss, int unlabeled_volume,
                            std::uint64_t seed);

// Mining comparison: unlabeled pool with mixed tracklet densities, selecting
// k scenarios either by tracklet-density mining or uniformly at random.
MethodScore run_mining_method(bool mined, int k, std::uint64_t seed);

// Batch-size comparison on small scenarios where the anchor target binds.
MethodScore run_batch_size_method(int anchor_target, std::uint64_t seed);

struct AblationRow {
  std::string label;
  double idf1 = 0.0;
  double mota = 0.0;
  double ids = 0.0;
};

struct AblationResult {
  std::string name;
  std::vector<AblationRow> rows;
  std::string table;
};

// Named ablations: loss-comparison, batch-size, unlabeled-volume,
// mining-vs-random, ce-vs-tcl-semi. Throws UnknownAblation otherwise.
AblationResult run_ablation(const std::string& name, std::uint64_t base_seed = 1);

}  // namespace semitcl
