#include "semitcl/experiments.hpp"

#include <algorithm>
#include <cstdio>

#include "semitcl/errors.hpp"
#include "semitcl/mot_io.hpp"
#include "semitcl/pseudo_label.hpp"

namespace semitcl {

MetricsReport track_and_evaluate(const Encoder& encoder, const Scenario& scenario,
                                 const TrackerConfig& cfg) {
  OnlineTracker tracker(cfg);
  std::vector<MotRow> rows;
  for (int f = 0; f < scenario.frames; ++f) {
    std::vector<std::pair<Instance, UnitEmbedding>> dets;
    if (f < static_cast<int>(scenario.detections.size())) {
      for (const auto& det : scenario.detections[f]) {
        dets.emplace_back(det, encode(encoder, det.feature));
      }
    }
    for (const auto& row : tracker.step(f, dets)) {
      rows.push_back(MotRow{row.frame, row.id, row.box, row.confidence});
    }
  }
  return evaluate(scenario.gt_tracks, rows_to_tracks(rows), 0.5);
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// ---------------------------------------------------------------------------
// Benchmark definitions
// ---------------------------------------------------------------------------

SimConfig benchmark_scenario_base() {
  SimConfig cfg;
  cfg.num_objects = 20;
  cfg.frames = 100;
  cfg.image_width = 1280;
  cfg.image_height = 720;
  cfg.appearance_dim = 16;
  cfg.appearance_noise_sigma = 0.22;
  cfg.nuisance_noise_sigma = 0.55;
  cfg.speed_min = 2.0;
  cfg.speed_max = 5.0;
  cfg.direction_change_prob = 0.08;
  cfg.occlusion_prob = 0.03;
  cfg.occlusion_max_duration = 8;
  cfg.miss_rate = 0.05;
  cfg.false_positive_rate = 0.3;
  cfg.box_jitter_sigma = 1.5;
  return cfg;
}

std::vector<SimConfig> benchmark_eval_configs() {
  std::vector<SimConfig> out;
  for (int i = 0; i < 10; ++i) {
    SimConfig cfg = benchmark_scenario_base();
    cfg.name = "eval" + std::to_string(i);
    cfg.seed = 9000 + static_cast<std::uint64_t>(i);
    out.push_back(cfg);
  }
  return out;
}

std::vector<SimConfig> benchmark_train_configs() {
  std::vector<SimConfig> out;
  for (int i = 0; i < 4; ++i) {
    SimConfig cfg = benchmark_scenario_base();
    cfg.name = "train" + std::to_string(i);
    cfg.num_objects = 12;
    cfg.frames = 150;
    cfg.seed = 100 + static_cast<std::uint64_t>(i);
    out.push_back(cfg);
  }
  return out;
}

TrackerConfig benchmark_tracker_config() { return TrackerConfig{}; }

TrainConfig benchmark_train_config(const std::string& loss, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.loss = loss;
  cfg.epochs = 5;
  cfg.steps_per_epoch = 120;
  cfg.batch_anchor_target = 144;
  cfg.seed = seed;
  cfg.sampler.segments_labeled = 2;
  cfg.sampler.segments_unlabeled = 0;
  return cfg;
}

namespace {

std::vector<SequenceTracks> to_labeled_sequences(const std::vector<SimConfig>& configs) {
  std::vector<SequenceTracks> out;
  for (const auto& cfg : configs) {
    Scenario s = generate_scenario(cfg);
    out.push_back(SequenceTracks{s.name, s.frames, std::move(s.gt_tracks)});
  }
  return out;
}

SequenceTracks pseudo_labeled_sequence(const Scenario& scenario) {
  return SequenceTracks{scenario.name, scenario.frames,
                        pseudo_label(scenario.detections, PrimitiveConfig{})};
}

MethodScore score_over_eval(const Encoder& encoder) {
  const TrackerConfig tracker_cfg = benchmark_tracker_config();
  double idf1_sum = 0.0, mota_sum = 0.0, ids_sum = 0.0;
  const auto eval_cfgs = benchmark_eval_configs();
  for (const auto& cfg : eval_cfgs) {
    const Scenario s = generate_scenario(cfg);
    const MetricsReport rep = track_and_evaluate(encoder, s, tracker_cfg);
    idf1_sum += rep.idf1;
    mota_sum += rep.mota;
    ids_sum += static_cast<double>(rep.ids);
  }
  const double n = static_cast<double>(eval_cfgs.size());
  return MethodScore{idf1_sum / n, mota_sum / n, ids_sum / n};
}

// Small labeled scenario for the semi-supervised runs: too few identities to
// cover the latent sphere, so unlabeled data genuinely adds signal.
SimConfig semi_labeled_config() {
  SimConfig cfg = benchmark_scenario_base();
  cfg.name = "semi_labeled";
  cfg.num_objects = 4;
  cfg.frames = 100;
  cfg.seed = 500;
  return cfg;
}

SimConfig semi_unlabeled_config(int index, int num_objects) {
  SimConfig cfg = benchmark_scenario_base();
  cfg.name = "semi_unlabeled" + std::to_string(index);
  cfg.num_objects = num_objects;
  cfg.frames = 100;
  cfg.seed = 700 + static_cast<std::uint64_t>(index);
  return cfg;
}

}  // namespace

MethodScore run_loss_method(const std::string& loss, std::uint64_t seed) {
  const auto labeled = to_labeled_sequences(benchmark_train_configs());
  const TrainConfig cfg = benchmark_train_config(loss, seed);
  const TrainResult result = train(labeled, {}, cfg);
  return score_over_eval(result.checkpoint.encoder);
}

MethodScore run_random_baseline(std::uint64_t seed) {
  Rng rng(seed);
  const TrainConfig cfg = benchmark_train_config("tcl", seed);
  const Encoder encoder =
      Encoder::random(cfg.input_dim, cfg.hidden_dim, cfg.embed_dim, rng);
  return score_over_eval(encoder);
}

MethodScore run_semi_method(const std::string& loss, int unlabeled_volume,
                            std::uint64_t seed) {
  const std::vector<SequenceTracks> labeled = {
      [] {
        Scenario s = generate_scenario(semi_labeled_config());
        return SequenceTracks{s.name, s.frames, std::move(s.gt_tracks)};
      }()};
  std::vector<SequenceTracks> unlabeled;
  for (int i = 0; i < 2 * unlabeled_volume; ++i) {
    unlabeled.push_back(pseudo_labeled_sequence(generate_scenario(semi_unlabeled_config(i, 12))));
  }
  TrainConfig cfg = benchmark_train_config(loss, seed);
  if (!unlabeled.empty()) {
    cfg.sampler.segments_labeled = 2;
    cfg.sampler.segments_unlabeled = 2;
  }
  const TrainResult result = train(labeled, unlabeled, cfg);
  return score_over_eval(result.checkpoint.encoder);
}

MethodScore run_mining_method(bool mined, int k, std::uint64_t seed) {
  // Mixed-density unlabeled pool: half sparse, half busy scenarios.
  std::vector<Scenario> pool;
  std::vector<VideoStats> stats;
  for (int i = 0; i < 8; ++i) {
    const int objects = i % 2 == 0 ? 2 : 16;
    Scenario s = generate_scenario(semi_unlabeled_config(100 + i, objects));
    const auto tracks = pseudo_label(s.detections, PrimitiveConfig{});
    stats.push_back(VideoStats{s.name, static_cast<int>(tracks.size()), s.frames});
    pool.push_back(std::move(s));
  }

  std::vector<std::string> selected;
  if (mined) {
    selected = mine_videos(stats, k);
  } else {
    std::vector<int> indices(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) indices[i] = static_cast<int>(i);
    Rng pick_rng(seed * 7919 + 13);
    for (int i = 0; i < k; ++i) {
      const int j = static_cast<int>(
          pick_rng.uniform_int(i, static_cast<int>(indices.size()) - 1));
      std::swap(indices[i], indices[j]);
      selected.push_back(pool[indices[i]].name);
    }
  }

  const std::vector<SequenceTracks> labeled = {
      [] {
        Scenario s = generate_scenario(semi_labeled_config());
        return SequenceTracks{s.name, s.frames, std::move(s.gt_tracks)};
      }()};
  std::vector<SequenceTracks> unlabeled;
  for (const auto& name : selected) {
    for (const auto& s : pool) {
      if (s.name == name) {
        unlabeled.push_back(pseudo_labeled_sequence(s));
        break;
      }
    }
  }
  TrainConfig cfg = benchmark_train_config("tcl", seed);
  cfg.sampler.segments_labeled = 2;
  cfg.sampler.segments_unlabeled = 2;
  const TrainResult result = train(labeled, unlabeled, cfg);
  return score_over_eval(result.checkpoint.encoder);
}

MethodScore run_batch_size_method(int anchor_target, std::uint64_t seed) {
  std::vector<SimConfig> configs;
  for (int i = 0; i < 4; ++i) {
    SimConfig cfg = benchmark_scenario_base();
    cfg.name = "bsz_train" + std::to_string(i);
    cfg.num_objects = 3;
    cfg.frames = 100;
    cfg.seed = 300 + static_cast<std::uint64_t>(i);
    configs.push_back(cfg);
  }
  const auto labeled = to_labeled_sequences(configs);
  TrainConfig cfg = benchmark_train_config("tcl", seed);
  cfg.batch_anchor_target = anchor_target;
  cfg.sampler.segment_length = 8;
  const TrainResult result = train(labeled, {}, cfg);
  return score_over_eval(result.checkpoint.encoder);
}

namespace {

constexpr std::uint64_t kSeedStride = 101;

MethodScore median_score(const std::vector<MethodScore>& scores) {
  std::vector<double> idf1s, motas, idss;
  for (const auto& s : scores) {
    idf1s.push_back(s.idf1);
    motas.push_back(s.mota);
    idss.push_back(s.ids);
  }
  return MethodScore{median(idf1s), median(motas), median(idss)};
}

std::string render_table(const AblationResult& result) {
  std::string out = result.name + " (median over seeds, synthetic benchmark)\n";
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-16s %8s %8s %8s\n", "method", "IDF1", "MOTA", "IDS");
  out += buf;
  for (const auto& row : result.rows) {
    std::snprintf(buf, sizeof(buf), "%-16s %8.3f %8.3f %8.1f\n", row.label.c_str(),
                  row.idf1, row.mota, row.ids);
    out += buf;
  }
  return out;
}

template <typename RunFn>
AblationRow run_rows(const std::string& label, int seeds, std::uint64_t base_seed,
                     RunFn&& fn) {
  std::vector<MethodScore> scores;
  for (int s = 0; s < seeds; ++s)
    scores.push_back(fn(base_seed + static_cast<std::uint64_t>(s) * kSeedStride));
  const MethodScore m = median_score(scores);
  return AblationRow{label, m.idf1, m.mota, m.ids};
}

}  // namespace

AblationResult run_ablation(const std::string& name, std::uint64_t base_seed) {
  AblationResult result;
  result.name = name;
  if (name == "loss-comparison") {
    for (const std::string loss : {"ce", "scl", "tcl"}) {
      result.rows.push_back(run_rows(loss, 5, base_seed, [&](std::uint64_t s) {
        return run_loss_method(loss, s);
      }));
    }
  } else if (name == "batch-size") {
    for (int target : {144, 96, 32}) {
      result.rows.push_back(
          run_rows("tcl-b" + std::to_string(target), 3, base_seed, [&](std::uint64_t s) {
            return run_batch_size_method(target, s);
          }));
    }
  } else if (name == "unlabeled-volume") {
    const char* labels[] = {"labeled-only", "+U1", "+U2", "+U3"};
    for (int volume = 0; volume <= 3; ++volume) {
      result.rows.push_back(
          run_rows(labels[volume], 5, base_seed, [&](std::uint64_t s) {
            return run_semi_method("tcl", volume, s);
          }));
    }
  } else if (name == "mining-vs-random") {
    result.rows.push_back(run_rows("mined", 5, base_seed, [&](std::uint64_t s) {
      return run_mining_method(true, 3, s);
    }));
    result.rows.push_back(run_rows("random", 5, base_seed, [&](std::uint64_t s) {
      return run_mining_method(false, 3, s);
    }));
  } else if (name == "ce-vs-tcl-semi") {
    for (const std::string loss : {"tcl", "ce"}) {
      for (int volume = 0; volume <= 2; ++volume) {
        result.rows.push_back(run_rows(loss + "+U" + std::to_string(volume), 3, base_seed,
                                       [&](std::uint64_t s) {
                                         return run_semi_method(loss, volume, s);
                                       }));
      }
    }
  } else {
    throw UnknownAblation("unknown ablation '" + name + "'");
  }
  result.table = render_table(result);
  return result;
}

}  // namespace semitcl
