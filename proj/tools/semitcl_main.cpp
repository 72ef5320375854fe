// Command-line surface for the semitcl toolkit: scenario simulation,
// pseudo-labeling, tracklet-density mining, embedding training, online
// tracking, evaluation, and ablation runs.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "semitcl/checkpoint.hpp"
#include "semitcl/config.hpp"
#include "semitcl/errors.hpp"
#include "semitcl/experiments.hpp"
#include "semitcl/metrics.hpp"
#include "semitcl/mot_io.hpp"
#include "semitcl/pseudo_label.hpp"
#include "semitcl/simgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace semitcl;

namespace {

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
};

json section(const json& cfg, const char* name) {
  return cfg.contains(name) ? cfg.at(name) : json::object();
}

// Resolved config + seed next to the outputs, so a run can be reproduced
// from its artifacts alone.
void write_runlog(const std::string& out_base, const std::string& command,
                  const json& resolved, std::uint64_t seed) {
  json log;
  log["command"] = command;
  log["seed"] = seed;
  log["config"] = resolved;
  const fs::path base(out_base);
  const fs::path path = fs::is_directory(base) ? base / "runlog.json"
                                               : fs::path(out_base + ".runlog.json");
  std::ofstream f(path);
  if (!f) throw IoError("cannot write run log: " + path.string());
  f << log.dump(2) << "\n";
}

int run_simulate(const CommonOpts& opts) {
  const json cfg_file = opts.config_path.empty() ? json::object()
                                                 : load_config_file(opts.config_path);
  SimConfig cfg = sim_config_from_json(section(cfg_file, "sim"));
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.out.empty()) throw BadConfig("simulate requires --out <dir>");
  const Scenario scenario = generate_scenario(cfg);
  save_scenario(opts.out, scenario);
  write_runlog(opts.out, "simulate", sim_config_to_json(cfg), cfg.seed);
  std::printf("wrote scenario '%s' (%d frames, %zu tracks) to %s\n",
              scenario.name.c_str(), scenario.frames, scenario.gt_tracks.size(),
              opts.out.c_str());
  return 0;
}

int run_pseudo_label(const CommonOpts& opts, const std::string& seq_dir) {
  const json cfg_file = opts.config_path.empty() ? json::object()
                                                 : load_config_file(opts.config_path);
  const PrimitiveConfig cfg = primitive_config_from_json(section(cfg_file, "primitive"));
  const Scenario scenario = load_scenario(seq_dir);
  std::vector<std::vector<std::pair<int, int>>> members;
  const auto tracks = pseudo_label(scenario.detections, cfg, &members);
  const std::string out_dir = opts.out.empty() ? seq_dir : opts.out;
  save_pseudo_tracks(out_dir, tracks, members, cfg);
  write_runlog(out_dir, "pseudo-label", primitive_config_to_json(cfg), 0);
  std::printf("wrote %zu pseudo tracks to %s\n", tracks.size(), out_dir.c_str());
  return 0;
}

int run_mine(const CommonOpts& opts, const std::string& stats_path, int k) {
  std::ifstream in(stats_path);
  if (!in) throw IoError("cannot open stats file: " + stats_path);
  std::vector<VideoStats> stats;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    VideoStats s;
    char name[256];
    if (std::sscanf(line.c_str(), "%255[^,],%d,%d", name, &s.track_count,
                    &s.frame_count) != 3)
      throw ParseError("expected 'name,track_count,frame_count'", line_no);
    s.name = name;
    stats.push_back(s);
  }
  const auto names = mine_videos(stats, k);
  std::string out_text;
  for (const auto& n : names) out_text += n + "\n";
  std::fputs(out_text.c_str(), stdout);
  if (!opts.out.empty()) {
    std::ofstream f(opts.out);
    if (!f) throw IoError("cannot write: " + opts.out);
    f << out_text;
    write_runlog(opts.out, "mine", json{{"stats", stats_path}, {"k", k}}, 0);
  }
  return 0;
}

int run_train(const CommonOpts& opts) {
  if (opts.config_path.empty()) throw BadConfig("train requires --config");
  if (opts.out.empty()) throw BadConfig("train requires --out <checkpoint>");
  const json cfg_file = load_config_file(opts.config_path);
  TrainConfig cfg = train_config_from_json(section(cfg_file, "train"));
  const DatasetSpec data = dataset_spec_from_json(section(cfg_file, "dataset"));
  if (opts.seed) cfg.seed = *opts.seed;
  const TrainResult result = train(data, cfg);
  save_checkpoint(opts.out, result.checkpoint);

  std::ofstream hist(opts.out + ".loss.txt");
  if (!hist) throw IoError("cannot write loss history");
  for (std::size_t i = 0; i < result.loss_history.size(); ++i)
    hist << (i + 1) << " " << format_double(result.loss_history[i]) << "\n";

  json resolved;
  resolved["train"] = train_config_to_json_obj(cfg);
  resolved["dataset"] = dataset_spec_to_json(data);
  write_runlog(opts.out, "train", resolved, cfg.seed);
  std::printf("trained %d epochs, final mean loss %.6f, checkpoint %s\n", cfg.epochs,
              result.checkpoint.running_loss, opts.out.c_str());
  return 0;
}

int run_track(const CommonOpts& opts, const std::string& ckpt_path,
              const std::string& seq_dir) {
  const json cfg_file = opts.config_path.empty() ? json::object()
                                                 : load_config_file(opts.config_path);
  const TrackerConfig cfg = tracker_config_from_json(section(cfg_file, "tracker"));
  if (opts.out.empty()) throw BadConfig("track requires --out <results file>");
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  const Scenario scenario = load_scenario(seq_dir);

  OnlineTracker tracker(cfg);
  std::vector<MotRow> rows;
  for (int f = 0; f < scenario.frames; ++f) {
    std::vector<std::pair<Instance, UnitEmbedding>> dets;
    if (f < static_cast<int>(scenario.detections.size())) {
      for (const auto& det : scenario.detections[f])
        dets.emplace_back(det, encode(ckpt.encoder, det.feature));
    }
    for (const auto& row : tracker.step(f, dets))
      rows.push_back(MotRow{row.frame, row.id, row.box, row.confidence});
  }
  write_mot(opts.out, rows);
  write_runlog(opts.out, "track",
               json{{"tracker", tracker_config_to_json(cfg)},
                    {"checkpoint", ckpt_path},
                    {"sequence", seq_dir}},
               0);
  std::printf("wrote %zu result rows to %s\n", rows.size(), opts.out.c_str());
  return 0;
}

int run_eval(const CommonOpts& opts, const std::string& gt_path,
             const std::string& res_path, double iou_threshold) {
  const auto gt = rows_to_tracks(parse_mot(gt_path));
  const auto pred = rows_to_tracks(parse_mot(res_path));
  const MetricsReport rep = evaluate(gt, pred, iou_threshold);
  std::printf("MOTA %.3f, IDF1 %.3f\n", rep.mota, rep.idf1);
  std::fputs(format_report(rep).c_str(), stdout);
  if (!opts.out.empty()) {
    std::ofstream f(opts.out);
    if (!f) throw IoError("cannot write: " + opts.out);
    f << report_key_values(rep);
    write_runlog(opts.out, "eval",
                 json{{"gt", gt_path}, {"results", res_path}, {"iou", iou_threshold}}, 0);
  }
  return 0;
}

int run_ablate(const CommonOpts& opts, const std::string& name) {
  const std::uint64_t seed = opts.seed.value_or(1);
  const AblationResult result = run_ablation(name, seed);
  std::fputs(result.table.c_str(), stdout);
  if (!opts.out.empty()) {
    fs::create_directories(opts.out);
    std::ofstream f(fs::path(opts.out) / (name + ".txt"));
    if (!f) throw IoError("cannot write ablation table");
    f << result.table;
    write_runlog(opts.out, "ablate", json{{"name", name}}, seed);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semitcl: tracklet-contrastive embedding learning toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string seq_dir, ckpt_path, stats_path, gt_path, res_path, ablation_name;
  int mine_k = 0;
  double iou_threshold = 0.5;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "structured JSON config file");
    sub->add_option("--seed", opts.seed, "seed override");
    sub->add_option("--out", opts.out, "output path");
  };

  auto* simulate = app.add_subcommand("simulate", "generate a synthetic scenario");
  add_common(simulate);

  auto* pseudo = app.add_subcommand("pseudo-label", "run the primitive tracker");
  add_common(pseudo);
  pseudo->add_option("sequence", seq_dir, "scenario directory")->required();

  auto* mine = app.add_subcommand("mine", "rank unlabeled videos by tracklet density");
  add_common(mine);
  mine->add_option("stats", stats_path, "csv of name,track_count,frame_count")->required();
  mine->add_option("--k", mine_k, "how many videos to keep")->required();

  auto* train_cmd = app.add_subcommand("train", "train an embedding encoder");
  add_common(train_cmd);

  auto* track_cmd = app.add_subcommand("track", "run the online tracker");
  add_common(track_cmd);
  track_cmd->add_option("--ckpt", ckpt_path, "encoder checkpoint")->required();
  track_cmd->add_option("sequence", seq_dir, "scenario directory")->required();

  auto* eval_cmd = app.add_subcommand("eval", "score results against ground truth");
  add_common(eval_cmd);
  eval_cmd->add_option("gt", gt_path, "ground-truth MOT file")->required();
  eval_cmd->add_option("results", res_path, "tracker result MOT file")->required();
  eval_cmd->add_option("--iou", iou_threshold, "box match threshold");

  auto* ablate = app.add_subcommand("ablate", "run a named ablation");
  add_common(ablate);
  ablate->add_option("name", ablation_name, "ablation name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulate(opts);
    if (pseudo->parsed()) return run_pseudo_label(opts, seq_dir);
    if (mine->parsed()) return run_mine(opts, stats_path, mine_k);
    if (train_cmd->parsed()) return run_train(opts);
    if (track_cmd->parsed()) return run_track(opts, ckpt_path, seq_dir);
    if (eval_cmd->parsed()) return run_eval(opts, gt_path, res_path, iou_threshold);
    if (ablate->parsed()) return run_ablate(opts, ablation_name);
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 2;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
