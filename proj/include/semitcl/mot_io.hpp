#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semitcl/pseudo_label.hpp"
#include "semitcl/types.hpp"

namespace semitcl {

// One `frame,id,bb_left,bb_top,bb_width,bb_height,conf,x,y,z` row. Frames are
// 1-based in files and 0-based here; id -1 marks an unassociated detection;
// x,y,z are written as -1. Floats use shortest round-trip formatting, so
// writing parsed rows reproduces a canonical file byte for byte.
struct MotRow {
  int frame = 0;
  std::int64_t id = -1;
  Box box;
  double confidence = 1.0;
};

std::string format_double(double value);

std::vector<MotRow> parse_mot(const std::string& path);
void write_mot(const std::string& path, const std::vector<MotRow>& rows);

std::vector<MotRow> tracks_to_rows(const std::vector<Track>& tracks);
std::vector<Track> rows_to_tracks(const std::vector<MotRow>& rows,
                                  TrackSource source = TrackSource::annotated);
// Detections indexed by frame; `frames` extends the result to a fixed length.
std::vector<std::vector<Instance>> rows_to_detections(const std::vector<MotRow>& rows,
                                                      int frames = -1);

// Feature sidecar: versioned text file mapping (frame, index within frame) to
// a feature vector. Row order must mirror the companion MOT file.
void write_feature_sidecar(const std::string& path,
                           const std::vector<std::vector<Eigen::VectorXd>>& per_frame);
std::vector<std::vector<Eigen::VectorXd>> read_feature_sidecar(const std::string& path);

// A scenario persists as a directory: meta.json, gt.txt + gt_feat.txt,
// det.txt + det_feat.txt.
void save_scenario(const std::string& dir, const Scenario& scenario);
Scenario load_scenario(const std::string& dir);

// Pseudo tracks persist as pseudo.txt (MOT rows) plus pseudo_meta.json, which
// carries the pseudo provenance flag and each track's (frame, detection
// index) membership so features can be recovered from the detection sidecar.
void save_pseudo_tracks(const std::string& dir, const std::vector<Track>& tracks,
                        const std::vector<std::vector<std::pair<int, int>>>& members,
                        const PrimitiveConfig& cfg);
// Requires det.txt / det_feat.txt alongside pseudo_meta.json.
std::vector<Track> load_pseudo_tracks(const std::string& dir);
bool has_pseudo_tracks(const std::string& dir);

}  // namespace semitcl
