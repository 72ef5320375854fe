#pragma once

#include <utility>
#include <vector>

#include "semitcl/types.hpp"

namespace semitcl {

struct PrimitiveConfig {
  double detection_threshold = 0.3;
  double iou_gate = 0.3;
  int max_age = 30;
  int min_track_len = 2;
};

// Motion-only primitive tracker: constant-velocity Kalman prediction with
// IoU-gated Hungarian association. Turns a detection stream into pseudo-label
// tracks for semi-supervised training. Detections below the confidence
// threshold are dropped; tracks shorter than min_track_len are discarded.
//
// When `members` is non-null it receives, per returned track, the
// (frame, index-within-frame) provenance of every instance, so callers can
// key back into detection sidecar files.
std::vector<Track> pseudo_label(const std::vector<std::vector<Instance>>& detections,
                                const PrimitiveConfig& cfg,
                                std::vector<std::vector<std::pair<int, int>>>* members = nullptr);

}  // namespace semitcl
