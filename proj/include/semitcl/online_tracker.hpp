#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "semitcl/encoder.hpp"
#include "semitcl/kalman.hpp"
#include "semitcl/types.hpp"

namespace semitcl {

struct TrackerConfig {
  double appearance_gate = 0.4;  // max cosine distance
  double iou_gate = 0.3;
  int max_age = 30;
  double birth_confidence = 0.3;
  double appearance_weight = 0.7;  // lambda in the combined cost
  // Exponential decay of the track embedding instead of the running mean.
  bool ema_enabled = false;
  double ema_alpha = 0.9;
};

struct LiveTrack {
  std::int64_t id = 0;
  // Raw (unnormalized) embedding state; the exposed TrackEmbedding is its
  // normalization. Keeping the sum makes the incremental mean match a batch
  // aggregate of the same instances.
  Eigen::VectorXd embedding_sum;
  int instance_count = 0;
  KalmanState kalman;
  int last_seen = 0;
  std::vector<std::pair<int, Box>> history;

  TrackEmbedding embedding() const;
};

// cost[t][d] = lambda * cosine distance + (1 - lambda) * (1 - IoU of the
// predicted track box with the detection). Entries violating either gate are
// +infinity. Kalman states must already be predicted to the current frame.
Eigen::MatrixXd association_cost(const std::vector<LiveTrack>& tracks,
                                 const std::vector<std::pair<Instance, UnitEmbedding>>& detections,
                                 const TrackerConfig& cfg);

// Folds one more instance embedding into the track's running aggregate and
// returns the updated TrackEmbedding.
TrackEmbedding update_track_embedding(LiveTrack& track, const UnitEmbedding& embedding);

struct TrackerRow {
  int frame = 0;
  std::int64_t id = 0;
  Box box;
  double confidence = 1.0;
};

// Embedding-based online tracker: Hungarian assignment on the combined
// appearance/motion cost, running-mean track embeddings, birth above the
// confidence threshold, death after max_age unmatched frames.
class OnlineTracker {
 public:
  explicit OnlineTracker(TrackerConfig cfg) : cfg_(cfg) {}

  // Frames must be presented in strictly increasing order.
  std::vector<TrackerRow> step(int frame,
                               const std::vector<std::pair<Instance, UnitEmbedding>>& detections);

  const std::vector<LiveTrack>& tracks() const { return tracks_; }

 private:
  TrackerConfig cfg_;
  std::vector<LiveTrack> tracks_;
  std::int64_t next_id_ = 1;
  int last_frame_ = -1;
};

}  // namespace semitcl
