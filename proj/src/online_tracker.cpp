#include "semitcl/online_tracker.hpp"

#include <algorithm>
#include <limits>

#include "semitcl/errors.hpp"
#include "semitcl/hungarian.hpp"

namespace semitcl {

TrackEmbedding LiveTrack::embedding() const {
  const double norm = embedding_sum.norm();
  if (norm < kDegenerateNorm)
    throw DegenerateAggregate("track embedding norm below 1e-8");
  return TrackEmbedding{embedding_sum / norm, instance_count};
}

Eigen::MatrixXd association_cost(const std::vector<LiveTrack>& tracks,
                                 const std::vector<std::pair<Instance, UnitEmbedding>>& detections,
                                 const TrackerConfig& cfg) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd cost(tracks.size(), detections.size());
  for (std::size_t t = 0; t < tracks.size(); ++t) {
    const Box pred = kalman_state_box(tracks[t].kalman);
    const TrackEmbedding track_emb = tracks[t].embedding();
    for (std::size_t d = 0; d < detections.size(); ++d) {
      const double overlap = iou(pred, detections[d].first.box);
      const double app = instance_track_distance(detections[d].second, track_emb);
      if (app > cfg.appearance_gate || overlap < cfg.iou_gate) {
        cost(t, d) = inf;
        continue;
      }
      cost(t, d) = cfg.appearance_weight * app +
                   (1.0 - cfg.appearance_weight) * (1.0 - overlap);
    }
  }
  return cost;
}

TrackEmbedding update_track_embedding(LiveTrack& track, const UnitEmbedding& embedding) {
  track.embedding_sum += embedding.values;
  track.instance_count += 1;
  return track.embedding();
}

std::vector<TrackerRow> OnlineTracker::step(
    int frame, const std::vector<std::pair<Instance, UnitEmbedding>>& detections) {
  if (frame <= last_frame_)
    throw OutOfOrderFrame("frames must be presented in increasing order");
  // One constant-velocity prediction per elapsed frame.
  const int elapsed = last_frame_ < 0 ? 1 : frame - last_frame_;
  for (auto& track : tracks_) {
    for (int k = 0; k < elapsed; ++k) track.kalman = kalman_predict(track.kalman);
  }
  last_frame_ = frame;

  std::vector<TrackerRow> rows;
  std::vector<char> det_matched(detections.size(), 0);
  if (!tracks_.empty() && !detections.empty()) {
    const Eigen::MatrixXd cost = association_cost(tracks_, detections, cfg_);
    for (const auto& [t, d] : hungarian(cost).pairs) {
      LiveTrack& track = tracks_[t];
      const Instance& det = detections[d].first;
      track.kalman = kalman_update(track.kalman, det.box);
      if (cfg_.ema_enabled) {
        track.embedding_sum = cfg_.ema_alpha * track.embedding_sum +
                              (1.0 - cfg_.ema_alpha) * detections[d].second.values;
        track.instance_count += 1;
      } else {
        update_track_embedding(track, detections[d].second);
      }
      track.last_seen = frame;
      track.history.emplace_back(frame, det.box);
      rows.push_back(TrackerRow{frame, track.id, det.box, det.confidence});
      det_matched[d] = 1;
    }
  }

  for (std::size_t d = 0; d < detections.size(); ++d) {
    if (det_matched[d]) continue;
    const Instance& det = detections[d].first;
    if (det.confidence < cfg_.birth_confidence) continue;
    LiveTrack track;
    track.id = next_id_++;
    track.embedding_sum = detections[d].second.values;
    track.instance_count = 1;
    track.kalman = kalman_initiate(det.box);
    track.last_seen = frame;
    track.history.emplace_back(frame, det.box);
    rows.push_back(TrackerRow{frame, track.id, det.box, det.confidence});
    tracks_.push_back(std::move(track));
  }

  std::erase_if(tracks_, [&](const LiveTrack& t) { return frame - t.last_seen > cfg_.max_age; });

  std::sort(rows.begin(), rows.end(),
            [](const TrackerRow& a, const TrackerRow& b) { return a.id < b.id; });
  return rows;
}

}  // namespace semitcl
