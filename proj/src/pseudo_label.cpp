#include "semitcl/pseudo_label.hpp"

#include <limits>

#include <Eigen/Core>

#include "semitcl/hungarian.hpp"
#include "semitcl/kalman.hpp"

namespace semitcl {

namespace {

struct Worktrack {
  std::int64_t id;
  KalmanState state;
  int last_seen;
  std::vector<Instance> instances;
  std::vector<std::pair<int, int>> members;
};

}  // namespace

std::vector<Track> pseudo_label(const std::vector<std::vector<Instance>>& detections,
                                const PrimitiveConfig& cfg,
                                std::vector<std::vector<std::pair<int, int>>>* members) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<Worktrack> live;
  std::vector<Worktrack> finished;
  std::int64_t next_id = 1;

  const int frames = static_cast<int>(detections.size());
  for (int f = 0; f < frames; ++f) {
    for (auto& t : live) t.state = kalman_predict(t.state);

    // Surviving detections for this frame, with their original indices.
    std::vector<int> det_idx;
    for (int d = 0; d < static_cast<int>(detections[f].size()); ++d) {
      if (detections[f][d].confidence >= cfg.detection_threshold) det_idx.push_back(d);
    }

    std::vector<char> det_matched(det_idx.size(), 0);
    if (!live.empty() && !det_idx.empty()) {
      Eigen::MatrixXd cost(live.size(), det_idx.size());
      for (std::size_t t = 0; t < live.size(); ++t) {
        const Box pred = kalman_state_box(live[t].state);
        for (std::size_t d = 0; d < det_idx.size(); ++d) {
          const double overlap = iou(pred, detections[f][det_idx[d]].box);
          cost(t, d) = overlap < cfg.iou_gate ? inf : 1.0 - overlap;
        }
      }
      for (const auto& [t, d] : hungarian(cost).pairs) {
        const Instance& det = detections[f][det_idx[d]];
        live[t].state = kalman_update(live[t].state, det.box);
        Instance inst = det;
        inst.identity = live[t].id;
        live[t].instances.push_back(inst);
        live[t].members.emplace_back(f, det_idx[d]);
        live[t].last_seen = f;
        det_matched[d] = 1;
      }
    }

    for (std::size_t d = 0; d < det_idx.size(); ++d) {
      if (det_matched[d]) continue;
      const Instance& det = detections[f][det_idx[d]];
      Worktrack t;
      t.id = next_id++;
      t.state = kalman_initiate(det.box);
      t.last_seen = f;
      Instance inst = det;
      inst.identity = t.id;
      t.instances.push_back(inst);
      t.members.emplace_back(f, det_idx[d]);
      live.push_back(std::move(t));
    }

    for (std::size_t t = 0; t < live.size();) {
      if (f - live[t].last_seen > cfg.max_age) {
        finished.push_back(std::move(live[t]));
        live.erase(live.begin() + static_cast<std::ptrdiff_t>(t));
      } else {
        ++t;
      }
    }
  }
  for (auto& t : live) finished.push_back(std::move(t));

  std::sort(finished.begin(), finished.end(),
            [](const Worktrack& a, const Worktrack& b) { return a.id < b.id; });

  std::vector<Track> out;
  if (members) members->clear();
  for (auto& t : finished) {
    if (static_cast<int>(t.instances.size()) < cfg.min_track_len) continue;
    Track track;
    track.id = t.id;
    track.instances = std::move(t.instances);
    track.source = TrackSource::pseudo;
    out.push_back(std::move(track));
    if (members) members->push_back(std::move(t.members));
  }
  return out;
}

}  // namespace semitcl
