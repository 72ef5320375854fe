#include "semitcl/types.hpp"

#include <algorithm>
#include <cmath>

namespace semitcl {

double iou(const Box& a, const Box& b) {
  const double ix = std::min(a.right(), b.right()) - std::max(a.left, b.left);
  const double iy = std::min(a.bottom(), b.bottom()) - std::max(a.top, b.top);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

std::optional<std::string> validate_track(const Track& track) {
  if (track.instances.empty()) return "empty track";
  int prev = -1;
  for (const auto& inst : track.instances) {
    if (inst.frame < 0) return "negative frame index";
    if (prev >= 0 && inst.frame <= prev) return "frames not strictly increasing";
    prev = inst.frame;
    if (inst.identity && *inst.identity != track.id) return "instance identity mismatch";
  }
  return std::nullopt;
}

std::optional<std::string> validate_subtrack(const SubTrack& sub, const Track& parent) {
  if (sub.instances.empty()) return "empty sub-track";
  if (sub.parent_id != parent.id) return "parent id mismatch";
  // Locate the window start by frame, then require frame-for-frame equality
  // with a contiguous run of the parent. Parent frames are strictly
  // increasing, so frames identify instances.
  const auto& pi = parent.instances;
  auto it = std::find_if(pi.begin(), pi.end(), [&](const Instance& p) {
    return p.frame == sub.instances.front().frame;
  });
  if (it == pi.end()) return "sub-track start not found in parent";
  if (static_cast<std::size_t>(pi.end() - it) < sub.instances.size())
    return "sub-track extends past parent";
  for (std::size_t k = 0; k < sub.instances.size(); ++k) {
    if (sub.instances[k].frame != (it + k)->frame)
      return "sub-track not a contiguous window of parent";
  }
  return std::nullopt;
}

std::optional<std::string> validate_scenario(const Scenario& scenario) {
  if (scenario.frames < 0) return "negative frame count";
  for (const auto& track : scenario.gt_tracks) {
    if (auto err = validate_track(track)) return *err;
    for (const auto& inst : track.instances) {
      if (inst.frame >= scenario.frames) return "gt instance frame beyond scenario";
    }
  }
  if (static_cast<int>(scenario.detections.size()) > scenario.frames)
    return "detection frames beyond scenario";
  for (std::size_t f = 0; f < scenario.detections.size(); ++f) {
    for (const auto& det : scenario.detections[f]) {
      if (det.frame != static_cast<int>(f)) return "detection frame index mismatch";
    }
  }
  return std::nullopt;
}

}  // namespace semitcl
