#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace semitcl {

struct Box {
  double left = 0.0;
  double top = 0.0;
  double width = 0.0;
  double height = 0.0;

  double right() const { return left + width; }
  double bottom() const { return top + height; }
  double cx() const { return left + width / 2.0; }
  double cy() const { return top + height / 2.0; }
  double area() const { return (width > 0.0 && height > 0.0) ? width * height : 0.0; }
};

// Intersection over union. Degenerate boxes contribute zero area.
double iou(const Box& a, const Box& b);

// One detected object in one frame. `identity` is absent for raw detections
// and carries the track label once the instance belongs to a track.
struct Instance {
  int frame = 0;
  Box box;
  double confidence = 1.0;
  Eigen::VectorXd feature;
  std::optional<std::int64_t> identity;
};

enum class TrackSource { annotated, pseudo };

struct Track {
  std::int64_t id = 0;
  std::vector<Instance> instances;  // strictly increasing frames
  TrackSource source = TrackSource::annotated;
};

// Contiguous window of a parent track's instance list.
struct SubTrack {
  std::int64_t parent_id = 0;
  std::vector<Instance> instances;
};

struct Scenario {
  std::string name;
  int frames = 0;
  int image_width = 0;
  int image_height = 0;
  std::vector<Track> gt_tracks;
  std::vector<std::vector<Instance>> detections;  // indexed by frame
};

// Each validator returns the first violated invariant, or nullopt when valid.
std::optional<std::string> validate_track(const Track& track);
std::optional<std::string> validate_subtrack(const SubTrack& sub, const Track& parent);
std::optional<std::string> validate_scenario(const Scenario& scenario);

}  // namespace semitcl
