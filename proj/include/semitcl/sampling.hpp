#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semitcl/encoder.hpp"
#include "semitcl/losses.hpp"
#include "semitcl/rng.hpp"
#include "semitcl/types.hpp"

namespace semitcl {

struct SamplerConfig {
  int segment_length = 32;
  int segments_labeled = 2;
  int segments_unlabeled = 2;
  int subtracks_per_track = 3;
  int subtrack_len_min = 2;
  int subtrack_len_max = 8;
  std::uint64_t seed = 0;
  // When positive, segment rounds (segments_labeled + segments_unlabeled per
  // round, keeping the ratio exact) are added until the anchor count reaches
  // this target or max_growth_rounds is hit.
  int anchor_target = 0;
  int max_growth_rounds = 8;
};

struct VideoStats {
  std::string name;
  int track_count = 0;
  int frame_count = 0;
};

// A sequence as the sampler sees it: a name, a frame extent, and tracks
// (annotated or pseudo-labeled) whose instances carry features.
struct SequenceTracks {
  std::string name;
  int frames = 0;
  std::vector<Track> tracks;
};

// `count` contiguous windows of the track, each with length uniform in
// [len_min, min(len_max, track length)] and uniform start. Tracks shorter
// than len_min yield full-track windows.
std::vector<SubTrack> sample_subtracks(const Track& track, int count, int len_min,
                                       int len_max, Rng& rng);

// One training batch: segment sampling from the labeled and pseudo-labeled
// pools, sub-track sampling per clipped track, anchor collection, and
// embedding through the encoder. Throws NoTracks when the sampled segments
// contain no track instances.
ContrastBatch build_batch(const std::vector<SequenceTracks>& labeled,
                          const std::vector<SequenceTracks>& unlabeled,
                          const Encoder& encoder, const SamplerConfig& cfg, Rng& rng);

// Names of the k videos with the highest track count, descending, ties broken
// by ascending name. With per_frame set, ranks by track count per frame.
std::vector<std::string> mine_videos(const std::vector<VideoStats>& stats, int k,
                                     bool per_frame = false);

}  // namespace semitcl
