#include "semitcl/sampling.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "semitcl/errors.hpp"

namespace semitcl {

std::vector<SubTrack> sample_subtracks(const Track& track, int count, int len_min,
                                       int len_max, Rng& rng) {
  const int n = static_cast<int>(track.instances.size());
  if (n == 0) throw std::invalid_argument("cannot sample sub-tracks from an empty track");
  if (len_min < 1 || len_max < len_min)
    throw std::invalid_argument("sub-track length range must satisfy 1 <= min <= max");

  std::vector<SubTrack> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const int hi = std::min(len_max, n);
    const int len = hi < len_min ? n : static_cast<int>(rng.uniform_int(len_min, hi));
    const int start = static_cast<int>(rng.uniform_int(0, n - len));
    SubTrack sub;
    sub.parent_id = track.id;
    sub.instances.assign(track.instances.begin() + start,
                         track.instances.begin() + start + len);
    out.push_back(std::move(sub));
  }
  return out;
}

namespace {

struct Segment {
  const SequenceTracks* seq;
  bool from_unlabeled;
  int start;
};

// Draw `count` segments from a pool: sequences chosen without replacement
// within the round when the pool is large enough, with replacement otherwise;
// start frames uniform over valid windows.
void draw_segments(const std::vector<SequenceTracks>& pool, bool from_unlabeled,
                   int count, int segment_length, Rng& rng, std::vector<Segment>& out) {
  if (count <= 0) return;
  if (pool.empty())
    throw std::invalid_argument("segment count positive but sequence pool empty");
  std::vector<int> picks;
  if (static_cast<int>(pool.size()) >= count) {
    std::vector<int> indices(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) indices[i] = static_cast<int>(i);
    for (int k = 0; k < count; ++k) {
      const int j = static_cast<int>(rng.uniform_int(k, static_cast<int>(indices.size()) - 1));
      std::swap(indices[k], indices[j]);
      picks.push_back(indices[k]);
    }
  } else {
    for (int k = 0; k < count; ++k)
      picks.push_back(static_cast<int>(rng.uniform_int(0, static_cast<int>(pool.size()) - 1)));
  }
  for (int idx : picks) {
    const SequenceTracks& seq = pool[idx];
    const int max_start = std::max(0, seq.frames - segment_length);
    Segment seg;
    seg.seq = &seq;
    seg.from_unlabeled = from_unlabeled;
    seg.start = max_start > 0 ? static_cast<int>(rng.uniform_int(0, max_start)) : 0;
    out.push_back(seg);
  }
}

struct ClippedTrack {
  LabelKey key;
  Track track;  // instances clipped to the segment window
};

}  // namespace

ContrastBatch build_batch(const std::vector<SequenceTracks>& labeled,
                          const std::vector<SequenceTracks>& unlabeled,
                          const Encoder& encoder, const SamplerConfig& cfg, Rng& rng) {
  if (cfg.segment_length < 1) throw BadConfig("segment_length must be >= 1");
  if (cfg.subtracks_per_track < 1) throw BadConfig("subtracks_per_track must be >= 1");

  std::vector<ClippedTrack> clipped;
  std::size_t anchor_count = 0;
  const int rounds = cfg.anchor_target > 0 ? std::max(1, cfg.max_growth_rounds) : 1;
  for (int round = 0; round < rounds; ++round) {
    std::vector<Segment> segments;
    draw_segments(labeled, false, cfg.segments_labeled, cfg.segment_length, rng, segments);
    draw_segments(unlabeled, true, cfg.segments_unlabeled, cfg.segment_length, rng, segments);

    for (const Segment& seg : segments) {
      for (const Track& track : seg.seq->tracks) {
        ClippedTrack ct;
        ct.key = LabelKey{seg.from_unlabeled, seg.seq->name, track.id};
        ct.track.id = track.id;
        ct.track.source = track.source;
        for (const Instance& inst : track.instances) {
          if (inst.frame >= seg.start && inst.frame < seg.start + cfg.segment_length)
            ct.track.instances.push_back(inst);
        }
        if (!ct.track.instances.empty()) {
          anchor_count += ct.track.instances.size();
          clipped.push_back(std::move(ct));
        }
      }
    }
    if (cfg.anchor_target <= 0 || static_cast<int>(anchor_count) >= cfg.anchor_target) break;
  }

  if (clipped.empty()) throw NoTracks("sampled segments contain no tracks");

  // Dense labels in first-encounter order.
  ContrastBatch batch;
  std::map<LabelKey, std::int64_t> label_of;
  auto dense_label = [&](const LabelKey& key) {
    auto it = label_of.find(key);
    if (it != label_of.end()) return it->second;
    const std::int64_t label = static_cast<std::int64_t>(batch.label_keys.size());
    label_of.emplace(key, label);
    batch.label_keys.push_back(key);
    return label;
  };

  for (const ClippedTrack& ct : clipped) {
    const std::int64_t label = dense_label(ct.key);
    for (const Instance& inst : ct.track.instances) {
      batch.anchors.push_back(encode(encoder, inst.feature));
      batch.anchor_labels.push_back(label);
      batch.anchor_features.push_back(inst.feature);
    }
    for (SubTrack& sub :
         sample_subtracks(ct.track, cfg.subtracks_per_track, cfg.subtrack_len_min,
                          cfg.subtrack_len_max, rng)) {
      std::vector<UnitEmbedding> member_embeddings;
      std::vector<Eigen::VectorXd> member_features;
      member_embeddings.reserve(sub.instances.size());
      for (const Instance& inst : sub.instances) {
        member_embeddings.push_back(encode(encoder, inst.feature));
        member_features.push_back(inst.feature);
      }
      batch.subtracks.push_back(aggregate(member_embeddings));
      batch.subtrack_labels.push_back(label);
      batch.subtrack_member_embeddings.push_back(std::move(member_embeddings));
      batch.subtrack_member_features.push_back(std::move(member_features));
    }
  }
  batch.positive_sets = make_positive_sets(batch.anchor_labels, batch.subtrack_labels);
  return batch;
}

std::vector<std::string> mine_videos(const std::vector<VideoStats>& stats, int k,
                                     bool per_frame) {
  if (k < 0) throw std::invalid_argument("k must be >= 0");
  std::vector<const VideoStats*> order;
  order.reserve(stats.size());
  for (const auto& s : stats) order.push_back(&s);
  auto density = [per_frame](const VideoStats& s) {
    if (!per_frame) return static_cast<double>(s.track_count);
    return s.frame_count > 0 ? static_cast<double>(s.track_count) / s.frame_count : 0.0;
  };
  std::sort(order.begin(), order.end(), [&](const VideoStats* a, const VideoStats* b) {
    const double da = density(*a);
    const double db = density(*b);
    if (da != db) return da > db;
    return a->name < b->name;
  });
  std::vector<std::string> out;
  const int take = std::min<int>(k, static_cast<int>(order.size()));
  out.reserve(static_cast<std::size_t>(take));
  for (int i = 0; i < take; ++i) out.push_back(order[i]->name);
  return out;
}

}  // namespace semitcl
