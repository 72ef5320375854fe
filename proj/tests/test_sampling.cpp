#include <doctest.h>

#include <set>

#include "semitcl/errors.hpp"
#include "semitcl/sampling.hpp"
#include "test_support.hpp"

using namespace semitcl;

namespace {

Track feature_track(std::int64_t id, int first_frame, int length, int dim, Rng& rng) {
  Track t;
  t.id = id;
  for (int k = 0; k < length; ++k) {
    Instance inst;
    inst.frame = first_frame + k;
    inst.box = Box{10.0 * k, 5.0, 20, 40};
    inst.identity = id;
    inst.feature = testsup::random_unit(dim, rng);
    t.instances.push_back(inst);
  }
  return t;
}

}  // namespace

TEST_CASE("a length-1 track yields singleton full-track windows") {
  Rng feat_rng(1);
  const Track t = feature_track(1, 0, 1, 4, feat_rng);
  Rng rng(2);
  const auto subs = sample_subtracks(t, 3, 2, 8, rng);
  REQUIRE(subs.size() == 3);
  for (const auto& s : subs) {
    CHECK(s.instances.size() == 1);
    CHECK(!validate_subtrack(s, t));
  }
}

TEST_CASE("a forced length returns full-track copies") {
  Rng feat_rng(3);
  const Track t = feature_track(1, 0, 5, 4, feat_rng);
  Rng rng(4);
  const auto subs = sample_subtracks(t, 2, 5, 5, rng);
  REQUIRE(subs.size() == 2);
  for (const auto& s : subs) CHECK(s.instances.size() == 5);
}

TEST_CASE("windows stay in range and repeat under the same seed") {
  Rng feat_rng(5);
  const Track t = feature_track(1, 3, 10, 4, feat_rng);
  Rng rng_a(42);
  const auto subs_a = sample_subtracks(t, 20, 2, 4, rng_a);
  for (const auto& s : subs_a) {
    CHECK(s.instances.size() >= 2);
    CHECK(s.instances.size() <= 4);
    CHECK(!validate_subtrack(s, t));
  }
  Rng rng_b(42);
  const auto subs_b = sample_subtracks(t, 20, 2, 4, rng_b);
  REQUIRE(subs_a.size() == subs_b.size());
  for (std::size_t i = 0; i < subs_a.size(); ++i) {
    CHECK(subs_a[i].instances.front().frame == subs_b[i].instances.front().frame);
    CHECK(subs_a[i].instances.size() == subs_b[i].instances.size());
  }
}

TEST_CASE("single-track degenerate batch has L = 3 and full positive sets") {
  Rng feat_rng(6);
  SequenceTracks seq{"seq0", 40, {feature_track(1, 0, 40, 6, feat_rng)}};
  Rng enc_rng(7);
  const Encoder enc = Encoder::random(6, 5, 8, enc_rng);
  SamplerConfig cfg;
  cfg.segments_labeled = 1;
  cfg.segments_unlabeled = 0;
  Rng rng(8);
  const ContrastBatch batch = build_batch({seq}, {}, enc, cfg, rng);
  CHECK(batch.subtracks.size() == 3);
  CHECK(batch.anchors.size() == 32);  // one 32-frame segment of the only track
  for (const auto& set : batch.positive_sets) {
    REQUIRE(set.size() == 3);
    CHECK(set == std::vector<int>{0, 1, 2});
  }
}

TEST_CASE("L equals 3M and batch invariants hold") {
  Rng feat_rng(9);
  std::vector<SequenceTracks> labeled;
  for (int s = 0; s < 3; ++s) {
    SequenceTracks seq;
    seq.name = "seq" + std::to_string(s);
    seq.frames = 64;
    for (int k = 0; k < 4; ++k)
      seq.tracks.push_back(feature_track(k + 1, 8 * k, 40, 6, feat_rng));
    labeled.push_back(std::move(seq));
  }
  Rng enc_rng(10);
  const Encoder enc = Encoder::random(6, 5, 8, enc_rng);
  SamplerConfig cfg;
  cfg.segments_labeled = 2;
  cfg.segments_unlabeled = 0;
  Rng rng(11);
  const ContrastBatch batch = build_batch(labeled, {}, enc, cfg, rng);
  CHECK(batch.subtracks.size() % 3 == 0);
  CHECK(batch.subtracks.size() >= 3);
  // S(i) matches label equality exactly.
  for (std::size_t i = 0; i < batch.anchors.size(); ++i) {
    std::set<int> expect;
    for (std::size_t j = 0; j < batch.subtracks.size(); ++j)
      if (batch.subtrack_labels[j] == batch.anchor_labels[i])
        expect.insert(static_cast<int>(j));
    std::set<int> got(batch.positive_sets[i].begin(), batch.positive_sets[i].end());
    CHECK(got == expect);
  }
  for (const auto& a : batch.anchors) CHECK(std::abs(a.values.norm() - 1.0) < 1e-6);
  for (const auto& s : batch.subtracks) CHECK(std::abs(s.values.norm() - 1.0) < 1e-6);
}

TEST_CASE("same seed gives a bit-identical batch") {
  Rng feat_rng(12);
  std::vector<SequenceTracks> labeled = {
      SequenceTracks{"a", 64, {feature_track(1, 0, 64, 6, feat_rng),
                               feature_track(2, 10, 30, 6, feat_rng)}}};
  std::vector<SequenceTracks> unlabeled = {
      SequenceTracks{"u", 64, {feature_track(1, 0, 50, 6, feat_rng)}}};
  Rng enc_rng(13);
  const Encoder enc = Encoder::random(6, 5, 8, enc_rng);
  SamplerConfig cfg;
  cfg.segments_labeled = 1;
  cfg.segments_unlabeled = 1;

  Rng rng_a(99);
  const ContrastBatch a = build_batch(labeled, unlabeled, enc, cfg, rng_a);
  Rng rng_b(99);
  const ContrastBatch b = build_batch(labeled, unlabeled, enc, cfg, rng_b);
  REQUIRE(a.anchors.size() == b.anchors.size());
  REQUIRE(a.subtracks.size() == b.subtracks.size());
  for (std::size_t i = 0; i < a.anchors.size(); ++i) {
    CHECK(a.anchor_labels[i] == b.anchor_labels[i]);
    CHECK(std::equal(a.anchors[i].values.data(),
                     a.anchors[i].values.data() + a.anchors[i].values.size(),
                     b.anchors[i].values.data()));
  }
  for (std::size_t j = 0; j < a.subtracks.size(); ++j) {
    CHECK(std::equal(a.subtracks[j].values.data(),
                     a.subtracks[j].values.data() + a.subtracks[j].values.size(),
                     b.subtracks[j].values.data()));
  }
}

TEST_CASE("labeled to unlabeled segment ratio is exact under growth") {
  // Tiny sequences force several growth rounds; count labels by pool.
  Rng feat_rng(14);
  std::vector<SequenceTracks> labeled = {
      SequenceTracks{"l0", 8, {feature_track(1, 0, 8, 6, feat_rng)}}};
  std::vector<SequenceTracks> unlabeled = {
      SequenceTracks{"u0", 8, {feature_track(1, 0, 8, 6, feat_rng)}}};
  Rng enc_rng(15);
  const Encoder enc = Encoder::random(6, 5, 8, enc_rng);
  SamplerConfig cfg;
  cfg.segment_length = 8;
  cfg.segments_labeled = 1;
  cfg.segments_unlabeled = 1;
  cfg.anchor_target = 48;
  Rng rng(16);
  const ContrastBatch batch = build_batch(labeled, unlabeled, enc, cfg, rng);
  long labeled_anchors = 0;
  long unlabeled_anchors = 0;
  for (std::size_t i = 0; i < batch.anchors.size(); ++i) {
    if (batch.label_keys[batch.anchor_labels[i]].from_unlabeled)
      ++unlabeled_anchors;
    else
      ++labeled_anchors;
  }
  CHECK(labeled_anchors == unlabeled_anchors);  // 1:1 segments of equal size
  CHECK(labeled_anchors + unlabeled_anchors >= 48);
}

TEST_CASE("build_batch throws NoTracks when segments are empty") {
  std::vector<SequenceTracks> labeled = {SequenceTracks{"empty", 64, {}}};
  Rng enc_rng(17);
  const Encoder enc = Encoder::random(6, 5, 8, enc_rng);
  SamplerConfig cfg;
  cfg.segments_labeled = 1;
  cfg.segments_unlabeled = 0;
  Rng rng(18);
  CHECK_THROWS_AS(build_batch(labeled, {}, enc, cfg, rng), NoTracks);
}

TEST_CASE("mine_videos ranks by track count with name tie-breaks") {
  const std::vector<VideoStats> stats = {{"a", 5, 100}, {"b", 12, 100}, {"c", 3, 100}};
  CHECK(mine_videos(stats, 2) == std::vector<std::string>{"b", "a"});
  CHECK(mine_videos(stats, 0).empty());
  CHECK(mine_videos({{"a", 7, 10}, {"b", 7, 10}}, 1) == std::vector<std::string>{"a"});
  CHECK(mine_videos(stats, 99).size() == 3);
}

TEST_CASE("mining equals a full sort oracle") {
  Rng rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<VideoStats> stats;
    const int n = static_cast<int>(rng.uniform_int(0, 12));
    for (int i = 0; i < n; ++i) {
      stats.push_back(VideoStats{"v" + std::to_string(i),
                                 static_cast<int>(rng.uniform_int(0, 6)),
                                 static_cast<int>(rng.uniform_int(1, 50))});
    }
    const int k = static_cast<int>(rng.uniform_int(0, 14));
    auto sorted = stats;
    std::sort(sorted.begin(), sorted.end(), [](const VideoStats& a, const VideoStats& b) {
      if (a.track_count != b.track_count) return a.track_count > b.track_count;
      return a.name < b.name;
    });
    std::vector<std::string> expect;
    for (int i = 0; i < std::min<int>(k, static_cast<int>(sorted.size())); ++i)
      expect.push_back(sorted[i].name);
    CHECK(mine_videos(stats, k) == expect);
  }
}
