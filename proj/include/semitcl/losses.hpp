#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "semitcl/encoder.hpp"

namespace semitcl {

struct LossConfig {
  double temperature = 0.07;
  double margin = 1.0;   // margin baseline only
  int num_classes = 0;   // CE baseline only
  // Evaluate the raw softmax-ratio form instead of -log(softmax). Kept for
  // comparison experiments; off by default.
  bool literal_ratio_form = false;
};

// Identity label that is unique across sequences.
struct LabelKey {
  bool from_unlabeled = false;
  std::string sequence;
  std::int64_t track_id = 0;

  friend bool operator<(const LabelKey& a, const LabelKey& b) {
    if (a.from_unlabeled != b.from_unlabeled) return a.from_unlabeled < b.from_unlabeled;
    if (a.sequence != b.sequence) return a.sequence < b.sequence;
    return a.track_id < b.track_id;
  }
  friend bool operator==(const LabelKey& a, const LabelKey& b) {
    return a.from_unlabeled == b.from_unlabeled && a.sequence == b.sequence &&
           a.track_id == b.track_id;
  }
};

// One loss evaluation's worth of data: N anchor instances, L sub-track
// embeddings, and for each anchor the index set of sub-tracks sharing its
// label. The feature/member fields carry the raw side of the same data so a
// trainer can chain gradients back through the encoder; the loss functions
// ignore them.
struct ContrastBatch {
  std::vector<UnitEmbedding> anchors;
  std::vector<std::int64_t> anchor_labels;
  std::vector<TrackEmbedding> subtracks;
  std::vector<std::int64_t> subtrack_labels;
  std::vector<std::vector<int>> positive_sets;

  std::vector<Eigen::VectorXd> anchor_features;
  std::vector<std::vector<Eigen::VectorXd>> subtrack_member_features;
  std::vector<std::vector<UnitEmbedding>> subtrack_member_embeddings;
  std::vector<LabelKey> label_keys;  // indexed by dense label id
};

// S(i) = indices of units whose label equals anchor i's label.
std::vector<std::vector<int>> make_positive_sets(const std::vector<std::int64_t>& anchor_labels,
                                                 const std::vector<std::int64_t>& unit_labels);

struct ContrastResult {
  double loss = 0.0;
  Eigen::MatrixXd grad_anchors;  // N x C
  Eigen::MatrixXd grad_units;    // L x C
};

// Instance-to-track contrastive loss: each anchor is pulled toward the
// sub-tracks of its own identity against all sampled sub-tracks, via
// -log softmax(dot / temperature). Anchors with an empty positive set
// contribute zero. Throws EmptyBatch when N == 0 or L == 0.
ContrastResult tcl_loss(const ContrastBatch& batch, const LossConfig& cfg);

struct SclResult {
  double loss = 0.0;
  Eigen::MatrixXd grad;  // N x C, anchor and contrast roles combined
};

// Instance-to-instance supervised contrastive loss over one embedding set;
// each instance anchors against all others (itself excluded).
SclResult scl_loss(const std::vector<UnitEmbedding>& instances,
                   const std::vector<std::int64_t>& labels, const LossConfig& cfg);

// Two-set form: anchors contrast against an explicit instance set with no
// exclusions. With singleton sub-tracks this is exactly tcl_loss.
ContrastResult scl_cross_loss(const std::vector<UnitEmbedding>& anchors,
                              const std::vector<std::int64_t>& anchor_labels,
                              const std::vector<UnitEmbedding>& contrast,
                              const std::vector<std::int64_t>& contrast_labels,
                              const LossConfig& cfg);

struct CeResult {
  double loss = 0.0;
  Eigen::VectorXd grad_logits;  // softmax - one_hot
};

// Cross-entropy over identity classes. Throws BadLabel when out of range.
CeResult ce_loss(const Eigen::VectorXd& logits, int label);

struct MarginResult {
  double loss = 0.0;
  Eigen::VectorXd grad_a;
  Eigen::VectorXd grad_b;
};

// Squared-distance pull for same identity, hinged push otherwise.
MarginResult margin_loss(const UnitEmbedding& a, const UnitEmbedding& b,
                         bool same_identity, const LossConfig& cfg);

}  // namespace semitcl
