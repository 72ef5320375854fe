#include "semitcl/training.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <json.hpp>

#include "semitcl/errors.hpp"
#include "semitcl/mot_io.hpp"

namespace semitcl {

namespace {

struct CeHead {
  Eigen::MatrixXd weight;  // classes x embed
  Eigen::VectorXd bias;
};

struct StepGrads {
  EncoderGrad encoder;
  Eigen::MatrixXd head_weight;
  Eigen::VectorXd head_bias;
};

void validate(const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw BadConfig("epochs must be >= 1");
  if (cfg.steps_per_epoch < 1) throw BadConfig("steps_per_epoch must be >= 1");
  if (cfg.lr_initial <= 0.0 || cfg.lr_final <= 0.0) throw BadConfig("learning rates must be > 0");
  if (cfg.loss_cfg.temperature <= 0.0) throw BadConfig("temperature must be > 0");
  if (cfg.loss_cfg.margin <= 0.0) throw BadConfig("margin must be > 0");
  if (cfg.loss != "tcl" && cfg.loss != "scl" && cfg.loss != "ce" && cfg.loss != "margin")
    throw BadConfig("unknown loss '" + cfg.loss + "'");
}

// All identity classes visible to the trainer, in sorted key order so the
// class indexing is stable across runs.
std::vector<LabelKey> collect_classes(const std::vector<SequenceTracks>& labeled,
                                      const std::vector<SequenceTracks>& unlabeled) {
  std::set<LabelKey> keys;
  for (const auto& seq : labeled)
    for (const auto& track : seq.tracks) keys.insert(LabelKey{false, seq.name, track.id});
  for (const auto& seq : unlabeled)
    for (const auto& track : seq.tracks) keys.insert(LabelKey{true, seq.name, track.id});
  return {keys.begin(), keys.end()};
}

// Chains a per-anchor embedding gradient matrix into encoder parameter space.
void chain_anchor_grads(const Encoder& encoder, const ContrastBatch& batch,
                        const Eigen::MatrixXd& grad_anchors, EncoderGrad& into) {
  for (std::size_t i = 0; i < batch.anchors.size(); ++i) {
    const Eigen::VectorXd upstream = grad_anchors.row(static_cast<Eigen::Index>(i)).transpose();
    if (upstream.isZero(0.0)) continue;
    accumulate_encode_backward(encoder, batch.anchor_features[i], upstream, into);
  }
}

void chain_subtrack_grads(const Encoder& encoder, const ContrastBatch& batch,
                          const Eigen::MatrixXd& grad_units, EncoderGrad& into) {
  for (std::size_t l = 0; l < batch.subtracks.size(); ++l) {
    const Eigen::VectorXd upstream = grad_units.row(static_cast<Eigen::Index>(l)).transpose();
    if (upstream.isZero(0.0)) continue;
    const auto member_grads =
        aggregate_backward(batch.subtrack_member_embeddings[l], upstream);
    for (std::size_t m = 0; m < member_grads.size(); ++m) {
      accumulate_encode_backward(encoder, batch.subtrack_member_features[l][m],
                                 member_grads[m], into);
    }
  }
}

// The instance-to-instance mode contrasts anchors against one representative
// instance per sampled sub-track (its first member), so the batch geometry is
// identical to the track-level loss and aggregation is the only variable.
// The representative goes through a singleton aggregate, which keeps the
// computation bit-identical to the track-level loss when every sub-track has
// length one.
double scl_step(const Encoder& encoder, const ContrastBatch& batch,
                const LossConfig& loss_cfg, StepGrads& grads) {
  std::vector<UnitEmbedding> contrast;
  std::vector<std::int64_t> contrast_labels;
  contrast.reserve(batch.subtracks.size());
  for (std::size_t l = 0; l < batch.subtracks.size(); ++l) {
    const TrackEmbedding unit = aggregate({batch.subtrack_member_embeddings[l].front()});
    contrast.push_back(UnitEmbedding{unit.values});
    contrast_labels.push_back(batch.subtrack_labels[l]);
  }
  const ContrastResult res = scl_cross_loss(batch.anchors, batch.anchor_labels,
                                            contrast, contrast_labels, loss_cfg);
  chain_anchor_grads(encoder, batch, res.grad_anchors, grads.encoder);
  for (std::size_t u = 0; u < contrast.size(); ++u) {
    const Eigen::VectorXd upstream = res.grad_units.row(static_cast<Eigen::Index>(u)).transpose();
    if (upstream.isZero(0.0)) continue;
    const auto member_grads =
        aggregate_backward({batch.subtrack_member_embeddings[u].front()}, upstream);
    accumulate_encode_backward(encoder, batch.subtrack_member_features[u].front(),
                               member_grads[0], grads.encoder);
  }
  return res.loss;
}

// Identity classification over unit-norm embeddings needs a logit scale to
// saturate the softmax; the loss temperature doubles as that scale, which
// also matches the contrastive losses' gradient magnitudes per step.
double ce_step(const Encoder& encoder, const ContrastBatch& batch, const CeHead& head,
               const std::map<LabelKey, int>& class_of, const LossConfig& loss_cfg,
               StepGrads& grads) {
  const double inv_tau = 1.0 / loss_cfg.temperature;
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.anchors.size(); ++i) {
    const auto it = class_of.find(batch.label_keys[batch.anchor_labels[i]]);
    if (it == class_of.end())
      throw BadLabel("anchor identity missing from the class table");
    const Eigen::VectorXd& e = batch.anchors[i].values;
    const Eigen::VectorXd logits = inv_tau * (head.weight * e + head.bias);
    const CeResult res = ce_loss(logits, it->second);
    loss += res.loss;
    grads.head_weight.noalias() += inv_tau * res.grad_logits * e.transpose();
    grads.head_bias += inv_tau * res.grad_logits;
    const Eigen::VectorXd upstream = inv_tau * (head.weight.transpose() * res.grad_logits);
    accumulate_encode_backward(encoder, batch.anchor_features[i], upstream, grads.encoder);
  }
  return loss;
}

double margin_step(const Encoder& encoder, const ContrastBatch& batch,
                   const LossConfig& loss_cfg, StepGrads& grads) {
  const std::size_t n = std::min<std::size_t>(batch.anchors.size(), 256);
  double loss = 0.0;
  long pairs = 0;
  std::vector<Eigen::VectorXd> anchor_grads(n);
  for (std::size_t i = 0; i < n; ++i)
    anchor_grads[i] = Eigen::VectorXd::Zero(batch.anchors[i].values.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool same = batch.anchor_labels[i] == batch.anchor_labels[j];
      const MarginResult res =
          margin_loss(batch.anchors[i], batch.anchors[j], same, loss_cfg);
      loss += res.loss;
      anchor_grads[i] += res.grad_a;
      anchor_grads[j] += res.grad_b;
      ++pairs;
    }
  }
  if (pairs == 0) return 0.0;
  const double inv = 1.0 / static_cast<double>(pairs);
  for (std::size_t i = 0; i < n; ++i) {
    if (anchor_grads[i].isZero(0.0)) continue;
    accumulate_encode_backward(encoder, batch.anchor_features[i],
                               anchor_grads[i] * inv, grads.encoder);
  }
  return loss * inv;
}

}  // namespace

std::string train_config_to_json(const TrainConfig& cfg) {
  nlohmann::json j;
  j["loss"] = cfg.loss;
  j["epochs"] = cfg.epochs;
  j["steps_per_epoch"] = cfg.steps_per_epoch;
  j["batch_anchor_target"] = cfg.batch_anchor_target;
  j["lr_initial"] = cfg.lr_initial;
  j["lr_final"] = cfg.lr_final;
  j["lr_drop_epoch"] = cfg.lr_drop_epoch;
  j["momentum"] = cfg.momentum;
  j["seed"] = cfg.seed;
  j["input_dim"] = cfg.input_dim;
  j["hidden_dim"] = cfg.hidden_dim;
  j["embed_dim"] = cfg.embed_dim;
  j["sampler"] = {{"segment_length", cfg.sampler.segment_length},
                  {"segments_labeled", cfg.sampler.segments_labeled},
                  {"segments_unlabeled", cfg.sampler.segments_unlabeled},
                  {"subtracks_per_track", cfg.sampler.subtracks_per_track},
                  {"subtrack_len_min", cfg.sampler.subtrack_len_min},
                  {"subtrack_len_max", cfg.sampler.subtrack_len_max}};
  j["loss_cfg"] = {{"temperature", cfg.loss_cfg.temperature},
                   {"margin", cfg.loss_cfg.margin},
                   {"num_classes", cfg.loss_cfg.num_classes},
                   {"literal_ratio_form", cfg.loss_cfg.literal_ratio_form}};
  return j.dump();
}

TrainResult train(const std::vector<SequenceTracks>& labeled,
                  const std::vector<SequenceTracks>& unlabeled, const TrainConfig& cfg) {
  validate(cfg);
  if (labeled.empty() && cfg.sampler.segments_labeled > 0)
    throw BadConfig("labeled sequence set is empty");
  if (unlabeled.empty() && cfg.sampler.segments_unlabeled > 0)
    throw BadConfig("segments_unlabeled > 0 but no unlabeled sequences given");

  Rng rng(cfg.seed);
  Encoder encoder = Encoder::random(cfg.input_dim, cfg.hidden_dim, cfg.embed_dim, rng);

  CeHead head;
  std::map<LabelKey, int> class_of;
  if (cfg.loss == "ce") {
    const auto classes = collect_classes(labeled, unlabeled);
    if (classes.empty()) throw BadConfig("ce loss requires at least one identity");
    for (std::size_t k = 0; k < classes.size(); ++k)
      class_of.emplace(classes[k], static_cast<int>(k));
    const int kk = static_cast<int>(classes.size());
    head.weight.resize(kk, cfg.embed_dim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.embed_dim));
    for (int r = 0; r < kk; ++r)
      for (int c = 0; c < cfg.embed_dim; ++c) head.weight(r, c) = rng.gaussian(0.0, scale);
    head.bias = Eigen::VectorXd::Zero(kk);
  }

  SamplerConfig sampler = cfg.sampler;
  sampler.anchor_target = cfg.batch_anchor_target;

  EncoderGrad vel = EncoderGrad::zero(encoder);
  Eigen::MatrixXd head_vel;
  Eigen::VectorXd head_bias_vel;
  if (cfg.loss == "ce") {
    head_vel = Eigen::MatrixXd::Zero(head.weight.rows(), head.weight.cols());
    head_bias_vel = Eigen::VectorXd::Zero(head.bias.size());
  }

  const int drop_epoch = cfg.lr_drop_epoch > 0
                             ? cfg.lr_drop_epoch
                             : std::max(1, static_cast<int>(std::lround(0.8 * cfg.epochs)));

  TrainResult result;
  double epoch_loss_sum = 0.0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const double lr = epoch > drop_epoch ? cfg.lr_final : cfg.lr_initial;
    epoch_loss_sum = 0.0;
    for (int step = 0; step < cfg.steps_per_epoch; ++step) {
      ContrastBatch batch = build_batch(labeled, unlabeled, encoder, sampler, rng);

      StepGrads grads;
      grads.encoder = EncoderGrad::zero(encoder);
      if (cfg.loss == "ce") {
        grads.head_weight = Eigen::MatrixXd::Zero(head.weight.rows(), head.weight.cols());
        grads.head_bias = Eigen::VectorXd::Zero(head.bias.size());
      }

      double loss = 0.0;
      if (cfg.loss == "tcl") {
        const ContrastResult res = tcl_loss(batch, cfg.loss_cfg);
        loss = res.loss;
        chain_anchor_grads(encoder, batch, res.grad_anchors, grads.encoder);
        chain_subtrack_grads(encoder, batch, res.grad_units, grads.encoder);
      } else if (cfg.loss == "scl") {
        loss = scl_step(encoder, batch, cfg.loss_cfg, grads);
      } else if (cfg.loss == "ce") {
        loss = ce_step(encoder, batch, head, class_of, cfg.loss_cfg, grads);
      } else {
        loss = margin_step(encoder, batch, cfg.loss_cfg, grads);
      }

      if (!std::isfinite(loss)) throw DivergenceDetected("training loss is not finite");

      // Per-anchor averaging keeps step sizes comparable across batch sizes;
      // the logged loss stays the raw sum.
      const double inv_n = 1.0 / static_cast<double>(batch.anchors.size());
      grads.encoder.scale(inv_n);

      vel.w1 = cfg.momentum * vel.w1 + grads.encoder.w1;
      vel.b1 = cfg.momentum * vel.b1 + grads.encoder.b1;
      vel.w2 = cfg.momentum * vel.w2 + grads.encoder.w2;
      vel.b2 = cfg.momentum * vel.b2 + grads.encoder.b2;
      encoder.w1 -= lr * vel.w1;
      encoder.b1 -= lr * vel.b1;
      encoder.w2 -= lr * vel.w2;
      encoder.b2 -= lr * vel.b2;
      if (cfg.loss == "ce") {
        head_vel = cfg.momentum * head_vel + inv_n * grads.head_weight;
        head_bias_vel = cfg.momentum * head_bias_vel + inv_n * grads.head_bias;
        head.weight -= lr * head_vel;
        head.bias -= lr * head_bias_vel;
      }

      result.loss_history.push_back(loss);
      epoch_loss_sum += loss;
    }
  }

  result.checkpoint.encoder = std::move(encoder);
  result.checkpoint.train_config_json = train_config_to_json(cfg);
  result.checkpoint.rng_state = rng.state();
  result.checkpoint.epoch = static_cast<std::uint32_t>(cfg.epochs);
  result.checkpoint.running_loss = epoch_loss_sum / cfg.steps_per_epoch;
  return result;
}

TrainResult train(const DatasetSpec& data, const TrainConfig& cfg) {
  if (data.labeled.empty()) throw BadConfig("dataset has no labeled sequences");
  std::vector<SequenceTracks> labeled;
  for (const auto& dir : data.labeled) {
    Scenario s = load_scenario(dir);
    labeled.push_back(SequenceTracks{s.name, s.frames, std::move(s.gt_tracks)});
  }
  std::vector<SequenceTracks> unlabeled;
  for (const auto& dir : data.mined) {
    if (!has_pseudo_tracks(dir))
      throw BadConfig("mined sequence lacks pseudo labels: " + dir);
    Scenario s = load_scenario(dir);
    unlabeled.push_back(SequenceTracks{s.name, s.frames, load_pseudo_tracks(dir)});
  }
  return train(labeled, unlabeled, cfg);
}

}  // namespace semitcl
