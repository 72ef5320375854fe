#include "semitcl/losses.hpp"

#include <cmath>
#include <limits>

#include "semitcl/errors.hpp"

namespace semitcl {

std::vector<std::vector<int>> make_positive_sets(const std::vector<std::int64_t>& anchor_labels,
                                                 const std::vector<std::int64_t>& unit_labels) {
  std::vector<std::vector<int>> sets(anchor_labels.size());
  for (std::size_t i = 0; i < anchor_labels.size(); ++i) {
    for (std::size_t j = 0; j < unit_labels.size(); ++j) {
      if (unit_labels[j] == anchor_labels[i]) sets[i].push_back(static_cast<int>(j));
    }
  }
  return sets;
}

namespace {

// Shared softmax-contrast core. `excluded[i]`, when >= 0, removes one unit
// from anchor i's denominator (self-contrast). Per-anchor terms accumulate in
// ascending index order so results are reproducible bit-for-bit.
ContrastResult contrastive_core(const std::vector<UnitEmbedding>& anchors,
                                const std::vector<TrackEmbedding>& units,
                                const std::vector<std::vector<int>>& positives,
                                const std::vector<int>& excluded, double tau,
                                bool literal_ratio_form) {
  const int n = static_cast<int>(anchors.size());
  const int l = static_cast<int>(units.size());
  const int dim = static_cast<int>(anchors.front().values.size());

  ContrastResult res;
  res.grad_anchors = Eigen::MatrixXd::Zero(n, dim);
  res.grad_units = Eigen::MatrixXd::Zero(l, dim);

  Eigen::VectorXd logits(l);
  Eigen::VectorXd prob(l);
  for (int i = 0; i < n; ++i) {
    const int skip = excluded.empty() ? -1 : excluded[i];
    const auto& pos = positives[i];
    if (pos.empty()) continue;

    double max_logit = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < l; ++j) {
      if (j == skip) continue;
      logits(j) = anchors[i].values.dot(units[j].values) / tau;
      max_logit = std::max(max_logit, logits(j));
    }
    double z = 0.0;
    for (int j = 0; j < l; ++j) {
      if (j == skip) {
        prob(j) = 0.0;
        continue;
      }
      prob(j) = std::exp(logits(j) - max_logit);
      z += prob(j);
    }
    prob /= z;

    const double inv_pos = 1.0 / static_cast<double>(pos.size());
    const double log_z = max_logit + std::log(z);

    if (literal_ratio_form) {
      // Raw ratio form: loss_i = -(1/|S|) sum_{j in S} p_j.
      double p_sum = 0.0;
      for (int j : pos) p_sum += prob(j);
      res.loss += -inv_pos * p_sum;
      for (int j = 0; j < l; ++j) {
        if (j == skip) continue;
        double indicator = 0.0;
        for (int q : pos) {
          if (q == j) {
            indicator = 1.0;
            break;
          }
        }
        const double g = -inv_pos * prob(j) * (indicator - p_sum) / tau;
        if (g == 0.0) continue;
        res.grad_anchors.row(i) += g * units[j].values.transpose();
        res.grad_units.row(j) += g * anchors[i].values.transpose();
      }
      continue;
    }

    // -log softmax form, max-subtracted.
    double term = 0.0;
    for (int j : pos) term += -(logits(j) - log_z);
    res.loss += inv_pos * term;

    Eigen::VectorXd coeff = prob;
    for (int j : pos) coeff(j) -= inv_pos;
    for (int j = 0; j < l; ++j) {
      if (j == skip || coeff(j) == 0.0) continue;
      const double g = coeff(j) / tau;
      res.grad_anchors.row(i) += g * units[j].values.transpose();
      res.grad_units.row(j) += g * anchors[i].values.transpose();
    }
  }
  return res;
}

std::vector<TrackEmbedding> as_units(const std::vector<UnitEmbedding>& embeddings) {
  std::vector<TrackEmbedding> units;
  units.reserve(embeddings.size());
  for (const auto& e : embeddings) units.push_back(TrackEmbedding{e.values, 1});
  return units;
}

}  // namespace

ContrastResult tcl_loss(const ContrastBatch& batch, const LossConfig& cfg) {
  if (batch.anchors.empty() || batch.subtracks.empty())
    throw EmptyBatch("tcl_loss requires at least one anchor and one sub-track");
  if (batch.positive_sets.size() != batch.anchors.size())
    throw std::invalid_argument("positive_sets size mismatch");
  for (const auto& set : batch.positive_sets) {
    for (int j : set) {
      if (j < 0 || j >= static_cast<int>(batch.subtracks.size()))
        throw std::invalid_argument("positive set index out of range");
    }
  }
  return contrastive_core(batch.anchors, batch.subtracks, batch.positive_sets, {},
                          cfg.temperature, cfg.literal_ratio_form);
}

SclResult scl_loss(const std::vector<UnitEmbedding>& instances,
                   const std::vector<std::int64_t>& labels, const LossConfig& cfg) {
  if (instances.size() < 2) throw EmptyBatch("scl_loss requires at least two instances");
  if (instances.size() != labels.size())
    throw std::invalid_argument("labels size mismatch");

  const int n = static_cast<int>(instances.size());
  std::vector<std::vector<int>> positives(n);
  std::vector<int> excluded(n);
  for (int i = 0; i < n; ++i) {
    excluded[i] = i;
    for (int j = 0; j < n; ++j) {
      if (j != i && labels[j] == labels[i]) positives[i].push_back(j);
    }
  }
  ContrastResult res = contrastive_core(instances, as_units(instances), positives,
                                        excluded, cfg.temperature, cfg.literal_ratio_form);
  // Each embedding appears both as an anchor and inside other anchors' terms.
  SclResult out;
  out.loss = res.loss;
  out.grad = res.grad_anchors + res.grad_units;
  return out;
}

ContrastResult scl_cross_loss(const std::vector<UnitEmbedding>& anchors,
                              const std::vector<std::int64_t>& anchor_labels,
                              const std::vector<UnitEmbedding>& contrast,
                              const std::vector<std::int64_t>& contrast_labels,
                              const LossConfig& cfg) {
  if (anchors.empty() || contrast.empty())
    throw EmptyBatch("scl_cross_loss requires non-empty anchor and contrast sets");
  return contrastive_core(anchors, as_units(contrast),
                          make_positive_sets(anchor_labels, contrast_labels), {},
                          cfg.temperature, cfg.literal_ratio_form);
}

CeResult ce_loss(const Eigen::VectorXd& logits, int label) {
  const int k = static_cast<int>(logits.size());
  if (label < 0 || label >= k) throw BadLabel("class label out of range");
  const double max_logit = logits.maxCoeff();
  Eigen::VectorXd p = (logits.array() - max_logit).exp();
  const double z = p.sum();
  p /= z;
  CeResult res;
  res.loss = -(logits(label) - max_logit - std::log(z));
  res.grad_logits = p;
  res.grad_logits(label) -= 1.0;
  return res;
}

MarginResult margin_loss(const UnitEmbedding& a, const UnitEmbedding& b,
                         bool same_identity, const LossConfig& cfg) {
  const Eigen::VectorXd diff = a.values - b.values;
  const double sq = diff.squaredNorm();
  MarginResult res;
  if (same_identity) {
    res.loss = sq;
    res.grad_a = 2.0 * diff;
    res.grad_b = -2.0 * diff;
  } else if (sq < cfg.margin) {
    res.loss = cfg.margin - sq;
    res.grad_a = -2.0 * diff;
    res.grad_b = 2.0 * diff;
  } else {
    res.loss = 0.0;
    res.grad_a = Eigen::VectorXd::Zero(a.values.size());
    res.grad_b = Eigen::VectorXd::Zero(b.values.size());
  }
  return res;
}

}  // namespace semitcl
