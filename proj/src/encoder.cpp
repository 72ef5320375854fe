#include "semitcl/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "semitcl/errors.hpp"

namespace semitcl {

Encoder Encoder::random(int input, int hidden, int embed, Rng& rng) {
  if (input < 1 || hidden < 1 || embed < 2)
    throw BadConfig("encoder dims must satisfy input >= 1, hidden >= 1, embed >= 2");
  Encoder enc;
  enc.w1.resize(hidden, input);
  enc.b1 = Eigen::VectorXd::Zero(hidden);
  enc.w2.resize(embed, hidden);
  enc.b2 = Eigen::VectorXd::Zero(embed);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(input));
  for (int r = 0; r < hidden; ++r)
    for (int c = 0; c < input; ++c) enc.w1(r, c) = rng.gaussian(0.0, s1);
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (int r = 0; r < embed; ++r)
    for (int c = 0; c < hidden; ++c) enc.w2(r, c) = rng.gaussian(0.0, s2);
  // Small random output bias keeps inputs whose hidden layer dies away from
  // the degenerate-norm threshold.
  for (int i = 0; i < embed; ++i) enc.b2(i) = rng.gaussian(0.0, 0.01);
  return enc;
}

EncoderGrad EncoderGrad::zero(const Encoder& enc) {
  EncoderGrad g;
  g.w1 = Eigen::MatrixXd::Zero(enc.w1.rows(), enc.w1.cols());
  g.b1 = Eigen::VectorXd::Zero(enc.b1.size());
  g.w2 = Eigen::MatrixXd::Zero(enc.w2.rows(), enc.w2.cols());
  g.b2 = Eigen::VectorXd::Zero(enc.b2.size());
  return g;
}

EncoderGrad& EncoderGrad::operator+=(const EncoderGrad& other) {
  w1 += other.w1;
  b1 += other.b1;
  w2 += other.w2;
  b2 += other.b2;
  return *this;
}

void EncoderGrad::scale(double factor) {
  w1 *= factor;
  b1 *= factor;
  w2 *= factor;
  b2 *= factor;
}

double EncoderGrad::max_abs() const {
  double m = w1.cwiseAbs().maxCoeff();
  if (b1.size() > 0) m = std::max(m, b1.cwiseAbs().maxCoeff());
  m = std::max(m, w2.cwiseAbs().maxCoeff());
  if (b2.size() > 0) m = std::max(m, b2.cwiseAbs().maxCoeff());
  return m;
}

UnitEmbedding encode(const Encoder& enc, const Eigen::VectorXd& feature) {
  const Eigen::VectorXd hidden = (enc.w1 * feature + enc.b1).cwiseMax(0.0);
  const Eigen::VectorXd pre = enc.w2 * hidden + enc.b2;
  const double norm = pre.norm();
  if (norm < kDegenerateNorm)
    throw DegenerateEmbedding("pre-normalization norm below 1e-8");
  return UnitEmbedding{pre / norm};
}

void accumulate_encode_backward(const Encoder& enc, const Eigen::VectorXd& feature,
                                const Eigen::VectorXd& upstream, EncoderGrad& into) {
  const Eigen::VectorXd pre_hidden = enc.w1 * feature + enc.b1;
  const Eigen::VectorXd hidden = pre_hidden.cwiseMax(0.0);
  const Eigen::VectorXd pre = enc.w2 * hidden + enc.b2;
  const double norm = pre.norm();
  if (norm < kDegenerateNorm)
    throw DegenerateEmbedding("pre-normalization norm below 1e-8");
  const Eigen::VectorXd e = pre / norm;
  // d(u . e)/d(pre): normalization Jacobian removes the radial component.
  const Eigen::VectorXd d_pre = (upstream - upstream.dot(e) * e) / norm;
  into.w2.noalias() += d_pre * hidden.transpose();
  into.b2 += d_pre;
  Eigen::VectorXd d_hidden = enc.w2.transpose() * d_pre;
  for (int i = 0; i < d_hidden.size(); ++i) {
    if (pre_hidden(i) <= 0.0) d_hidden(i) = 0.0;
  }
  into.w1.noalias() += d_hidden * feature.transpose();
  into.b1 += d_hidden;
}

EncoderGrad encode_backward(const Encoder& enc, const Eigen::VectorXd& feature,
                            const Eigen::VectorXd& upstream) {
  EncoderGrad g = EncoderGrad::zero(enc);
  accumulate_encode_backward(enc, feature, upstream, g);
  return g;
}

namespace {

// Canonical reduction order: indices sorted by lexicographic comparison of
// the vectors' values. Permuting the inputs leaves the sum bit-identical.
Eigen::VectorXd ordered_mean(const std::vector<UnitEmbedding>& embeddings) {
  std::vector<std::size_t> order(embeddings.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& va = embeddings[a].values;
    const auto& vb = embeddings[b].values;
    return std::lexicographical_compare(va.data(), va.data() + va.size(),
                                        vb.data(), vb.data() + vb.size());
  });
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(embeddings.front().values.size());
  for (std::size_t idx : order) sum += embeddings[idx].values;
  return sum / static_cast<double>(embeddings.size());
}

}  // namespace

TrackEmbedding aggregate(const std::vector<UnitEmbedding>& embeddings) {
  if (embeddings.empty()) throw DegenerateAggregate("empty embedding list");
  const Eigen::VectorXd mean = ordered_mean(embeddings);
  const double norm = mean.norm();
  if (norm < kDegenerateNorm)
    throw DegenerateAggregate("aggregate mean norm below 1e-8");
  return TrackEmbedding{mean / norm, static_cast<int>(embeddings.size())};
}

std::vector<Eigen::VectorXd> aggregate_backward(const std::vector<UnitEmbedding>& embeddings,
                                                const Eigen::VectorXd& upstream) {
  if (embeddings.empty()) throw DegenerateAggregate("empty embedding list");
  const Eigen::VectorXd mean = ordered_mean(embeddings);
  const double norm = mean.norm();
  if (norm < kDegenerateNorm)
    throw DegenerateAggregate("aggregate mean norm below 1e-8");
  const Eigen::VectorXd g = mean / norm;
  // Same gradient for every input: normalization Jacobian over n.
  const Eigen::VectorXd per_input =
      (upstream - upstream.dot(g) * g) / (norm * static_cast<double>(embeddings.size()));
  return std::vector<Eigen::VectorXd>(embeddings.size(), per_input);
}

double instance_track_distance(const UnitEmbedding& inst, const TrackEmbedding& track) {
  return 1.0 - inst.values.dot(track.values);
}

}  // namespace semitcl
