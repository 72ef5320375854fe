#pragma once

#include <vector>

#include <Eigen/Core>

#include "semitcl/rng.hpp"

namespace semitcl {

// Norms below this are treated as numerically degenerate.
inline constexpr double kDegenerateNorm = 1e-8;

// Two-layer perceptron with a rectifier nonlinearity, followed by l2
// normalization of the output.
struct Encoder {
  Eigen::MatrixXd w1;  // hidden x input
  Eigen::VectorXd b1;  // hidden
  Eigen::MatrixXd w2;  // embed x hidden
  Eigen::VectorXd b2;  // embed

  int input_dim() const { return static_cast<int>(w1.cols()); }
  int hidden_dim() const { return static_cast<int>(w1.rows()); }
  int embed_dim() const { return static_cast<int>(w2.rows()); }

  // Gaussian initialization scaled by 1/sqrt(fan_in), biases zero.
  static Encoder random(int input, int hidden, int embed, Rng& rng);
};

struct UnitEmbedding {
  Eigen::VectorXd values;  // unit Euclidean norm
};

// Aggregated embedding of a (sub-)track; unit norm, count = instances folded in.
struct TrackEmbedding {
  Eigen::VectorXd values;
  int count = 0;
};

struct EncoderGrad {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;

  static EncoderGrad zero(const Encoder& enc);
  EncoderGrad& operator+=(const EncoderGrad& other);
  void scale(double factor);
  double max_abs() const;
};

// f(x) = normalize(w2 * relu(w1 * x + b1) + b2).
// Throws DegenerateEmbedding when the pre-normalization norm is below 1e-8.
UnitEmbedding encode(const Encoder& enc, const Eigen::VectorXd& feature);

// Gradient of upstream . f(feature) with respect to every encoder parameter,
// including the normalization Jacobian.
EncoderGrad encode_backward(const Encoder& enc, const Eigen::VectorXd& feature,
                            const Eigen::VectorXd& upstream);
void accumulate_encode_backward(const Encoder& enc, const Eigen::VectorXd& feature,
                                const Eigen::VectorXd& upstream, EncoderGrad& into);

// Renormalized arithmetic mean. The reduction order is canonical (inputs
// sorted lexicographically by value), so any permutation of the same inputs
// produces a bit-identical result.
TrackEmbedding aggregate(const std::vector<UnitEmbedding>& embeddings);

// Gradients of upstream . aggregate(embeddings) with respect to each input.
std::vector<Eigen::VectorXd> aggregate_backward(const std::vector<UnitEmbedding>& embeddings,
                                                const Eigen::VectorXd& upstream);

// Cosine distance 1 - dot, in [0, 2] for unit inputs.
double instance_track_distance(const UnitEmbedding& inst, const TrackEmbedding& track);

}  // namespace semitcl
