#include <doctest.h>

#include <algorithm>

#include "semitcl/encoder.hpp"
#include "semitcl/errors.hpp"
#include "test_support.hpp"

using namespace semitcl;

namespace {

Encoder identity_encoder(int dim) {
  Encoder enc;
  enc.w1 = Eigen::MatrixXd::Identity(dim, dim);
  enc.b1 = Eigen::VectorXd::Zero(dim);
  enc.w2 = Eigen::MatrixXd::Identity(dim, dim);
  enc.b2 = Eigen::VectorXd::Zero(dim);
  return enc;
}

}  // namespace

TEST_CASE("identity network normalizes (3,4)") {
  const Encoder enc = identity_encoder(4);
  Eigen::VectorXd x(4);
  x << 3, 4, 0, 0;
  const UnitEmbedding e = encode(enc, x);
  CHECK(e.values(0) == doctest::Approx(0.6));
  CHECK(e.values(1) == doctest::Approx(0.8));
  CHECK(e.values(2) == doctest::Approx(0.0));
  CHECK(e.values(3) == doctest::Approx(0.0));
}

TEST_CASE("all-zero parameters are degenerate") {
  Encoder enc;
  enc.w1 = Eigen::MatrixXd::Zero(3, 3);
  enc.b1 = Eigen::VectorXd::Zero(3);
  enc.w2 = Eigen::MatrixXd::Zero(3, 3);
  enc.b2 = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd x(3);
  x << 1, 2, 3;
  CHECK_THROWS_AS(encode(enc, x), DegenerateEmbedding);
}

TEST_CASE("random encoders emit unit-norm outputs") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Encoder enc = Encoder::random(6, 5, 8, rng);
    const Eigen::VectorXd x = testsup::random_vector(6, rng);
    const UnitEmbedding e = encode(enc, x);
    CHECK(std::abs(e.values.norm() - 1.0) < 1e-6);
  }
}

TEST_CASE("encode is invariant to joint positive rescaling of the output layer") {
  Rng rng(12);
  Encoder enc = Encoder::random(6, 5, 8, rng);
  enc.b2 = testsup::random_vector(8, rng, 0.1);
  const Eigen::VectorXd x = testsup::random_vector(6, rng);
  const UnitEmbedding base = encode(enc, x);
  Encoder scaled = enc;
  scaled.w2 *= 3.7;
  scaled.b2 *= 3.7;
  const UnitEmbedding rescaled = encode(scaled, x);
  CHECK((base.values - rescaled.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("zero upstream gives zero parameter gradients") {
  Rng rng(13);
  const Encoder enc = Encoder::random(6, 5, 8, rng);
  const Eigen::VectorXd x = testsup::random_vector(6, rng);
  const EncoderGrad g = encode_backward(enc, x, Eigen::VectorXd::Zero(8));
  CHECK(g.max_abs() == 0.0);
}

TEST_CASE("upstream parallel to the output kills all gradients") {
  Rng rng(14);
  const Encoder enc = Encoder::random(6, 5, 8, rng);
  const Eigen::VectorXd x = testsup::random_vector(6, rng);
  const UnitEmbedding e = encode(enc, x);
  const EncoderGrad g = encode_backward(enc, x, 2.5 * e.values);
  CHECK(g.max_abs() < 1e-10);
}

TEST_CASE("analytic encoder gradients match central differences") {
  Rng rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    Encoder enc = Encoder::random(6, 5, 8, rng);
    enc.b1 = testsup::random_vector(5, rng, 0.1);
    enc.b2 = testsup::random_vector(8, rng, 0.1);
    const Eigen::VectorXd x = testsup::random_vector(6, rng);
    const Eigen::VectorXd u = testsup::random_vector(8, rng);
    const EncoderGrad g = encode_backward(enc, x, u);

    auto objective = [&](const Encoder& e2) { return u.dot(encode(e2, x).values); };
    auto check_entry = [&](double analytic, double* slot) {
      const double saved = *slot;
      const double numeric = testsup::central_difference(
          [&](double v) {
            *slot = v;
            const double out = objective(enc);
            return out;
          },
          saved);
      *slot = saved;
      CHECK(testsup::relative_error(analytic, numeric) < 1e-5);
    };

    Encoder& m = enc;
    for (int r = 0; r < m.w1.rows(); ++r)
      for (int c = 0; c < m.w1.cols(); ++c) check_entry(g.w1(r, c), &m.w1(r, c));
    for (int i = 0; i < m.b1.size(); ++i) check_entry(g.b1(i), &m.b1(i));
    for (int r = 0; r < m.w2.rows(); ++r)
      for (int c = 0; c < m.w2.cols(); ++c) check_entry(g.w2(r, c), &m.w2(r, c));
    for (int i = 0; i < m.b2.size(); ++i) check_entry(g.b2(i), &m.b2(i));
  }
}

TEST_CASE("aggregate of identical inputs returns the input") {
  Rng rng(16);
  const Eigen::VectorXd v = testsup::random_unit(8, rng);
  const TrackEmbedding t = aggregate({UnitEmbedding{v}, UnitEmbedding{v}, UnitEmbedding{v}});
  CHECK((t.values - v).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(t.count == 3);
}

TEST_CASE("aggregate of an orthonormal pair") {
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(4);
  Eigen::VectorXd e2 = Eigen::VectorXd::Zero(4);
  e1(0) = 1.0;
  e2(1) = 1.0;
  const TrackEmbedding t = aggregate({UnitEmbedding{e1}, UnitEmbedding{e2}});
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(t.values(0) == doctest::Approx(inv_sqrt2));
  CHECK(t.values(1) == doctest::Approx(inv_sqrt2));
}

TEST_CASE("antipodal aggregate is degenerate") {
  Rng rng(17);
  const Eigen::VectorXd v = testsup::random_unit(8, rng);
  CHECK_THROWS_AS(aggregate({UnitEmbedding{v}, UnitEmbedding{-v}}), DegenerateAggregate);
}

TEST_CASE("aggregate is permutation-invariant bit for bit") {
  Rng rng(18);
  std::vector<UnitEmbedding> inputs;
  for (int i = 0; i < 7; ++i) inputs.push_back(UnitEmbedding{testsup::random_unit(8, rng)});
  const TrackEmbedding base = aggregate(inputs);
  std::vector<UnitEmbedding> shuffled = inputs;
  for (int trial = 0; trial < 10; ++trial) {
    for (std::size_t i = shuffled.size(); i > 1; --i)
      std::swap(shuffled[i - 1], shuffled[static_cast<std::size_t>(
                                     rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
    const TrackEmbedding again = aggregate(shuffled);
    CHECK(std::equal(base.values.data(), base.values.data() + base.values.size(),
                     again.values.data()));
  }
}

TEST_CASE("aggregate_backward matches central differences") {
  Rng rng(19);
  std::vector<UnitEmbedding> inputs;
  for (int i = 0; i < 4; ++i) inputs.push_back(UnitEmbedding{testsup::random_unit(6, rng)});
  const Eigen::VectorXd u = testsup::random_vector(6, rng);
  const auto grads = aggregate_backward(inputs, u);
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    for (int i = 0; i < 6; ++i) {
      const double saved = inputs[k].values(i);
      const double numeric = testsup::central_difference(
          [&](double v) {
            inputs[k].values(i) = v;
            const double out = u.dot(aggregate(inputs).values);
            return out;
          },
          saved);
      inputs[k].values(i) = saved;
      CHECK(testsup::relative_error(grads[k](i), numeric) < 1e-5);
    }
  }
}

TEST_CASE("instance-track distance endpoints") {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(3);
  a(0) = 1.0;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(3);
  b(1) = 1.0;
  CHECK(instance_track_distance(UnitEmbedding{a}, TrackEmbedding{a, 1}) ==
        doctest::Approx(0.0));
  CHECK(instance_track_distance(UnitEmbedding{a}, TrackEmbedding{b, 1}) ==
        doctest::Approx(1.0));
  CHECK(instance_track_distance(UnitEmbedding{a}, TrackEmbedding{-a, 1}) ==
        doctest::Approx(2.0));
  // dot-product symmetry
  Rng rng(20);
  const Eigen::VectorXd u = testsup::random_unit(5, rng);
  const Eigen::VectorXd v = testsup::random_unit(5, rng);
  CHECK(instance_track_distance(UnitEmbedding{u}, TrackEmbedding{v, 1}) ==
        instance_track_distance(UnitEmbedding{v}, TrackEmbedding{u, 1}));
}
