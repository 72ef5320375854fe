#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "semitcl/errors.hpp"
#include "semitcl/losses.hpp"
#include "test_support.hpp"

using namespace semitcl;

namespace {

UnitEmbedding unit2(double x, double y) {
  Eigen::VectorXd v(2);
  v << x, y;
  return UnitEmbedding{v};
}

LossConfig tau(double t) {
  LossConfig cfg;
  cfg.temperature = t;
  return cfg;
}

}  // namespace

TEST_CASE("tcl with a single sub-track has zero loss") {
  ContrastBatch batch;
  batch.anchors = {unit2(1, 0)};
  batch.anchor_labels = {0};
  batch.subtracks = {TrackEmbedding{unit2(1, 0).values, 2}};
  batch.subtrack_labels = {0};
  batch.positive_sets = {{0}};
  const auto res = tcl_loss(batch, tau(0.07));
  CHECK(res.loss == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("tcl two-term softmax hand value") {
  ContrastBatch batch;
  batch.anchors = {unit2(1, 0)};
  batch.anchor_labels = {0};
  batch.subtracks = {TrackEmbedding{unit2(1, 0).values, 1},
                     TrackEmbedding{unit2(0, 1).values, 1}};
  batch.subtrack_labels = {0, 1};
  batch.positive_sets = {{0}};
  const auto res = tcl_loss(batch, tau(1.0));
  CHECK(res.loss == doctest::Approx(std::log(1.0 + std::exp(-1.0))).epsilon(1e-12));
}

TEST_CASE("tcl throws on an empty batch") {
  ContrastBatch batch;
  CHECK_THROWS_AS(tcl_loss(batch, tau(1.0)), EmptyBatch);
}

TEST_CASE("anchors with empty positive sets contribute zero") {
  ContrastBatch batch;
  batch.anchors = {unit2(1, 0), unit2(0, 1)};
  batch.anchor_labels = {0, 5};
  batch.subtracks = {TrackEmbedding{unit2(1, 0).values, 1},
                     TrackEmbedding{unit2(0, 1).values, 1}};
  batch.subtrack_labels = {0, 1};
  batch.positive_sets = make_positive_sets(batch.anchor_labels, batch.subtrack_labels);
  REQUIRE(batch.positive_sets[1].empty());
  const auto res = tcl_loss(batch, tau(1.0));
  CHECK(res.loss == doctest::Approx(std::log(1.0 + std::exp(-1.0))).epsilon(1e-12));
  CHECK(res.grad_anchors.row(1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("tcl gradients match central differences") {
  Rng rng(100);
  for (int trial = 0; trial < 8; ++trial) {
    const double t = trial % 2 == 0 ? 0.07 : 1.0;
    ContrastBatch batch = testsup::random_batch(
        static_cast<int>(rng.uniform_int(1, 8)), static_cast<int>(rng.uniform_int(1, 6)), 6,
        3, rng);
    const auto res = tcl_loss(batch, tau(t));
    auto loss_of = [&]() { return tcl_loss(batch, tau(t)).loss; };
    for (std::size_t i = 0; i < batch.anchors.size(); ++i) {
      for (int d = 0; d < 6; ++d) {
        const double saved = batch.anchors[i].values(d);
        const double numeric = testsup::central_difference(
            [&](double v) {
              batch.anchors[i].values(d) = v;
              return loss_of();
            },
            saved);
        batch.anchors[i].values(d) = saved;
        CHECK(testsup::relative_error(res.grad_anchors(static_cast<Eigen::Index>(i), d),
                                      numeric) < 1e-5);
      }
    }
    for (std::size_t j = 0; j < batch.subtracks.size(); ++j) {
      for (int d = 0; d < 6; ++d) {
        const double saved = batch.subtracks[j].values(d);
        const double numeric = testsup::central_difference(
            [&](double v) {
              batch.subtracks[j].values(d) = v;
              return loss_of();
            },
            saved);
        batch.subtracks[j].values(d) = saved;
        CHECK(testsup::relative_error(res.grad_units(static_cast<Eigen::Index>(j), d),
                                      numeric) < 1e-5);
      }
    }
  }
}

TEST_CASE("literal ratio form gradients match central differences") {
  Rng rng(101);
  LossConfig cfg = tau(0.5);
  cfg.literal_ratio_form = true;
  ContrastBatch batch = testsup::random_batch(5, 4, 6, 2, rng);
  const auto res = tcl_loss(batch, cfg);
  CHECK(res.loss <= 0.0);  // negative mean softmax ratio
  for (std::size_t i = 0; i < batch.anchors.size(); ++i) {
    for (int d = 0; d < 6; ++d) {
      const double saved = batch.anchors[i].values(d);
      const double numeric = testsup::central_difference(
          [&](double v) {
            batch.anchors[i].values(d) = v;
            return tcl_loss(batch, cfg).loss;
          },
          saved);
      batch.anchors[i].values(d) = saved;
      CHECK(testsup::relative_error(res.grad_anchors(static_cast<Eigen::Index>(i), d),
                                    numeric) < 1e-5);
    }
  }
}

TEST_CASE("scl with one positive and one contrast element is zero") {
  const std::vector<UnitEmbedding> insts = {unit2(1, 0), unit2(1, 0)};
  const std::vector<std::int64_t> labels = {4, 4};
  const auto res = scl_loss(insts, labels, tau(0.07));
  CHECK(res.loss == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("scl three-instance hand value") {
  const std::vector<UnitEmbedding> insts = {unit2(1, 0), unit2(1, 0), unit2(0, 1)};
  const std::vector<std::int64_t> labels = {0, 0, 1};
  const auto res = scl_loss(insts, labels, tau(1.0));
  CHECK(res.loss == doctest::Approx(2.0 * std::log(1.0 + std::exp(-1.0))).epsilon(1e-12));
}

TEST_CASE("scl agrees with an independent implementation") {
  Rng rng(102);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(2, 9));
    std::vector<UnitEmbedding> insts;
    std::vector<std::int64_t> labels;
    for (int i = 0; i < n; ++i) {
      insts.push_back(UnitEmbedding{testsup::random_unit(6, rng)});
      labels.push_back(rng.uniform_int(0, 2));
    }
    const double mine = scl_loss(insts, labels, tau(0.5)).loss;
    const double oracle = testsup::naive_scl_loss(insts, labels, 0.5);
    CHECK(mine == doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("scl gradients match central differences") {
  Rng rng(103);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(2, 8));
    std::vector<UnitEmbedding> insts;
    std::vector<std::int64_t> labels;
    for (int i = 0; i < n; ++i) {
      insts.push_back(UnitEmbedding{testsup::random_unit(6, rng)});
      labels.push_back(rng.uniform_int(0, 2));
    }
    const auto res = scl_loss(insts, labels, tau(0.07));
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < 6; ++d) {
        const double saved = insts[i].values(d);
        const double numeric = testsup::central_difference(
            [&](double v) {
              insts[i].values(d) = v;
              return scl_loss(insts, labels, tau(0.07)).loss;
            },
            saved);
        insts[i].values(d) = saved;
        CHECK(testsup::relative_error(res.grad(i, d), numeric) < 1e-5);
      }
    }
  }
}

TEST_CASE("tcl reduces to the two-set instance loss on singleton sub-tracks") {
  Rng rng(104);
  for (int trial = 0; trial < 50; ++trial) {
    ContrastBatch batch = testsup::random_batch(
        static_cast<int>(rng.uniform_int(1, 10)), static_cast<int>(rng.uniform_int(1, 8)),
        8, 3, rng);
    for (auto& sub : batch.subtracks) sub.count = 1;
    std::vector<UnitEmbedding> contrast;
    for (const auto& sub : batch.subtracks) contrast.push_back(UnitEmbedding{sub.values});
    const double tcl = tcl_loss(batch, tau(0.07)).loss;
    const double scl =
        scl_cross_loss(batch.anchors, batch.anchor_labels, contrast,
                       batch.subtrack_labels, tau(0.07))
            .loss;
    CHECK(std::abs(tcl - scl) <= 1e-12);
  }
}

TEST_CASE("tcl is invariant under a global rotation") {
  Rng rng(105);
  ContrastBatch batch = testsup::random_batch(6, 5, 8, 3, rng);
  const double base = tcl_loss(batch, tau(0.07)).loss;
  // Random orthogonal matrix from a QR factorization.
  Eigen::MatrixXd g(8, 8);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) g(r, c) = rng.gaussian();
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
  for (auto& a : batch.anchors) a.values = q * a.values;
  for (auto& s : batch.subtracks) s.values = q * s.values;
  const double rotated = tcl_loss(batch, tau(0.07)).loss;
  CHECK(std::abs(base - rotated) < 1e-9);
}

TEST_CASE("loss decreases with temperature when the positive is the argmax logit") {
  ContrastBatch batch;
  batch.anchors = {unit2(1, 0)};
  batch.anchor_labels = {0};
  batch.subtracks = {TrackEmbedding{unit2(0.8, std::sqrt(1 - 0.64)).values, 1},
                     TrackEmbedding{unit2(0, 1).values, 1},
                     TrackEmbedding{unit2(-1, 0).values, 1}};
  batch.subtrack_labels = {0, 1, 2};
  batch.positive_sets = {{0}};
  const double l_half = tcl_loss(batch, tau(0.5)).loss;
  const double l_007 = tcl_loss(batch, tau(0.07)).loss;
  const double l_001 = tcl_loss(batch, tau(0.01)).loss;
  CHECK(l_half > l_007);
  CHECK(l_007 > l_001);
  CHECK(l_001 >= 0.0);
}

TEST_CASE("ce loss basics") {
  Eigen::VectorXd uniform = Eigen::VectorXd::Zero(4);
  CHECK(ce_loss(uniform, 2).loss == doctest::Approx(std::log(4.0)).epsilon(1e-12));

  Eigen::VectorXd saturated = Eigen::VectorXd::Zero(4);
  saturated(1) = 1000.0;
  CHECK(ce_loss(saturated, 1).loss < 1e-9);

  Eigen::VectorXd logits(3);
  logits << 1, 2, 3;
  const double expected = -1.0 + std::log(std::exp(1.0) + std::exp(2.0) + std::exp(3.0));
  CHECK(ce_loss(logits, 0).loss == doctest::Approx(expected).epsilon(1e-12));

  CHECK_THROWS_AS(ce_loss(logits, 3), BadLabel);
  CHECK_THROWS_AS(ce_loss(logits, -1), BadLabel);
}

TEST_CASE("ce gradient sums to zero and matches central differences") {
  Rng rng(106);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd logits = testsup::random_vector(5, rng, 2.0);
    const int label = static_cast<int>(rng.uniform_int(0, 4));
    const auto res = ce_loss(logits, label);
    CHECK(std::abs(res.grad_logits.sum()) < 1e-12);
    for (int i = 0; i < 5; ++i) {
      const double saved = logits(i);
      const double numeric = testsup::central_difference(
          [&](double v) {
            logits(i) = v;
            return ce_loss(logits, label).loss;
          },
          saved);
      logits(i) = saved;
      CHECK(testsup::relative_error(res.grad_logits(i), numeric) < 1e-5);
    }
  }
}

TEST_CASE("margin loss cases") {
  Rng rng(107);
  const UnitEmbedding a{testsup::random_unit(6, rng)};
  LossConfig cfg;
  cfg.margin = 1.0;

  CHECK(margin_loss(a, a, true, cfg).loss == doctest::Approx(0.0));
  CHECK(margin_loss(a, a, false, cfg).loss == doctest::Approx(1.0));

  const UnitEmbedding apart{-a.values};  // squared distance 4 >= margin
  CHECK(margin_loss(a, apart, false, cfg).loss == doctest::Approx(0.0));
}

TEST_CASE("margin gradients match central differences") {
  Rng rng(108);
  LossConfig cfg;
  cfg.margin = 1.0;
  for (int trial = 0; trial < 10; ++trial) {
    UnitEmbedding a{testsup::random_unit(6, rng)};
    UnitEmbedding b{testsup::random_unit(6, rng)};
    const bool same = trial % 2 == 0;
    const auto res = margin_loss(a, b, same, cfg);
    for (int d = 0; d < 6; ++d) {
      double saved = a.values(d);
      double numeric = testsup::central_difference(
          [&](double v) {
            a.values(d) = v;
            return margin_loss(a, b, same, cfg).loss;
          },
          saved);
      a.values(d) = saved;
      CHECK(testsup::relative_error(res.grad_a(d), numeric) < 1e-5);

      saved = b.values(d);
      numeric = testsup::central_difference(
          [&](double v) {
            b.values(d) = v;
            return margin_loss(a, b, same, cfg).loss;
          },
          saved);
      b.values(d) = saved;
      CHECK(testsup::relative_error(res.grad_b(d), numeric) < 1e-5);
    }
  }
}
