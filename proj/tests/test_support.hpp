#pragma once

// Shared helpers for the test suites: deterministic random inputs, central
// finite differences, and brute-force oracles kept independent of the library
// implementations they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "semitcl/encoder.hpp"
#include "semitcl/losses.hpp"
#include "semitcl/rng.hpp"

namespace testsup {

inline Eigen::VectorXd random_unit(int dim, semitcl::Rng& rng) {
  Eigen::VectorXd v(dim);
  double norm = 0.0;
  while (norm < 1e-8) {
    for (int i = 0; i < dim; ++i) v(i) = rng.gaussian();
    norm = v.norm();
  }
  return v / norm;
}

inline Eigen::VectorXd random_vector(int dim, semitcl::Rng& rng, double scale = 1.0) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = rng.gaussian(0.0, scale);
  return v;
}

inline double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / (std::abs(numeric) + 1e-8);
}

// Central finite difference of a scalar function along one coordinate.
inline double central_difference(const std::function<double(double)>& f, double x0,
                                 double step = 1e-5) {
  return (f(x0 + step) - f(x0 - step)) / (2.0 * step);
}

// Random contrastive batch with unit anchors and sub-track embeddings.
inline semitcl::ContrastBatch random_batch(int n, int l, int dim, int num_labels,
                                           semitcl::Rng& rng) {
  semitcl::ContrastBatch batch;
  for (int i = 0; i < n; ++i) {
    batch.anchors.push_back(semitcl::UnitEmbedding{random_unit(dim, rng)});
    batch.anchor_labels.push_back(rng.uniform_int(0, num_labels - 1));
  }
  for (int j = 0; j < l; ++j) {
    batch.subtracks.push_back(
        semitcl::TrackEmbedding{random_unit(dim, rng), static_cast<int>(rng.uniform_int(1, 5))});
    batch.subtrack_labels.push_back(rng.uniform_int(0, num_labels - 1));
  }
  batch.positive_sets = semitcl::make_positive_sets(batch.anchor_labels, batch.subtrack_labels);
  return batch;
}

// Hand-rolled supervised contrastive loss, written independently of the
// library's masked-core path: plain loops, no max subtraction.
inline double naive_scl_loss(const std::vector<semitcl::UnitEmbedding>& instances,
                             const std::vector<std::int64_t>& labels, double tau) {
  const int n = static_cast<int>(instances.size());
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    std::vector<int> positives;
    for (int j = 0; j < n; ++j)
      if (j != i && labels[j] == labels[i]) positives.push_back(j);
    if (positives.empty()) continue;
    double denom = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k == i) continue;
      denom += std::exp(instances[i].values.dot(instances[k].values) / tau);
    }
    double term = 0.0;
    for (int p : positives)
      term += -std::log(std::exp(instances[i].values.dot(instances[p].values) / tau) / denom);
    total += term / static_cast<double>(positives.size());
  }
  return total;
}

// Exhaustive assignment oracle on a padded square matrix: maximizes the
// number of feasible pairs, then minimizes cost, then picks the
// lexicographically smallest column vector.
struct BruteForceAssignment {
  std::vector<int> col_of_row;  // padded square, -1 never appears
  long feasible_pairs = 0;
  double total_cost = 0.0;
};

inline BruteForceAssignment brute_force_assignment(const Eigen::MatrixXd& cost) {
  const int rows = static_cast<int>(cost.rows());
  const int cols = static_cast<int>(cost.cols());
  const int n = std::max(rows, cols);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);

  BruteForceAssignment best;
  best.feasible_pairs = -1;
  do {
    long feasible = 0;
    double total = 0.0;
    for (int r = 0; r < rows; ++r) {
      const int c = perm[r];
      if (c < cols && std::isfinite(cost(r, c))) {
        ++feasible;
        total += cost(r, c);
      }
    }
    bool better = false;
    if (feasible > best.feasible_pairs) {
      better = true;
    } else if (feasible == best.feasible_pairs) {
      if (total < best.total_cost - 1e-12) {
        better = true;
      } else if (std::abs(total - best.total_cost) <= 1e-12) {
        better = std::lexicographical_compare(perm.begin(), perm.end(),
                                              best.col_of_row.begin(),
                                              best.col_of_row.end());
      }
    }
    if (better) {
      best.col_of_row = perm;
      best.feasible_pairs = feasible;
      best.total_cost = total;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace testsup
