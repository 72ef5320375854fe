#pragma once

#include <Eigen/Core>

#include "semitcl/types.hpp"

namespace semitcl {

// Constant-velocity box filter over (cx, cy, aspect, height) and their
// velocities. Noise scales track box height, matching common practice for
// box-space filters.
struct KalmanState {
  Eigen::Matrix<double, 8, 1> mean;
  Eigen::Matrix<double, 8, 8> covariance;
};

KalmanState kalman_initiate(const Box& box);
KalmanState kalman_predict(const KalmanState& state);
KalmanState kalman_update(const KalmanState& state, const Box& box);

// Box implied by the state mean.
Box kalman_state_box(const KalmanState& state);

}  // namespace semitcl
