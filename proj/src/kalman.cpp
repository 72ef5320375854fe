#include "semitcl/kalman.hpp"

#include <algorithm>

#include <Eigen/Cholesky>

namespace semitcl {

namespace {

constexpr double kStdWeightPosition = 1.0 / 20.0;
constexpr double kStdWeightVelocity = 1.0 / 160.0;
constexpr double kMinHeight = 1e-3;

using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat8 = Eigen::Matrix<double, 8, 8>;

Vec8 measurement_of(const Box& box) {
  Vec8 z = Vec8::Zero();
  z(0) = box.cx();
  z(1) = box.cy();
  z(2) = box.height > 0.0 ? box.width / box.height : 1.0;
  z(3) = box.height;
  return z;
}

}  // namespace

KalmanState kalman_initiate(const Box& box) {
  KalmanState s;
  s.mean = measurement_of(box);
  s.mean(3) = std::max(s.mean(3), kMinHeight);
  const double h = s.mean(3);
  Eigen::Matrix<double, 8, 1> std;
  std << 2.0 * kStdWeightPosition * h, 2.0 * kStdWeightPosition * h, 1e-2,
      2.0 * kStdWeightPosition * h, 10.0 * kStdWeightVelocity * h,
      10.0 * kStdWeightVelocity * h, 1e-5, 10.0 * kStdWeightVelocity * h;
  s.covariance = std.cwiseProduct(std).asDiagonal();
  return s;
}

KalmanState kalman_predict(const KalmanState& state) {
  Mat8 f = Mat8::Identity();
  for (int i = 0; i < 4; ++i) f(i, i + 4) = 1.0;

  const double h = std::max(state.mean(3), kMinHeight);
  Eigen::Matrix<double, 8, 1> std;
  std << kStdWeightPosition * h, kStdWeightPosition * h, 1e-2,
      kStdWeightPosition * h, kStdWeightVelocity * h, kStdWeightVelocity * h,
      1e-5, kStdWeightVelocity * h;

  KalmanState out;
  out.mean = f * state.mean;
  out.mean(3) = std::max(out.mean(3), kMinHeight);
  out.covariance = f * state.covariance * f.transpose();
  out.covariance += Mat8(std.cwiseProduct(std).asDiagonal());
  out.covariance = ((out.covariance + out.covariance.transpose()) / 2.0).eval();
  return out;
}

KalmanState kalman_update(const KalmanState& state, const Box& box) {
  Eigen::Matrix<double, 4, 8> hmat = Eigen::Matrix<double, 4, 8>::Zero();
  for (int i = 0; i < 4; ++i) hmat(i, i) = 1.0;

  const double h = std::max(state.mean(3), kMinHeight);
  Eigen::Matrix<double, 4, 1> std;
  std << kStdWeightPosition * h, kStdWeightPosition * h, 1e-1,
      kStdWeightPosition * h;
  const Eigen::Matrix4d r = std.cwiseProduct(std).asDiagonal();

  const Eigen::Matrix4d s = hmat * state.covariance * hmat.transpose() + r;
  const Eigen::Matrix<double, 8, 4> pht = state.covariance * hmat.transpose();
  // Gain via Cholesky solve of S K^T = (P H^T)^T.
  const Eigen::Matrix<double, 8, 4> gain = s.llt().solve(pht.transpose()).transpose();

  const Eigen::Matrix<double, 4, 1> innovation = measurement_of(box).head<4>() - hmat * state.mean;

  KalmanState out;
  out.mean = state.mean + gain * innovation;
  out.mean(3) = std::max(out.mean(3), kMinHeight);
  out.covariance = (Mat8::Identity() - gain * hmat) * state.covariance;
  out.covariance = ((out.covariance + out.covariance.transpose()) / 2.0).eval();
  return out;
}

Box kalman_state_box(const KalmanState& state) {
  Box box;
  box.height = std::max(state.mean(3), kMinHeight);
  box.width = std::max(state.mean(2) * box.height, kMinHeight);
  box.left = state.mean(0) - box.width / 2.0;
  box.top = state.mean(1) - box.height / 2.0;
  return box;
}

}  // namespace semitcl
