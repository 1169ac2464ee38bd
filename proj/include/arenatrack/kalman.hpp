#pragma once

#include <Eigen/Dense>

#include "arenatrack/frame.hpp"

namespace arenatrack {

struct KalmanParams {
  double time = 0.25;   // kal.time
  double pron = 0.1;    // kal.pron
  double mean = 1e-5;   // kal.mean
  double errc = 0.1;    // kal.errc
};

// Constant-velocity filter over (x, y, vx, vy).
class KalmanFilter {
 public:
  using Vec4 = Eigen::Matrix<double, 4, 1>;
  using Mat4 = Eigen::Matrix<double, 4, 4>;

  KalmanFilter() : KalmanFilter(KalmanParams{}) {}
  explicit KalmanFilter(const KalmanParams& p);

  void init(Point2d pos);
  void set_state(const Vec4& x) { x_ = x; }
  Point2d predict();
  // Returns the innovation z - Hx.
  Eigen::Vector2d correct(Point2d z);

  Point2d position() const { return {x_(0), x_(1)}; }
  const Vec4& state() const { return x_; }
  const Mat4& covariance() const { return P_; }
  const Mat4& A() const { return A_; }
  const Mat4& Q() const { return Q_; }
  const Eigen::Matrix2d& R() const { return R_; }

 private:
  Mat4 A_, Q_, P_;
  Eigen::Matrix<double, 2, 4> H_;
  Eigen::Matrix2d R_;
  Vec4 x_;
  double errc_;
};

}  // namespace arenatrack
