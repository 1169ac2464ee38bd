#include "arenatrack/kalman.hpp"

#include "arenatrack/errors.hpp"

namespace arenatrack {

KalmanFilter::KalmanFilter(const KalmanParams& p) : errc_(p.errc) {
  const double t = p.time;
  A_ << 1, 0, t, 0,  //
      0, 1, 0, t,    //
      0, 0, 1, 0,    //
      0, 0, 0, 1;
  H_ << 1, 0, 0, 0,  //
      0, 1, 0, 0;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  Q_ << t4 / 4, 0, t3 / 2, 0,  //
      0, t4 / 4, 0, t3 / 2,    //
      t3 / 2, 0, t2, 0,        //
      0, t3 / 2, 0, t2;
  Q_ *= p.pron;
  R_ = Eigen::Matrix2d::Identity() * p.mean;
  x_.setZero();
  P_ = Mat4::Identity() * errc_;
}

void KalmanFilter::init(Point2d pos) {
  x_ << pos.x, pos.y, 0, 0;
  P_ = Mat4::Identity() * errc_;
}

Point2d KalmanFilter::predict() {
  x_ = A_ * x_;
  P_ = A_ * P_ * A_.transpose() + Q_;
  return position();
}

Eigen::Vector2d KalmanFilter::correct(Point2d z) {
  const Eigen::Matrix2d S = H_ * P_ * H_.transpose() + R_;
  const double det = S.determinant();
  if (!(std::abs(det) > 0)) throw ProcessingError("singular innovation covariance");
  const Eigen::Matrix<double, 4, 2> K = P_ * H_.transpose() * S.inverse();
  const Eigen::Vector2d innov = Eigen::Vector2d(z.x, z.y) - H_ * x_;
  x_ += K * innov;
  P_ = (Mat4::Identity() - K * H_) * P_;
  P_ = 0.5 * (P_ + P_.transpose()).eval();
  return innov;
}

}  // namespace arenatrack
