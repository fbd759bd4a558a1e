#pragma once

#include <cmath>
#include <numbers>
#include <utility>

#include <Eigen/Core>

namespace radar_odom {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
using Vec2d = Vec2<double>;

template <typename Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;

/// Wraps an angle to (-pi, pi].
template <typename Scalar>
Scalar normalize_angle(Scalar theta) {
  constexpr Scalar kTwoPi = Scalar(2) * std::numbers::pi_v<Scalar>;
  Scalar wrapped = std::remainder(theta, kTwoPi);
  if (wrapped <= -std::numbers::pi_v<Scalar>) wrapped += kTwoPi;
  return wrapped;
}

template <typename Scalar>
Mat2<Scalar> rotation(Scalar theta) {
  const Scalar c = std::cos(theta), s = std::sin(theta);
  Mat2<Scalar> rot;
  rot << c, -s, s, c;
  return rot;
}

/// Derivative of rotation(theta) with respect to theta.
template <typename Scalar>
Mat2<Scalar> rotation_derivative(Scalar theta) {
  const Scalar c = std::cos(theta), s = std::sin(theta);
  Mat2<Scalar> d;
  d << -s, -c, c, -s;
  return d;
}

/// Rigid transform in the plane. Also used as a rate (per second) when it
/// holds a velocity, in which case theta is a yaw rate and is not wrapped.
template <typename Scalar>
struct Pose2 {
  Scalar x{0};
  Scalar y{0};
  Scalar theta{0};

  Pose2() = default;
  Pose2(Scalar x_, Scalar y_, Scalar theta_) : x(x_), y(y_), theta(normalize_angle(theta_)) {}

  static Pose2 identity() { return {}; }

  Vec2<Scalar> translation() const { return {x, y}; }
  Mat2<Scalar> rotation_matrix() const { return rotation(theta); }

  /// 3x3 homogeneous matrix.
  Eigen::Matrix<Scalar, 3, 3> matrix() const {
    Eigen::Matrix<Scalar, 3, 3> m = Eigen::Matrix<Scalar, 3, 3>::Identity();
    m.template topLeftCorner<2, 2>() = rotation_matrix();
    m.template topRightCorner<2, 1>() = translation();
    return m;
  }

  Eigen::Matrix<Scalar, 3, 1> vector() const { return {x, y, theta}; }

  friend bool operator==(const Pose2&, const Pose2&) = default;
};

using Pose2d = Pose2<double>;

/// Velocity in (x, y, theta) per second; theta is a rate, never wrapped.
template <typename Scalar>
struct Twist2 {
  Scalar vx{0};
  Scalar vy{0};
  Scalar omega{0};

  friend bool operator==(const Twist2&, const Twist2&) = default;
};

using Twist2d = Twist2<double>;

/// a ∘ b: applies b first, then a.
template <typename Scalar>
Pose2<Scalar> compose(const Pose2<Scalar>& a, const Pose2<Scalar>& b) {
  const Vec2<Scalar> t = a.rotation_matrix() * b.translation() + a.translation();
  return {t.x(), t.y(), a.theta + b.theta};
}

template <typename Scalar>
Pose2<Scalar> operator*(const Pose2<Scalar>& a, const Pose2<Scalar>& b) {
  return compose(a, b);
}

template <typename Scalar>
Pose2<Scalar> inverse(const Pose2<Scalar>& p) {
  const Vec2<Scalar> t = -(p.rotation_matrix().transpose() * p.translation());
  return {t.x(), t.y(), -p.theta};
}

template <typename Scalar, typename Derived>
Vec2<Scalar> transform_point(const Pose2<Scalar>& p, const Eigen::MatrixBase<Derived>& v) {
  return p.rotation_matrix() * v + p.translation();
}

/// Pose reached by moving at constant velocity for dt seconds, with the
/// (x, y, theta) components scaled linearly.
template <typename Scalar>
Pose2<Scalar> scale(const Twist2<Scalar>& v, Scalar dt) {
  return {v.vx * dt, v.vy * dt, v.omega * dt};
}

/// Symmetric 2x2 matrix stored as its upper triangle.
template <typename Scalar>
struct SymMat2 {
  Scalar a11{0};
  Scalar a12{0};
  Scalar a22{0};

  Scalar trace() const { return a11 + a22; }

  Mat2<Scalar> dense() const {
    Mat2<Scalar> m;
    m << a11, a12, a12, a22;
    return m;
  }

  static SymMat2 from_dense(const Mat2<Scalar>& m) { return {m(0, 0), Scalar(0.5) * (m(0, 1) + m(1, 0)), m(1, 1)}; }
};

using SymMat2d = SymMat2<double>;

template <typename Scalar>
struct MinEigen {
  Scalar value{0};
  Vec2<Scalar> vector{Scalar(1), Scalar(0)};
  Scalar max_value{0};
  /// Set when min/max eigenvalue ratio exceeds the isotropy threshold.
  bool degenerate{false};
};

/// Smallest eigenpair of a symmetric 2x2 matrix in closed form.
///
/// The eigenvalues are mean -/+ hypot((a11 - a22) / 2, a12); the principal
/// axis sits at half the angle atan2(2 a12, a11 - a22), so the minor axis is
/// that direction rotated by a quarter turn.
template <typename Scalar>
MinEigen<Scalar> eigen_min(const SymMat2<Scalar>& m, Scalar isotropy_ratio = Scalar(0.9)) {
  const Scalar mean = Scalar(0.5) * (m.a11 + m.a22);
  const Scalar half_diff = Scalar(0.5) * (m.a11 - m.a22);
  const Scalar radius = std::hypot(half_diff, m.a12);
  const Scalar phi = Scalar(0.5) * std::atan2(m.a12, half_diff);

  MinEigen<Scalar> out;
  out.value = mean - radius;
  out.max_value = mean + radius;
  out.vector = {-std::sin(phi), std::cos(phi)};
  if (out.max_value <= Scalar(0)) {
    out.degenerate = true;
  } else {
    out.degenerate = out.value / out.max_value > isotropy_ratio;
  }
  return out;
}

}  // namespace radar_odom
