// Copyright 2026 the ccmpc authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

namespace ccmpc {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Mat42 = Eigen::Matrix<double, 4, 2>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Axis-aligned rectangle given by its lower-left and upper-right corners.
struct Rect {
  Vec2 lo{0.0, 0.0};
  Vec2 hi{0.0, 0.0};

  double width() const { return hi.x() - lo.x(); }
  double height() const { return hi.y() - lo.y(); }
  Vec2 center() const { return 0.5 * (lo + hi); }
  double diagonal() const { return (hi - lo).norm(); }
  bool contains(const Vec2& p) const {
    return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y();
  }
};

}  // namespace ccmpc
