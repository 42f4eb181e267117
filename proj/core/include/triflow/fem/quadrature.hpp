#pragma once

#include <array>

#include "triflow/common.hpp"

namespace triflow {

/// Degree-5 exact 7-point rule on the reference triangle; weights sum to 1
/// and are applied as w * area(T).
struct TriQuadPoint {
  double w;
  Eigen::Vector3d bary;
};
const std::array<TriQuadPoint, 7>& tri_quadrature_d5();

/// 3-point Gauss-Legendre on [0,1] (degree 5).
struct LineQuadPoint {
  double w, t;
};
const std::array<LineQuadPoint, 3>& line_quadrature_3();

/// Quadratic Lagrange basis on a triangle: local nodes 0,1,2 at the
/// vertices, 3,4,5 at the midpoints of edges (1,2), (2,0), (0,1).
inline void p2_values(const Eigen::Vector3d& l, double out[6]) {
  out[0] = l[0] * (2 * l[0] - 1);
  out[1] = l[1] * (2 * l[1] - 1);
  out[2] = l[2] * (2 * l[2] - 1);
  out[3] = 4 * l[1] * l[2];
  out[4] = 4 * l[2] * l[0];
  out[5] = 4 * l[0] * l[1];
}

/// Gradients of the barycentric coordinates of triangle (a,b,c).
inline void lambda_gradients(const Vec2& a, const Vec2& b, const Vec2& c, Vec2 grad[3]) {
  const double inv2A = 1.0 / cross2(b - a, c - a);
  grad[0] = inv2A * rot_cw(c - b);
  grad[1] = inv2A * rot_cw(a - c);
  grad[2] = inv2A * rot_cw(b - a);
}

inline void p2_gradients(const Eigen::Vector3d& l, const Vec2 grad_l[3], Vec2 out[6]) {
  out[0] = (4 * l[0] - 1) * grad_l[0];
  out[1] = (4 * l[1] - 1) * grad_l[1];
  out[2] = (4 * l[2] - 1) * grad_l[2];
  out[3] = 4 * (l[1] * grad_l[2] + l[2] * grad_l[1]);
  out[4] = 4 * (l[2] * grad_l[0] + l[0] * grad_l[2]);
  out[5] = 4 * (l[0] * grad_l[1] + l[1] * grad_l[0]);
}

}  // namespace triflow
