#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "triflow/geometry/curve_network.hpp"
#include "triflow/geometry/network_ops.hpp"

namespace triflow::testing {

/// Brute-force polygon area oracle (shoelace), independent of region_area's
/// loop machinery.
inline double shoelace_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (size_t i = 0; i < poly.size(); ++i)
    a += cross2(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

/// Closed regular N-gon inscribed in a circle, CCW (normals outward).
inline CurveNetwork regular_ngon_net(int n, double radius, const Vec2& center = Vec2(0, 0),
                                     const Box2& box = Box2{Vec2(-2, -2), Vec2(2, 2)}) {
  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i) {
    const double th = 2.0 * M_PI * i / n;
    pts.emplace_back(center.x() + radius * std::cos(th), center.y() + radius * std::sin(th));
  }
  NetworkBuilder b(box);
  b.add_curve(pts, true);
  b.add_region({{0, -1}});  // region 0: exterior (normal points outward of the n-gon)
  b.add_region({{0, +1}});  // region 1: the n-gon interior
  return b.build();
}

/// Symmetric standard double bubble sampled from the classical arcs
/// (radii r, 240-degree arcs, straight middle). Curves: 0 = left arc,
/// 1 = right arc, 2 = middle segment; junctions at (0, +-sqrt(3)/2 r).
/// Regions: 0 = left bubble, 1 = right bubble, 2 = exterior.
inline CurveNetwork double_bubble_arcs(double r, int n_arc, int n_mid,
                                       const Box2& box = Box2{Vec2(-1, -1), Vec2(1, 1)}) {
  const double h = std::sqrt(3.0) / 2.0 * r;
  std::vector<Vec2> left, right, mid;
  for (int i = 0; i <= n_arc; ++i) {
    const double th = (60.0 + 240.0 * i / n_arc) * M_PI / 180.0;
    left.emplace_back(-r / 2 + r * std::cos(th), r * std::sin(th));
  }
  for (int i = 0; i <= n_arc; ++i) {
    const double th = (120.0 - 240.0 * i / n_arc) * M_PI / 180.0;
    right.emplace_back(r / 2 + r * std::cos(th), r * std::sin(th));
  }
  for (int i = 0; i <= n_mid; ++i) mid.emplace_back(0.0, h - 2.0 * h * i / n_mid);

  NetworkBuilder b(box);
  b.add_curve(left);   // 0: top junction -> bottom junction, bulging left
  b.add_curve(right);  // 1: top junction -> bottom junction, bulging right
  b.add_curve(mid);    // 2: top -> bottom along x=0
  using CE = CurveEnd;
  b.add_junction({{{0, CE::start}, {1, CE::start}, {2, CE::start}}});
  b.add_junction({{{0, CE::end}, {1, CE::end}, {2, CE::end}}});
  // Normals: left arc nu points out of the left bubble (radially out of its
  // circle); right arc nu points *into* the right bubble; middle nu = (-1,0)
  // points into the left bubble.
  b.add_region({{0, +1}, {2, -1}});  // left bubble
  b.add_region({{1, -1}, {2, +1}});  // right bubble
  b.add_region({{0, -1}, {1, +1}});  // exterior
  return b.build();
}

inline std::mt19937& rng() {
  static std::mt19937 gen(0x5eed);
  return gen;
}

}  // namespace triflow::testing
