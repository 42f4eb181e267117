#include "triflow/fem/quadrature.hpp"

#include <cmath>

namespace triflow {

const std::array<TriQuadPoint, 7>& tri_quadrature_d5() {
  static const std::array<TriQuadPoint, 7> q = [] {
    std::array<TriQuadPoint, 7> a;
    const double s15 = std::sqrt(15.0);
    const double w1 = (155.0 - s15) / 1200.0, p1 = (6.0 - s15) / 21.0;
    const double w2 = (155.0 + s15) / 1200.0, p2 = (6.0 + s15) / 21.0;
    a[0] = {9.0 / 40.0, {1.0 / 3, 1.0 / 3, 1.0 / 3}};
    int k = 1;
    for (int i = 0; i < 3; ++i) {
      Eigen::Vector3d b1(p1, p1, p1), b2(p2, p2, p2);
      b1[i] = 1.0 - 2.0 * p1;
      b2[i] = 1.0 - 2.0 * p2;
      a[k++] = {w1, b1};
      a[k++] = {w2, b2};
    }
    return a;
  }();
  return q;
}

const std::array<LineQuadPoint, 3>& line_quadrature_3() {
  static const std::array<LineQuadPoint, 3> q = [] {
    const double r = std::sqrt(3.0 / 5.0);
    return std::array<LineQuadPoint, 3>{{{5.0 / 18.0, 0.5 * (1.0 - r)},
                                         {8.0 / 18.0, 0.5},
                                         {5.0 / 18.0, 0.5 * (1.0 + r)}}};
  }();
  return q;
}

}  // namespace triflow
