#pragma once

#include <unordered_map>
#include <vector>

#include "triflow/geometry/curve_network.hpp"
#include "triflow/mesh/bulk_mesh.hpp"

namespace triflow {

/// Element-region incidence sets I(e) over the active leaves.
struct RegionIncidence {
  std::unordered_map<int, std::vector<int>> inc;  // leaf -> sorted region ids

  const std::vector<int>& of(int elem) const {
    auto it = inc.find(elem);
    if (it == inc.end()) throw ArgumentError("RegionIncidence: unknown element");
    return it->second;
  }
  bool is_cut(int elem) const { return of(elem).size() > 1; }
};

/// Exact polygonal decomposition of the cut elements plus the per-segment
/// traversal lists used by the surface-to-bulk quadrature.
struct CutGeometry {
  struct Cell {
    int region = -1;
    std::vector<Vec2> poly;  // convex, CCW
    double area = 0.0;
    Vec2 centroid{0, 0};
  };
  struct Piece {
    int elem = -1;
    double t0 = 0.0, t1 = 1.0;  // parameter range along the segment
  };

  std::unordered_map<int, std::vector<Cell>> cells;  // cut leaf -> cells
  std::vector<std::vector<Piece>> traversal;         // global segment -> pieces

  bool element_is_cut(int elem) const { return cells.count(elem) > 0; }
};

/// Incidence from centroid point-in-region tests (uncut elements) and the
/// clipped sub-polygons (cut elements).
RegionIncidence classify_elements(const BulkMesh& mesh, const CurveNetwork& net,
                                  const CutGeometry& cut);

/// Clip every interface-crossing element by the supporting lines of the
/// segments that traverse it, tag the convex cells by point-in-region, and
/// decompose every segment into per-element pieces.
CutGeometry clip_elements(const BulkMesh& mesh, const CurveNetwork& net);

/// Piecewise-constant per-element field.
using ElementField = std::unordered_map<int, double>;

/// Arithmetic phase averages rho^m, eta^m over I(e).
ElementField phase_average_coefficients(const BulkMesh& mesh, const RegionIncidence& inc,
                                        const VecXd& per_region_value);

/// Area and centroid of a simple polygon.
std::pair<double, Vec2> polygon_area_centroid(const std::vector<Vec2>& poly);

/// Integration helper: visits each (element, polygon) pair covering region l:
/// the full triangle for uncut elements of the region, the tagged cells for
/// cut elements.
template <typename F>
void for_region_polygons(const BulkMesh& mesh, const RegionIncidence& inc, const CutGeometry& cut,
                         int region, F&& fn) {
  static const std::vector<Vec2> kEmpty;
  for (int leaf : mesh.leaves()) {
    const auto& regions = inc.of(leaf);
    if (regions.size() == 1) {
      if (regions[0] == region) {
        std::vector<Vec2> tri{mesh.corner(leaf, 0), mesh.corner(leaf, 1), mesh.corner(leaf, 2)};
        fn(leaf, tri);
      }
      continue;
    }
    auto it = cut.cells.find(leaf);
    if (it == cut.cells.end()) continue;
    for (const auto& cell : it->second)
      if (cell.region == region) fn(leaf, cell.poly);
  }
}

}  // namespace triflow
