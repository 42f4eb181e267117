#include "triflow/mesh/cut_geometry.hpp"

#include <algorithm>
#include <cmath>

namespace triflow {

std::pair<double, Vec2> polygon_area_centroid(const std::vector<Vec2>& poly) {
  double a = 0.0;
  Vec2 c(0.0, 0.0);
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    const double w = cross2(p, q);
    a += w;
    c += w * (p + q);
  }
  a *= 0.5;
  if (std::abs(a) < 1e-300) return {0.0, n ? poly[0] : Vec2(0, 0)};
  c /= (6.0 * a);
  return {a, c};
}

namespace {

/// Split a convex CCW polygon by the line {x : n.(x - p0) = 0}; returns the
/// two sides (either may be empty). Intersection points are computed once
/// per crossed edge so the two halves partition the input exactly.
void split_polygon(const std::vector<Vec2>& poly, const Vec2& p0, const Vec2& nrm,
                   std::vector<Vec2>& neg, std::vector<Vec2>& pos) {
  neg.clear();
  pos.clear();
  const size_t n = poly.size();
  if (n == 0) return;
  std::vector<double> s(n);
  for (size_t i = 0; i < n; ++i) s[i] = nrm.dot(poly[i] - p0);
  for (size_t i = 0; i < n; ++i) {
    const size_t j = (i + 1) % n;
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if (s[i] <= 0) neg.push_back(a);
    if (s[i] >= 0) pos.push_back(a);
    if ((s[i] < 0 && s[j] > 0) || (s[i] > 0 && s[j] < 0)) {
      const double t = s[i] / (s[i] - s[j]);
      const Vec2 x = a + t * (b - a);
      neg.push_back(x);
      pos.push_back(x);
    }
  }
}

struct Line {
  Vec2 p0, nrm;
};

/// Clip the parameter interval of segment a->b against triangle t of the
/// mesh. Returns false when empty.
bool segment_tri_interval(const BulkMesh& mesh, int t, const Vec2& a, const Vec2& b, double& t0,
                          double& t1) {
  t0 = 0.0;
  t1 = 1.0;
  for (int k = 0; k < 3; ++k) {
    const Vec2 p = mesh.corner(t, k);
    const Vec2 q = mesh.corner(t, (k + 1) % 3);
    // interior: cross(q-p, x-p) >= 0 for CCW triangles
    const double f0 = cross2(q - p, a - p);
    const double f1 = cross2(q - p, b - p);
    const double df = f1 - f0;
    if (std::abs(df) < 1e-300) {
      if (f0 < 0) return false;
      continue;
    }
    const double tc = -f0 / df;
    if (df > 0) t0 = std::max(t0, tc);
    else t1 = std::min(t1, tc);
    if (t0 >= t1) return false;
  }
  return t0 < t1;
}

}  // namespace

CutGeometry clip_elements(const BulkMesh& mesh, const CurveNetwork& net) {
  CutGeometry cut;
  cut.traversal.assign(net.segment_count(), {});

  // Per-element list of crossing segments, discovered from the traversal
  // decomposition so the two views stay consistent.
  std::unordered_map<int, std::vector<int>> elem_segments;

  std::vector<int> candidates;
  for (int ci = 0; ci < net.curve_count(); ++ci) {
    const PolyCurve& c = net.curves[ci];
    for (int j = 0; j < c.segment_count(); ++j) {
      auto [va, vb] = c.segment(j);
      const Vec2& a = c.vertices[va];
      const Vec2& b = c.vertices[vb];
      const int gs = net.segment_index(ci, j);

      mesh.leaves_in_box(a.cwiseMin(b), a.cwiseMax(b), candidates);
      std::vector<CutGeometry::Piece> pieces;
      for (int leaf : candidates) {
        double t0, t1;
        if (!segment_tri_interval(mesh, leaf, a, b, t0, t1)) continue;
        if (t1 - t0 < 1e-12) continue;
        pieces.push_back({leaf, t0, t1});
      }
      std::sort(pieces.begin(), pieces.end(), [](const auto& x, const auto& y) {
        return x.t0 < y.t0 || (x.t0 == y.t0 && x.elem < y.elem);
      });
      // Resolve overlaps (a segment running along a shared mesh edge shows
      // up in both neighbors): trim deterministically.
      std::vector<CutGeometry::Piece> resolved;
      double covered = 0.0;
      for (auto& p : pieces) {
        if (p.t1 <= covered + 1e-12) continue;
        p.t0 = std::max(p.t0, covered);
        if (p.t1 - p.t0 < 1e-12) continue;
        covered = p.t1;
        resolved.push_back(p);
      }
      if (resolved.empty() || resolved.front().t0 > 1e-9 || resolved.back().t1 < 1.0 - 1e-9)
        throw GeometryError("clip_elements: segment traversal does not cover the segment");
      for (size_t i = 1; i < resolved.size(); ++i)
        if (resolved[i].t0 - resolved[i - 1].t1 > 1e-9)
          throw GeometryError("clip_elements: gap in segment traversal");
      for (const auto& p : resolved) elem_segments[p.elem].push_back(gs);
      cut.traversal[gs] = std::move(resolved);
    }
  }

  // Convex-cell decomposition of every crossed element by the supporting
  // lines of its crossing segments (deduplicated); cells tagged by exact
  // point-in-region tests of their centroids.
  for (auto& [leaf, segs] : elem_segments) {
    std::vector<Line> lines;
    const double diam = mesh.diameter(leaf);
    for (int gs : segs) {
      auto [ci, j] = net.segment_curve_local(gs);
      const PolyCurve& c = net.curves[ci];
      auto [va, vb] = c.segment(j);
      const Vec2 a = c.vertices[va];
      const Vec2 d = c.vertices[vb] - c.vertices[va];
      const double len = d.norm();
      if (len == 0.0) continue;
      Line L{a, rot_cw(d) / len};
      bool dup = false;
      for (const Line& e : lines) {
        if (std::abs(cross2(e.nrm, L.nrm)) < 1e-12 &&
            std::abs(e.nrm.dot(L.p0 - e.p0)) < 1e-12 * diam) {
          dup = true;
          break;
        }
      }
      if (!dup) lines.push_back(L);
    }

    std::vector<std::vector<Vec2>> cells{
        {mesh.corner(leaf, 0), mesh.corner(leaf, 1), mesh.corner(leaf, 2)}};
    std::vector<Vec2> neg, pos;
    for (const Line& L : lines) {
      std::vector<std::vector<Vec2>> next;
      for (const auto& cell : cells) {
        split_polygon(cell, L.p0, L.nrm, neg, pos);
        const double an = polygon_area_centroid(neg).first;
        const double ap = polygon_area_centroid(pos).first;
        const double amin = 1e-14 * mesh.area(leaf);
        if (an > amin && ap > amin) {
          next.push_back(neg);
          next.push_back(pos);
        } else {
          next.push_back(cell);
        }
      }
      cells = std::move(next);
    }

    std::vector<CutGeometry::Cell> tagged;
    for (auto& poly : cells) {
      CutGeometry::Cell cell;
      auto [a, c] = polygon_area_centroid(poly);
      cell.poly = std::move(poly);
      cell.area = a;
      cell.centroid = c;
      cell.region = locate_region(net, c);
      tagged.push_back(std::move(cell));
    }
    cut.cells.emplace(leaf, std::move(tagged));
  }
  return cut;
}

RegionIncidence classify_elements(const BulkMesh& mesh, const CurveNetwork& net,
                                  const CutGeometry& cut) {
  RegionIncidence out;
  for (int leaf : mesh.leaves()) {
    auto it = cut.cells.find(leaf);
    std::vector<int> regions;
    if (it == cut.cells.end()) {
      regions.push_back(locate_region(net, mesh.centroid(leaf)));
    } else {
      for (const auto& cell : it->second) regions.push_back(cell.region);
      std::sort(regions.begin(), regions.end());
      regions.erase(std::unique(regions.begin(), regions.end()), regions.end());
    }
    out.inc.emplace(leaf, std::move(regions));
  }
  return out;
}

ElementField phase_average_coefficients(const BulkMesh& mesh, const RegionIncidence& inc,
                                        const VecXd& per_region_value) {
  ElementField f;
  for (int leaf : mesh.leaves()) {
    const auto& regions = inc.of(leaf);
    double s = 0.0;
    for (int l : regions) {
      if (l < 0 || l >= per_region_value.size())
        throw ArgumentError("phase_average_coefficients: region id out of range");
      s += per_region_value[l];
    }
    f[leaf] = s / static_cast<double>(regions.size());
  }
  return f;
}

}  // namespace triflow
