#include "triflow/geometry/curve_network.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>

#include "triflow/geometry/network_ops.hpp"

namespace triflow {

double PolyCurve::length() const {
  double s = 0.0;
  for (int j = 0; j < segment_count(); ++j) {
    auto [a, b] = segment(j);
    s += (vertices[b] - vertices[a]).norm();
  }
  return s;
}

std::pair<int, int> CurveNetwork::vertex_curve_local(int global) const {
  int c = static_cast<int>(std::upper_bound(vertex_offset_.begin(), vertex_offset_.end(), global) -
                           vertex_offset_.begin()) - 1;
  return {c, global - vertex_offset_[c]};
}

std::pair<int, int> CurveNetwork::segment_curve_local(int global) const {
  int c = static_cast<int>(std::upper_bound(segment_offset_.begin(), segment_offset_.end(), global) -
                           segment_offset_.begin()) - 1;
  return {c, global - segment_offset_[c]};
}

int CurveNetwork::endpoint_vertex(int curve, CurveEnd end) const {
  const PolyCurve& c = curves[curve];
  return vertex_index(curve, end == CurveEnd::start ? 0 : c.vertex_count() - 1);
}

std::array<int, 3> CurveNetwork::junction_vertices(int k) const {
  const TripleJunction& tj = junctions[k];
  std::array<int, 3> v{};
  for (int j = 0; j < 3; ++j) v[j] = endpoint_vertex(tj.incident[j].first, tj.incident[j].second);
  return v;
}

int CurveNetwork::boundary_point_vertex(int k) const {
  return endpoint_vertex(boundary_points[k].curve, boundary_points[k].end);
}

bool CurveNetwork::is_interior_vertex(int curve, int local) const {
  const PolyCurve& c = curves[curve];
  if (c.closed) return true;
  if (local != 0 && local != c.vertex_count() - 1) return true;
  const int g = vertex_index(curve, local);
  for (int k = 0; k < static_cast<int>(junctions.size()); ++k) {
    auto jv = junction_vertices(k);
    if (jv[0] == g || jv[1] == g || jv[2] == g) return false;
  }
  for (int k = 0; k < static_cast<int>(boundary_points.size()); ++k)
    if (boundary_point_vertex(k) == g) return false;
  return true;
}

void CurveNetwork::build_indexing() {
  vertex_offset_.assign(curves.size(), 0);
  segment_offset_.assign(curves.size(), 0);
  total_vertices_ = 0;
  total_segments_ = 0;
  for (size_t i = 0; i < curves.size(); ++i) {
    vertex_offset_[i] = total_vertices_;
    segment_offset_[i] = total_segments_;
    total_vertices_ += curves[i].vertex_count();
    total_segments_ += curves[i].segment_count();
  }
}

namespace {

// Perimeter parameter of a point on the domain box, increasing CCW from the
// lower-left corner. Used to stitch wall arcs between chain endpoints.
double box_param(const Box2& box, const Vec2& p, double tol) {
  const double w = box.width(), h = box.height();
  if (std::abs(p.y() - box.lo.y()) <= tol) return p.x() - box.lo.x();                  // bottom
  if (std::abs(p.x() - box.hi.x()) <= tol) return w + (p.y() - box.lo.y());            // right
  if (std::abs(p.y() - box.hi.y()) <= tol) return w + h + (box.hi.x() - p.x());        // top
  if (std::abs(p.x() - box.lo.x()) <= tol) return 2 * w + h + (box.hi.y() - p.y());    // left
  throw TopologyError("region chain endpoint is not on the domain boundary");
}

Vec2 box_point(const Box2& box, double s) {
  const double w = box.width(), h = box.height();
  double t = std::fmod(s, 2 * (w + h));
  if (t < 0) t += 2 * (w + h);
  if (t <= w) return Vec2(box.lo.x() + t, box.lo.y());
  t -= w;
  if (t <= h) return Vec2(box.hi.x(), box.lo.y() + t);
  t -= h;
  if (t <= w) return Vec2(box.hi.x() - t, box.hi.y());
  t -= w;
  return Vec2(box.lo.x(), box.hi.y() - t);
}

double shoelace(const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    a += cross2(p, q);
  }
  return 0.5 * a;
}

}  // namespace

void CurveNetwork::build_region_loops() {
  region_loops_.assign(regions.region_count(), {});
  const double tol = 1e-12 * std::max(domain.diameter(), 1.0);

  for (int l = 0; l < regions.region_count(); ++l) {
    // Oriented chains: traverse each bounding curve so the region is on the
    // left (sign +1 keeps stored order: nu = rot_cw(tangent) is outward).
    struct Chain { std::vector<Vec2> pts; };
    std::vector<Chain> open_chains;
    std::vector<RegionLoop> loops;

    std::vector<Chain> chains;
    for (const auto& sc : regions.regions[l]) {
      const PolyCurve& c = curves[sc.curve];
      Chain ch;
      ch.pts = c.vertices;
      if (sc.sign < 0) std::reverse(ch.pts.begin(), ch.pts.end());
      if (c.closed) {
        loops.push_back(RegionLoop{std::move(ch.pts)});
      } else {
        chains.push_back(std::move(ch));
      }
    }

    // Stitch open chains end-to-start where endpoints coincide (junctions).
    bool merged = true;
    while (merged) {
      merged = false;
      for (size_t a = 0; a < chains.size() && !merged; ++a) {
        for (size_t b = 0; b < chains.size() && !merged; ++b) {
          if (a == b) continue;
          if ((chains[a].pts.back() - chains[b].pts.front()).norm() <= tol) {
            chains[a].pts.insert(chains[a].pts.end(), chains[b].pts.begin() + 1,
                                 chains[b].pts.end());
            chains.erase(chains.begin() + b);
            merged = true;
          }
        }
      }
      // Extract closed chains.
      for (size_t a = 0; a < chains.size();) {
        if ((chains[a].pts.back() - chains[a].pts.front()).norm() <= tol) {
          chains[a].pts.pop_back();
          loops.push_back(RegionLoop{std::move(chains[a].pts)});
          chains.erase(chains.begin() + a);
          merged = true;
        } else {
          ++a;
        }
      }
    }

    // Remaining chains touch the domain boundary; close them by walking the
    // box perimeter CCW (interior of the region stays on the left).
    if (!chains.empty()) {
      const double per = 2 * (domain.width() + domain.height());
      std::vector<bool> used(chains.size(), false);
      for (size_t start = 0; start < chains.size(); ++start) {
        if (used[start]) continue;
        std::vector<Vec2> loop = chains[start].pts;
        used[start] = true;
        while (true) {
          const double s_end = box_param(domain, loop.back(), tol);
          // Find the unused chain whose start is next along the CCW walk.
          int best = -1;
          double best_ds = std::numeric_limits<double>::max();
          bool best_is_self = false;
          {
            double ds = box_param(domain, loop.front(), tol) - s_end;
            if (ds <= tol) ds += per;
            best_ds = ds;
            best_is_self = true;
          }
          for (size_t c = 0; c < chains.size(); ++c) {
            if (used[c]) continue;
            double ds = box_param(domain, chains[c].pts.front(), tol) - s_end;
            if (ds <= tol) ds += per;
            if (ds < best_ds) { best_ds = ds; best = static_cast<int>(c); best_is_self = false; }
          }
          // Insert box corners passed along the wall arc (at most one lap).
          const double s_to = s_end + best_ds;
          const double w = domain.width(), h = domain.height();
          const double corner_params[4] = {w, w + h, 2 * w + h, per};
          std::vector<double> passed;
          const double base = std::floor(s_end / per) * per;
          for (int lap = 0; lap < 3; ++lap)
            for (double c0 : corner_params) {
              const double s_corner = base + lap * per + c0;
              if (s_corner > s_end + tol && s_corner < s_to - tol) passed.push_back(s_corner);
            }
          std::sort(passed.begin(), passed.end());
          for (double s : passed) loop.push_back(box_point(domain, s));
          if (best_is_self) {
            loops.push_back(RegionLoop{std::move(loop)});
            break;
          }
          loop.insert(loop.end(), chains[best].pts.begin(), chains[best].pts.end());
          used[best] = true;
        }
      }
    } else {
      // Pure curve loops. If their net signed area is negative the region is
      // the box complement of the enclosed parts: add the box CCW loop.
      double a = 0.0;
      for (const auto& lp : loops) a += shoelace(lp.points);
      if (a < 0.0) {
        loops.push_back(RegionLoop{{domain.lo, Vec2(domain.hi.x(), domain.lo.y()), domain.hi,
                                    Vec2(domain.lo.x(), domain.hi.y())}});
      }
    }
    region_loops_[l] = std::move(loops);
  }
}

void CurveNetwork::build_components() {
  const int nc = curve_count();
  std::vector<int> parent(nc);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& tj : junctions) {
    int a = find(tj.incident[0].first);
    for (int j = 1; j < 3; ++j) parent[find(tj.incident[j].first)] = a;
  }
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < nc; ++i) groups[find(i)].push_back(i);
  components_.clear();
  for (auto& [root, members] : groups) components_.push_back(std::move(members));
}

void CurveNetwork::validate_network() const {
  if (dim != 2) throw Unsupported("only d=2 networks are supported");
  const double tol = 1e-12 * std::max(domain.diameter(), 1.0);

  for (const PolyCurve& c : curves) {
    if (c.vertex_count() < 2) throw TopologyError("curve with fewer than 2 vertices");
    for (int j = 0; j < c.segment_count(); ++j) {
      auto [a, b] = c.segment(j);
      if ((c.vertices[b] - c.vertices[a]).norm() == 0.0)
        throw DegenerateSegment("zero-length segment in curve " + std::to_string(c.id));
    }
  }

  // Junction coincidence (should be exact after builder snapping).
  for (size_t k = 0; k < junctions.size(); ++k) {
    auto jv = junction_vertices(static_cast<int>(k));
    const Vec2 p0 = [&] { auto [c, v] = vertex_curve_local(jv[0]); return vertex(c, v); }();
    for (int j = 1; j < 3; ++j) {
      auto [c, v] = vertex_curve_local(jv[j]);
      if ((vertex(c, v) - p0).norm() > tol)
        throw TopologyError("junction " + std::to_string(k) + " endpoints do not coincide");
    }
  }

  // Boundary points must lie on the domain boundary.
  for (const auto& bp : boundary_points) {
    auto [c, v] = vertex_curve_local(endpoint_vertex(bp.curve, bp.end));
    const Vec2 p = vertex(c, v);
    box_param(domain, p, tol);  // throws when off the wall
  }

  // Every open-curve endpoint must be a junction member or a boundary point.
  for (int i = 0; i < curve_count(); ++i) {
    if (curves[i].closed) continue;
    for (CurveEnd e : {CurveEnd::start, CurveEnd::end}) {
      const int g = endpoint_vertex(i, e);
      bool covered = false;
      for (size_t k = 0; k < junctions.size() && !covered; ++k) {
        auto jv = junction_vertices(static_cast<int>(k));
        covered = (jv[0] == g || jv[1] == g || jv[2] == g);
      }
      for (size_t k = 0; k < boundary_points.size() && !covered; ++k)
        covered = (boundary_point_vertex(static_cast<int>(k)) == g);
      if (!covered) throw TopologyError("dangling endpoint on curve " + std::to_string(i));
    }
  }

  // Partition property.
  if (regions.region_count() >= 2) {
    double total = 0.0;
    for (int l = 0; l < regions.region_count(); ++l) total += region_area(*this, l);
    if (std::abs(total - domain.area()) > 1e-12 * std::max(1.0, domain.area()))
      throw TopologyError("region areas do not partition the domain");
  }
}

void CurveNetwork::finalize(bool validate) {
  build_indexing();
  build_components();
  if (regions.region_count() > 0) build_region_loops();
  if (validate) validate_network();
}

VecXd CurveNetwork::positions() const {
  VecXd x(2 * vertex_count());
  for (int c = 0; c < curve_count(); ++c)
    for (int v = 0; v < curves[c].vertex_count(); ++v) {
      const int g = vertex_index(c, v);
      x[2 * g] = curves[c].vertices[v].x();
      x[2 * g + 1] = curves[c].vertices[v].y();
    }
  return x;
}

CurveNetwork CurveNetwork::displaced(const VecXd& x_new) const {
  if (x_new.size() != 2 * vertex_count())
    throw ArgumentError("displaced: position vector has wrong size");
  CurveNetwork out = *this;
  for (int c = 0; c < out.curve_count(); ++c)
    for (int v = 0; v < out.curves[c].vertex_count(); ++v) {
      const int g = vertex_index(c, v);
      out.curves[c].vertices[v] = Vec2(x_new[2 * g], x_new[2 * g + 1]);
    }
  out.finalize(false);
  return out;
}

// ---------------------------------------------------------------------------
// Builder
// ---------------------------------------------------------------------------

NetworkBuilder& NetworkBuilder::add_curve(std::vector<Vec2> vertices, bool closed) {
  PolyCurve c;
  c.id = static_cast<int>(net_.curves.size());
  c.vertices = std::move(vertices);
  c.closed = closed;
  net_.curves.push_back(std::move(c));
  return *this;
}

NetworkBuilder& NetworkBuilder::add_junction(
    const std::array<std::pair<int, CurveEnd>, 3>& incident,
    std::optional<std::array<int, 3>> orientation) {
  TripleJunction tj;
  tj.k = static_cast<int>(net_.junctions.size());
  tj.incident = incident;
  if (orientation) tj.orientation = *orientation;
  else tj.orientation = {0, 0, 0};  // derived in build()
  net_.junctions.push_back(tj);
  return *this;
}

NetworkBuilder& NetworkBuilder::add_boundary_point(int curve, CurveEnd end) {
  BoundaryPoint bp;
  bp.k = static_cast<int>(net_.boundary_points.size());
  bp.curve = curve;
  bp.end = end;
  net_.boundary_points.push_back(bp);
  return *this;
}

NetworkBuilder& NetworkBuilder::add_region(
    const std::vector<RegionTopology::SignedCurve>& boundary) {
  net_.regions.regions.push_back(boundary);
  return *this;
}

namespace {

Vec2& endpoint_ref(CurveNetwork& net, int curve, CurveEnd end) {
  PolyCurve& c = net.curves[curve];
  return end == CurveEnd::start ? c.vertices.front() : c.vertices.back();
}

/// Tangent pointing out of the curve at the given end.
Vec2 outward_tangent(const CurveNetwork& net, int curve, CurveEnd end) {
  const PolyCurve& c = net.curves[curve];
  if (end == CurveEnd::start) {
    return (c.vertices[0] - c.vertices[1]).normalized();
  }
  const int n = c.vertex_count();
  return (c.vertices[n - 1] - c.vertices[n - 2]).normalized();
}

/// End-segment normal of the curve at the given end (by the global convention).
Vec2 end_segment_normal(const CurveNetwork& net, int curve, CurveEnd end) {
  const PolyCurve& c = net.curves[curve];
  const int j = end == CurveEnd::start ? 0 : c.segment_count() - 1;
  auto [a, b] = c.segment(j);
  return rot_cw((c.vertices[b] - c.vertices[a]).normalized());
}

}  // namespace

CurveNetwork NetworkBuilder::build() {
  const double tol = 1e-12 * std::max(net_.domain.diameter(), 1.0);

  // Snap junction endpoints to a single shared coordinate.
  for (auto& tj : net_.junctions) {
    Vec2 ref = endpoint_ref(net_, tj.incident[0].first, tj.incident[0].second);
    for (int j = 1; j < 3; ++j) {
      Vec2& p = endpoint_ref(net_, tj.incident[j].first, tj.incident[j].second);
      if ((p - ref).norm() > 100 * tol)
        throw TopologyError("junction endpoints too far apart to snap");
      p = ref;
    }
  }

  // Snap boundary points onto the nearest wall and record its outward normal.
  for (auto& bp : net_.boundary_points) {
    Vec2& p = endpoint_ref(net_, bp.curve, bp.end);
    const Box2& box = net_.domain;
    struct Cand { double d; Vec2 n; int axis; double val; };
    std::vector<Cand> cands = {
        {std::abs(p.x() - box.lo.x()), Vec2(-1, 0), 0, box.lo.x()},
        {std::abs(p.x() - box.hi.x()), Vec2(1, 0), 0, box.hi.x()},
        {std::abs(p.y() - box.lo.y()), Vec2(0, -1), 1, box.lo.y()},
        {std::abs(p.y() - box.hi.y()), Vec2(0, 1), 1, box.hi.y()},
    };
    auto best = std::min_element(cands.begin(), cands.end(),
                                 [](const Cand& a, const Cand& b) { return a.d < b.d; });
    if (best->d > 100 * tol) throw TopologyError("boundary point endpoint is not on a wall");
    p[best->axis] = best->val;
    bp.wall_normal = best->n;
  }

  // Derive junction orientations where not supplied: choose o_j so that
  // (o_j nu_j, mu_j) have positive orientation for all three members.
  for (auto& tj : net_.junctions) {
    if (tj.orientation[0] != 0) continue;
    for (int j = 0; j < 3; ++j) {
      const Vec2 mu = outward_tangent(net_, tj.incident[j].first, tj.incident[j].second);
      const Vec2 nu = end_segment_normal(net_, tj.incident[j].first, tj.incident[j].second);
      const double s = cross2(nu, mu);
      if (std::abs(s) < 1e-14) throw TopologyError("cannot orient junction: nu parallel to mu");
      tj.orientation[j] = s > 0 ? 1 : -1;
    }
  }

  // Side labels from the region lists: sign +1 means nu is outward for that
  // region, so the region is b_minus there.
  const int ncur = static_cast<int>(net_.curves.size());
  net_.regions.b_plus.assign(ncur, -1);
  net_.regions.b_minus.assign(ncur, -1);
  for (int l = 0; l < net_.regions.region_count(); ++l) {
    for (const auto& sc : net_.regions.regions[l]) {
      if (sc.sign > 0) net_.regions.b_minus[sc.curve] = l;
      else net_.regions.b_plus[sc.curve] = l;
    }
  }
  if (validate_ && net_.regions.region_count() > 0) {
    for (int i = 0; i < ncur; ++i)
      if (net_.regions.b_plus[i] < 0 || net_.regions.b_minus[i] < 0)
        throw TopologyError("curve " + std::to_string(i) + " must bound exactly two regions");
  }

  net_.finalize(validate_);

  if (validate_ && net_.regions.region_count() > 0) {
    // Orientation probe: nu must point out of b_minus into b_plus.
    for (int i = 0; i < ncur; ++i) {
      const PolyCurve& c = net_.curves[i];
      const int j = c.segment_count() / 2;
      auto [a, b] = c.segment(j);
      const Vec2 mid = 0.5 * (c.vertices[a] + c.vertices[b]);
      const Vec2 nu = rot_cw((c.vertices[b] - c.vertices[a]).normalized());
      const double eps = 1e-6 * std::max(net_.domain.diameter(), 1.0);
      try {
        const int plus = locate_region(net_, mid + eps * nu);
        const int minus = locate_region(net_, mid - eps * nu);
        if (plus != net_.regions.b_plus[i] || minus != net_.regions.b_minus[i])
          throw TopologyError("curve " + std::to_string(i) +
                              ": side labels disagree with point-in-region probe");
      } catch (const OutOfDomain&) {
        // Probe stepped outside the box (curve hugging the wall); skip.
      }
    }
  }
  return net_;
}

// ---------------------------------------------------------------------------
// Point location
// ---------------------------------------------------------------------------

namespace {

/// Winding number of closed polygon around x; integer for x off the polygon.
int winding_number(const std::vector<Vec2>& poly, const Vec2& x) {
  int wn = 0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    if (a.y() <= x.y()) {
      if (b.y() > x.y() && cross2(b - a, x - a) > 0) ++wn;
    } else {
      if (b.y() <= x.y() && cross2(b - a, x - a) < 0) --wn;
    }
  }
  return wn;
}

}  // namespace

int locate_region(const CurveNetwork& net, const Vec2& x) {
  const double tol = 1e-12 * std::max(net.domain.diameter(), 1.0);
  if (!net.domain.contains(x, tol)) throw OutOfDomain("point outside the flow domain");

  Vec2 q = x;
  for (int attempt = 0; attempt < 4; ++attempt) {
    int hit = -1;
    int hits = 0;
    for (int l = 0; l < net.region_count(); ++l) {
      int wn = 0;
      for (const RegionLoop& loop : net.region_loops(l)) wn += winding_number(loop.points, q);
      if (wn != 0) { hit = l; ++hits; }
    }
    if (hits == 1) return hit;
    // On-boundary degeneracy: deterministic diagonal perturbation.
    q = x + (attempt + 1) * Vec2(3.0, 1.0) * 1e3 * tol;
    if (!net.domain.contains(q, tol)) q = x - (attempt + 1) * Vec2(3.0, 1.0) * 1e3 * tol;
  }
  throw GeometryError("locate_region: ambiguous point after perturbation");
}

}  // namespace triflow
