#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "triflow/common.hpp"

namespace triflow {

/// One polygonal interface curve. Orientation is implied by vertex order;
/// segment j runs from vertices[j] to vertices[j+1] (wrapping once for
/// closed curves). The segment normal points by the fixed convention
/// nu = rot_cw(q_{j+1} - q_j)/|.|, i.e. into the side region b_plus.
struct PolyCurve {
  int id = -1;
  std::vector<Vec2> vertices;
  bool closed = false;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int segment_count() const { return closed ? vertex_count() : vertex_count() - 1; }
  /// Vertex indices (a,b) of segment j.
  std::pair<int, int> segment(int j) const {
    const int n = vertex_count();
    return {j, (j + 1 == n && closed) ? 0 : j + 1};
  }
  double length() const;
};

/// Which end of a curve an endpoint reference names.
enum class CurveEnd { start = 0, end = 1 };

/// A triple junction: three (curve, end) pairs whose endpoint vertices
/// coincide, plus the local orientation triple from the junction figure
/// convention (o_j * nu_j and the conormal mu_j share plane orientation).
struct TripleJunction {
  int k = -1;
  std::array<std::pair<int, CurveEnd>, 3> incident{};
  std::array<int, 3> orientation{1, 1, 1};
};

/// A point where a curve end meets the free-slip part of the domain boundary.
struct BoundaryPoint {
  int k = -1;
  int curve = -1;
  CurveEnd end = CurveEnd::start;
  Vec2 wall_normal{0.0, 0.0};  // outward unit normal of the domain wall
};

/// Region topology: each bulk region is bounded by a signed set of curves.
/// sign = +1 means the curve's normal is the region's outward normal.
struct RegionTopology {
  struct SignedCurve {
    int curve = -1;
    int sign = +1;
  };
  std::vector<std::vector<SignedCurve>> regions;  // per region l
  std::vector<int> b_plus;   // per curve: region the normal points into
  std::vector<int> b_minus;  // per curve: region on the other side

  int region_count() const { return static_cast<int>(regions.size()); }
};

/// Closed oriented loop used for area/winding queries: region interior lies
/// on the left of the traversal. Built once per network.
struct RegionLoop {
  std::vector<Vec2> points;  // closed polygon, points.back() != points.front()
};

/// The interface cluster at one time level. Immutable once built; all
/// operations on it are pure reads. A new network is constructed from a
/// solved displacement via displaced().
class CurveNetwork {
 public:
  std::vector<PolyCurve> curves;
  std::vector<TripleJunction> junctions;
  std::vector<BoundaryPoint> boundary_points;
  RegionTopology regions;
  Box2 domain;
  int dim = 2;  // d=3 is reserved in the data model but rejected by every op

  // ---- global surface-vertex indexing (per-curve copies; junction copies
  //      coincide geometrically but carry independent nodal values) ----
  int vertex_count() const { return total_vertices_; }
  int segment_count() const { return total_segments_; }
  int curve_count() const { return static_cast<int>(curves.size()); }
  int region_count() const { return regions.region_count(); }

  int vertex_index(int curve, int local) const { return vertex_offset_[curve] + local; }
  int segment_index(int curve, int local) const { return segment_offset_[curve] + local; }
  /// Inverse of vertex_index.
  std::pair<int, int> vertex_curve_local(int global) const;
  std::pair<int, int> segment_curve_local(int global) const;

  const Vec2& vertex(int curve, int local) const { return curves[curve].vertices[local]; }

  /// Global surface-vertex id of a curve endpoint.
  int endpoint_vertex(int curve, CurveEnd end) const;

  /// Surface-vertex ids of the three members of junction k.
  std::array<int, 3> junction_vertices(int k) const;
  int boundary_point_vertex(int k) const;

  /// True if local vertex is interior in the sense of the vertex-set
  /// Q_{Gamma_i^circ}: not a junction member and not a boundary point.
  /// (All vertices of closed curves are interior.)
  bool is_interior_vertex(int curve, int local) const;

  /// Region loops with interior-on-left orientation, including domain-wall
  /// closure arcs for regions that touch the boundary.
  const std::vector<RegionLoop>& region_loops(int region) const { return region_loops_[region]; }

  /// Index sets with emptiness conventions of check_assumptions: connected
  /// components of the curve graph (curves joined through junctions).
  const std::vector<std::vector<int>>& components() const { return components_; }

  /// Finalize derived tables; called by the builder and by displaced().
  void finalize(bool validate = true);

  /// New network with vertices moved to x_new (same topology). x_new is a
  /// (2*vertex_count) flat vector in global surface-vertex order.
  CurveNetwork displaced(const VecXd& x_new) const;

  /// Flat copy of all vertex positions (global ordering), size 2*V.
  VecXd positions() const;

 private:
  void build_indexing();
  void build_region_loops();
  void build_components();
  void validate_network() const;

  std::vector<int> vertex_offset_, segment_offset_;
  int total_vertices_ = 0, total_segments_ = 0;
  std::vector<std::vector<RegionLoop>> region_loops_;
  std::vector<std::vector<int>> components_;
};

/// Builder that snaps junction/boundary coincidences exactly and validates
/// the topological invariants. Geometric coincidence tolerance is
/// 1e-12 * domain diameter before snapping.
class NetworkBuilder {
 public:
  explicit NetworkBuilder(const Box2& domain) { net_.domain = domain; }

  NetworkBuilder& add_curve(std::vector<Vec2> vertices, bool closed = false);
  /// incident entries are (curve id, end); orientations may be omitted, in
  /// which case they are derived from the junction figure convention.
  NetworkBuilder& add_junction(const std::array<std::pair<int, CurveEnd>, 3>& incident,
                               std::optional<std::array<int, 3>> orientation = std::nullopt);
  NetworkBuilder& add_boundary_point(int curve, CurveEnd end);
  /// Signed curve ids, sign +1 when the curve normal is outward for this region.
  NetworkBuilder& add_region(const std::vector<RegionTopology::SignedCurve>& boundary);

  NetworkBuilder& validate(bool on) { validate_ = on; return *this; }

  CurveNetwork build();

 private:
  CurveNetwork net_;
  bool validate_ = true;
};

/// Winding-number point location. Returns region index, or throws
/// OutOfDomain when x is outside the domain box. Points within tol of the
/// interface are resolved by deterministic perturbation.
int locate_region(const CurveNetwork& net, const Vec2& x);

}  // namespace triflow
