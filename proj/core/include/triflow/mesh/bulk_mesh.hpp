#pragma once

#include <array>
#include <functional>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "triflow/common.hpp"
#include "triflow/geometry/curve_network.hpp"

namespace triflow {

enum class WallKind { no_slip, free_slip };  // partial_1 / partial_2 boundary

/// Per-side boundary conditions of the axis-aligned domain box.
struct BoundarySplit {
  WallKind bottom = WallKind::no_slip;
  WallKind right = WallKind::no_slip;
  WallKind top = WallKind::no_slip;
  WallKind left = WallKind::no_slip;

  WallKind side(int s) const {  // 0=bottom,1=right,2=top,3=left
    switch (s) {
      case 0: return bottom;
      case 1: return right;
      case 2: return top;
      default: return left;
    }
  }
};

/// Conforming triangulation of the domain with a newest-vertex-bisection
/// refinement forest. Triangles store their refinement (base) edge as the
/// vertex pair (v[0], v[1]); bisection inserts the base midpoint m and
/// produces children (v[2], v[0], m) and (v[1], v[2], m), whose bases are
/// the old side edges.
class BulkMesh {
 public:
  struct Tri {
    std::array<int, 3> v{-1, -1, -1};
    int parent = -1;
    std::array<int, 2> child{-1, -1};
    int level = 0;
    bool active = false;  // active == current leaf
  };

  static BulkMesh initial(const Box2& domain, const BoundarySplit& split);

  const Box2& domain() const { return domain_; }
  const BoundarySplit& boundary_split() const { return split_; }

  const std::vector<Vec2>& vertices() const { return verts_; }
  const std::vector<Tri>& nodes() const { return tris_; }
  const std::vector<int>& leaves() const { return leaves_; }
  int leaf_count() const { return static_cast<int>(leaves_.size()); }

  const Tri& tri(int t) const { return tris_[t]; }
  Vec2 corner(int t, int k) const { return verts_[tris_[t].v[k]]; }
  double area(int t) const;
  double diameter(int t) const;  // longest edge
  Vec2 centroid(int t) const;

  /// Bisect one leaf (with recursive conforming closure). Returns child ids.
  void bisect(int t);

  /// Refinement level cap guard; exceeded -> MeshError.
  static constexpr int kMaxLevel = 48;

  /// Leaf containing x with its barycentric coordinates (hierarchy descent).
  std::pair<int, Eigen::Vector3d> locate(const Vec2& x) const;

  /// Barycentric coordinates of x in triangle t.
  Eigen::Vector3d barycentric(int t, const Vec2& x) const;

  /// Boundary side of an (undirected) edge if it lies on the domain walls:
  /// -1 when interior, else 0..3 (bottom,right,top,left).
  int boundary_side(int va, int vb) const;

  /// All active leaf edges as vertex pairs (deterministic order).
  std::vector<std::pair<int, int>> leaf_edges() const;

  /// Rebuild leaf list and the edge->leaf incidence map.
  void refresh();

  /// Leaves whose closure intersects the given bbox (uniform-grid query).
  void leaves_in_box(const Vec2& lo, const Vec2& hi, std::vector<int>& out) const;

  /// Try to merge the parent of leaf t (and the base-edge partner parent);
  /// both reactivated parents must satisfy ok_parent. Returns true when a
  /// merge happened.
  bool coarsen_leaf(int t, const std::function<bool(int)>& ok_parent);

  /// Plain-text dump: "v x y" and "t i j k flags" lines, deterministic order.
  void dump(std::ostream& os) const;

 private:
  int find_or_add_midpoint(int a, int b);
  void split_one(int t);
  int leaf_across_base(int t) const;
  int root_containing(const Vec2& x) const;
  void rebuild_grid() const;
  void index_leaf_edges();
  void edge_attach(int t);
  void edge_detach(int t);
  void activate(int t);
  void deactivate(int t);

  Box2 domain_;
  BoundarySplit split_;
  std::vector<Vec2> verts_;
  std::vector<Tri> tris_;
  std::vector<int> leaves_;
  std::vector<int> roots_;
  std::unordered_map<std::uint64_t, int> midpoint_;  // edge key -> midpoint vertex
  std::unordered_map<std::uint64_t, std::array<int, 2>> edge_leaves_;  // edge -> active leaves

  // broad-phase uniform grid over leaves (rebuilt lazily after refresh)
  mutable std::vector<std::vector<int>> grid_;
  mutable int grid_nx_ = 0, grid_ny_ = 0;
  mutable bool grid_valid_ = false;
};

/// Adaptive refinement/coarsening toward the target sizes of the
/// "n adapt_{k,l}" convention: elements within one element diameter of the
/// interface are refined until diameter <= H/2^k, elements away from it are
/// coarsened up to diameter ~ H/2^l, H = min side length of the domain.
BulkMesh adapt(const BulkMesh& mesh, const CurveNetwork& net, int k, int l);

/// Minimum distance from triangle t to the curve network (0 if intersecting).
double tri_network_distance(const BulkMesh& mesh, int t, const CurveNetwork& net);

}  // namespace triflow
