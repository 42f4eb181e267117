#pragma once

#include <Eigen/SparseCore>
#include <array>
#include <unordered_map>
#include <vector>

#include "triflow/geometry/curve_network.hpp"
#include "triflow/mesh/bulk_mesh.hpp"
#include "triflow/mesh/cut_geometry.hpp"

namespace triflow {

using SpMat = Eigen::SparseMatrix<double>;

/// Taylor-Hood P2 vector velocity space with the essential constraints
/// eliminated: zero on the no-slip walls, zero wall-normal component on the
/// free-slip walls (axis-aligned, so componentwise).
struct VelocitySpace {
  std::vector<Vec2> node_pos;                       // vertex nodes then edge nodes
  std::unordered_map<int, int> vertex_node;         // mesh vertex -> node
  std::unordered_map<std::uint64_t, int> edge_node; // edge key -> node
  std::vector<std::array<int, 6>> elem_nodes;       // aligned with mesh.leaves()
  std::unordered_map<int, int> leaf_index;          // leaf id -> row in elem_nodes

  std::vector<char> fixed;       // per dof (2 per node)
  std::vector<int> full_to_red;  // -1 when fixed
  std::vector<int> red_to_full;

  int node_count() const { return static_cast<int>(node_pos.size()); }
  int dof_count() const { return 2 * node_count(); }
  int reduced_count() const { return static_cast<int>(red_to_full.size()); }

  VecXd reduce(const VecXd& full) const;
  VecXd expand(const VecXd& red) const;  // fixed dofs -> 0

  /// Evaluate the P2 field (full dof vector) at a point of the mesh.
  Vec2 evaluate(const BulkMesh& mesh, const VecXd& full, const Vec2& x) const;
  /// Max nodal Euclidean norm.
  static double max_nodal_norm(const VecXd& full);
};

/// P1 pressure with optional per-region characteristic enrichment. The
/// structurally redundant enrichment (sum of hats == sum of characteristics)
/// is dropped; the remaining constant null direction is handled by pinning
/// one P1 coefficient during solves and post-shifting to mean zero.
struct PressureSpace {
  bool xfem = false;
  int n_p1 = 0;
  std::vector<int> enriched_regions;  // kept enrichment dofs, region ids
  int dropped_region = -1;
  int pin_dof = 0;

  VecXd basis_integral;  // per dof: integral of the basis function over Omega
  double domain_area = 0.0;
  VecXd region_areas;

  int dof_count() const { return n_p1 + static_cast<int>(enriched_regions.size()); }

  /// Subtract the mean so (p, 1) = 0; adjusts the P1 block only.
  void make_mean_zero(VecXd& p) const;
  double mean(const VecXd& p) const;
};

/// Constrained surface spaces realized as sparse inclusion maps from reduced
/// coordinates onto the full per-curve nodal spaces:
///   W^h:  scalar per surface vertex, junction sum condition;
///   V^h_d: vector per surface vertex, junction identification and zero
///          wall-normal component at boundary points.
struct SurfaceSpaces {
  int n_w_full = 0, n_v_full = 0;
  SpMat ZW;  // n_w_full x n_w_red
  SpMat ZV;  // n_v_full x n_v_red
  int w_reduced() const { return static_cast<int>(ZW.cols()); }
  int v_reduced() const { return static_cast<int>(ZV.cols()); }
};

/// Euclidean orthogonal projection onto the junction sum condition of W^h;
/// idempotent, leaves non-junction values unchanged.
VecXd project_W(const CurveNetwork& net, VecXd values);

/// Projection onto V^h_d: junction triples replaced by their arithmetic
/// mean, wall-normal components removed at boundary points; idempotent.
MatXd project_Vpartial(const CurveNetwork& net, MatXd values);

struct FemSystem {
  VelocitySpace vel;
  PressureSpace pres;
  SurfaceSpaces surf;
};

/// Dof tables, constraint maps and enrichment bookkeeping for one time level.
FemSystem build_spaces(const BulkMesh& mesh, const CurveNetwork& net, const RegionIncidence& inc,
                       const CutGeometry& cut, bool xfem);

/// Deterministic text dump of the dof layout (debugging aid).
void dump_dof_layout(std::ostream& os, const FemSystem& fs);

}  // namespace triflow
