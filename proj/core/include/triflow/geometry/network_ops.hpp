#pragma once

#include <array>
#include <vector>

#include "triflow/geometry/curve_network.hpp"

namespace triflow {

/// Nodal field on the curve network, stored per global surface vertex
/// (scalar: V entries; vector: V rows x 2). Junction copies are independent
/// slots, so one-sided limits at junctions are automatic.
using SurfaceScalar = VecXd;
using SurfaceVector = MatXd;  // V x 2

/// Unit segment normal nu = rot_cw(q_{j+1}-q_j)/|.|.
Vec2 segment_normal(const PolyCurve& curve, int j);

/// Unnormalized orientation vector A{sigma} = rot_cw(q_{j+1}-q_j); |A| = |sigma|.
Vec2 segment_orientation_vector(const PolyCurve& curve, int j);

double segment_length(const PolyCurve& curve, int j);

/// Length-weighted vertex normal omega over the 1 or 2 incident segments of
/// curve i at local vertex q.
Vec2 vertex_normal(const CurveNetwork& net, int curve, int local_vertex);

/// Per-segment time-weighted normals nu^{m+1/2}: with linear-in-time vertex
/// motion the time average of the orientation vector is exact,
/// nu^{m+1/2} = (A{sigma^m} + A{sigma^{m+1}}) / (2 |A{sigma^m}|).
/// x_new is flat (2V) in global vertex order. Result indexed by global
/// segment id; vectors are generally not unit length.
std::vector<Vec2> time_weighted_normals(const CurveNetwork& net, const VecXd& x_new);

/// Mass-lumped inner product (trapezoidal per segment, one-sided at junctions).
double lumped_inner(const CurveNetwork& net, const MatXd& u, const MatXd& v);
/// Exact inner product of piecewise-linear fields (Simpson-exact per segment).
double exact_inner(const CurveNetwork& net, const MatXd& u, const MatXd& v);

/// Sum_i gamma_i |Gamma_i|.
double interfacial_energy(const CurveNetwork& net, const VecXd& gamma);

/// Area of region l from the oriented bounding loops (divergence theorem).
double region_area(const CurveNetwork& net, int region);

/// Discrete volume-update formula: lumped inner product of the displacement
/// against the time-weighted normals with region indicator weights; equals
/// the geometric area difference exactly.
double volume_difference_discrete(const CurveNetwork& net, const VecXd& x_new, int region);

/// W vectors at junction k: W_j = o_j |Lambda_{s_j}(q)| omega_{s_j}(q).
std::array<Vec2, 3> junction_W_vectors(const CurveNetwork& net, int k);

/// Solvability assumption report. A1 (inf-sup) is a property of the bulk
/// spaces and is checked there; this covers the vertex-normal conditions
/// (A2) and the component-wise span condition (A3).
struct AssumptionReport {
  struct A2Violation {
    enum Kind { interior_normal_zero, boundary_tangential_zero, junction_rank_deficient } kind;
    int curve = -1;      // for interior_normal_zero
    int local = -1;      // local vertex
    int index = -1;      // bpoint / junction index
  };
  bool a2_ok = true;
  std::vector<A2Violation> a2_violations;
  bool a3_ok = true;
  std::vector<int> a3_failed_components;

  bool ok() const { return a2_ok && a3_ok; }
  std::string describe() const;
};

AssumptionReport check_assumptions(const CurveNetwork& net);

/// Total polygonal length of one curve / of the whole network.
double curve_length(const PolyCurve& curve);
double network_length(const CurveNetwork& net);

}  // namespace triflow
