#pragma once

#include "triflow/fem/spaces.hpp"

namespace triflow {

/// Nodal interpolation of a P2 velocity field onto the nodes of a new mesh
/// (exact for quadratics across nested refinement). Nodes that fall outside
/// the old mesh by rounding are clamped; the count is reported.
struct TransferStats {
  int clamped_nodes = 0;
};
VecXd interpolate_velocity(const VelocitySpace& vs_old, const BulkMesh& mesh_old,
                           const VecXd& u_old_full, const BulkMesh& mesh_new,
                           const VelocitySpace& vs_new, TransferStats* stats = nullptr);

/// Elementwise-mean projection of a piecewise-constant field between two
/// snapshots of the same refinement forest; preserves the integral exactly.
ElementField project_density(const ElementField& rho_old, const BulkMesh& mesh_old,
                             const BulkMesh& mesh_new);

}  // namespace triflow
