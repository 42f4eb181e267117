#include "triflow/fem/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "triflow/fem/quadrature.hpp"

namespace triflow {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

VecXd VelocitySpace::reduce(const VecXd& full) const {
  VecXd r(reduced_count());
  for (int i = 0; i < reduced_count(); ++i) r[i] = full[red_to_full[i]];
  return r;
}

VecXd VelocitySpace::expand(const VecXd& red) const {
  VecXd f = VecXd::Zero(dof_count());
  for (int i = 0; i < reduced_count(); ++i) f[red_to_full[i]] = red[i];
  return f;
}

Vec2 VelocitySpace::evaluate(const BulkMesh& mesh, const VecXd& full, const Vec2& x) const {
  auto [leaf, l] = mesh.locate(x);
  const auto& nodes = elem_nodes[leaf_index.at(leaf)];
  double phi[6];
  p2_values(l, phi);
  Vec2 u(0.0, 0.0);
  for (int k = 0; k < 6; ++k) {
    u.x() += phi[k] * full[2 * nodes[k]];
    u.y() += phi[k] * full[2 * nodes[k] + 1];
  }
  return u;
}

double VelocitySpace::max_nodal_norm(const VecXd& full) {
  double m = 0.0;
  for (int n = 0; n < full.size() / 2; ++n)
    m = std::max(m, std::hypot(full[2 * n], full[2 * n + 1]));
  return m;
}

void PressureSpace::make_mean_zero(VecXd& p) const {
  const double mu = mean(p);
  for (int i = 0; i < n_p1; ++i) p[i] -= mu;
}

double PressureSpace::mean(const VecXd& p) const {
  return basis_integral.dot(p) / domain_area;
}

VecXd project_W(const CurveNetwork& net, VecXd values) {
  if (values.size() != net.vertex_count()) throw ArgumentError("project_W: size mismatch");
  for (int k = 0; k < static_cast<int>(net.junctions.size()); ++k) {
    const auto jv = net.junction_vertices(k);
    const auto& o = net.junctions[k].orientation;
    double s = 0.0;
    for (int j = 0; j < 3; ++j) s += o[j] * values[jv[j]];
    for (int j = 0; j < 3; ++j) values[jv[j]] -= s / 3.0 * o[j];
  }
  return values;
}

MatXd project_Vpartial(const CurveNetwork& net, MatXd values) {
  if (values.rows() != net.vertex_count() || values.cols() != 2)
    throw ArgumentError("project_Vpartial: shape mismatch");
  for (int k = 0; k < static_cast<int>(net.junctions.size()); ++k) {
    const auto jv = net.junction_vertices(k);
    const Eigen::RowVector2d mean =
        (values.row(jv[0]) + values.row(jv[1]) + values.row(jv[2])) / 3.0;
    for (int j = 0; j < 3; ++j) values.row(jv[j]) = mean;
  }
  for (int k = 0; k < static_cast<int>(net.boundary_points.size()); ++k) {
    const int v = net.boundary_point_vertex(k);
    const Vec2 n = net.boundary_points[k].wall_normal;
    const double vn = values.row(v).dot(n);
    values.row(v) -= vn * n.transpose();
  }
  return values;
}

FemSystem build_spaces(const BulkMesh& mesh, const CurveNetwork& net, const RegionIncidence& inc,
                       const CutGeometry& cut, bool xfem) {
  FemSystem fs;
  VelocitySpace& vs = fs.vel;

  // --- node tables (vertex nodes first, then edge nodes, both sorted) ---
  std::vector<int> used_verts;
  for (int leaf : mesh.leaves())
    for (int k = 0; k < 3; ++k) used_verts.push_back(mesh.tri(leaf).v[k]);
  std::sort(used_verts.begin(), used_verts.end());
  used_verts.erase(std::unique(used_verts.begin(), used_verts.end()), used_verts.end());
  for (int v : used_verts) {
    vs.vertex_node.emplace(v, static_cast<int>(vs.node_pos.size()));
    vs.node_pos.push_back(mesh.vertices()[v]);
  }
  const auto edges = mesh.leaf_edges();
  for (auto [a, b] : edges) {
    vs.edge_node.emplace(edge_key(a, b), static_cast<int>(vs.node_pos.size()));
    vs.node_pos.push_back(0.5 * (mesh.vertices()[a] + mesh.vertices()[b]));
  }

  vs.elem_nodes.resize(mesh.leaf_count());
  int row = 0;
  for (int leaf : mesh.leaves()) {
    const auto& v = mesh.tri(leaf).v;
    auto& nd = vs.elem_nodes[row];
    for (int k = 0; k < 3; ++k) nd[k] = vs.vertex_node.at(v[k]);
    nd[3] = vs.edge_node.at(edge_key(v[1], v[2]));
    nd[4] = vs.edge_node.at(edge_key(v[2], v[0]));
    nd[5] = vs.edge_node.at(edge_key(v[0], v[1]));
    vs.leaf_index.emplace(leaf, row);
    ++row;
  }

  // --- essential velocity constraints from the wall tags ---
  vs.fixed.assign(vs.dof_count(), 0);
  auto constrain_node = [&](int node, int side) {
    const WallKind kind = mesh.boundary_split().side(side);
    if (kind == WallKind::no_slip) {
      vs.fixed[2 * node] = 1;
      vs.fixed[2 * node + 1] = 1;
    } else {
      // free-slip: normal component only; sides 1,3 are x-walls, 0,2 y-walls
      const int comp = (side == 1 || side == 3) ? 0 : 1;
      vs.fixed[2 * node + comp] = 1;
    }
  };
  for (int leaf : mesh.leaves()) {
    const auto& v = mesh.tri(leaf).v;
    for (int k = 0; k < 3; ++k) {
      const int a = v[k], b = v[(k + 1) % 3];
      const int side = mesh.boundary_side(a, b);
      if (side < 0) continue;
      constrain_node(vs.vertex_node.at(a), side);
      constrain_node(vs.vertex_node.at(b), side);
      constrain_node(vs.edge_node.at(edge_key(a, b)), side);
    }
  }
  vs.full_to_red.assign(vs.dof_count(), -1);
  for (int d = 0; d < vs.dof_count(); ++d) {
    if (vs.fixed[d]) continue;
    vs.full_to_red[d] = static_cast<int>(vs.red_to_full.size());
    vs.red_to_full.push_back(d);
  }

  // --- pressure ---
  PressureSpace& ps = fs.pres;
  ps.xfem = xfem;
  ps.n_p1 = static_cast<int>(used_verts.size());
  ps.domain_area = mesh.domain().area();
  ps.region_areas = VecXd::Zero(net.region_count());
  for (int l = 0; l < net.region_count(); ++l) ps.region_areas[l] = region_area(net, l);
  if (xfem) {
    if (net.region_count() < 2) throw SpaceError("XFEM requires at least two regions");
    int drop = 0;
    for (int l = 1; l < net.region_count(); ++l)
      if (ps.region_areas[l] > ps.region_areas[drop]) drop = l;
    ps.dropped_region = drop;
    for (int l = 0; l < net.region_count(); ++l) {
      if (ps.region_areas[l] <= 0.0) throw SpaceError("XFEM enrichment for zero-area region");
      if (l != drop) ps.enriched_regions.push_back(l);
    }
  }
  // basis integrals: P1 hats integrate to area/3 summed over incident leaves
  ps.basis_integral = VecXd::Zero(ps.dof_count());
  for (int leaf : mesh.leaves()) {
    const double a3 = mesh.area(leaf) / 3.0;
    for (int k = 0; k < 3; ++k) {
      const int n = vs.vertex_node.at(mesh.tri(leaf).v[k]);
      ps.basis_integral[n] += a3;
    }
  }
  for (size_t e = 0; e < ps.enriched_regions.size(); ++e)
    ps.basis_integral[ps.n_p1 + e] = ps.region_areas[ps.enriched_regions[e]];
  ps.pin_dof = 0;

  // --- surface spaces ---
  SurfaceSpaces& ss = fs.surf;
  const int V = net.vertex_count();
  ss.n_w_full = V;
  ss.n_v_full = 2 * V;

  // W^h: one slave per junction (the third member), expressed through the
  // junction sum condition.
  {
    std::vector<int> slave_of(V, -1);  // vertex -> junction
    for (int k = 0; k < static_cast<int>(net.junctions.size()); ++k) {
      const auto jv = net.junction_vertices(k);
      slave_of[jv[2]] = k;
    }
    std::vector<int> red_index(V, -1);
    int nr = 0;
    for (int v = 0; v < V; ++v)
      if (slave_of[v] < 0) red_index[v] = nr++;
    std::vector<Eigen::Triplet<double>> trip;
    for (int v = 0; v < V; ++v) {
      if (slave_of[v] < 0) {
        trip.emplace_back(v, red_index[v], 1.0);
      } else {
        const int k = slave_of[v];
        const auto jv = net.junction_vertices(k);
        const auto& o = net.junctions[k].orientation;
        // o0*k0 + o1*k1 + o2*k2 = 0  ->  k2 = -o2*(o0*k0 + o1*k1)
        trip.emplace_back(v, red_index[jv[0]], -static_cast<double>(o[2]) * o[0]);
        trip.emplace_back(v, red_index[jv[1]], -static_cast<double>(o[2]) * o[1]);
      }
    }
    ss.ZW.resize(V, nr);
    ss.ZW.setFromTriplets(trip.begin(), trip.end());
  }

  // V^h_d: junction identification (members 1,2 slaved to member 0) plus
  // wall-normal elimination at boundary points (axis-aligned walls).
  {
    std::vector<int> master_of(V, -1);
    for (int k = 0; k < static_cast<int>(net.junctions.size()); ++k) {
      const auto jv = net.junction_vertices(k);
      master_of[jv[1]] = jv[0];
      master_of[jv[2]] = jv[0];
    }
    std::vector<char> dof_fixed(2 * V, 0);
    for (int k = 0; k < static_cast<int>(net.boundary_points.size()); ++k) {
      const int v = net.boundary_point_vertex(k);
      const Vec2 n = net.boundary_points[k].wall_normal;
      int comp;
      if (std::abs(std::abs(n.x()) - 1.0) < 1e-12 && std::abs(n.y()) < 1e-12) comp = 0;
      else if (std::abs(std::abs(n.y()) - 1.0) < 1e-12 && std::abs(n.x()) < 1e-12) comp = 1;
      else throw Unsupported("boundary point on a non-axis-aligned wall");
      dof_fixed[2 * v + comp] = 1;
    }
    std::vector<int> red_index(2 * V, -1);
    int nr = 0;
    for (int v = 0; v < V; ++v) {
      if (master_of[v] >= 0) continue;
      for (int c = 0; c < 2; ++c)
        if (!dof_fixed[2 * v + c]) red_index[2 * v + c] = nr++;
    }
    std::vector<Eigen::Triplet<double>> trip;
    for (int v = 0; v < V; ++v) {
      const int src = master_of[v] >= 0 ? master_of[v] : v;
      for (int c = 0; c < 2; ++c) {
        if (dof_fixed[2 * src + c]) continue;  // masters are never boundary points
        const int r = red_index[2 * src + c];
        if (r >= 0 && !dof_fixed[2 * v + c]) trip.emplace_back(2 * v + c, r, 1.0);
      }
    }
    ss.ZV.resize(2 * V, nr);
    ss.ZV.setFromTriplets(trip.begin(), trip.end());
  }

  (void)inc;
  (void)cut;
  return fs;
}

void dump_dof_layout(std::ostream& os, const FemSystem& fs) {
  os << "velocity nodes " << fs.vel.node_count() << " dofs " << fs.vel.dof_count() << " reduced "
     << fs.vel.reduced_count() << '\n';
  for (int n = 0; n < fs.vel.node_count(); ++n)
    os << "un " << n << ' ' << fs.vel.node_pos[n].x() << ' ' << fs.vel.node_pos[n].y() << ' '
       << int(fs.vel.fixed[2 * n]) << int(fs.vel.fixed[2 * n + 1]) << '\n';
  os << "pressure p1 " << fs.pres.n_p1 << " enriched";
  for (int r : fs.pres.enriched_regions) os << ' ' << r;
  os << " dropped " << fs.pres.dropped_region << '\n';
  os << "surface W " << fs.surf.n_w_full << " -> " << fs.surf.w_reduced() << ", V "
     << fs.surf.n_v_full << " -> " << fs.surf.v_reduced() << '\n';
}

}  // namespace triflow
