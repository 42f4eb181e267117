#include "triflow/geometry/network_ops.hpp"

#include <sstream>

namespace triflow {

Vec2 segment_orientation_vector(const PolyCurve& curve, int j) {
  auto [a, b] = curve.segment(j);
  return rot_cw(curve.vertices[b] - curve.vertices[a]);
}

double segment_length(const PolyCurve& curve, int j) {
  auto [a, b] = curve.segment(j);
  return (curve.vertices[b] - curve.vertices[a]).norm();
}

Vec2 segment_normal(const PolyCurve& curve, int j) {
  const Vec2 A = segment_orientation_vector(curve, j);
  const double len = A.norm();
  if (len == 0.0) throw DegenerateSegment("segment_normal: zero-length segment");
  return A / len;
}

namespace {

/// Local segment indices of curve i incident to local vertex v.
void incident_segments(const PolyCurve& c, int v, int out[2], int& count) {
  count = 0;
  const int n = c.vertex_count();
  if (c.closed) {
    out[count++] = (v + n - 1) % n;
    out[count++] = v;
  } else {
    if (v > 0) out[count++] = v - 1;
    if (v < n - 1) out[count++] = v;
  }
}

}  // namespace

Vec2 vertex_normal(const CurveNetwork& net, int curve, int local_vertex) {
  if (net.dim != 2) throw Unsupported("vertex_normal: d=2 only");
  const PolyCurve& c = net.curves[curve];
  int segs[2], n = 0;
  incident_segments(c, local_vertex, segs, n);
  if (n == 0) throw TopologyError("vertex_normal: isolated vertex");
  double wsum = 0.0;
  Vec2 acc(0.0, 0.0);
  for (int s = 0; s < n; ++s) {
    const double len = segment_length(c, segs[s]);
    if (len == 0.0) throw DegenerateSegment("vertex_normal: zero-length segment");
    acc += len * segment_normal(c, segs[s]);
    wsum += len;
  }
  return acc / wsum;
}

std::vector<Vec2> time_weighted_normals(const CurveNetwork& net, const VecXd& x_new) {
  if (net.dim != 2) throw Unsupported("time_weighted_normals: d=2 only");
  if (x_new.size() != 2 * net.vertex_count())
    throw ArgumentError("time_weighted_normals: bad position vector size");
  std::vector<Vec2> out(net.segment_count());
  for (int ci = 0; ci < net.curve_count(); ++ci) {
    const PolyCurve& c = net.curves[ci];
    for (int j = 0; j < c.segment_count(); ++j) {
      auto [a, b] = c.segment(j);
      const Vec2 A_old = rot_cw(c.vertices[b] - c.vertices[a]);
      const double len = A_old.norm();
      if (len == 0.0) throw DegenerateSegment("time_weighted_normals: degenerate old segment");
      const int ga = net.vertex_index(ci, a), gb = net.vertex_index(ci, b);
      const Vec2 pa(x_new[2 * ga], x_new[2 * ga + 1]);
      const Vec2 pb(x_new[2 * gb], x_new[2 * gb + 1]);
      const Vec2 A_new = rot_cw(pb - pa);
      out[net.segment_index(ci, j)] = (A_old + A_new) / (2.0 * len);
    }
  }
  return out;
}

namespace {

void check_field(const CurveNetwork& net, const MatXd& u, const MatXd& v) {
  if (u.rows() != net.vertex_count() || v.rows() != net.vertex_count() || u.cols() != v.cols())
    throw ArgumentError("surface inner product: field shape mismatch");
}

}  // namespace

double lumped_inner(const CurveNetwork& net, const MatXd& u, const MatXd& v) {
  check_field(net, u, v);
  double s = 0.0;
  for (int ci = 0; ci < net.curve_count(); ++ci) {
    const PolyCurve& c = net.curves[ci];
    for (int j = 0; j < c.segment_count(); ++j) {
      auto [a, b] = c.segment(j);
      const int ga = net.vertex_index(ci, a), gb = net.vertex_index(ci, b);
      const double len = segment_length(c, j);
      s += 0.5 * len * (u.row(ga).dot(v.row(ga)) + u.row(gb).dot(v.row(gb)));
    }
  }
  return s;
}

double exact_inner(const CurveNetwork& net, const MatXd& u, const MatXd& v) {
  check_field(net, u, v);
  double s = 0.0;
  for (int ci = 0; ci < net.curve_count(); ++ci) {
    const PolyCurve& c = net.curves[ci];
    for (int j = 0; j < c.segment_count(); ++j) {
      auto [a, b] = c.segment(j);
      const int ga = net.vertex_index(ci, a), gb = net.vertex_index(ci, b);
      const double len = segment_length(c, j);
      const double uava = u.row(ga).dot(v.row(ga));
      const double ubvb = u.row(gb).dot(v.row(gb));
      const double uavb = u.row(ga).dot(v.row(gb));
      const double ubva = u.row(gb).dot(v.row(ga));
      s += len / 6.0 * (2.0 * uava + uavb + ubva + 2.0 * ubvb);
    }
  }
  return s;
}

double curve_length(const PolyCurve& curve) { return curve.length(); }

double network_length(const CurveNetwork& net) {
  double s = 0.0;
  for (const auto& c : net.curves) s += c.length();
  return s;
}

double interfacial_energy(const CurveNetwork& net, const VecXd& gamma) {
  if (gamma.size() != net.curve_count())
    throw ArgumentError("interfacial_energy: gamma size mismatch");
  double e = 0.0;
  for (int i = 0; i < net.curve_count(); ++i) {
    if (gamma[i] <= 0.0) throw ArgumentError("interfacial_energy: gamma must be positive");
    e += gamma[i] * net.curves[i].length();
  }
  return e;
}

double region_area(const CurveNetwork& net, int region) {
  if (region < 0 || region >= net.region_count())
    throw ArgumentError("region_area: invalid region id");
  double a = 0.0;
  for (const RegionLoop& loop : net.region_loops(region)) {
    const auto& p = loop.points;
    for (size_t i = 0; i < p.size(); ++i) a += cross2(p[i], p[(i + 1) % p.size()]);
  }
  a *= 0.5;
  if (a < -1e-9 * std::max(1.0, net.domain.area()))
    throw TopologyError("region_area: negative area, inconsistent orientation");
  return a;
}

double volume_difference_discrete(const CurveNetwork& net, const VecXd& x_new, int region) {
  const auto nu_half = time_weighted_normals(net, x_new);
  const VecXd x_old = net.positions();
  double s = 0.0;
  for (const auto& sc : net.regions.regions[region]) {
    const PolyCurve& c = net.curves[sc.curve];
    const double chi = static_cast<double>(sc.sign);
    for (int j = 0; j < c.segment_count(); ++j) {
      auto [a, b] = c.segment(j);
      const int ga = net.vertex_index(sc.curve, a), gb = net.vertex_index(sc.curve, b);
      const double len = segment_length(c, j);
      const Vec2 da(x_new[2 * ga] - x_old[2 * ga], x_new[2 * ga + 1] - x_old[2 * ga + 1]);
      const Vec2 db(x_new[2 * gb] - x_old[2 * gb], x_new[2 * gb + 1] - x_old[2 * gb + 1]);
      const Vec2& nh = nu_half[net.segment_index(sc.curve, j)];
      s += chi * 0.5 * len * (da.dot(nh) + db.dot(nh));
    }
  }
  return s;
}

std::array<Vec2, 3> junction_W_vectors(const CurveNetwork& net, int k) {
  if (k < 0 || k >= static_cast<int>(net.junctions.size()))
    throw ArgumentError("junction_W_vectors: invalid junction");
  const TripleJunction& tj = net.junctions[k];
  std::array<Vec2, 3> W;
  for (int j = 0; j < 3; ++j) {
    const auto [ci, end] = tj.incident[j];
    const PolyCurve& c = net.curves[ci];
    const int local = end == CurveEnd::start ? 0 : c.vertex_count() - 1;
    int segs[2], n = 0;
    incident_segments(c, local, segs, n);
    double lambda = 0.0;
    for (int s = 0; s < n; ++s) lambda += segment_length(c, segs[s]);
    W[j] = tj.orientation[j] * lambda * vertex_normal(net, ci, local);
  }
  return W;
}

std::string AssumptionReport::describe() const {
  std::ostringstream os;
  if (ok()) return "A2, A3 satisfied";
  for (const auto& v : a2_violations) {
    switch (v.kind) {
      case A2Violation::interior_normal_zero:
        os << "A2: zero vertex normal at curve " << v.curve << " vertex " << v.local << "; ";
        break;
      case A2Violation::boundary_tangential_zero:
        os << "A2: degenerate contact angle at boundary point " << v.index << "; ";
        break;
      case A2Violation::junction_rank_deficient:
        os << "A2: rank-deficient W differences at junction " << v.index << "; ";
        break;
    }
  }
  for (int c : a3_failed_components) os << "A3: span deficient on component " << c << "; ";
  return os.str();
}

AssumptionReport check_assumptions(const CurveNetwork& net) {
  AssumptionReport rep;
  const double scale = std::max(net.domain.diameter(), 1.0);
  const double tol = 1e-10;

  // A2, interior vertices: omega != 0.
  for (int ci = 0; ci < net.curve_count(); ++ci) {
    const PolyCurve& c = net.curves[ci];
    for (int v = 0; v < c.vertex_count(); ++v) {
      if (!net.is_interior_vertex(ci, v)) continue;
      if (vertex_normal(net, ci, v).norm() <= tol) {
        rep.a2_ok = false;
        rep.a2_violations.push_back({AssumptionReport::A2Violation::interior_normal_zero, ci, v, -1});
      }
    }
  }
  // A2, boundary points: tangential part of omega != 0.
  for (int k = 0; k < static_cast<int>(net.boundary_points.size()); ++k) {
    const auto& bp = net.boundary_points[k];
    const PolyCurve& c = net.curves[bp.curve];
    const int local = bp.end == CurveEnd::start ? 0 : c.vertex_count() - 1;
    const Vec2 w = vertex_normal(net, bp.curve, local);
    const Vec2 t = w - w.dot(bp.wall_normal) * bp.wall_normal;
    if (t.norm() <= tol) {
      rep.a2_ok = false;
      rep.a2_violations.push_back({AssumptionReport::A2Violation::boundary_tangential_zero, -1, -1, k});
    }
  }
  // A2, junctions: the W differences must span the plane.
  for (int k = 0; k < static_cast<int>(net.junctions.size()); ++k) {
    const auto W = junction_W_vectors(net, k);
    const Vec2 d1 = W[0] - W[2], d2 = W[1] - W[2];
    const double den = d1.norm() * d2.norm();
    if (den <= tol * scale * scale || std::abs(cross2(d1, d2)) <= tol * den) {
      rep.a2_ok = false;
      rep.a2_violations.push_back({AssumptionReport::A2Violation::junction_rank_deficient, -1, -1, k});
    }
  }
  // A3, per connected component: interior vertex normals plus boundary wall
  // normals span R^2 (Gram rank test).
  for (int comp = 0; comp < static_cast<int>(net.components().size()); ++comp) {
    Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
    auto add = [&G](const Vec2& v) { G += v * v.transpose(); };
    for (int ci : net.components()[comp]) {
      const PolyCurve& c = net.curves[ci];
      for (int v = 0; v < c.vertex_count(); ++v)
        if (net.is_interior_vertex(ci, v)) add(vertex_normal(net, ci, v).normalized());
    }
    for (const auto& bp : net.boundary_points) {
      bool in_comp = false;
      for (int ci : net.components()[comp]) in_comp = in_comp || (ci == bp.curve);
      if (in_comp) add(bp.wall_normal);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(G);
    if (eig.eigenvalues()(0) <= tol * std::max(1.0, eig.eigenvalues()(1))) {
      rep.a3_ok = false;
      rep.a3_failed_components.push_back(comp);
    }
  }
  return rep;
}

}  // namespace triflow
