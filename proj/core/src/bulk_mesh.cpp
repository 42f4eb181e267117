#include "triflow/mesh/bulk_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "triflow/geometry/network_ops.hpp"

namespace triflow {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
  return (p - (a + t * d)).norm();
}

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double d1 = cross2(b - a, c - a);
  const double d2 = cross2(b - a, d - a);
  const double d3 = cross2(d - c, a - c);
  const double d4 = cross2(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

double segment_segment_distance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min(std::min(point_segment_distance(a, c, d), point_segment_distance(b, c, d)),
                  std::min(point_segment_distance(c, a, b), point_segment_distance(d, a, b)));
}

}  // namespace

BulkMesh BulkMesh::initial(const Box2& domain, const BoundarySplit& split) {
  BulkMesh m;
  m.domain_ = domain;
  m.split_ = split;

  // Square cells of size ~H, each split along the SW-NE diagonal with the
  // diagonal as the NVB base edge.
  const double H = domain.min_side();
  const int nx = std::max(1, static_cast<int>(std::lround(domain.width() / H)));
  const int ny = std::max(1, static_cast<int>(std::lround(domain.height() / H)));
  const double dx = domain.width() / nx, dy = domain.height() / ny;

  auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.verts_.emplace_back(domain.lo.x() + i * dx, domain.lo.y() + j * dy);

  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int sw = vid(i, j), se = vid(i + 1, j), ne = vid(i + 1, j + 1), nw = vid(i, j + 1);
      Tri t1;  // lower-right triangle (CCW), base = diagonal (ne, sw)
      t1.v = {ne, sw, se};
      t1.active = true;
      Tri t2;  // upper-left triangle (CCW), base = diagonal (sw, ne)
      t2.v = {sw, ne, nw};
      t2.active = true;
      m.roots_.push_back(static_cast<int>(m.tris_.size()));
      m.tris_.push_back(t1);
      m.roots_.push_back(static_cast<int>(m.tris_.size()));
      m.tris_.push_back(t2);
    }
  m.refresh();
  return m;
}

double BulkMesh::area(int t) const {
  const Vec2 a = corner(t, 0), b = corner(t, 1), c = corner(t, 2);
  return 0.5 * cross2(b - a, c - a);
}

double BulkMesh::diameter(int t) const {
  const Vec2 a = corner(t, 0), b = corner(t, 1), c = corner(t, 2);
  return std::sqrt(std::max({(b - a).squaredNorm(), (c - b).squaredNorm(), (a - c).squaredNorm()}));
}

Vec2 BulkMesh::centroid(int t) const {
  return (corner(t, 0) + corner(t, 1) + corner(t, 2)) / 3.0;
}

int BulkMesh::find_or_add_midpoint(int a, int b) {
  const auto key = edge_key(a, b);
  auto it = midpoint_.find(key);
  if (it != midpoint_.end()) return it->second;
  const int id = static_cast<int>(verts_.size());
  verts_.push_back(0.5 * (verts_[a] + verts_[b]));
  midpoint_.emplace(key, id);
  return id;
}

void BulkMesh::index_leaf_edges() {
  edge_leaves_.clear();
  for (int t = 0; t < static_cast<int>(tris_.size()); ++t)
    if (tris_[t].active) edge_attach(t);
}

void BulkMesh::edge_attach(int t) {
  for (int k = 0; k < 3; ++k) {
    const auto key = edge_key(tris_[t].v[k], tris_[t].v[(k + 1) % 3]);
    auto it = edge_leaves_.find(key);
    if (it == edge_leaves_.end()) {
      edge_leaves_.emplace(key, std::array<int, 2>{t, -1});
    } else {
      if (it->second[0] < 0) it->second[0] = t;
      else it->second[1] = t;
    }
  }
}

void BulkMesh::edge_detach(int t) {
  for (int k = 0; k < 3; ++k) {
    const auto key = edge_key(tris_[t].v[k], tris_[t].v[(k + 1) % 3]);
    auto it = edge_leaves_.find(key);
    if (it == edge_leaves_.end()) continue;
    if (it->second[0] == t) it->second[0] = it->second[1], it->second[1] = -1;
    else if (it->second[1] == t) it->second[1] = -1;
    if (it->second[0] < 0) edge_leaves_.erase(it);
  }
}

int BulkMesh::leaf_across_base(int t) const {
  const auto key = edge_key(tris_[t].v[0], tris_[t].v[1]);
  auto it = edge_leaves_.find(key);
  if (it == edge_leaves_.end()) return -1;
  if (it->second[0] == t) return it->second[1];
  return it->second[0];
}

void BulkMesh::activate(int t) {
  tris_[t].active = true;
  edge_attach(t);
}

void BulkMesh::deactivate(int t) {
  tris_[t].active = false;
  edge_detach(t);
}

void BulkMesh::split_one(int t) {
  Tri& T = tris_[t];
  if (T.level >= kMaxLevel) throw MeshError("refinement level cap exceeded");
  deactivate(t);
  if (T.child[0] >= 0) {
    // Reactivate previously allocated children (re-refining after coarsening).
    activate(tris_[t].child[0]);
    activate(tris_[t].child[1]);
    return;
  }
  const int m = find_or_add_midpoint(T.v[0], T.v[1]);
  Tri c0, c1;
  c0.v = {T.v[2], T.v[0], m};
  c1.v = {T.v[1], T.v[2], m};
  c0.parent = c1.parent = t;
  c0.level = c1.level = T.level + 1;
  const int i0 = static_cast<int>(tris_.size());
  tris_.push_back(c0);
  const int i1 = static_cast<int>(tris_.size());
  tris_.push_back(c1);
  tris_[t].child = {i0, i1};
  activate(i0);
  activate(i1);
}

void BulkMesh::bisect(int t) {
  if (!tris_[t].active) return;
  int guard = 0;
  // Conforming closure: the neighbor across the base edge must share it as
  // its own base; otherwise bisect the neighbor first.
  while (true) {
    if (++guard > 4 * kMaxLevel) throw MeshError("bisection closure did not terminate");
    const int n = leaf_across_base(t);
    if (n < 0) break;
    const Tri& N = tris_[n];
    if (edge_key(N.v[0], N.v[1]) == edge_key(tris_[t].v[0], tris_[t].v[1])) break;
    bisect(n);
  }
  const int partner = leaf_across_base(t);
  split_one(t);
  if (partner >= 0) split_one(partner);
  grid_valid_ = false;
}

bool BulkMesh::coarsen_leaf(int t, const std::function<bool(int)>& ok_parent) {
  const int p = tris_[t].parent;
  if (p < 0) return false;
  const Tri& P = tris_[p];
  const int c0 = P.child[0], c1 = P.child[1];
  if (!tris_[c0].active || !tris_[c1].active) return false;
  if (!ok_parent(p)) return false;

  // The base midpoint of P must be surrounded only by P's children and, on
  // interior edges, the children of the partner parent across P's base edge.
  const int m = tris_[c0].v[2];
  std::array<int, 5> star{};
  int nstar = 0;
  // Collect active leaves around m via the edge map: every leaf containing m
  // shares an edge through m with one of the children or their neighbors.
  {
    // edges incident to m appear in edge_leaves_ with keys containing m;
    // gather leaves from the edges of the two children plus partner children.
    std::array<int, 16> found{};
    int nf = 0;
    auto add = [&](int leaf) {
      if (leaf < 0) return;
      for (int i = 0; i < nf; ++i)
        if (found[i] == leaf) return;
      if (nf < 16) found[nf++] = leaf;
    };
    auto neighbors_over_edges_of = [&](int leaf) {
      for (int k = 0; k < 3; ++k) {
        const int a = tris_[leaf].v[k], b = tris_[leaf].v[(k + 1) % 3];
        if (a != m && b != m) continue;
        auto it = edge_leaves_.find(edge_key(a, b));
        if (it == edge_leaves_.end()) continue;
        add(it->second[0]);
        add(it->second[1]);
      }
    };
    add(c0);
    add(c1);
    neighbors_over_edges_of(c0);
    neighbors_over_edges_of(c1);
    // One more ring: neighbors of neighbors that contain m.
    const int nf0 = nf;
    for (int i = 0; i < nf0; ++i) neighbors_over_edges_of(found[i]);
    for (int i = 0; i < nf; ++i) {
      const auto& v = tris_[found[i]].v;
      if (v[0] == m || v[1] == m || v[2] == m) {
        if (nstar < 5) star[nstar] = found[i];
        ++nstar;
      }
    }
  }

  if (nstar == 2) {
    if (!((star[0] == c0 && star[1] == c1) || (star[0] == c1 && star[1] == c0))) return false;
    deactivate(c0);
    deactivate(c1);
    activate(p);
    grid_valid_ = false;
    return true;
  }
  if (nstar == 4) {
    int q = -1;
    for (int i = 0; i < 4; ++i) {
      const int cand = star[i];
      if (cand == c0 || cand == c1) continue;
      const int qp = tris_[cand].parent;
      if (qp < 0) return false;
      if (q < 0) q = qp;
      else if (q != qp) return false;
    }
    if (q < 0) return false;
    const Tri& Q = tris_[q];
    if (edge_key(Q.v[0], Q.v[1]) != edge_key(P.v[0], P.v[1])) return false;
    if (!tris_[Q.child[0]].active || !tris_[Q.child[1]].active) return false;
    if (!ok_parent(q)) return false;
    deactivate(c0);
    deactivate(c1);
    deactivate(Q.child[0]);
    deactivate(Q.child[1]);
    activate(p);
    activate(q);
    grid_valid_ = false;
    return true;
  }
  return false;
}

void BulkMesh::refresh() {
  leaves_.clear();
  for (int t = 0; t < static_cast<int>(tris_.size()); ++t)
    if (tris_[t].active) leaves_.push_back(t);
  index_leaf_edges();
  grid_valid_ = false;
}

void BulkMesh::rebuild_grid() const {
  const int n = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(leaves_.size()))));
  grid_nx_ = n;
  grid_ny_ = n;
  grid_.assign(static_cast<size_t>(n) * n, {});
  const double w = domain_.width(), h = domain_.height();
  for (int leaf : leaves_) {
    Vec2 lo = corner(leaf, 0), hi = lo;
    for (int k = 1; k < 3; ++k) {
      lo = lo.cwiseMin(corner(leaf, k));
      hi = hi.cwiseMax(corner(leaf, k));
    }
    const int i0 = std::clamp(static_cast<int>((lo.x() - domain_.lo.x()) / w * n), 0, n - 1);
    const int i1 = std::clamp(static_cast<int>((hi.x() - domain_.lo.x()) / w * n), 0, n - 1);
    const int j0 = std::clamp(static_cast<int>((lo.y() - domain_.lo.y()) / h * n), 0, n - 1);
    const int j1 = std::clamp(static_cast<int>((hi.y() - domain_.lo.y()) / h * n), 0, n - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) grid_[static_cast<size_t>(j) * n + i].push_back(leaf);
  }
  grid_valid_ = true;
}

void BulkMesh::leaves_in_box(const Vec2& lo, const Vec2& hi, std::vector<int>& out) const {
  if (!grid_valid_) rebuild_grid();
  out.clear();
  const double w = domain_.width(), h = domain_.height();
  const int i0 = std::clamp(static_cast<int>((lo.x() - domain_.lo.x()) / w * grid_nx_), 0, grid_nx_ - 1);
  const int i1 = std::clamp(static_cast<int>((hi.x() - domain_.lo.x()) / w * grid_nx_), 0, grid_nx_ - 1);
  const int j0 = std::clamp(static_cast<int>((lo.y() - domain_.lo.y()) / h * grid_ny_), 0, grid_ny_ - 1);
  const int j1 = std::clamp(static_cast<int>((hi.y() - domain_.lo.y()) / h * grid_ny_), 0, grid_ny_ - 1);
  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i)
      for (int leaf : grid_[static_cast<size_t>(j) * grid_nx_ + i])
        if (std::find(out.begin(), out.end(), leaf) == out.end()) out.push_back(leaf);
}

Eigen::Vector3d BulkMesh::barycentric(int t, const Vec2& x) const {
  const Vec2 a = corner(t, 0), b = corner(t, 1), c = corner(t, 2);
  const double den = cross2(b - a, c - a);
  Eigen::Vector3d l;
  l[1] = cross2(x - a, c - a) / den;
  l[2] = cross2(b - a, x - a) / den;
  l[0] = 1.0 - l[1] - l[2];
  return l;
}

int BulkMesh::root_containing(const Vec2& x) const {
  const double tol = 1e-12 * std::max(1.0, domain_.diameter());
  int best = -1;
  double best_min = -std::numeric_limits<double>::max();
  for (int r : roots_) {
    const auto l = barycentric(r, x);
    const double mn = l.minCoeff();
    if (mn >= -tol) return r;
    if (mn > best_min) {
      best_min = mn;
      best = r;
    }
  }
  if (best_min > -1e-9) return best;
  return -1;
}

std::pair<int, Eigen::Vector3d> BulkMesh::locate(const Vec2& x) const {
  if (!domain_.contains(x, 1e-12 * std::max(1.0, domain_.diameter())))
    throw OutOfDomain("locate: point outside the domain");
  int t = root_containing(x);
  if (t < 0) throw OutOfDomain("locate: no root triangle contains the point");
  while (tris_[t].child[0] >= 0 && !tris_[t].active) {
    const int c0 = tris_[t].child[0], c1 = tris_[t].child[1];
    const double m0 = barycentric(c0, x).minCoeff();
    const double m1 = barycentric(c1, x).minCoeff();
    t = (m0 >= m1) ? c0 : c1;
  }
  Eigen::Vector3d l = barycentric(t, x);
  for (int k = 0; k < 3; ++k) l[k] = std::max(0.0, l[k]);
  const double s = l.sum();
  if (s <= 0.0) throw OutOfDomain("locate: degenerate barycentric coordinates");
  l /= s;
  return {t, l};
}

int BulkMesh::boundary_side(int va, int vb) const {
  const double tol = 1e-12 * std::max(1.0, domain_.diameter());
  const Vec2& a = verts_[va];
  const Vec2& b = verts_[vb];
  if (std::abs(a.y() - domain_.lo.y()) <= tol && std::abs(b.y() - domain_.lo.y()) <= tol) return 0;
  if (std::abs(a.x() - domain_.hi.x()) <= tol && std::abs(b.x() - domain_.hi.x()) <= tol) return 1;
  if (std::abs(a.y() - domain_.hi.y()) <= tol && std::abs(b.y() - domain_.hi.y()) <= tol) return 2;
  if (std::abs(a.x() - domain_.lo.x()) <= tol && std::abs(b.x() - domain_.lo.x()) <= tol) return 3;
  return -1;
}

std::vector<std::pair<int, int>> BulkMesh::leaf_edges() const {
  std::vector<std::pair<int, int>> edges;
  for (int leaf : leaves_)
    for (int k = 0; k < 3; ++k) {
      int a = tris_[leaf].v[k], b = tris_[leaf].v[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      edges.emplace_back(a, b);
    }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

void BulkMesh::dump(std::ostream& os) const {
  for (size_t i = 0; i < verts_.size(); ++i)
    os << "v " << verts_[i].x() << ' ' << verts_[i].y() << '\n';
  for (int leaf : leaves_) {
    const Tri& T = tris_[leaf];
    os << "t " << T.v[0] << ' ' << T.v[1] << ' ' << T.v[2] << ' ' << T.level << '\n';
  }
}

double tri_network_distance(const BulkMesh& mesh, int t, const CurveNetwork& net) {
  double best = std::numeric_limits<double>::max();
  const Vec2 a = mesh.corner(t, 0), b = mesh.corner(t, 1), c = mesh.corner(t, 2);
  for (const PolyCurve& curve : net.curves) {
    for (int j = 0; j < curve.segment_count(); ++j) {
      auto [p, q] = curve.segment(j);
      const Vec2& s0 = curve.vertices[p];
      const Vec2& s1 = curve.vertices[q];
      double d = std::min({segment_segment_distance(a, b, s0, s1),
                           segment_segment_distance(b, c, s0, s1),
                           segment_segment_distance(c, a, s0, s1)});
      if (d > 0.0 && mesh.barycentric(t, s0).minCoeff() >= 0.0) d = 0.0;
      best = std::min(best, d);
      if (best == 0.0) return 0.0;
    }
  }
  return best;
}

namespace {

struct SegGrid {
  const CurveNetwork* net = nullptr;
  Box2 box;
  int n = 1;
  std::vector<std::vector<std::pair<int, int>>> cells;  // (curve, seg)

  void build(const CurveNetwork& network, const Box2& domain) {
    net = &network;
    box = domain;
    n = std::max(1, static_cast<int>(std::sqrt(network.segment_count() / 2.0 + 1)) * 2);
    cells.assign(static_cast<size_t>(n) * n, {});
    for (int ci = 0; ci < network.curve_count(); ++ci) {
      const PolyCurve& c = network.curves[ci];
      for (int j = 0; j < c.segment_count(); ++j) {
        auto [p, q] = c.segment(j);
        insert(ci, j, c.vertices[p], c.vertices[q]);
      }
    }
  }
  void cell_range(const Vec2& lo, const Vec2& hi, int& i0, int& i1, int& j0, int& j1) const {
    i0 = std::clamp(static_cast<int>((lo.x() - box.lo.x()) / box.width() * n), 0, n - 1);
    i1 = std::clamp(static_cast<int>((hi.x() - box.lo.x()) / box.width() * n), 0, n - 1);
    j0 = std::clamp(static_cast<int>((lo.y() - box.lo.y()) / box.height() * n), 0, n - 1);
    j1 = std::clamp(static_cast<int>((hi.y() - box.lo.y()) / box.height() * n), 0, n - 1);
  }
  void insert(int ci, int j, const Vec2& a, const Vec2& b) {
    int i0, i1, j0, j1;
    cell_range(a.cwiseMin(b), a.cwiseMax(b), i0, i1, j0, j1);
    for (int jj = j0; jj <= j1; ++jj)
      for (int ii = i0; ii <= i1; ++ii)
        cells[static_cast<size_t>(jj) * n + ii].emplace_back(ci, j);
  }
  double distance(const BulkMesh& mesh, int t, double cutoff) const {
    const Vec2 a = mesh.corner(t, 0), b = mesh.corner(t, 1), c = mesh.corner(t, 2);
    const Vec2 lo = a.cwiseMin(b).cwiseMin(c) - Vec2(cutoff, cutoff);
    const Vec2 hi = a.cwiseMax(b).cwiseMax(c) + Vec2(cutoff, cutoff);
    int i0, i1, j0, j1;
    cell_range(lo, hi, i0, i1, j0, j1);
    double best = std::numeric_limits<double>::max();
    for (int jj = j0; jj <= j1; ++jj)
      for (int ii = i0; ii <= i1; ++ii)
        for (auto [ci, sj] : cells[static_cast<size_t>(jj) * n + ii]) {
          const PolyCurve& cv = net->curves[ci];
          auto [p, q] = cv.segment(sj);
          const Vec2& s0 = cv.vertices[p];
          const Vec2& s1 = cv.vertices[q];
          double d = std::min({segment_segment_distance(a, b, s0, s1),
                               segment_segment_distance(b, c, s0, s1),
                               segment_segment_distance(c, a, s0, s1)});
          if (d > 0.0 && mesh.barycentric(t, s0).minCoeff() >= 0.0) d = 0.0;
          best = std::min(best, d);
          if (best == 0.0) return 0.0;
        }
    return best;
  }
};

}  // namespace

BulkMesh adapt(const BulkMesh& mesh, const CurveNetwork& net, int k, int l) {
  if (k < l || l < 0) throw ArgumentError("adapt: requires k >= l >= 0");
  BulkMesh m = mesh;
  m.refresh();
  const double H = m.domain().min_side();
  const double hf = H / static_cast<double>(1 << k);
  const double hc = H / static_cast<double>(1 << l);

  SegGrid sg;
  sg.build(net, m.domain());

  auto target = [&](int t) {
    const double d = sg.distance(m, t, m.diameter(t));
    return d <= m.diameter(t) ? hf : hc;
  };

  bool changed = true;
  int sweep = 0;
  while (changed) {
    if (++sweep > 4 * BulkMesh::kMaxLevel) throw MeshError("adapt: refinement did not settle");
    changed = false;
    const auto snapshot = m.leaves();
    for (int t : snapshot) {
      if (!m.tri(t).active) continue;
      if (m.diameter(t) > target(t)) {
        m.bisect(t);
        changed = true;
      }
    }
    m.refresh();
  }

  // Coarsening: deepest leaves first, merge while the merged parent still
  // satisfies its own target.
  changed = true;
  while (changed) {
    changed = false;
    auto snapshot = m.leaves();
    std::sort(snapshot.begin(), snapshot.end(),
              [&m](int a, int b) { return m.tri(a).level > m.tri(b).level; });
    auto ok_parent = [&](int p) { return m.diameter(p) <= target(p); };
    for (int t : snapshot) {
      if (!m.tri(t).active) continue;
      if (m.tri(t).parent < 0) continue;
      if (m.coarsen_leaf(t, ok_parent)) changed = true;
    }
    m.refresh();
  }
  return m;
}

}  // namespace triflow
