#include <sstream>

#include "doctest.h"
#include "test_helpers.hpp"
#include "triflow/geometry/curve_network.hpp"
#include "triflow/geometry/network_io.hpp"
#include "triflow/geometry/network_ops.hpp"

using namespace triflow;
using namespace triflow::testing;

namespace {

PolyCurve make_curve(std::vector<Vec2> pts, bool closed = false) {
  PolyCurve c;
  c.id = 0;
  c.vertices = std::move(pts);
  c.closed = closed;
  return c;
}

}  // namespace

TEST_CASE("segment_normal follows the clockwise rotation convention") {
  auto c = make_curve({{0, 0}, {1, 0}, {1, 1}});
  CHECK((segment_normal(c, 0) - Vec2(0, -1)).norm() < 1e-15);

  auto c2 = make_curve({{0, 0}, {0, 2}});
  CHECK((segment_normal(c2, 0) - Vec2(1, 0)).norm() < 1e-15);

  auto c3 = make_curve({{0, 0}, {1, 1}});
  const double s = std::sqrt(2.0) / 2.0;
  CHECK((segment_normal(c3, 0) - Vec2(s, -s)).norm() < 1e-14);

  auto bad = make_curve({{0, 0}, {0, 0}});
  CHECK_THROWS_AS(segment_normal(bad, 0), DegenerateSegment);
}

TEST_CASE("segment normals are unit length") {
  auto net = regular_ngon_net(17, 0.83, Vec2(0.1, -0.2));
  for (int j = 0; j < net.curves[0].segment_count(); ++j)
    CHECK(std::abs(segment_normal(net.curves[0], j).norm() - 1.0) < 1e-14);
}

TEST_CASE("vertex_normal: collinear, corner, endpoint cases") {
  Box2 box{Vec2(-2, -2), Vec2(2, 2)};
  // Two collinear unit segments.
  {
    NetworkBuilder b(box);
    b.add_curve({{0, 0}, {1, 0}, {2, 0}});
    b.validate(false);
    auto net = b.build();
    const Vec2 w = vertex_normal(net, 0, 1);
    CHECK((w - Vec2(0, -1)).norm() < 1e-15);
    CHECK(std::abs(w.norm() - 1.0) < 1e-15);
    // Endpoint vertex: single incident segment.
    CHECK((vertex_normal(net, 0, 0) - Vec2(0, -1)).norm() < 1e-15);
  }
  // Right-angle corner with equal lengths: nu1 = (0,-1), nu2 = (1,0).
  {
    NetworkBuilder b(box);
    b.add_curve({{0, 0}, {1, 0}, {1, 1}});
    b.validate(false);
    auto net = b.build();
    CHECK((vertex_normal(net, 0, 1) - Vec2(0.5, -0.5)).norm() < 1e-15);
  }
}

TEST_CASE("lumped-projection identity <omega,zeta>^h = <nu,zeta>^h = <nu,zeta>") {
  auto net = regular_ngon_net(23, 0.7, Vec2(0.05, 0.3));
  const int V = net.vertex_count();
  const PolyCurve& c = net.curves[0];

  std::uniform_real_distribution<double> U(-1.0, 1.0);
  MatXd zeta(V, 2);
  for (int v = 0; v < V; ++v) zeta.row(v) = Vec2(U(rng()), U(rng())).transpose();

  MatXd omega(V, 2);
  for (int v = 0; v < V; ++v) omega.row(v) = vertex_normal(net, 0, v).transpose();

  const double lhs = lumped_inner(net, omega, zeta);

  double mid = 0.0, rhs = 0.0;
  for (int j = 0; j < c.segment_count(); ++j) {
    auto [a, b] = c.segment(j);
    const Vec2 nu = segment_normal(c, j);
    const double len = segment_length(c, j);
    mid += 0.5 * len * (nu.dot(zeta.row(a)) + nu.dot(zeta.row(b)));
    // exact integral of nu . (linear zeta) over the segment
    rhs += len * nu.dot(0.5 * (zeta.row(a) + zeta.row(b)));
  }
  CHECK(lhs == doctest::Approx(mid).epsilon(1e-12));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("lumped and exact inner products") {
  Box2 box{Vec2(-3, -3), Vec2(3, 3)};
  NetworkBuilder b(box);
  b.add_curve({{0, 0}, {2, 0}});
  b.validate(false);
  auto net = b.build();

  MatXd u(2, 1), v(2, 1);
  u << 1, 3;
  v << 1, 1;
  CHECK(lumped_inner(net, u, v) == doctest::Approx(4.0));
  // linear u, constant v: midpoint value 2 x length 2
  CHECK(exact_inner(net, u, v) == doctest::Approx(4.0));

  MatXd z = MatXd::Zero(2, 1);
  CHECK(lumped_inner(net, z, v) == 0.0);

  MatXd w(3, 1);
  CHECK_THROWS_AS(lumped_inner(net, w, v), ArgumentError);

  // u = v = 1 on closed square of perimeter 4.
  NetworkBuilder bs(box);
  bs.add_curve({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, true);
  bs.validate(false);
  auto sq = bs.build();
  MatXd ones = MatXd::Ones(4, 1);
  CHECK(lumped_inner(sq, ones, ones) == doctest::Approx(4.0));
  CHECK(exact_inner(sq, ones, ones) == doctest::Approx(4.0));

  // lumped == exact whenever u.v is linear per segment.
  MatXd ulin(4, 1), vone(4, 1);
  ulin << 0.3, 1.7, -2.2, 0.9;
  vone.setOnes();
  CHECK(lumped_inner(sq, ulin, vone) == doctest::Approx(exact_inner(sq, ulin, vone)).epsilon(1e-13));

  // positivity
  CHECK(lumped_inner(sq, ulin, ulin) >= 0.0);
}

TEST_CASE("interfacial energy") {
  // unit circle as regular N-gon: 2 N sin(pi/N)
  const int N = 40;
  auto net = regular_ngon_net(N, 1.0);
  VecXd g1 = VecXd::Ones(1);
  CHECK(interfacial_energy(net, g1) == doctest::Approx(2.0 * N * std::sin(M_PI / N)).epsilon(1e-13));

  Box2 box{Vec2(-3, -3), Vec2(3, 3)};
  NetworkBuilder b(box);
  b.add_curve({{0, 0}, {1, 0}});
  b.add_curve({{0, 1}, {2, 1}});
  b.validate(false);
  auto two = b.build();
  VecXd g(2);
  g << 3.0, 0.5;
  CHECK(interfacial_energy(two, g) == doctest::Approx(4.0));
}

TEST_CASE("region_area: square, N-gon, partition") {
  Box2 box{Vec2(-2, -2), Vec2(2, 2)};
  NetworkBuilder b(box);
  b.add_curve({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, true);
  b.add_region({{0, -1}});  // exterior
  b.add_region({{0, +1}});  // unit square
  auto net = b.build();
  CHECK(region_area(net, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(region_area(net, 0) + region_area(net, 1) == doctest::Approx(box.area()).epsilon(1e-13));

  const int N = 9;
  auto ng = regular_ngon_net(N, 0.3);
  CHECK(region_area(ng, 1) ==
        doctest::Approx(0.5 * N * 0.3 * 0.3 * std::sin(2 * M_PI / N)).epsilon(1e-13));
}

TEST_CASE("double bubble network: areas partition, assumptions pass") {
  auto net = double_bubble_arcs(0.3, 48, 16);
  const double r = 0.3;
  const double bubble = 2.0 * M_PI * r * r / 3.0 + std::sqrt(3.0) / 4.0 * r * r;
  // polygonal area is close to (but below) the smooth area
  CHECK(region_area(net, 0) == doctest::Approx(bubble).epsilon(1e-3));
  CHECK(region_area(net, 0) == doctest::Approx(region_area(net, 1)).epsilon(1e-13));
  double tot = 0;
  for (int l = 0; l < 3; ++l) tot += region_area(net, l);
  CHECK(tot == doctest::Approx(net.domain.area()).epsilon(1e-13));

  auto rep = check_assumptions(net);
  CHECK(rep.ok());

  // locate_region probes
  CHECK(locate_region(net, Vec2(-0.2, 0.0)) == 0);
  CHECK(locate_region(net, Vec2(0.2, 0.0)) == 1);
  CHECK(locate_region(net, Vec2(0.9, 0.9)) == 2);
  CHECK_THROWS_AS(locate_region(net, Vec2(5, 5)), OutOfDomain);
}

TEST_CASE("time-weighted normals: stationary, shrink, translation") {
  auto net = regular_ngon_net(12, 0.5);
  const VecXd x0 = net.positions();

  auto nh0 = time_weighted_normals(net, x0);
  for (int j = 0; j < net.curves[0].segment_count(); ++j)
    CHECK((nh0[j] - segment_normal(net.curves[0], j)).norm() < 1e-14);

  // uniform shrink about the center by 1/2: nu^{m+1/2} = 0.75 nu^m
  VecXd xs = 0.5 * x0;
  auto nhs = time_weighted_normals(net, xs);
  for (int j = 0; j < net.curves[0].segment_count(); ++j)
    CHECK((nhs[j] - 0.75 * segment_normal(net.curves[0], j)).norm() < 1e-14);

  // rigid translation
  VecXd xt = x0;
  for (int v = 0; v < net.vertex_count(); ++v) {
    xt[2 * v] += 0.3;
    xt[2 * v + 1] -= 0.1;
  }
  auto nht = time_weighted_normals(net, xt);
  for (int j = 0; j < net.curves[0].segment_count(); ++j)
    CHECK((nht[j] - segment_normal(net.curves[0], j)).norm() < 1e-14);
}

TEST_CASE("volume difference lemma: translation, scaling, random (oracle)") {
  Box2 box{Vec2(-4, -4), Vec2(4, 4)};
  NetworkBuilder b(box);
  b.add_curve({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, true);
  b.add_region({{0, -1}});
  b.add_region({{0, +1}});
  auto sq = b.build();

  const VecXd x0 = sq.positions();

  // rigid translation -> 0
  VecXd xt = x0;
  for (int v = 0; v < sq.vertex_count(); ++v) xt[2 * v] += 0.27;
  CHECK(std::abs(volume_difference_discrete(sq, xt, 1)) < 1e-14);

  // scale about centroid by 1.1 -> (1.1)^2 - 1 = 0.21
  const Vec2 cen(0.5, 0.5);
  VecXd xs = x0;
  for (int v = 0; v < sq.vertex_count(); ++v) {
    xs[2 * v] = cen.x() + 1.1 * (x0[2 * v] - cen.x());
    xs[2 * v + 1] = cen.y() + 1.1 * (x0[2 * v + 1] - cen.y());
  }
  CHECK(volume_difference_discrete(sq, xs, 1) == doctest::Approx(0.21).epsilon(1e-13));

  // random perturbations vs shoelace oracle
  std::uniform_real_distribution<double> U(-0.2, 0.2);
  auto poly_net = regular_ngon_net(11, 0.8, Vec2(0.0, 0.1));
  const VecXd p0 = poly_net.positions();
  for (int trial = 0; trial < 50; ++trial) {
    VecXd p1 = p0;
    for (int i = 0; i < p1.size(); ++i) p1[i] += U(rng());
    std::vector<Vec2> before, after;
    for (int v = 0; v < poly_net.vertex_count(); ++v) {
      before.emplace_back(p0[2 * v], p0[2 * v + 1]);
      after.emplace_back(p1[2 * v], p1[2 * v + 1]);
    }
    const double oracle = shoelace_area(after) - shoelace_area(before);
    CHECK(volume_difference_discrete(poly_net, p1, 1) == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("junction W vectors: symmetric fan, collinear, homogeneity") {
  Box2 box{Vec2(-3, -3), Vec2(3, 3)};
  auto dir = [](double deg) { return Vec2(std::cos(deg * M_PI / 180), std::sin(deg * M_PI / 180)); };
  for (double scale : {1.0, 2.5}) {
    NetworkBuilder b(box);
    for (double deg : {90.0, 210.0, 330.0})
      b.add_curve({Vec2(0, 0), scale * dir(deg), 2.0 * scale * dir(deg)});
    using CE = CurveEnd;
    b.add_junction({{{0, CE::start}, {1, CE::start}, {2, CE::start}}});
    b.validate(false);
    auto net = b.build();
    auto W = junction_W_vectors(net, 0);
    // The three W's sum to ~0 and any two differences span R^2.
    CHECK((W[0] + W[1] + W[2]).norm() < 1e-14 * scale);
    CHECK(std::abs(cross2(W[0] - W[2], W[1] - W[2])) > 0.1 * scale * scale);
    if (scale != 1.0) {
      auto net1 = [&] {
        NetworkBuilder b1(box);
        for (double deg : {90.0, 210.0, 330.0})
          b1.add_curve({Vec2(0, 0), dir(deg), 2.0 * dir(deg)});
        b1.add_junction({{{0, CE::start}, {1, CE::start}, {2, CE::start}}});
        b1.validate(false);
        return b1.build();
      }();
      auto W1 = junction_W_vectors(net1, 0);
      for (int j = 0; j < 3; ++j) CHECK((W[j] - scale * W1[j]).norm() < 1e-13 * scale);
    }
  }
  // All three incident segments collinear: differences colinear, A2 fails.
  NetworkBuilder bc(box);
  bc.add_curve({Vec2(0, 0), Vec2(1, 0), Vec2(2, 0)});
  bc.add_curve({Vec2(0, 0), Vec2(-1, 0), Vec2(-2, 0)});
  bc.add_curve({Vec2(0, 0), Vec2(1.0, 0), Vec2(2.5, 0)});
  using CE = CurveEnd;
  bc.add_junction({{{0, CE::start}, {1, CE::start}, {2, CE::start}}});
  bc.validate(false);
  auto cnet = bc.build();
  auto Wc = junction_W_vectors(cnet, 0);
  CHECK(std::abs(cross2(Wc[0] - Wc[2], Wc[1] - Wc[2])) < 1e-14);
  auto rep = check_assumptions(cnet);
  CHECK(!rep.a2_ok);
}

TEST_CASE("check_assumptions: straight segment fails A3, zig-zag fails A2") {
  Box2 box{Vec2(-3, -3), Vec2(3, 3)};
  {
    NetworkBuilder b(box);
    b.add_curve({{0, 0}, {1, 0}, {2, 0}, {3, 0}});
    b.validate(false);
    auto net = b.build();
    auto rep = check_assumptions(net);
    CHECK(!rep.a3_ok);  // all omega parallel: span dim 1
  }
  {
    NetworkBuilder b(box);
    b.add_curve({{0, 0}, {1, 0}, {0, 0}, {1, 0}});
    b.validate(false);
    auto net = b.build();
    // fold-back vertices: nu1 = -nu2 with equal lengths -> omega = 0
    auto rep = check_assumptions(net);
    CHECK(!rep.a2_ok);
  }
}

TEST_CASE("network serialization round-trips exactly") {
  auto net = double_bubble_arcs(0.3, 24, 8);
  std::ostringstream os;
  write_network(os, net);
  std::istringstream is(os.str());
  auto back = read_network(is);

  REQUIRE(back.curve_count() == net.curve_count());
  for (int c = 0; c < net.curve_count(); ++c) {
    REQUIRE(back.curves[c].vertex_count() == net.curves[c].vertex_count());
    CHECK(back.curves[c].closed == net.curves[c].closed);
    for (int v = 0; v < net.curves[c].vertex_count(); ++v) {
      CHECK(back.curves[c].vertices[v].x() == net.curves[c].vertices[v].x());
      CHECK(back.curves[c].vertices[v].y() == net.curves[c].vertices[v].y());
    }
  }
  REQUIRE(back.junctions.size() == net.junctions.size());
  for (size_t k = 0; k < net.junctions.size(); ++k)
    CHECK(back.junctions[k].orientation == net.junctions[k].orientation);
  REQUIRE(back.region_count() == net.region_count());

  // second round trip is bit-identical text
  std::ostringstream os2;
  write_network(os2, back);
  CHECK(os.str() == os2.str());
}

TEST_CASE("displaced network keeps junction coincidence exactly") {
  auto net = double_bubble_arcs(0.3, 24, 8);
  VecXd x = net.positions();
  std::uniform_real_distribution<double> U(-0.005, 0.005);
  for (int i = 0; i < x.size(); ++i) x[i] += U(rng());
  // identical displacement applied to all three junction copies
  for (int k = 0; k < 2; ++k) {
    auto jv = net.junction_vertices(k);
    for (int j = 1; j < 3; ++j) {
      x[2 * jv[j]] = x[2 * jv[0]];
      x[2 * jv[j] + 1] = x[2 * jv[0] + 1];
    }
  }
  auto moved = net.displaced(x);
  for (int k = 0; k < 2; ++k) {
    auto jv = moved.junction_vertices(k);
    auto [c0, v0] = moved.vertex_curve_local(jv[0]);
    for (int j = 1; j < 3; ++j) {
      auto [c, v] = moved.vertex_curve_local(jv[j]);
      CHECK((moved.vertex(c, v) - moved.vertex(c0, v0)).norm() == 0.0);
    }
  }
}
