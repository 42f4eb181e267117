#include "triflow/geometry/network_io.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

namespace triflow {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& tok) {
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{}) throw IoError("network file: bad float '" + tok + "'");
  return v;
}

}  // namespace

void write_network(std::ostream& os, const CurveNetwork& net) {
  os << "domain " << format_double(net.domain.lo.x()) << ' ' << format_double(net.domain.lo.y())
     << ' ' << format_double(net.domain.hi.x()) << ' ' << format_double(net.domain.hi.y()) << '\n';
  for (const PolyCurve& c : net.curves) {
    os << "curve " << c.id << (c.closed ? " closed" : "") << '\n';
    for (const Vec2& p : c.vertices)
      os << format_double(p.x()) << ' ' << format_double(p.y()) << '\n';
  }
  for (const TripleJunction& tj : net.junctions) {
    os << "junction " << tj.k;
    for (int j = 0; j < 3; ++j)
      os << ' ' << tj.incident[j].first << ' ' << static_cast<int>(tj.incident[j].second);
    for (int j = 0; j < 3; ++j) os << ' ' << tj.orientation[j];
    os << '\n';
  }
  for (const BoundaryPoint& bp : net.boundary_points)
    os << "bpoint " << bp.k << ' ' << bp.curve << ' ' << static_cast<int>(bp.end) << '\n';
  for (int l = 0; l < net.region_count(); ++l) {
    os << "region " << l << " :";
    for (const auto& sc : net.regions.regions[l]) os << ' ' << sc.sign * (sc.curve + 1);
    os << '\n';
  }
}

CurveNetwork read_network(std::istream& is) {
  Box2 domain;
  bool have_domain = false;
  struct RawCurve { int id; bool closed; std::vector<Vec2> pts; };
  std::vector<RawCurve> curves;
  std::vector<TripleJunction> junctions;
  std::vector<BoundaryPoint> bpoints;
  std::vector<std::vector<RegionTopology::SignedCurve>> regions;

  std::string line;
  RawCurve* cur = nullptr;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "domain") {
      std::string a, b, c, d;
      ls >> a >> b >> c >> d;
      domain.lo = Vec2(parse_double(a), parse_double(b));
      domain.hi = Vec2(parse_double(c), parse_double(d));
      have_domain = true;
    } else if (tok == "curve") {
      RawCurve rc;
      ls >> rc.id;
      std::string flag;
      rc.closed = (ls >> flag) && flag == "closed";
      curves.push_back(rc);
      cur = &curves.back();
    } else if (tok == "junction") {
      TripleJunction tj;
      ls >> tj.k;
      for (int j = 0; j < 3; ++j) {
        int s, p;
        ls >> s >> p;
        tj.incident[j] = {s, p == 0 ? CurveEnd::start : CurveEnd::end};
      }
      for (int j = 0; j < 3; ++j) ls >> tj.orientation[j];
      junctions.push_back(tj);
      cur = nullptr;
    } else if (tok == "bpoint") {
      BoundaryPoint bp;
      int p;
      ls >> bp.k >> bp.curve >> p;
      bp.end = p == 0 ? CurveEnd::start : CurveEnd::end;
      bpoints.push_back(bp);
      cur = nullptr;
    } else if (tok == "region") {
      int l;
      std::string colon;
      ls >> l >> colon;
      std::vector<RegionTopology::SignedCurve> b;
      int signed_id;
      while (ls >> signed_id) {
        RegionTopology::SignedCurve sc;
        sc.sign = signed_id > 0 ? 1 : -1;
        sc.curve = std::abs(signed_id) - 1;
        b.push_back(sc);
      }
      regions.push_back(std::move(b));
      cur = nullptr;
    } else {
      // vertex line of the current curve
      if (!cur) throw IoError("network file: stray vertex line '" + line + "'");
      std::string ytok;
      if (!(ls >> ytok)) throw IoError("network file: vertex line needs two floats");
      cur->pts.emplace_back(parse_double(tok), parse_double(ytok));
    }
  }
  if (!have_domain) throw IoError("network file: missing domain line");

  NetworkBuilder b(domain);
  for (auto& rc : curves) b.add_curve(std::move(rc.pts), rc.closed);
  for (auto& tj : junctions) b.add_junction(tj.incident, tj.orientation);
  for (auto& bp : bpoints) b.add_boundary_point(bp.curve, bp.end);
  for (auto& r : regions) b.add_region(r);
  return b.build();
}

void save_network(const std::string& path, const CurveNetwork& net) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  write_network(os, net);
}

CurveNetwork load_network(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open for reading: " + path);
  return read_network(is);
}

}  // namespace triflow
