#pragma once

#include <iosfwd>
#include <string>

#include "triflow/geometry/curve_network.hpp"

namespace triflow {

/// Plain-text network format, one block per entity:
///   domain x0 y0 x1 y1
///   curve <id> [closed]   followed by one "x y" line per vertex
///   junction k s1 p1 s2 p2 s3 p3 o1 o2 o3
///   bpoint k s p
///   region l : +-i +-j ...   (1-based signed curve ids encode the region
///                             orientation vector)
/// Floats use shortest round-trip decimal representation.
void write_network(std::ostream& os, const CurveNetwork& net);
CurveNetwork read_network(std::istream& is);

void save_network(const std::string& path, const CurveNetwork& net);
CurveNetwork load_network(const std::string& path);

/// Shortest round-trip decimal formatting for doubles.
std::string format_double(double v);

}  // namespace triflow
