#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace triflow {

using Vec2 = Eigen::Vector2d;
using VecXd = Eigen::VectorXd;
using MatXd = Eigen::MatrixXd;

/// Axis-aligned box, used for the flow domain and for broad-phase tests.
struct Box2 {
  Vec2 lo{0.0, 0.0};
  Vec2 hi{1.0, 1.0};

  double width() const { return hi.x() - lo.x(); }
  double height() const { return hi.y() - lo.y(); }
  double area() const { return width() * height(); }
  double min_side() const { return std::min(width(), height()); }
  double diameter() const { return (hi - lo).norm(); }
  bool contains(const Vec2& p, double tol = 0.0) const {
    return p.x() >= lo.x() - tol && p.x() <= hi.x() + tol &&
           p.y() >= lo.y() - tol && p.y() <= hi.y() + tol;
  }
};

/// Clockwise 90-degree rotation; the global normal convention for curve
/// segments is nu = rot_cw(q1 - q0) / |q1 - q0|.
inline Vec2 rot_cw(const Vec2& v) { return Vec2(v.y(), -v.x()); }
inline Vec2 rot_ccw(const Vec2& v) { return Vec2(-v.y(), v.x()); }
inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// ---------------------------------------------------------------------------
// Error taxonomy. All solver-facing failures derive from Error so callers can
// catch the whole family; the concrete types match the failure surfaces of
// the individual subsystems.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateSegment : Error { using Error::Error; };
struct TopologyError     : Error { using Error::Error; };
struct ArgumentError     : Error { using Error::Error; };
struct Unsupported       : Error { using Error::Error; };
struct MeshError         : Error { using Error::Error; };
struct GeometryError     : Error { using Error::Error; };
struct OutOfDomain       : Error { using Error::Error; };
struct SpaceError        : Error { using Error::Error; };
struct ContextError      : Error { using Error::Error; };
struct SolverError       : Error { using Error::Error; };
struct AssumptionViolated: Error { using Error::Error; };
struct PicardDiverged    : Error { using Error::Error; };
struct IoError           : Error { using Error::Error; };

}  // namespace triflow
