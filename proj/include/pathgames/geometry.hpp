#pragma once

#include <span>
#include <vector>

#include "pathgames/vec2.hpp"

namespace pathgames {

// Closed half-plane {x : normal . x <= offset}. The normal is stored with
// unit Euclidean length; constructors rescale the offset accordingly.
struct HalfSpace {
  Vec2 normal;
  double offset = 0.0;

  HalfSpace() = default;
  HalfSpace(Vec2 n, double b);

  double signed_distance(Vec2 p) const { return normal.dot(p) - offset; }
};

// Bounded nonempty convex region, kept in dual form: CCW vertex ring and the
// matching minimal face list (one face per hull edge). Degenerate regions
// (a point or a segment) are representable; they get synthetic face sets so
// containment still works.
class Polytope {
 public:
  Polytope() = default;

  // Convex hull of the given points. Throws std::invalid_argument when empty.
  static Polytope from_points(std::span<const Vec2> points);

  const std::vector<HalfSpace>& faces() const { return faces_; }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  bool is_degenerate() const { return vertices_.size() < 3; }

  Vec2 centroid() const;

 private:
  std::vector<HalfSpace> faces_;
  std::vector<Vec2> vertices_;  // CCW, no duplicates, strict turns

  friend Polytope translate(const Polytope& p, Vec2 delta);
};

// Axis-aligned rectangle. half_extent must be positive componentwise.
Polytope box(Vec2 center, Vec2 half_extent);

// Whether x lies in p (closed set, +1e-9 slack per face).
bool contains(const Polytope& p, Vec2 x, double tol = 1e-9);

// Rigid shift: offsets become b + a.delta, vertices shift by delta.
Polytope translate(const Polytope& p, Vec2 delta);

// Point reflection through the origin (-P).
Polytope reflect(const Polytope& p);

// Minkowski sum A (+) B of two convex regions.
Polytope minkowski_sum(const Polytope& a, const Polytope& b);

// Hausdorff distance between two convex regions.
double hausdorff_distance(const Polytope& a, const Polytope& b);

// Euclidean distance from x to p (0 when inside).
double distance(const Polytope& p, Vec2 x);

// Agent body relative to its reference point: C = {x - r : x in body}.
// The reference must lie inside the body. Default: a point-like agent.
class AgentShape {
 public:
  AgentShape();
  explicit AgentShape(Polytope relative_region);

  const Polytope& relative_region() const { return relative_region_; }

 private:
  Polytope relative_region_;
};

// Set of reference positions at which the agent overlaps the obstacle:
// K = (-C) (+) P.
Polytope collision_volume(const AgentShape& agent, const Polytope& obstacle);

// Internal consistency: vertices satisfy all faces, each face is tight at
// enough vertices, hull ordering is CCW. Used by tests and debug checks.
bool is_consistent(const Polytope& p, double tol = 1e-9);

}  // namespace pathgames
