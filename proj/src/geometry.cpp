#include "pathgames/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pathgames {

namespace {

constexpr double kCollinearTol = 1e-9;

// Lexicographic (y, x) minimum, the canonical start vertex for edge merging.
std::size_t bottom_most(const std::vector<Vec2>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i].y < v[best].y || (v[i].y == v[best].y && v[i].x < v[best].x)) {
      best = i;
    }
  }
  return best;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](Vec2 a, Vec2 b) {
                          return std::abs(a.x - b.x) <= kCollinearTol &&
                                 std::abs(a.y - b.y) <= kCollinearTol;
                        }),
            pts.end());
  if (pts.size() <= 2) return pts;

  // Andrew's monotone chain with strict turns, so collinear interior points
  // are dropped and the resulting face list is minimal.
  auto build = [&](auto begin, auto end) {
    std::vector<Vec2> chain;
    for (auto it = begin; it != end; ++it) {
      while (chain.size() >= 2 &&
             (chain[chain.size() - 1] - chain[chain.size() - 2])
                     .cross(*it - chain[chain.size() - 2]) <= kCollinearTol) {
        chain.pop_back();
      }
      chain.push_back(*it);
    }
    return chain;
  };
  std::vector<Vec2> lower = build(pts.begin(), pts.end());
  std::vector<Vec2> upper = build(pts.rbegin(), pts.rend());
  lower.pop_back();
  upper.pop_back();
  lower.insert(lower.end(), upper.begin(), upper.end());
  if (lower.size() < 3) return {pts.front(), pts.back()};  // all collinear
  return lower;
}

std::vector<HalfSpace> faces_of_ring(const std::vector<Vec2>& ring) {
  std::vector<HalfSpace> faces;
  const std::size_t n = ring.size();
  if (n == 1) {
    // A point: four axis-aligned planes through it.
    Vec2 v = ring[0];
    faces.emplace_back(Vec2{1, 0}, v.x);
    faces.emplace_back(Vec2{-1, 0}, -v.x);
    faces.emplace_back(Vec2{0, 1}, v.y);
    faces.emplace_back(Vec2{0, -1}, -v.y);
    return faces;
  }
  if (n == 2) {
    // A segment: the carrying line (both sides) plus end caps.
    Vec2 d = ring[1] - ring[0];
    double len = d.norm();
    Vec2 u{d.x / len, d.y / len};
    Vec2 perp{-u.y, u.x};
    faces.emplace_back(perp, perp.dot(ring[0]));
    faces.emplace_back(-perp, -perp.dot(ring[0]));
    faces.emplace_back(u, u.dot(ring[1]));
    faces.emplace_back(-u, -u.dot(ring[0]));
    return faces;
  }
  faces.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 a = ring[i];
    Vec2 b = ring[(i + 1) % n];
    Vec2 e = b - a;
    // Outward normal of a CCW edge.
    Vec2 normal{e.y, -e.x};
    faces.emplace_back(normal, normal.dot(a));
  }
  return faces;
}

}  // namespace

HalfSpace::HalfSpace(Vec2 n, double b) {
  double len = n.norm();
  if (!(len > 0.0) || !std::isfinite(len)) {
    throw std::invalid_argument("half-space normal must be nonzero");
  }
  normal = {n.x / len, n.y / len};
  offset = b / len;
}

Polytope Polytope::from_points(std::span<const Vec2> points) {
  if (points.empty()) {
    throw std::invalid_argument("polytope needs at least one point");
  }
  for (Vec2 p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::invalid_argument("polytope points must be finite");
    }
  }
  Polytope out;
  out.vertices_ = convex_hull({points.begin(), points.end()});
  out.faces_ = faces_of_ring(out.vertices_);
  return out;
}

Vec2 Polytope::centroid() const {
  Vec2 sum{0, 0};
  for (Vec2 v : vertices_) sum += v;
  return sum / static_cast<double>(vertices_.size());
}

Polytope box(Vec2 center, Vec2 half_extent) {
  if (!(half_extent.x > 0.0) || !(half_extent.y > 0.0)) {
    throw std::invalid_argument("box half_extent must be positive");
  }
  const Vec2 corners[4] = {
      {center.x - half_extent.x, center.y - half_extent.y},
      {center.x + half_extent.x, center.y - half_extent.y},
      {center.x + half_extent.x, center.y + half_extent.y},
      {center.x - half_extent.x, center.y + half_extent.y},
  };
  return Polytope::from_points(corners);
}

bool contains(const Polytope& p, Vec2 x, double tol) {
  for (const HalfSpace& f : p.faces()) {
    if (f.signed_distance(x) > tol) return false;
  }
  return true;
}

Polytope translate(const Polytope& p, Vec2 delta) {
  Polytope out;
  out.vertices_ = p.vertices();
  for (Vec2& v : out.vertices_) v += delta;
  out.faces_ = p.faces();
  for (HalfSpace& f : out.faces_) f.offset += f.normal.dot(delta);
  return out;
}

Polytope reflect(const Polytope& p) {
  std::vector<Vec2> pts;
  pts.reserve(p.vertices().size());
  for (Vec2 v : p.vertices()) pts.push_back(-v);
  return Polytope::from_points(pts);
}

Polytope minkowski_sum(const Polytope& a, const Polytope& b) {
  const auto& va = a.vertices();
  const auto& vb = b.vertices();
  // Degenerate operands reduce to a translation or a small vertex-sum hull.
  if (va.size() == 1) return translate(b, va[0]);
  if (vb.size() == 1) return translate(a, vb[0]);
  if (va.size() == 2 || vb.size() == 2) {
    std::vector<Vec2> sums;
    sums.reserve(va.size() * vb.size());
    for (Vec2 p : va) {
      for (Vec2 q : vb) sums.push_back(p + q);
    }
    return Polytope::from_points(sums);
  }

  // CCW edge merge: walk both rings from their bottom-most vertices,
  // emitting edges in polar-angle order. O(|A| + |B|).
  const std::size_t n = va.size(), m = vb.size();
  const std::size_t ia0 = bottom_most(va), ib0 = bottom_most(vb);
  std::vector<Vec2> out;
  out.reserve(n + m);
  Vec2 cur = va[ia0] + vb[ib0];
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    out.push_back(cur);
    Vec2 ea = va[(ia0 + i + 1) % n] - va[(ia0 + i) % n];
    Vec2 eb = vb[(ib0 + j + 1) % m] - vb[(ib0 + j) % m];
    if (j >= m) {
      cur += ea;
      ++i;
    } else if (i >= n) {
      cur += eb;
      ++j;
    } else {
      double c = ea.cross(eb);
      if (c > kCollinearTol) {
        cur += ea;
        ++i;
      } else if (c < -kCollinearTol) {
        cur += eb;
        ++j;
      } else {  // parallel edges advance together
        cur += ea + eb;
        ++i;
        ++j;
      }
    }
  }
  // The merged ring is convex up to roundoff; a hull pass canonicalizes it.
  return Polytope::from_points(out);
}

double distance(const Polytope& p, Vec2 x) {
  if (contains(p, x, 0.0)) return 0.0;
  const auto& v = p.vertices();
  if (v.size() == 1) return (x - v[0]).norm();
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 a = v[i];
    Vec2 b = v[(i + 1) % n];
    Vec2 ab = b - a;
    double t = ab.dot(x - a) / ab.dot(ab);
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, (x - (a + ab * t)).norm());
    if (n == 2) break;
  }
  return best;
}

double hausdorff_distance(const Polytope& a, const Polytope& b) {
  double d = 0.0;
  for (Vec2 v : a.vertices()) d = std::max(d, distance(b, v));
  for (Vec2 v : b.vertices()) d = std::max(d, distance(a, v));
  return d;
}

AgentShape::AgentShape()
    : relative_region_(Polytope::from_points(std::vector<Vec2>{{0, 0}})) {}

AgentShape::AgentShape(Polytope relative_region)
    : relative_region_(std::move(relative_region)) {
  if (!contains(relative_region_, Vec2{0, 0})) {
    throw std::invalid_argument(
        "agent reference point must lie inside the body");
  }
}

Polytope collision_volume(const AgentShape& agent, const Polytope& obstacle) {
  return minkowski_sum(reflect(agent.relative_region()), obstacle);
}

bool is_consistent(const Polytope& p, double tol) {
  const auto& verts = p.vertices();
  const auto& faces = p.faces();
  if (verts.empty() || faces.empty()) return false;
  for (Vec2 v : verts) {
    for (const HalfSpace& f : faces) {
      if (f.signed_distance(v) > tol) return false;
    }
  }
  if (verts.size() >= 3) {
    // CCW with strict turns.
    const std::size_t n = verts.size();
    for (std::size_t i = 0; i < n; ++i) {
      Vec2 a = verts[i], b = verts[(i + 1) % n], c = verts[(i + 2) % n];
      if ((b - a).cross(c - b) <= 0.0) return false;
    }
    // Every face tight at exactly one edge (two vertices).
    for (const HalfSpace& f : faces) {
      int tight = 0;
      for (Vec2 v : verts) {
        if (std::abs(f.signed_distance(v)) <= tol) ++tight;
      }
      if (tight != 2) return false;
    }
    if (faces.size() != verts.size()) return false;
  }
  return true;
}

}  // namespace pathgames
