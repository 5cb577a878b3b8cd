#include "pathgames/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

using namespace pathgames;

namespace {

std::vector<Vec2> random_convex_polygon(std::mt19937_64& rng, int max_vertices) {
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  std::uniform_int_distribution<int> count(3, max_vertices);
  std::vector<Vec2> pts;
  int n = count(rng);
  for (int i = 0; i < n; ++i) pts.push_back({coord(rng), coord(rng)});
  Polytope hull = Polytope::from_points(pts);
  return hull.vertices();
}

}  // namespace

TEST_CASE("box builds the paper-sized square") {
  Polytope p = box({0, 0}, {7.5, 7.5});
  REQUIRE(p.vertices().size() == 4);
  REQUIRE(p.faces().size() == 4);
  for (Vec2 v : p.vertices()) {
    CHECK(std::abs(v.x) == doctest::Approx(7.5));
    CHECK(std::abs(v.y) == doctest::Approx(7.5));
  }
  CHECK(is_consistent(p));
}

TEST_CASE("box rejects nonpositive extents") {
  CHECK_THROWS_AS((box({0, 0}, {0.0, 1.0})), std::invalid_argument);
  CHECK_THROWS_AS((box({0, 0}, {1.0, -2.0})), std::invalid_argument);
}

TEST_CASE("box face is tight at the expected corners") {
  Polytope p = box({5, 5}, {1, 2});
  // Face x <= 6 must be tight exactly at (6,3) and (6,7).
  bool found = false;
  for (const HalfSpace& f : p.faces()) {
    if (f.normal.x == doctest::Approx(1.0) && f.normal.y == doctest::Approx(0.0)) {
      found = true;
      CHECK(f.offset == doctest::Approx(6.0));
      CHECK(f.signed_distance({6, 3}) == doctest::Approx(0.0));
      CHECK(f.signed_distance({6, 7}) == doctest::Approx(0.0));
    }
  }
  CHECK(found);
}

TEST_CASE("contains uses the closed convention") {
  Polytope p = box({0, 0}, {1, 1});
  CHECK(contains(p, {0.5, 0.5}));
  CHECK(contains(p, {0, 0}));
  CHECK_FALSE(contains(p, {2, 0}));
  CHECK(contains(p, {1, 0}));  // boundary point
}

TEST_CASE("translate shifts faces and vertices together") {
  Polytope p = box({0, 0}, {1, 1});
  Polytope q = translate(p, {3, 0});
  CHECK(hausdorff_distance(q, box({3, 0}, {1, 1})) < 1e-12);
  CHECK(is_consistent(q));

  Polytope same = translate(p, {0, 0});
  CHECK(hausdorff_distance(same, p) == 0.0);

  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    Polytope r = Polytope::from_points(random_convex_polygon(rng, 8));
    Vec2 d{1.25, -3.5};
    Polytope back = translate(translate(r, d), -d);
    CHECK(hausdorff_distance(back, r) < 1e-12);
    CHECK(is_consistent(back));
  }
}

TEST_CASE("collision volume of two squares") {
  AgentShape agent(box({0, 0}, {7.5, 7.5}));
  Polytope obstacle = box({0, 0}, {7.5, 7.5});
  Polytope k = collision_volume(agent, obstacle);
  CHECK(hausdorff_distance(k, box({0, 0}, {15, 15})) < 1e-9);
}

TEST_CASE("collision volume with a point agent is the obstacle itself") {
  AgentShape point(Polytope::from_points(std::vector<Vec2>{{0, 0}}));
  Polytope obstacle = box({4, -2}, {1.5, 2.5});
  Polytope k = collision_volume(point, obstacle);
  CHECK(hausdorff_distance(k, obstacle) < 1e-12);
}

TEST_CASE("unit squares offset along x") {
  AgentShape agent(box({0, 0}, {0.5, 0.5}));
  Polytope obstacle = box({10, 0}, {0.5, 0.5});
  Polytope k = collision_volume(agent, obstacle);
  CHECK(hausdorff_distance(k, box({10, 0}, {1, 1})) < 1e-9);
}

TEST_CASE("agent shape must contain its reference") {
  CHECK_THROWS_AS((AgentShape(box({5, 5}, {1, 1}))), std::invalid_argument);
  CHECK_NOTHROW((AgentShape(box({0.25, 0}, {1, 1}))));
}

TEST_CASE("random polygons match the vertex-sum hull oracle") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    auto va = random_convex_polygon(rng, 8);
    auto vb = random_convex_polygon(rng, 8);
    Polytope a = Polytope::from_points(va);
    AgentShape agent_a = [&] {
      // Recenter so the reference sits inside.
      Vec2 c = a.centroid();
      return AgentShape(translate(a, -c));
    }();
    Polytope b = Polytope::from_points(vb);
    Polytope k = collision_volume(agent_a, b);

    auto oracle = oracles::minkowski_vertex_sum_hull(
        agent_a.relative_region().vertices(), vb);
    CHECK(oracles::hull_hausdorff(k.vertices(), oracle) <= 1e-9);
    CHECK(is_consistent(k));

    // Membership property: p - c collides for all sampled p in B, c in C.
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int s = 0; s < 10; ++s) {
      auto sample = [&](const Polytope& poly) {
        // Convex combination of vertices.
        double wsum = 0.0;
        Vec2 acc{0, 0};
        for (Vec2 v : poly.vertices()) {
          double w = unit(rng);
          acc += v * w;
          wsum += w;
        }
        return acc / wsum;
      };
      Vec2 p = sample(b);
      Vec2 c = sample(agent_a.relative_region());
      CHECK(contains(k, p - c, 1e-7));
    }
  }
}

TEST_CASE("degenerate hulls: collinear input becomes a segment") {
  std::vector<Vec2> pts{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  Polytope p = Polytope::from_points(pts);
  CHECK(p.vertices().size() == 2);
  CHECK(contains(p, {1.5, 1.5}));
  CHECK_FALSE(contains(p, {1.5, 1.6}));
}

TEST_CASE("hausdorff distance of shifted boxes") {
  Polytope a = box({0, 0}, {1, 1});
  Polytope b = box({3, 0}, {1, 1});
  CHECK(hausdorff_distance(a, b) == doctest::Approx(3.0));
}
