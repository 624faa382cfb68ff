#include <gtest/gtest.h>

#include <random>
#include <set>

#include "nafree/projgeom.hpp"
#include "oracle.hpp"

using namespace nafree;

namespace {

Laurent L(const char* s, std::uint32_t q = 2) { return parse_laurent(s, q); }
Vec V(std::initializer_list<const char*> xs, std::uint32_t q = 2) {
  Vec v;
  for (const char* x : xs) v.push_back(L(x, q));
  return v;
}

// Random exact vector with coordinates in O (digits up to `depth`) and a unit somewhere.
Vec random_primitive(std::mt19937_64& rng, std::uint32_t q, std::int64_t depth) {
  for (;;) {
    Vec v{oracle::random_laurent(rng, q, 0, depth), oracle::random_laurent(rng, q, 0, depth),
          oracle::random_laurent(rng, q, 0, depth)};
    for (const auto& c : v)
      if (c.has_digits() && c.lead_val() == 0) return v;
  }
}

// Points of a ball: the representative plus a random tail at exponents >= level.
Vec sample_in_ball(std::mt19937_64& rng, const ResidueBall& b, std::int64_t extra) {
  Vec v = b.representative();
  const Vec a = b.abstract_vector();
  for (std::size_t i = 0; i < 3; ++i)
    if (!a[i].exact()) v[i] += oracle::random_laurent(rng, b.q, b.level, b.level + extra);
  return v;
}

}  // namespace

TEST(ProjGeom, NormalizeExamples) {
  EXPECT_TRUE(normalize_point(V({"u", "u", "u"})).identical(normalize_point(V({"1", "1", "1"}))));
  EXPECT_TRUE(normalize_point(V({"1", "1", "1"})).coords[2].is_exact_one());
  const Vec c = V({"1 + u", "u^2", "1"});
  const ProjPoint p = normalize_point(c);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_TRUE(p.coords[i].identical(c[i]));
  EXPECT_THROW(normalize_point(V({"0", "0", "0"})), AllCoordinatesVanish);
  EXPECT_THROW(normalize_point(V({"O(u^2)", "u^3", "0"})), InsufficientPrecision);
}

TEST(ProjGeom, NormalizeScalingInvariance) {
  std::mt19937_64 rng(1);
  for (std::uint32_t q : {2u, 3u, 5u}) {
    for (int it = 0; it < 100; ++it) {
      const Vec v{oracle::random_laurent(rng, q, -2, 3), oracle::random_laurent(rng, q, -2, 3),
                  oracle::random_laurent(rng, q, -2, 3)};
      if (std::all_of(v.begin(), v.end(), [](const Laurent& x) { return x.is_exact_zero(); })) continue;
      Laurent c = oracle::random_laurent(rng, q, -3, 2);
      if (c.is_exact_zero()) c = Laurent::one(q);
      Vec w;
      for (const auto& x : v) w.push_back(x * c);
      const ProjPoint a = normalize_point(v), b = normalize_point(w);
      for (std::size_t k = 0; k < 3; ++k)
        EXPECT_EQ(equal_mod(a.coords[k], b.coords[k], kNormalizePrecision), Tri::True)
            << to_string(v) << " c=" << to_string(c);
    }
  }
}

TEST(ProjGeom, SlopeExamples) {
  const ProjPoint x = point_from_affine(L("1"), L("1"));
  const ProjPoint y = point_from_affine(L("1 + u^2"), L("1 + u^3"));
  const Slope s = slope_between(x, y);
  EXPECT_FALSE(s.infinite);
  EXPECT_EQ(equal_mod(s.value, L("u"), 30), Tri::True);
  const Slope t = slope_between(y, x);
  EXPECT_EQ(equal_mod(t.value, s.value, 30), Tri::True);
  EXPECT_TRUE(slope_between(x, point_from_affine(L("1"), L("1 + u^2"))).infinite);
  EXPECT_THROW(slope_between(x, x), EqualPoints);
  EXPECT_THROW(slope_between(x, normalize_point(V({"1", "0", "0"}))), OutsideChart);
  EXPECT_THROW(line_through(x, x), EqualPoints);
}

TEST(ProjGeom, LinesAndIncidence) {
  const ProjPoint x = point_from_affine(L("1"), L("1"));
  const ProjLine l = line_with_slope(x, L("u"));
  EXPECT_EQ(incident(x, l), Tri::True);
  EXPECT_EQ(incident(point_from_affine(L("1 + u^2"), L("1 + u^3")), l), Tri::True);
  EXPECT_EQ(incident(point_from_affine(L("u"), L("1")), l), Tri::False);
  EXPECT_EQ(equal_mod(slope_of(l).value, L("u"), 20), Tri::True);
}

TEST(ProjGeom, RegionExamples) {
  EXPECT_EQ(in_U(V({"1 + u^2", "1 + u^3", "1"})), Tri::True);
  EXPECT_EQ(in_U(V({"1 + u", "1", "1"})), Tri::False);
  EXPECT_EQ(in_U(V({"1", "0", "0"})), Tri::False);

  const ProjPoint x = point_from_affine(L("1"), L("1"));
  const ProjPoint in_u = point_from_affine(L("1 + u^2"), L("1 + u^3"));
  EXPECT_EQ(region_membership(in_u, RegionKind::V, &x), Tri::True);
  EXPECT_EQ(region_membership(x, RegionKind::V, &x), Tri::True);
  // Direction at infinity [1 : 1 : 0]: the line through x has slope 1.
  EXPECT_EQ(region_membership(normalize_point(V({"1", "1", "0"})), RegionKind::V, &x), Tri::False);
  // [1 : u : 0]: slope u.
  EXPECT_EQ(region_membership(normalize_point(V({"1", "u", "0"})), RegionKind::V, &x), Tri::True);
  // Far chart point on the slope-u line through x.
  EXPECT_EQ(region_membership(point_from_affine(L("u^-3"), L("1 + u^-2")), RegionKind::V, &x), Tri::True);
  const ProjPoint off = point_from_affine(L("u"), L("1"));
  EXPECT_THROW(region_membership(x, RegionKind::V, &off), InvalidArgument);
  EXPECT_THROW(region_membership(x, RegionKind::V), InvalidArgument);

  EXPECT_EQ(region_membership(Flag{x, line_with_slope(x, L("u"))}, RegionKind::W), Tri::True);
  EXPECT_EQ(region_membership(Flag{x, line_with_slope(x, L("1"))}, RegionKind::W), Tri::False);
  EXPECT_EQ(region_membership(Flag{x, line_with_slope(x, L("u + u^3"))}, RegionKind::W), Tri::True);
  EXPECT_EQ(region_membership(Flag{x, line_with_slope(x, L("u + u^2"))}, RegionKind::W), Tri::True);
  EXPECT_EQ(region_membership(Flag{x, line_with_slope(x, L("O(u)"))}, RegionKind::W), Tri::Unknown);
}

TEST(ProjGeom, VContainsUAndBase) {
  std::mt19937_64 rng(2);
  for (std::uint32_t q : {2u, 3u}) {
    for (int it = 0; it < 300; ++it) {
      const Laurent bx = Laurent::one(q) + oracle::random_laurent(rng, q, 2, 6);
      const Laurent by = Laurent::one(q) + oracle::random_laurent(rng, q, 2, 6);
      const Vec base{bx, by, Laurent::one(q)};
      EXPECT_EQ(in_V(base, base), Tri::True);
      const Vec w = random_primitive(rng, q, 6);
      if (in_U(w) == Tri::True) EXPECT_EQ(in_V(base, w), Tri::True);
    }
  }
}

// Predicates on abstract ball vectors agree with every sampled point of the ball.
class BallRegions : public ::testing::TestWithParam<std::uint32_t> {};

TEST_P(BallRegions, AbstractVerdictsAreSound) {
  const std::uint32_t q = GetParam();
  std::mt19937_64 rng(3 + q);
  const Vec base{Laurent::one(q), Laurent::one(q), Laurent::one(q)};
  const Vec base2{L("1 + u^2", q), L("1 + u^3", q), Laurent::one(q)};
  for (std::int64_t level : {1, 2, 3}) {
    for (const ResidueBall& b : enumerate_balls(q, level)) {
      const Vec a = b.abstract_vector();
      const Tri tu = in_U(a), tv = in_V(base, a), tv2 = in_V(base2, a);
      for (int k = 0; k < 20; ++k) {
        const Vec s = sample_in_ball(rng, b, 6);
        if (tu != Tri::Unknown) EXPECT_EQ(in_U(s), tu) << to_string(b);
        if (tv != Tri::Unknown) EXPECT_EQ(in_V(base, s), tv) << to_string(b);
        if (tv2 != Tri::Unknown) EXPECT_EQ(in_V(base2, s), tv2) << to_string(b);
        EXPECT_NE(in_U(s), Tri::Unknown);
        EXPECT_NE(in_V(base, s), Tri::Unknown);
      }
    }
  }
}

TEST_P(BallRegions, UDecidedAtLevelTwoVDecidedAtLevelThree) {
  const std::uint32_t q = GetParam();
  const Vec base{Laurent::one(q), Laurent::one(q), Laurent::one(q)};
  for (const ResidueBall& b : enumerate_balls(q, 2)) EXPECT_NE(in_U(b.abstract_vector()), Tri::Unknown) << to_string(b);
  std::size_t undecided_v2 = 0;
  for (const ResidueBall& b : enumerate_balls(q, 2))
    if (in_V(base, b.abstract_vector()) == Tri::Unknown) ++undecided_v2;
  // V_x depends on a third digit near x: the slope through a nearby point reads
  // digits of the difference, which starts one step deeper.
  EXPECT_GT(undecided_v2, 0u);
  for (const ResidueBall& b : enumerate_balls(q, 3)) {
    const Tri t = in_V(base, b.abstract_vector());
    if (t == Tri::Unknown) {
      // Only balls touching U near the base point can stay undecided.
      EXPECT_EQ(in_U(b.abstract_vector()), Tri::False);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Primes, BallRegions, ::testing::Values(2u, 3u));

TEST(ProjGeom, BallCountsAndPartition) {
  EXPECT_EQ(ball_count(2, 1), 7u);
  EXPECT_EQ(ball_count(2, 2), 28u);
  EXPECT_EQ(ball_count(2, 3), 112u);
  EXPECT_EQ(ball_count(3, 2), 9u * 13u);
  for (std::uint32_t q : {2u, 3u}) {
    for (std::int64_t level : {1, 2, 3}) {
      const auto balls = enumerate_balls(q, level);
      ASSERT_EQ(balls.size(), ball_count(q, level));
      std::set<std::string> names;
      for (const auto& b : balls) {
        names.insert(to_string(b));
        EXPECT_EQ(ball_of(b.representative(), level), b);
        EXPECT_EQ(parse_ball(to_string(b), q), b);
      }
      EXPECT_EQ(names.size(), balls.size());
    }
  }
}

TEST(ProjGeom, RandomPointsLieInExactlyOneBall) {
  std::mt19937_64 rng(4);
  const auto balls = enumerate_balls(2, 3);
  for (int it = 0; it < 1000; ++it) {
    Vec v{oracle::random_laurent(rng, 2, -3, 5), oracle::random_laurent(rng, 2, -3, 5),
          oracle::random_laurent(rng, 2, -3, 5)};
    if (std::all_of(v.begin(), v.end(), [](const Laurent& x) { return x.is_exact_zero(); })) continue;
    const ResidueBall home = ball_of(v, 3);
    int hits = 0;
    // Membership oracle: the cross product with the representative vanishes mod u^3.
    for (const auto& b : balls) {
      const Vec c = cross(normalize_point(v).coords, b.representative());
      if (std::all_of(c.begin(), c.end(), [](const Laurent& x) { return x.val_lower_bound() >= 3; })) {
        ++hits;
        EXPECT_EQ(b, home);
      }
    }
    EXPECT_EQ(hits, 1);
  }
}

TEST(ProjGeom, PartitionRefines) {
  for (const auto& b : enumerate_balls(2, 4)) {
    const ResidueBall parent = ball_of(b.representative(), 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(parent.digits[i][k], b.digits[i][k]);
  }
}

TEST(ProjGeom, ImageBallExamples) {
  const ResidueBall b = ball_at(2, 6, 1234);
  const ImageBall same = image_ball(Matrix::identity(2), b);
  EXPECT_EQ(same.guaranteed_level, 6);
  EXPECT_EQ(ball_of(same.center.coords, 6), b);
  EXPECT_EQ(image_ball(Matrix::diagonal_monomials(2, {-2, 0, 2}), b).guaranteed_level, 2);
}

TEST(ProjGeom, ImageBallContainment) {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 6; ++it) {
    const Matrix g = oracle::random_sl3(rng, 2, 4, 1);
    const std::int64_t level = 5;
    for (int j = 0; j < 4; ++j) {
      const ResidueBall b = ball_at(2, level, rng() % ball_count(2, level));
      const ImageBall img = image_ball(g, b);
      if (img.guaranteed_level <= 0) continue;
      const ResidueBall target = ball_of(img.center.coords, img.guaranteed_level);
      for (int k = 0; k < 1000; ++k)
        EXPECT_EQ(ball_of(mat_apply(g, sample_in_ball(rng, b, 8)), img.guaranteed_level), target);
    }
  }
}

TEST(ProjGeom, ImageBallContainmentExhaustive) {
  std::mt19937_64 rng(6);
  int tested = 0;
  while (tested < 5) {
    const Matrix g = oracle::random_sl3(rng, 2, 2, 1);
    if (cartan_projection(g).spread() > 2) continue;
    ++tested;
    for (std::int64_t level : {3, 4}) {
      for (const auto& b : enumerate_balls(2, level)) {
        const ImageBall img = image_ball(g, b);
        if (img.guaranteed_level <= 0) continue;
        const ResidueBall target = ball_of(img.center.coords, img.guaranteed_level);
        // Every level-(level + 2) sub-ball maps into the target.
        for (int k = 0; k < 4; ++k)
          EXPECT_EQ(ball_of(mat_apply(g, sample_in_ball(rng, b, 2)), img.guaranteed_level), target);
      }
    }
  }
}
