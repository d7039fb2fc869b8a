#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "hypoly/hyperbolic.hpp"

using namespace hypoly;
using Vec = VectorX<double>;
using Mat = MatrixX<double>;

namespace {

constexpr double kPi = std::numbers::pi;

Vec e(Index dim, Index k) { return Vec::Unit(dim, k); }

// Boost in the (0, axis) plane.
Mat boost(Index dim, Index axis, double t) {
  Mat m = Mat::Identity(dim, dim);
  m(0, 0) = m(axis, axis) = std::cosh(t);
  m(0, axis) = m(axis, 0) = std::sinh(t);
  return m;
}

Mat rotation(Index dim, Index i, Index j, double t) {
  Mat m = Mat::Identity(dim, dim);
  m(i, i) = m(j, j) = std::cos(t);
  m(i, j) = -std::sin(t);
  m(j, i) = std::sin(t);
  return m;
}

double angle_at(const Vec& x, const Vec& a, const Vec& b) {
  return std::acos(minkowski(tangent_toward(x, a), tangent_toward(x, b)));
}

}  // namespace

TEST_CASE("trig table against frozen high-precision values") {
  const auto t5 = trig_table(5);
  CHECK(std::cosh(t5.side) == doctest::Approx(1.6180339887498948).epsilon(1e-14));
  CHECK(t5.side == doctest::Approx(1.0612750619050357).epsilon(1e-13));
  CHECK(t5.short_diag == doctest::Approx(1.6169216675118865).epsilon(1e-13));
  CHECK(t5.inradius == doctest::Approx(0.62686966290617781).epsilon(1e-13));
  CHECK(t5.circumradius == doctest::Approx(0.84248208146200746).epsilon(1e-13));

  const auto t6 = trig_table(6);
  CHECK(std::cosh(t6.side) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(t6.short_diag == doctest::Approx(2.0634370688955605).epsilon(1e-13));
  CHECK(t6.inradius == doctest::Approx(0.88137358701954303).epsilon(1e-13));
  CHECK(2 * t6.circumradius == doctest::Approx(2.2924316695611777).epsilon(1e-13));

  const auto t7 = trig_table(7);
  CHECK(t7.side == doctest::Approx(1.4490747226775863).epsilon(1e-13));
  CHECK(t7.short_diag == doctest::Approx(2.3023663492996437).epsilon(1e-13));
  CHECK(t7.inradius == doctest::Approx(1.0704048615589442).epsilon(1e-13));
  CHECK(t7.circumradius == doctest::Approx(1.3600518497395677).epsilon(1e-13));

  CHECK_THROWS_AS(trig_table(4), Error);
}

TEST_CASE("trig table identities and monotonicity for n = 5..32") {
  auto prev = trig_table(5);
  for (int n = 5; n <= 32; ++n) {
    const auto t = trig_table(n);
    CHECK(std::abs(std::cosh(t.short_diag) - std::pow(std::cosh(t.side), 2)) <= 1e-12 * std::cosh(t.short_diag));
    if (n > 5) {
      CHECK(prev.side < t.side);
      CHECK(prev.short_diag < t.short_diag);
      CHECK(prev.inradius < t.inradius);
      CHECK(prev.circumradius < t.circumradius);
    }
    prev = t;
  }
}

TEST_CASE("closed-form margins") {
  const auto t5 = trig_table(5), t6 = trig_table(6), t7 = trig_table(7);
  CHECK(std::abs(disjoint_bisectors_test(2 * t6.circumradius, t6.side)) <= 1e-12);
  CHECK(disjoint_bisectors_test(2 * t7.circumradius, t7.side) ==
        doctest::Approx(0.43699739272737026).epsilon(1e-12));
  const double unit = 2 * std::asinh(1.0);
  CHECK(std::abs(disjoint_bisectors_test(unit, unit)) <= 1e-15);
  CHECK_THROWS_AS(disjoint_bisectors_test(0.0, 1.0), Error);

  CHECK(std::abs(lambert_check(std::asinh(1.0), std::asinh(1.0))) <= 1e-15);
  CHECK(std::abs(lambert_check(t6.circumradius, t6.side / 2)) <= 1e-12);
  CHECK(lambert_check(1.0, 1.0) == doctest::Approx(0.38109784554181573).epsilon(1e-14));

  const double z = three_orthogonal_equivalent_length(t5.short_diag, t5.side);
  CHECK(z == doctest::Approx(2.3394720705989209).epsilon(1e-13));
  CHECK(std::sinh(z / 2) == doctest::Approx(std::sinh(t5.short_diag / 2) * std::cosh(t5.side)).epsilon(1e-12));
  CHECK(three_orthogonal_equivalent_length(0.7, 1e-9) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(three_orthogonal_margin(t5.short_diag, t5.side) + 1 ==
        doctest::Approx(1.3090169943749474).epsilon(1e-13));
  CHECK(three_orthogonal_margin(t7.short_diag, t7.side) ==
        doctest::Approx(3.548917339522305).epsilon(1e-12));
}

TEST_CASE("two formulations of the disjoint-bisector condition agree on a grid") {
  for (int a = 1; a <= 10; ++a) {
    for (int b = 1; b <= 10; ++b) {
      const double x = 0.15 * a, y = 0.15 * b;
      const double cx = std::cosh(x), cy = std::cosh(y);
      const bool lhs = cx * cx * cy * cy >= cx * cx + cy * cy;
      const bool rhs = std::sinh(x) * std::sinh(y) >= 1;
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE("regular polygon embedding") {
  for (int n : {5, 6, 7, 9}) {
    const auto poly = regular_polygon(n, 4);
    for (int k = 0; k < n; ++k) {
      const auto& x = poly.vertices[k];
      CHECK(std::abs(minkowski(x, x) + 1) <= 1e-12);
      CHECK(hyperbolic_distance(x, poly.vertices[(k + 1) % n]) == doctest::Approx(poly.trig.side).epsilon(1e-10));
      CHECK(hyperbolic_distance(x, poly.vertices[(k + 2) % n]) == doctest::Approx(poly.trig.short_diag).epsilon(1e-10));
      CHECK(hyperbolic_distance(x, poly.center) == doctest::Approx(poly.trig.circumradius).epsilon(1e-10));
      CHECK(hyperbolic_distance(poly.midpoints[k], poly.center) == doctest::Approx(poly.trig.inradius).epsilon(1e-10));
      const double half = hyperbolic_distance(poly.midpoints[k], x);
      CHECK(half == doctest::Approx(poly.trig.side / 2).epsilon(1e-10));
      CHECK(std::abs(angle_at(x, poly.vertices[(k + 1) % n], poly.vertices[(k + n - 1) % n]) - kPi / 2) <= 1e-9);
      CHECK(std::abs(minkowski(poly.inward_normal(k), poly.forward_direction(k))) <= 1e-12);
      for (Index c = 3; c < 5; ++c) CHECK(x(c) == 0.0);
    }
  }
  CHECK_THROWS_AS(regular_polygon(6, 1), Error);
}

TEST_CASE("bisectors and reflections") {
  const auto poly = regular_polygon(6, 2);
  const GeodesicSegment<double> seg{poly.vertices[0], poly.vertices[1]};
  const auto bis = bisector(seg);
  CHECK(std::abs(minkowski(bis.normal, bis.normal) - 1) <= 1e-12);
  CHECK(bis.signed_side(seg.a) > 0);
  CHECK(std::abs(bis.signed_side(poly.midpoints[0])) <= 1e-9);
  CHECK(std::abs(bis.signed_side(poly.center)) <= 1e-9);

  const auto r = reflection_in_hyperplane(bis.normal);
  CHECK((r.m * r.m - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(lorentz_residual(r.m) <= 1e-12);
  CHECK((r(poly.vertices[0]) - poly.vertices[1]).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((r(poly.midpoints[0]) - poly.midpoints[0]).cwiseAbs().maxCoeff() <= 1e-9);

  // Symmetric segment about the origin.
  const Vec a = slice_point(0.8, 0.3, 3), b = slice_point(0.8, 0.3 + kPi, 3);
  CHECK(std::abs(minkowski(origin<double>(3), bisector(GeodesicSegment<double>{a, b}).normal)) <= 1e-12);

  CHECK_THROWS_AS(bisector(GeodesicSegment<double>{a, a}), Error);
  CHECK_THROWS_AS(reflection_in_hyperplane(Vec(origin<double>(3))), Error);
}

TEST_CASE("hyperplane classification for the standard segment configurations") {
  // A diagonal of length 2 rho_n and an edge of length a_n meeting
  // orthogonally at a common vertex.
  const Vec o = origin<double>(4);
  for (int n : {6, 7, 8}) {
    const auto t = trig_table(n);
    const double d = 2 * t.circumradius;
    const Vec p = std::cosh(d) * o + std::sinh(d) * e(4, 1);
    const Vec q = std::cosh(t.side) * o + std::sinh(t.side) * e(4, 3);
    const auto pair = classify_hyperplane_pair(bisector(GeodesicSegment<double>{o, p}).normal,
                                               bisector(GeodesicSegment<double>{o, q}).normal);
    if (n == 6) {
      CHECK(pair.kind == PairKind::asymptotic);
    } else {
      CHECK(pair.kind == PairKind::disjoint);
      CHECK(pair.distance > 0);
    }
  }
}

TEST_CASE("classification agrees with the closed-form test for orthogonal segments") {
  // Segments [x, x + l1 along e1] and [x, x + l2 along e2] meet orthogonally
  // at the origin.
  const Vec o = origin<double>(3);
  for (int i = 1; i <= 12; ++i) {
    for (int j = 1; j <= 12; ++j) {
      const double l1 = 0.25 * i, l2 = 0.25 * j;
      const Vec p = std::cosh(l1) * o + std::sinh(l1) * e(3, 1);
      const Vec q = std::cosh(l2) * o + std::sinh(l2) * e(3, 2);
      const auto u = bisector(GeodesicSegment<double>{o, p}).normal;
      const auto v = bisector(GeodesicSegment<double>{o, q}).normal;
      const double margin = disjoint_bisectors_test(l1, l2);
      const auto pair = classify_hyperplane_pair(u, v);
      if (margin > 1e-6) CHECK(pair.kind == PairKind::disjoint);
      if (margin < -1e-6) CHECK(pair.kind == PairKind::intersecting);
    }
  }
  const Vec u = e(3, 1);
  const auto same = classify_hyperplane_pair(u, u);
  CHECK(same.kind == PairKind::intersecting);
  CHECK(same.coincident);
  const double s = std::asinh(1.0) * 2;
  const Vec p = std::cosh(s) * o + std::sinh(s) * e(3, 1);
  const Vec q = std::cosh(s) * o + std::sinh(s) * e(3, 2);
  CHECK(classify_hyperplane_pair(bisector(GeodesicSegment<double>{o, p}).normal,
                                 bisector(GeodesicSegment<double>{o, q}).normal)
            .kind == PairKind::asymptotic);
}

TEST_CASE("isometry validation and inverse") {
  const Mat m = boost(4, 1, 0.7) * rotation(4, 2, 3, 1.1) * boost(4, 2, -0.4);
  const auto iso = Isometry<double>::checked(m);
  CHECK(((iso * iso.inverse()).m - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-12);
  Mat bad = m;
  bad(1, 2) += 1e-3;
  CHECK_THROWS_AS(Isometry<double>::checked(bad), Error);
  Mat flip = -Mat::Identity(4, 4);
  CHECK_THROWS_AS(Isometry<double>::checked(flip), Error);
  CHECK_THROWS_AS(HPoint<double>::checked(e(3, 1)), Error);
  CHECK_NOTHROW(HPoint<double>::checked(slice_point(2.0, 0.5, 3)));
}

TEST_CASE("long products stay on the form") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-1.5, 1.5);
  std::vector<Mat> factors;
  for (int k = 0; k < 64; ++k) {
    const Index axis = 1 + static_cast<Index>(k % 4);
    const Index other = 1 + static_cast<Index>((k + 1) % 4);
    Mat f = boost(5, axis, unif(rng)) * rotation(5, axis, other, unif(rng));
    // Reflections and their inverses keep the displacement bounded.
    factors.push_back(f);
    factors.push_back(lorentz_inverse<double>(f));
  }
  for (std::size_t len = 2; len <= 64; len *= 2) {
    std::vector<Mat> prefix(factors.begin(), factors.begin() + static_cast<std::ptrdiff_t>(len));
    const Mat p = compose(prefix, 5);
    CHECK(lorentz_residual(p) <= 1e-8);
  }
  const Mat id = compose(factors, 5);
  CHECK((id - Mat::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-8);

  Mat drifted = boost(5, 1, 0.3) * (Mat::Identity(5, 5) + 1e-7 * Mat::Ones(5, 5));
  CHECK(lorentz_residual(drifted) > 1e-8);
  CHECK(lorentz_residual(reorthonormalize(drifted)) <= 1e-13);
}

TEST_CASE("translations") {
  const Vec a = slice_point(0.4, 0.2, 4), b = slice_point(1.3, 2.0, 4);
  const auto t = translation(a, b);
  CHECK(lorentz_residual(t.m) <= 1e-12);
  CHECK((t(a) - b).cwiseAbs().maxCoeff() <= 1e-12);
  // Moves every point of the geodesic by d(a, b).
  const Vec mid = std::cosh(0.3) * a + std::sinh(0.3) * tangent_toward(a, b);
  CHECK(hyperbolic_distance(mid, t(mid)) == doctest::Approx(hyperbolic_distance(a, b)).epsilon(1e-12));
  // Fixes directions orthogonal to the geodesic plane at a: e_3 stays put.
  CHECK((t(e(4, 3)) - e(4, 3)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("spans and orthogonality") {
  const Index dim = 5;
  const Vec o = origin<double>(dim);
  Mat b1(dim, 3), b2(dim, 3);
  b1 << o, e(dim, 1), e(dim, 2);
  b2 << o, e(dim, 2), e(dim, 3);
  const auto h1 = span_of_vectors(b1), h2 = span_of_vectors(b2);
  CHECK(h1.dim() == 2);
  auto r = subspaces_orthogonal(h1, h2);
  CHECK(r.orthogonal);
  CHECK(r.relation == SubspaceRelation::intersecting);

  // Same subspace: never orthogonal.
  CHECK_FALSE(subspaces_orthogonal(h1, h1).orthogonal);

  // Tilted: planes spanned by {e1,e2} and {e1+e2, e3} through o are not.
  Mat b3(dim, 3);
  b3 << o, (e(dim, 1) + e(dim, 3)) / std::sqrt(2.0), e(dim, 2);
  CHECK_FALSE(subspaces_orthogonal(h1, span_of_vectors(b3)).orthogonal);

  // Disjoint but orthogonal after sliding: a geodesic orthogonal to the
  // plane {e1,e2} pushed along e4.
  const Mat push = boost(dim, 4, 1.2);
  Mat g(dim, 2);
  g << o, e(dim, 3);
  const auto line = span_of_vectors(Mat(push * g));
  auto rd = subspaces_orthogonal(h1, line);
  CHECK(rd.relation == SubspaceRelation::disjoint);
  CHECK(rd.distance == doctest::Approx(1.2).epsilon(1e-8));
  CHECK(rd.orthogonal);

  // Same displacement, tilted line: disjoint, not orthogonal.
  Mat g2(dim, 2);
  g2 << o, (e(dim, 3) + e(dim, 1)) / std::sqrt(2.0);
  CHECK_FALSE(subspaces_orthogonal(h1, span_of_vectors(Mat(push * g2))).orthogonal);

  // Points: span of three slice points is the slice.
  const auto slice = span_of_points<double>({slice_point(1.0, 0.0, dim), slice_point(1.0, 2.0, dim),
                                             slice_point(0.5, 4.0, dim)});
  CHECK(slice.dim() == 2);
  CHECK(slice.contains(slice_point(3.0, 1.0, dim)));
  CHECK_FALSE(slice.contains(Vec(push * o)));

  // Lightlike and spacelike spans are rejected.
  Mat light(dim, 1);
  light << (e(dim, 0) + e(dim, 1));
  CHECK_THROWS_AS(span_of_vectors(light), Error);
  Mat space(dim, 2);
  space << e(dim, 1), e(dim, 2);
  CHECK_THROWS_AS(span_of_vectors(space), Error);
}

TEST_CASE("asymptotic subspaces are not orthogonal") {
  const Index dim = 4;
  // Two geodesics in the slice sharing the ideal endpoint (1,1,0,0).
  const Vec ideal = e(dim, 0) + e(dim, 1);
  Mat l1(dim, 2), l2(dim, 2);
  l1 << ideal, (e(dim, 0) - e(dim, 1));
  l2 << ideal, Vec(e(dim, 0) - e(dim, 1) + 2 * e(dim, 2));
  const auto r = subspaces_orthogonal(span_of_vectors(l1), span_of_vectors(l2));
  CHECK(r.relation == SubspaceRelation::asymptotic);
  CHECK_FALSE(r.orthogonal);
}

TEST_CASE("elliptic isometries") {
  const Vec x = slice_point(0.9, 1.3, 4);
  const Mat frame = standard_tangent_frame(x);
  CHECK(tangent_frame_residual(x, frame) <= 1e-12);
  const auto id = elliptic_at(x, frame, Mat(Mat::Identity(3, 3)));
  CHECK((id.m - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-12);

  Mat flip = Mat::Identity(3, 3);
  flip(0, 0) = flip(2, 2) = -1;
  const auto half = elliptic_at(x, frame, flip);
  CHECK((half.m * half.m - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((half(x) - x).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(lorentz_residual(half.m) <= 1e-10);
  // The differential: frame column 0 goes to its negative.
  CHECK((half.m * frame.col(0) + frame.col(0)).cwiseAbs().maxCoeff() <= 1e-10);

  Mat shear = Mat::Identity(3, 3);
  shear(0, 1) = 0.5;
  CHECK_THROWS_AS(elliptic_at(x, frame, shear), Error);
}

TEST_CASE("normal transport along the slice is flat") {
  const auto poly = regular_polygon(5, 4);
  const auto slice = span_of_points(poly.vertices);
  Mat frame(5, 2);
  frame << e(5, 3), e(5, 4);
  const auto one = parallel_transport_normal(slice, frame, {poly.vertices[0], poly.vertices[1], poly.vertices[2]});
  const auto two = parallel_transport_normal(
      slice, frame, {poly.vertices[0], poly.vertices[4], poly.vertices[3], poly.vertices[2]});
  CHECK((one - two).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((parallel_transport_normal(slice, frame, {poly.vertices[0]}) - frame).cwiseAbs().maxCoeff() == 0);
  CHECK(std::abs(minkowski(one.col(0), one.col(1))) <= 1e-12);
  Mat tangent(5, 1);
  tangent << e(5, 1);
  CHECK_THROWS_AS(parallel_transport_normal(slice, tangent, {poly.vertices[0]}), Error);
}
