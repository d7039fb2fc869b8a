#pragma once

// Hyperboloid model of H^p: the upper sheet of <x,x> = -1 in R^{p,1} with
// <u,v> = -u_0 v_0 + sum_{i>=1} u_i v_i. Isometries are J-orthogonal
// matrices preserving the sheet, J = diag(-1, 1, ..., 1).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "hypoly/error.hpp"

namespace hypoly {

template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

/// Construction residual for J-orthogonality and related identities.
inline constexpr double kTolOrth = 1e-9;
/// Half-width of the band around |<u,v>| = 1 classified as asymptotic.
inline constexpr double kTolClassify = 1e-7;
/// Long products are re-orthonormalized after this many factors.
inline constexpr int kReorthonormalizeEvery = 16;

template <class D1, class D2>
typename D1::Scalar minkowski(const Eigen::MatrixBase<D1>& u,
                              const Eigen::MatrixBase<D2>& v) {
  const Index n = u.size();
  return -u(0) * v(0) + u.tail(n - 1).dot(v.tail(n - 1));
}

template <class Scalar>
MatrixX<Scalar> form_matrix(Index dim) {
  MatrixX<Scalar> j = MatrixX<Scalar>::Identity(dim, dim);
  j(0, 0) = Scalar(-1);
  return j;
}

template <class Scalar>
VectorX<Scalar> origin(Index dim) {
  VectorX<Scalar> o = VectorX<Scalar>::Zero(dim);
  o(0) = Scalar(1);
  return o;
}

/// Normalizes a timelike vector onto the upper sheet.
template <class Scalar>
VectorX<Scalar> to_hyperboloid(const VectorX<Scalar>& v) {
  const Scalar q = minkowski(v, v);
  require(q < Scalar(0), ErrorKind::invalid_input,
          "vector is not timelike, cannot normalize onto H^p");
  VectorX<Scalar> x = v / std::sqrt(-q);
  if (x(0) < Scalar(0)) x = -x;
  return x;
}

template <class Scalar>
Scalar hyperbolic_distance(const VectorX<Scalar>& a, const VectorX<Scalar>& b) {
  return std::acosh(std::max(Scalar(1), -minkowski(a, b)));
}

/// Unit tangent vector at a pointing along the geodesic toward b.
template <class Scalar>
VectorX<Scalar> tangent_toward(const VectorX<Scalar>& a, const VectorX<Scalar>& b) {
  VectorX<Scalar> t = b + minkowski(a, b) * a;
  const Scalar q = minkowski(t, t);
  require(q > Scalar(0), ErrorKind::invalid_input,
          "coincident points have no tangent direction");
  return t / std::sqrt(q);
}

/// Point at hyperbolic distance `radius` from the origin of the H^2 slice
/// (coordinates 0,1,2), in direction `angle`.
template <class Scalar>
VectorX<Scalar> slice_point(Scalar radius, Scalar angle, Index dim) {
  VectorX<Scalar> x = VectorX<Scalar>::Zero(dim);
  x(0) = std::cosh(radius);
  x(1) = std::sinh(radius) * std::cos(angle);
  x(2) = std::sinh(radius) * std::sin(angle);
  return x;
}

// --------------------------------------------------------------------------
// Points and isometries

template <class Scalar>
struct HPoint {
  VectorX<Scalar> x;

  static HPoint checked(VectorX<Scalar> v, Scalar tol = Scalar(kTolOrth)) {
    require(v.allFinite(), ErrorKind::invalid_input, "point has non-finite entries");
    require(std::abs(minkowski(v, v) + Scalar(1)) <= tol && v(0) > Scalar(0),
            ErrorKind::invalid_input, "point is not on the upper hyperboloid sheet");
    return HPoint{std::move(v)};
  }
  Index dim() const { return x.size(); }
};

/// max |M^T J M - J|.
template <class Derived>
typename Derived::Scalar lorentz_residual(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const MatrixX<Scalar> j = form_matrix<Scalar>(m.rows());
  return (m.transpose() * j * m - j).cwiseAbs().maxCoeff();
}

template <class Scalar>
MatrixX<Scalar> lorentz_inverse(const MatrixX<Scalar>& m) {
  const MatrixX<Scalar> j = form_matrix<Scalar>(m.rows());
  return j * m.transpose() * j;
}

/// Gram-Schmidt of the columns against the form: column 0 becomes the unit
/// timelike vector on the upper sheet, the rest unit spacelike.
template <class Scalar>
MatrixX<Scalar> reorthonormalize(MatrixX<Scalar> m) {
  const Index dim = m.cols();
  for (Index c = 0; c < dim; ++c) {
    VectorX<Scalar> v = m.col(c);
    for (Index k = 0; k < c; ++k) {
      const Scalar eps = k == 0 ? Scalar(-1) : Scalar(1);
      v -= eps * minkowski(v, m.col(k).eval()) * m.col(k);
    }
    const Scalar q = minkowski(v, v);
    if (c == 0) {
      require(q < Scalar(0), ErrorKind::verification,
              "isometry lost its timelike column");
      v /= std::sqrt(-q);
      if (v(0) < Scalar(0)) v = -v;
    } else {
      require(q > Scalar(0), ErrorKind::verification,
              "isometry column degenerated during re-orthonormalization");
      v /= std::sqrt(q);
    }
    m.col(c) = v;
  }
  return m;
}

template <class Scalar>
struct Isometry {
  MatrixX<Scalar> m;

  static Isometry identity(Index dim) {
    return Isometry{MatrixX<Scalar>::Identity(dim, dim)};
  }
  /// Validates J-orthogonality and preservation of the upper sheet.
  static Isometry checked(MatrixX<Scalar> m, Scalar tol = Scalar(kTolOrth)) {
    require(m.rows() == m.cols() && m.rows() >= 2, ErrorKind::invalid_input,
            "isometry must be a square matrix of size >= 2");
    require(m.allFinite(), ErrorKind::invalid_input, "isometry has non-finite entries");
    require(lorentz_residual(m) <= tol, ErrorKind::invalid_input,
            "matrix does not preserve the Minkowski form");
    require(m(0, 0) > Scalar(0), ErrorKind::invalid_input,
            "matrix swaps the sheets of the hyperboloid");
    return Isometry{std::move(m)};
  }

  Index dim() const { return m.rows(); }
  Isometry operator*(const Isometry& o) const { return Isometry{m * o.m}; }
  VectorX<Scalar> operator()(const VectorX<Scalar>& v) const { return m * v; }
  Isometry inverse() const { return Isometry{lorentz_inverse<Scalar>(m)}; }
};

/// Left-to-right product m[0] * m[1] * ..., re-orthonormalized every
/// kReorthonormalizeEvery factors.
template <class Scalar>
MatrixX<Scalar> compose(const std::vector<MatrixX<Scalar>>& factors, Index dim) {
  MatrixX<Scalar> acc = MatrixX<Scalar>::Identity(dim, dim);
  int since = 0;
  for (const auto& f : factors) {
    acc = acc * f;
    if (++since == kReorthonormalizeEvery) {
      acc = reorthonormalize<Scalar>(acc);
      since = 0;
    }
  }
  return acc;
}

// --------------------------------------------------------------------------
// Trigonometry of the regular right-angled n-gon

template <class Scalar>
struct TrigTable {
  int n = 0;
  Scalar side = 0;          // a_n
  Scalar short_diag = 0;    // b_n, cuts off a triangle
  Scalar inradius = 0;      // r_n
  Scalar circumradius = 0;  // rho_n
};

template <class Scalar = double>
TrigTable<Scalar> trig_table(int n) {
  require(n >= 5, ErrorKind::invalid_input,
          "no regular right-angled n-gon for n = " + std::to_string(n));
  using std::acosh, std::cos, std::cosh, std::sin, std::sqrt;
  const Scalar pi = std::numbers::pi_v<Scalar>;
  TrigTable<Scalar> t;
  t.n = n;
  t.side = acosh(Scalar(1) + Scalar(2) * cos(Scalar(2) * pi / Scalar(n)));
  t.short_diag = acosh(cosh(t.side) * cosh(t.side));
  t.inradius = acosh(Scalar(1) / (sqrt(Scalar(2)) * sin(pi / Scalar(n))));
  t.circumradius = acosh(cosh(t.inradius) * cosh(t.side / Scalar(2)));
  const Scalar half = cosh(t.side / Scalar(2)) - sqrt(Scalar(2)) * cos(pi / Scalar(n));
  require(std::abs(half) <= Scalar(1e-12), ErrorKind::verification,
          "half-side identity failed for n = " + std::to_string(n));
  return t;
}

/// sinh(l1/2) sinh(l2/2) - 1. For segments meeting orthogonally at an
/// endpoint, >= 0 iff the closures of their bisectors are disjoint; 0 means
/// the bisectors share an ideal point.
template <class Scalar>
Scalar disjoint_bisectors_test(Scalar l1, Scalar l2) {
  require(l1 > Scalar(0) && l2 > Scalar(0), ErrorKind::invalid_input,
          "segment lengths must be positive");
  return std::sinh(l1 / Scalar(2)) * std::sinh(l2 / Scalar(2)) - Scalar(1);
}

/// sinh(x) sinh(y) - 1; zero for a Lambert quadrilateral with one ideal vertex.
template <class Scalar>
Scalar lambert_check(Scalar x, Scalar y) {
  require(x > Scalar(0) && y > Scalar(0), ErrorKind::invalid_input,
          "Lambert side lengths must be positive");
  return std::sinh(x) * std::sinh(y) - Scalar(1);
}

/// For segments s, s', s'' of lengths x, y, x, pairwise orthogonal and
/// chained: the length z of the segment coplanar with s and s' that has the
/// same bisector as s.
template <class Scalar>
Scalar three_orthogonal_equivalent_length(Scalar x, Scalar y) {
  require(x > Scalar(0) && y > Scalar(0), ErrorKind::invalid_input,
          "segment lengths must be positive");
  const Scalar sh = std::sinh(x / Scalar(2));
  const Scalar ch = std::cosh(y);
  return Scalar(2) * std::acosh(std::sqrt(Scalar(1) + sh * sh * ch * ch));
}

/// sinh^2(x/2) cosh(y) - 1: positive iff Bis(s) and Bis(s'') are disjoint.
template <class Scalar>
Scalar three_orthogonal_margin(Scalar x, Scalar y) {
  const Scalar sh = std::sinh(x / Scalar(2));
  return sh * sh * std::cosh(y) - Scalar(1);
}

// --------------------------------------------------------------------------
// The base polygon

template <class Scalar>
struct PolygonEmbedding {
  int n = 0;
  Index p = 0;
  TrigTable<Scalar> trig;
  std::vector<VectorX<Scalar>> vertices;   // x_k at angle 2 pi k / n
  std::vector<VectorX<Scalar>> midpoints;  // m_k of edge e_k = [x_k, x_{k+1}]
  VectorX<Scalar> center;

  std::size_t next(std::size_t k) const { return (k + 1) % vertices.size(); }
  std::size_t prev(std::size_t k) const {
    return (k + vertices.size() - 1) % vertices.size();
  }
  /// Unit vector at m_k orthogonal to e_k, pointing into the polygon.
  VectorX<Scalar> inward_normal(std::size_t k) const {
    return tangent_toward(midpoints[k], center);
  }
  /// Unit tangent at x_k toward x_{k+1} (along e_k).
  VectorX<Scalar> forward_direction(std::size_t k) const {
    return tangent_toward(vertices[k], vertices[next(k)]);
  }
  /// Unit tangent at x_k toward x_{k-1} (along e_{k-1}).
  VectorX<Scalar> backward_direction(std::size_t k) const {
    return tangent_toward(vertices[k], vertices[prev(k)]);
  }
};

/// Regular right-angled n-gon centred at the origin of the H^2 slice of H^p.
template <class Scalar = double>
PolygonEmbedding<Scalar> regular_polygon(int n, Index p) {
  require(p >= 2, ErrorKind::invalid_input, "need p >= 2 to hold a polygon");
  PolygonEmbedding<Scalar> poly;
  poly.n = n;
  poly.p = p;
  poly.trig = trig_table<Scalar>(n);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  for (int k = 0; k < n; ++k) {
    poly.vertices.push_back(slice_point<Scalar>(
        poly.trig.circumradius, Scalar(2) * pi * Scalar(k) / Scalar(n), p + 1));
    poly.midpoints.push_back(slice_point<Scalar>(
        poly.trig.inradius, pi * Scalar(2 * k + 1) / Scalar(n), p + 1));
  }
  poly.center = origin<Scalar>(p + 1);
  return poly;
}

// --------------------------------------------------------------------------
// Hyperplanes, reflections, bisectors

template <class Scalar>
struct GeodesicSegment {
  VectorX<Scalar> a, b;

  Scalar length() const { return hyperbolic_distance(a, b); }
};

/// Hyperplane {x : <x, normal> = 0} with <normal, normal> = 1.
template <class Scalar>
struct Hyperplane {
  VectorX<Scalar> normal;

  Scalar signed_side(const VectorX<Scalar>& x) const { return minkowski(x, normal); }
};

/// Perpendicular bisector; the normal is proportional to a - b, so `a` lies
/// on the positive side.
template <class Scalar>
Hyperplane<Scalar> bisector(const GeodesicSegment<Scalar>& seg) {
  VectorX<Scalar> d = seg.a - seg.b;
  const Scalar q = minkowski(d, d);
  require(q > Scalar(1e-24), ErrorKind::invalid_input,
          "degenerate segment has no bisector");
  return Hyperplane<Scalar>{d / std::sqrt(q)};
}

/// Reflection in the hyperplane with unit spacelike normal u:
/// M = I - 2 u u^T J.
template <class Scalar>
Isometry<Scalar> reflection_in_hyperplane(const VectorX<Scalar>& u,
                                          Scalar tol = Scalar(kTolOrth)) {
  require(std::abs(minkowski(u, u) - Scalar(1)) <= tol, ErrorKind::invalid_input,
          "reflection normal must be unit spacelike");
  const MatrixX<Scalar> j = form_matrix<Scalar>(u.size());
  MatrixX<Scalar> m = MatrixX<Scalar>::Identity(u.size(), u.size()) -
                      Scalar(2) * u * (j * u).transpose();
  return Isometry<Scalar>{std::move(m)};
}

enum class PairKind { intersecting, asymptotic, disjoint };

template <class Scalar>
struct HyperplanePair {
  PairKind kind = PairKind::intersecting;
  Scalar distance = 0;  // only meaningful for disjoint pairs
  Scalar cosine = 0;    // |<u, v>|
  bool coincident = false;
};

template <class Scalar>
HyperplanePair<Scalar> classify_hyperplane_pair(const VectorX<Scalar>& u,
                                                const VectorX<Scalar>& v,
                                                Scalar tol = Scalar(kTolClassify)) {
  require(std::abs(minkowski(u, u) - Scalar(1)) <= Scalar(1e-6) &&
              std::abs(minkowski(v, v) - Scalar(1)) <= Scalar(1e-6),
          ErrorKind::invalid_input, "hyperplane normals must be unit spacelike");
  HyperplanePair<Scalar> out;
  out.cosine = std::abs(minkowski(u, v));
  if (out.cosine < Scalar(1) - tol) {
    out.kind = PairKind::intersecting;
  } else if (out.cosine <= Scalar(1) + tol) {
    // Parallel normals mean the same hyperplane, not an ideal tangency.
    const Scalar sep = std::min((u - v).cwiseAbs().maxCoeff(), (u + v).cwiseAbs().maxCoeff());
    out.coincident = sep <= Scalar(1e-9);
    out.kind = out.coincident ? PairKind::intersecting : PairKind::asymptotic;
  } else {
    out.kind = PairKind::disjoint;
    out.distance = std::acosh(out.cosine);
  }
  return out;
}

// --------------------------------------------------------------------------
// Totally geodesic subspaces

/// H^k = L cap H^p for a linear subspace L of signature (k, 1). The basis is
/// J-orthonormal with the timelike vector first.
template <class Scalar>
struct TotallyGeodesicSubspace {
  MatrixX<Scalar> basis;

  Index dim() const { return basis.cols() - 1; }
  /// J-orthogonal projection onto L.
  MatrixX<Scalar> projector() const {
    const Index d = basis.rows();
    MatrixX<Scalar> e = MatrixX<Scalar>::Identity(basis.cols(), basis.cols());
    e(0, 0) = Scalar(-1);
    return basis * e * basis.transpose() * form_matrix<Scalar>(d);
  }
  bool contains(const VectorX<Scalar>& v, Scalar tol = Scalar(kTolOrth)) const {
    return (projector() * v - v).cwiseAbs().maxCoeff() <=
           tol * std::max(Scalar(1), v.cwiseAbs().maxCoeff());
  }
  /// Nearest-point projection of a point of H^p.
  VectorX<Scalar> project_point(const VectorX<Scalar>& x) const {
    return to_hyperboloid<Scalar>(projector() * x);
  }
};

enum class Signature { lorentzian, spacelike, degenerate, zero };

namespace detail {

template <class Scalar>
MatrixX<Scalar> column_space(const MatrixX<Scalar>& vectors, Scalar rel_tol) {
  if (vectors.cols() == 0) return MatrixX<Scalar>(vectors.rows(), 0);
  Eigen::ColPivHouseholderQR<MatrixX<Scalar>> qr(vectors);
  qr.setThreshold(rel_tol);
  const Index rank = qr.rank();
  MatrixX<Scalar> q = qr.householderQ() * MatrixX<Scalar>::Identity(vectors.rows(), rank);
  return q;
}

/// J-orthonormal basis of an (orthonormal-in-Euclidean-sense) column space,
/// timelike vector first, plus its signature.
template <class Scalar>
std::pair<MatrixX<Scalar>, Signature> form_orthonormalize(const MatrixX<Scalar>& q,
                                                          Scalar tol) {
  if (q.cols() == 0) return {q, Signature::zero};
  const MatrixX<Scalar> gram = q.transpose() * form_matrix<Scalar>(q.rows()) * q;
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(gram);
  const auto& ev = eig.eigenvalues();  // ascending
  for (Index k = 0; k < ev.size(); ++k)
    if (std::abs(ev(k)) <= tol) return {q, Signature::degenerate};
  const bool lorentzian = ev(0) < Scalar(0);
  if (lorentzian && ev.size() > 1 && ev(1) < Scalar(0))
    fail(ErrorKind::invalid_input, "subspace has more than one timelike direction");
  MatrixX<Scalar> basis = q * eig.eigenvectors();
  for (Index k = 0; k < ev.size(); ++k) basis.col(k) /= std::sqrt(std::abs(ev(k)));
  if (lorentzian && basis(0, 0) < Scalar(0)) basis.col(0) = -basis.col(0);
  return {basis, lorentzian ? Signature::lorentzian : Signature::spacelike};
}

}  // namespace detail

/// Smallest totally geodesic subspace whose linear span contains `vectors`
/// (columns). Throws on lightlike or spacelike spans.
template <class Scalar>
TotallyGeodesicSubspace<Scalar> span_of_vectors(const MatrixX<Scalar>& vectors) {
  const MatrixX<Scalar> q = detail::column_space<Scalar>(vectors, Scalar(1e-10));
  auto [basis, sig] = detail::form_orthonormalize<Scalar>(q, Scalar(1e-10));
  require(sig == Signature::lorentzian, ErrorKind::invalid_input,
          "degenerate span: no timelike direction or lightlike span");
  return TotallyGeodesicSubspace<Scalar>{std::move(basis)};
}

template <class Scalar>
TotallyGeodesicSubspace<Scalar> span_of_points(const std::vector<VectorX<Scalar>>& points) {
  require(!points.empty(), ErrorKind::invalid_input, "span of no points");
  MatrixX<Scalar> m(points.front().size(), static_cast<Index>(points.size()));
  for (std::size_t k = 0; k < points.size(); ++k) m.col(static_cast<Index>(k)) = points[k];
  return span_of_vectors<Scalar>(m);
}

/// Hyperbolic translation along the geodesic from a to b, sending a to b.
template <class Scalar>
Isometry<Scalar> translation(const VectorX<Scalar>& a, const VectorX<Scalar>& b) {
  const Index dim = a.size();
  const Scalar d = hyperbolic_distance(a, b);
  if (d <= Scalar(1e-15)) return Isometry<Scalar>::identity(dim);
  const VectorX<Scalar> w = tangent_toward(a, b);
  const MatrixX<Scalar> j = form_matrix<Scalar>(dim);
  // v = alpha a + beta w + rest, alpha = -<v,a>, beta = <v,w>.
  const VectorX<Scalar> alpha_row = -(j * a);
  const VectorX<Scalar> beta_row = j * w;
  MatrixX<Scalar> m = MatrixX<Scalar>::Identity(dim, dim);
  m += (std::cosh(d) * a + std::sinh(d) * w - a) * alpha_row.transpose();
  m += (std::sinh(d) * a + std::cosh(d) * w - w) * beta_row.transpose();
  return Isometry<Scalar>{std::move(m)};
}

enum class SubspaceRelation { intersecting, asymptotic, disjoint };

template <class Scalar>
struct OrthogonalityReport {
  bool orthogonal = false;
  SubspaceRelation relation = SubspaceRelation::intersecting;
  Scalar distance = 0;           // between the subspaces
  Scalar residual = 0;           // commutator of the projections at the meeting point
  bool nested = false;           // one contains the other
};

namespace detail {

template <class Scalar>
MatrixX<Scalar> intersection(const MatrixX<Scalar>& a, const MatrixX<Scalar>& b) {
  MatrixX<Scalar> stacked(a.rows(), a.cols() + b.cols());
  stacked << a, -b;
  Eigen::FullPivLU<MatrixX<Scalar>> lu(stacked);
  lu.setThreshold(Scalar(1e-10));
  const MatrixX<Scalar> ker = lu.kernel();
  if (lu.dimensionOfKernel() == 0) return MatrixX<Scalar>(a.rows(), 0);
  return column_space<Scalar>(a * ker.topRows(a.cols()), Scalar(1e-10));
}

template <class Scalar>
OrthogonalityReport<Scalar> meet_orthogonally(const MatrixX<Scalar>& l1,
                                              const MatrixX<Scalar>& l2,
                                              const VectorX<Scalar>& at, Scalar tol) {
  // Move the meeting point to the origin so the projectors are well scaled.
  const Isometry<Scalar> back = translation<Scalar>(at, origin<Scalar>(at.size()));
  const TotallyGeodesicSubspace<Scalar> s1{back.m * l1}, s2{back.m * l2};
  const MatrixX<Scalar> p1 = s1.projector(), p2 = s2.projector();
  OrthogonalityReport<Scalar> r;
  r.relation = SubspaceRelation::intersecting;
  r.residual = (p1 * p2 - p2 * p1).cwiseAbs().maxCoeff();
  const Scalar common = (p1 * p2).trace();
  r.nested = common >= Scalar(std::min(l1.cols(), l2.cols())) - Scalar(0.5);
  r.orthogonal = !r.nested && r.residual <= tol;
  return r;
}

}  // namespace detail

/// Orthogonality of totally geodesic subspaces: either they meet and their
/// tangent spaces intersect orthogonally, or they are at positive distance
/// and the translation along the common perpendicular brings them into that
/// position. Asymptotic or nested pairs are never orthogonal.
template <class Scalar>
OrthogonalityReport<Scalar> subspaces_orthogonal(const TotallyGeodesicSubspace<Scalar>& h1,
                                                 const TotallyGeodesicSubspace<Scalar>& h2,
                                                 Scalar tol = Scalar(kTolOrth)) {
  const MatrixX<Scalar> meet = detail::intersection<Scalar>(h1.basis, h2.basis);
  auto [meet_basis, sig] = detail::form_orthonormalize<Scalar>(meet, Scalar(1e-10));
  if (sig == Signature::lorentzian) {
    return detail::meet_orthogonally<Scalar>(h1.basis, h2.basis,
                                             to_hyperboloid<Scalar>(meet_basis.col(0)), tol);
  }
  if (sig == Signature::degenerate) {
    OrthogonalityReport<Scalar> r;
    r.relation = SubspaceRelation::asymptotic;
    return r;
  }
  // Positive distance: alternate nearest-point projections.
  VectorX<Scalar> x1 = to_hyperboloid<Scalar>(h1.basis.col(0));
  VectorX<Scalar> x2 = h2.project_point(x1);
  // Stop on point movement: the distance is flat at the optimum, so it
  // settles long before the nearest points do.
  for (int it = 0; it < 100000; ++it) {
    const VectorX<Scalar> before = x1;
    x1 = h1.project_point(x2);
    x2 = h2.project_point(x1);
    if ((x1 - before).cwiseAbs().maxCoeff() <=
        Scalar(4) * std::numeric_limits<Scalar>::epsilon() * x1.cwiseAbs().maxCoeff())
      break;
  }
  const Scalar last = hyperbolic_distance(x1, x2);
  const Isometry<Scalar> slide = translation<Scalar>(x1, x2);
  OrthogonalityReport<Scalar> r =
      detail::meet_orthogonally<Scalar>(slide.m * h1.basis, h2.basis, x2, tol);
  r.relation = SubspaceRelation::disjoint;
  r.distance = last;
  return r;
}

// --------------------------------------------------------------------------
// Elliptic isometries and the normal bundle of the slice

/// Checks that frame is a J-orthonormal spacelike basis of T_x H^p.
template <class Scalar>
Scalar tangent_frame_residual(const VectorX<Scalar>& x, const MatrixX<Scalar>& frame) {
  MatrixX<Scalar> full(x.size(), frame.cols() + 1);
  full << x, frame;
  return lorentz_residual(full);
}

/// The isometry fixing x whose differential, written in the tangent frame
/// `frame` (columns spanning T_x), is the orthogonal matrix `a`.
template <class Scalar>
Isometry<Scalar> elliptic_at(const VectorX<Scalar>& x, const MatrixX<Scalar>& frame,
                             const MatrixX<Scalar>& a, Scalar tol = Scalar(kTolOrth)) {
  require(frame.rows() == x.size() && frame.cols() == x.size() - 1,
          ErrorKind::invalid_input, "tangent frame has the wrong shape");
  require(a.rows() == frame.cols() && a.cols() == frame.cols(), ErrorKind::invalid_input,
          "differential has the wrong shape");
  require(tangent_frame_residual(x, frame) <= tol, ErrorKind::invalid_input,
          "frame is not an orthonormal frame of the tangent space");
  const MatrixX<Scalar> id = MatrixX<Scalar>::Identity(a.rows(), a.cols());
  require((a.transpose() * a - id).cwiseAbs().maxCoeff() <= tol, ErrorKind::invalid_input,
          "differential is not orthogonal");
  MatrixX<Scalar> f(x.size(), x.size());
  f << x, frame;
  MatrixX<Scalar> block = MatrixX<Scalar>::Identity(x.size(), x.size());
  block.bottomRightCorner(a.rows(), a.cols()) = a;
  return Isometry<Scalar>{f * block * lorentz_inverse<Scalar>(f)};
}

/// Standard tangent frame at x: the translation from the origin applied to
/// e_1, ..., e_p.
template <class Scalar>
MatrixX<Scalar> standard_tangent_frame(const VectorX<Scalar>& x) {
  const Isometry<Scalar> t = translation<Scalar>(origin<Scalar>(x.size()), x);
  return t.m.rightCols(x.size() - 1);
}

/// Transport of normal vectors of a totally geodesic slice along a path in
/// the slice. The normal space of a linear slice is the fixed linear
/// complement, and constant ambient vectors in it are parallel, so the
/// connection is flat and the transport is the identity on coordinates.
template <class Scalar>
MatrixX<Scalar> parallel_transport_normal(const TotallyGeodesicSubspace<Scalar>& slice,
                                          const MatrixX<Scalar>& frame,
                                          const std::vector<VectorX<Scalar>>& path,
                                          Scalar tol = Scalar(kTolOrth)) {
  for (const auto& pt : path)
    require(slice.contains(pt, tol), ErrorKind::invalid_input, "path leaves the slice");
  const MatrixX<Scalar> j = form_matrix<Scalar>(frame.rows());
  require((slice.basis.transpose() * j * frame).cwiseAbs().maxCoeff() <= tol,
          ErrorKind::invalid_input, "frame is not normal to the slice");
  return frame;
}

}  // namespace hypoly
