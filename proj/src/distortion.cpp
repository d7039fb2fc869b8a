#include "hypoly/distortion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <random>
#include <set>

#include "hypoly/error.hpp"

namespace hypoly {

namespace {

constexpr std::size_t kExhaustiveVertexCap = 10000;
constexpr double kC1Tol = 1e-8;

std::size_t edge_level(const ComplexBall& ball, std::size_t e) {
  return ball.edges[e].rep.length();
}

NormalForm syllable_form(std::size_t factor, Element h) {
  return NormalForm{h ? Word{{factor, h}} : Word{}};
}

bool segments_meet(const PathSegment& a, const PathSegment& b) {
  return a.from == b.from || a.from == b.to || a.to == b.from || a.to == b.to;
}

double median_of(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

std::size_t vertex_level(const ComplexBall& ball, std::size_t v) {
  return ball.vertices.at(v).rep.length();
}

BfsTree bfs_tree(const ComplexBall& ball, std::size_t source, std::size_t max_level) {
  const std::size_t nv = ball.vertices.size();
  require(source < nv, ErrorKind::invalid_input, "bfs source is not a ball vertex");
  BfsTree t;
  t.dist.assign(nv, -1);
  t.parent.assign(nv, -1);
  t.via.assign(nv, -1);
  std::deque<std::size_t> queue{source};
  t.dist[source] = 0;
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (const auto& [u, e] : ball.adjacency[v]) {
      if (t.dist[u] >= 0 || edge_level(ball, e) > max_level) continue;
      t.dist[u] = t.dist[v] + 1;
      t.parent[u] = static_cast<long>(v);
      t.via[u] = static_cast<long>(e);
      queue.push_back(u);
    }
  }
  return t;
}

PathInComplex path_from_tree(const ComplexBall& ball, const BfsTree& tree, std::size_t z,
                             std::size_t w) {
  (void)ball;
  require(tree.dist.at(w) >= 0, ErrorKind::inconclusive, "vertices are not connected in the ball");
  PathInComplex path;
  std::size_t v = w;
  path.vertices.push_back(v);
  while (v != z) {
    const auto p = static_cast<std::size_t>(tree.parent[v]);
    PathSegment s;
    s.from = p;
    s.to = v;
    s.edge = static_cast<std::size_t>(tree.via[v]);
    path.segments.push_back(s);
    path.vertices.push_back(p);
    v = p;
  }
  std::reverse(path.vertices.begin(), path.vertices.end());
  std::reverse(path.segments.begin(), path.segments.end());
  return path;
}

PathInComplex graph_geodesic(const ComplexBall& ball, std::size_t z, std::size_t w,
                             std::size_t core_radius) {
  require(z < ball.vertices.size() && w < ball.vertices.size(), ErrorKind::invalid_input,
          "path endpoints must be ball vertices");
  require(core_radius <= ball.radius, ErrorKind::invalid_input, "core radius exceeds the ball");
  if (vertex_level(ball, z) > core_radius || vertex_level(ball, w) > core_radius)
    fail(ErrorKind::inconclusive, "path endpoint lies outside the safe core of the ball");
  return path_from_tree(ball, bfs_tree(ball, z, ball.radius), z, w);
}

bool face_contains_edge(const ComplexBall& ball, const NormalForm& face, std::size_t edge) {
  const auto& cell = ball.edges.at(edge);
  const std::array<std::size_t, 1> allowed{cell.type};
  return coset_representative(face, allowed, *ball.spec) == cell.rep;
}

PathInComplex insert_diagonals(const ComplexBall& ball, const PathInComplex& path) {
  const std::size_t n = ball.n();
  if (n % 2) return path;
  const std::size_t half = n / 2;
  PathInComplex out;
  out.vertices.push_back(path.vertices.front());
  std::size_t s = 0;
  while (s < path.segments.size()) {
    std::optional<NormalForm> face;
    const PathSegment& first = path.segments[s];
    if (s + half <= path.segments.size() && first.edge) {
      const auto& cell = ball.edges[*first.edge];
      for (Element h = 0; h < ball.spec->factor(cell.type).order() && !face; ++h) {
        NormalForm cand = multiply(cell.rep, syllable_form(cell.type, h), *ball.spec);
        bool all = true;
        for (std::size_t j = s + 1; j < s + half && all; ++j) {
          const auto& seg = path.segments[j];
          all = seg.edge && face_contains_edge(ball, cand, *seg.edge);
        }
        if (all) face = std::move(cand);
      }
    }
    if (face) {
      PathSegment d;
      d.from = first.from;
      d.to = path.segments[s + half - 1].to;
      d.diagonal = true;
      d.face = std::move(*face);
      out.segments.push_back(std::move(d));
      s += half;
    } else {
      out.segments.push_back(first);
      ++s;
    }
    out.vertices.push_back(out.segments.back().to);
  }
  return out;
}

bool segments_share_face(const ComplexBall& ball, const PathSegment& a, const PathSegment& b) {
  if (a.diagonal && b.diagonal) return a.face == b.face;
  if (a.diagonal) return face_contains_edge(ball, a.face, *b.edge);
  if (b.diagonal) return face_contains_edge(ball, b.face, *a.edge);
  return ball.share_face(*a.edge, *b.edge);
}

BisectedEdgeSet select_bisected_edges(const ComplexBall& ball, const PathInComplex& path) {
  BisectedEdgeSet be;
  if (path.segments.empty()) return be;
  be.indices.push_back(0);
  std::size_t cur = 0;
  for (std::size_t k = 1; k < path.segments.size(); ++k) {
    const PathSegment& a = path.segments[cur];
    const PathSegment& b = path.segments[k];
    if (segments_meet(a, b) && !a.diagonal && !b.diagonal) continue;
    if (segments_share_face(ball, a, b)) continue;
    be.max_gap = std::max(be.max_gap, k - cur);
    be.indices.push_back(k);
    cur = k;
  }
  return be;
}

std::vector<std::pair<std::size_t, std::size_t>> required_disjoint_pairs(std::size_t n,
                                                                         std::size_t count) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (n >= 7) {
    for (std::size_t i = 0; i + 1 < count; ++i) out.emplace_back(i, i + 1);
  } else {
    for (std::size_t i = 0; i + 2 < count; i += 2) out.emplace_back(i, i + 2);
  }
  return out;
}

void SeparationStats::merge(const SeparationStats& o) {
  consecutive_pairs += o.consecutive_pairs;
  consecutive_disjoint += o.consecutive_disjoint;
  consecutive_asymptotic += o.consecutive_asymptotic;
  consecutive_intersecting += o.consecutive_intersecting;
  required_pairs += o.required_pairs;
  required_failures += o.required_failures;
  delta_min = std::min(delta_min, o.delta_min);
  crossings += o.crossings;
  crossing_failures += o.crossing_failures;
  c1_triples += o.c1_triples;
  c1_failures += o.c1_failures;
  c1_worst_orthogonality = std::max(c1_worst_orthogonality, o.c1_worst_orthogonality);
  c1_worst_length = std::max(c1_worst_length, o.c1_worst_length);
}

SeparationStats bisector_separation(const Representation& rep, const ComplexBall& ball,
                                    const EquivariantImage& image, const PathInComplex& path,
                                    const BisectedEdgeSet& be) {
  SeparationStats st;
  const std::size_t n = ball.n();
  const auto& mu = image.vertices;
  std::vector<Eigen::VectorXd> normals;
  normals.reserve(be.indices.size());
  for (std::size_t idx : be.indices) {
    const PathSegment& s = path.segments[idx];
    normals.push_back(bisector(GeodesicSegment<double>{mu[s.from], mu[s.to]}).normal);
  }

  for (std::size_t i = 0; i + 1 < normals.size(); ++i) {
    const auto c = classify_hyperplane_pair<double>(normals[i], normals[i + 1]);
    ++st.consecutive_pairs;
    switch (c.kind) {
      case PairKind::disjoint: ++st.consecutive_disjoint; break;
      case PairKind::asymptotic: ++st.consecutive_asymptotic; break;
      case PairKind::intersecting: ++st.consecutive_intersecting; break;
    }
  }

  const auto required = required_disjoint_pairs(n, normals.size());
  std::set<std::size_t> crossed;
  for (const auto& [i, j] : required) {
    ++st.required_pairs;
    const auto c = classify_hyperplane_pair<double>(normals[i], normals[j]);
    if (c.kind != PairKind::disjoint) {
      ++st.required_failures;
      st.delta_min = 0;
    } else {
      st.delta_min = std::min(st.delta_min, c.distance);
    }
    crossed.insert(i);
    crossed.insert(j);
  }

  // The H^p geodesic between the end images crosses a hyperplane iff the
  // ends lie on strictly opposite sides.
  if (!path.segments.empty()) {
    const Eigen::VectorXd& z = mu[path.vertices.front()];
    const Eigen::VectorXd& w = mu[path.vertices.back()];
    for (std::size_t i : crossed) {
      const double sz = minkowski(z, normals[i]);
      const double sw = minkowski(w, normals[i]);
      if (sz * sw < 0) ++st.crossings;
      else ++st.crossing_failures;
    }
  }

  if (n == 5) {
    const double a5 = rep.polygon.trig.side;
    const double b5 = rep.polygon.trig.short_diag;
    for (const auto& [i, j] : required) {
      const std::size_t j1 = be.indices[i], j2 = be.indices[i + 1], j3 = be.indices[j];
      // The route needs E_1, e, E_2, e', E_3 consecutive on the path.
      if (j2 != j1 + 2 || j3 != j2 + 2) continue;
      ++st.c1_triples;
      const auto& segs = path.segments;
      const Eigen::VectorXd& p = mu[segs[j2].from];
      const Eigen::VectorXd& q = mu[segs[j2].to];
      // Synthesized diagonals: reflect the far end of the joining edge in
      // the bisector of the outer selected edge.
      const Eigen::VectorXd y1 = reflection_in_hyperplane<double>(normals[i]).m * p;
      const Eigen::VectorXd y3 = reflection_in_hyperplane<double>(normals[j]).m * q;
      double len = std::abs(hyperbolic_distance(p, y1) - b5);
      len = std::max(len, std::abs(hyperbolic_distance(q, y3) - b5));
      len = std::max(len, std::abs(hyperbolic_distance(p, q) - a5));
      const Eigen::VectorXd t1 = tangent_toward(p, y1);
      const Eigen::VectorXd t3 = tangent_toward(q, y3);
      const Eigen::VectorXd transported = translation<double>(p, q).m * t1;
      double orth = std::abs(minkowski(t1, tangent_toward(p, q)));
      orth = std::max(orth, std::abs(minkowski(t3, tangent_toward(q, p))));
      orth = std::max(orth, std::abs(minkowski(transported, t3)));
      const auto bd1 = bisector(GeodesicSegment<double>{p, y1}).normal;
      const auto bd3 = bisector(GeodesicSegment<double>{q, y3}).normal;
      const auto c = classify_hyperplane_pair<double>(bd1, bd3);
      st.c1_worst_length = std::max(st.c1_worst_length, len);
      st.c1_worst_orthogonality = std::max(st.c1_worst_orthogonality, orth);
      const bool same_bisectors = std::abs(std::abs(minkowski(bd1, normals[i])) - 1) <= kC1Tol &&
                                  std::abs(std::abs(minkowski(bd3, normals[j])) - 1) <= kC1Tol;
      if (len > kC1Tol || orth > kC1Tol || !same_bisectors || c.kind != PairKind::disjoint ||
          three_orthogonal_margin(b5, a5) <= 0)
        ++st.c1_failures;
    }
  }
  return st;
}

std::string DistortionReport::csv() const {
  std::string out = "k,count,min,median,max\n";
  char buf[160];
  for (const auto& b : buckets) {
    if (!b.count) continue;
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%.17g\n", b.k, b.count, b.min, b.median,
                  b.max);
    out += buf;
  }
  return out;
}

DistortionReport distortion_report(const Representation& rep, const DistortionOptions& opt) {
  require(rep.poly.graph_product.has_value(), ErrorKind::invalid_input,
          "distortion needs a graph-product polygon");
  require(opt.radius >= 1, ErrorKind::invalid_input, "distortion radius must be positive");
  require(opt.margin >= 1, ErrorKind::invalid_input, "distortion margin must be positive");
  const GraphProductSpec& spec = *rep.poly.graph_product;
  const std::size_t outer_radius = opt.radius + opt.margin;
  const ComplexBall ball = build_ball(spec, outer_radius);
  const EquivariantImage image = equivariant_map(rep, ball);

  std::vector<std::size_t> core;
  for (std::size_t v = 0; v < ball.vertices.size(); ++v)
    if (vertex_level(ball, v) <= opt.radius) core.push_back(v);

  // Pairs grouped by source.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (opt.sample == 0) {
    require(core.size() <= kExhaustiveVertexCap, ErrorKind::size_limit,
            "too many vertices for exhaustive pairs; sample instead");
    for (std::size_t a = 0; a < core.size(); ++a)
      for (std::size_t b = a + 1; b < core.size(); ++b) pairs.emplace_back(core[a], core[b]);
  } else {
    require(core.size() >= 2, ErrorKind::invalid_input, "ball core has fewer than two vertices");
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<std::size_t> pick(0, core.size() - 1);
    while (pairs.size() < opt.sample) {
      const std::size_t a = pick(rng), b = pick(rng);
      if (a != b) pairs.emplace_back(core[std::min(a, b)], core[std::max(a, b)]);
    }
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
  }

  DistortionReport rep_out;
  rep_out.pairs = pairs.size();
  rep_out.low_confidence = pairs.size() < 100;
  rep_out.edge_length = rep.polygon.trig.side;
  const double a = rep_out.edge_length;

  std::vector<std::vector<double>> by_k(1, std::vector<double>{0.0});
  std::size_t i = 0;
  while (i < pairs.size()) {
    const std::size_t z = pairs[i].first;
    const BfsTree tree = bfs_tree(ball, z, outer_radius);
    const BfsTree inner = bfs_tree(ball, z, outer_radius - 1);
    for (; i < pairs.size() && pairs[i].first == z; ++i) {
      const std::size_t w = pairs[i].second;
      require(tree.dist[w] > 0, ErrorKind::inconclusive, "pair not connected in the ball");
      const auto k = static_cast<std::size_t>(tree.dist[w]);
      if (inner.dist[w] != tree.dist[w]) ++rep_out.unstable_pairs;
      const double d = hyperbolic_distance(image.vertices[z], image.vertices[w]);
      if (d > static_cast<double>(k) * a + 1e-9) ++rep_out.lipschitz_violations;
      if (by_k.size() <= k) by_k.resize(k + 1);
      by_k[k].push_back(d);

      const PathInComplex path = insert_diagonals(ball, path_from_tree(ball, tree, z, w));
      const BisectedEdgeSet be = select_bisected_edges(ball, path);
      rep_out.max_gap = std::max(rep_out.max_gap, be.max_gap);
      rep_out.separation.merge(bisector_separation(rep, ball, image, path, be));
    }
  }

  for (std::size_t k = 0; k < by_k.size(); ++k) {
    DistanceBucket b;
    b.k = k;
    b.count = by_k[k].size();
    if (b.count) {
      b.median = median_of(by_k[k]);
      b.min = by_k[k].front();
      b.max = by_k[k].back();
    }
    rep_out.buckets.push_back(b);
  }

  double prev = 0;
  for (std::size_t k = 1; k < rep_out.buckets.size() && k <= 2 * opt.radius; ++k) {
    const auto& b = rep_out.buckets[k];
    if (!b.count) continue;
    if (b.min < prev - 1e-12) rep_out.envelope_monotone = false;
    prev = b.min;
  }

  // Least squares on (k a, m(k)) for k >= 3.
  double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
  for (const auto& b : rep_out.buckets) {
    if (b.k < 3 || !b.count) continue;
    const double x = static_cast<double>(b.k) * a;
    sx += x;
    sy += b.min;
    sxx += x * x;
    sxy += x * b.min;
    m += 1;
  }
  if (m >= 2 && m * sxx - sx * sx > 0) {
    rep_out.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    rep_out.offset = (sy - rep_out.slope * sx) / m;
  } else {
    rep_out.slope = std::numeric_limits<double>::quiet_NaN();
    rep_out.offset = std::numeric_limits<double>::quiet_NaN();
  }
  return rep_out;
}

}  // namespace hypoly
