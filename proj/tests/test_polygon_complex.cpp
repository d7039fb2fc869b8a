#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "hypoly/error.hpp"
#include "hypoly/polygon_complex.hpp"

using namespace hypoly;

namespace {

PolygonOfGroups uniform_polygon(std::size_t n, std::size_t t) {
  std::vector<std::size_t> orders(n, t);
  return PolygonOfGroups::from_graph_product(GraphProductSpec::cyclic(orders));
}

GraphProductSpec uniform_spec(std::size_t n, std::size_t t) {
  std::vector<std::size_t> orders(n, t);
  return GraphProductSpec::cyclic(orders);
}

// Polygon of direct products without going through a graph product, so that
// squares and trivial edge groups are allowed.
PolygonOfGroups manual_polygon(const std::vector<std::size_t>& orders) {
  PolygonOfGroups poly;
  const std::size_t n = orders.size();
  for (std::size_t k = 0; k < n; ++k) {
    poly.edge_groups.push_back(make_cyclic_group(orders[k]));
    poly.vertex_groups.push_back(
        direct_product(make_cyclic_group(orders[(k + n - 1) % n]), make_cyclic_group(orders[k])));
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::array<std::vector<Element>, 2> maps;
    for (Element e = 0; e < orders[k]; ++e) {
      maps[0].push_back(e);
      maps[1].push_back(static_cast<Element>(e * orders[(k + 1) % n]));
    }
    poly.edge_to_vertex.push_back(maps);
    poly.face_to_edge.push_back({0});
  }
  return poly;
}

}  // namespace

TEST_CASE("graph product polygon is consistent") {
  const auto poly = uniform_polygon(6, 3);
  CHECK_NOTHROW(poly.validate());
  CHECK(poly.vertex_groups[2].order() == 9);
  // e_1 lands in the second coordinate of x_1 and the first of x_2.
  CHECK(poly.edge_image(1, 1) == std::vector<Element>{0, 1, 2});
  CHECK(poly.edge_image(1, 2) == std::vector<Element>{0, 3, 6});

  auto broken = poly;
  broken.edge_to_vertex[0][1] = {0, 1, 1};
  CHECK_THROWS_AS(broken.validate(), Error);
}

TEST_CASE("parity edges") {
  CHECK(parity_edge(6, 0, Parity::even) == 0);
  CHECK(parity_edge(6, 0, Parity::odd) == 5);
  CHECK(parity_edge(6, 3, Parity::even) == 2);
  CHECK(parity_edge(6, 3, Parity::odd) == 3);
  CHECK_THROWS_AS(parity_edge(5, 0, Parity::even), Error);
}

TEST_CASE("links of graph products are complete bipartite") {
  for (std::size_t t : {2u, 3u}) {
    const auto poly = uniform_polygon(5, t);
    const auto link = link_graph(poly, 0);
    CHECK(link.cosets.size() == 2 * t);
    CHECK(link.complete_bipartite());
    CHECK(link.girth() == 4);
  }
  const auto v = angle_and_curvature(uniform_polygon(5, 2));
  for (double a : v.angles) CHECK(a == doctest::Approx(std::numbers::pi / 2));
  CHECK(v.acute);
  CHECK(v.negatively_curved_right_angled);

  // A square is right-angled but flat.
  CHECK_FALSE(angle_and_curvature(manual_polygon({2, 2, 2, 2})).negatively_curved_right_angled);
}

TEST_CASE("trivial edge groups give a degenerate link") {
  const auto poly = manual_polygon({1, 2, 2, 2, 2});
  CHECK_NOTHROW(poly.validate());
  const auto link = link_graph(poly, 0);
  CHECK(link.girth() == 0);
  const auto v = angle_and_curvature(poly);
  CHECK(v.degenerate);
  CHECK_FALSE(v.negatively_curved_right_angled);
}

TEST_CASE("ball cell counts") {
  const auto spec = uniform_spec(5, 2);
  const auto b0 = build_ball(spec, 0);
  CHECK(b0.faces.size() == 1);
  CHECK(b0.vertices.size() == 5);
  CHECK(b0.edges.size() == 5);

  const auto b1 = build_ball(spec, 1);
  CHECK(b1.faces.size() == 6);
  // Each base edge now carries both of its faces.
  for (std::size_t k = 0; k < 5; ++k) CHECK(b1.edge_faces[b1.face_edges[0][k]].size() == 2);
  // Base vertices see three of their four faces; the fourth has length 2.
  for (std::size_t k = 0; k < 5; ++k)
    CHECK(b1.vertex_faces[b1.face_vertices[0][k]].size() == 3);
  const auto b2 = build_ball(spec, 2);
  for (std::size_t k = 0; k < 5; ++k)
    CHECK(b2.vertex_faces[b2.face_vertices[0][k]].size() == 4);

  const auto b3 = build_ball(spec, 3);
  for (std::size_t e = 0; e < b3.edges.size(); ++e) {
    CHECK(b3.edge_faces[e].size() <= 2);
    const auto [a, b] = b3.edge_ends[e];
    CHECK(a != b);
  }
}

TEST_CASE("share_face is exact") {
  const auto spec = uniform_spec(5, 3);
  const auto ball = build_ball(spec, 2);
  const auto& base = ball.face_edges[0];
  CHECK(ball.share_face(base[0], base[2]));
  // Edge e_0 of face g_2 F: shares g_2 F with base e_2 (g_2 fixes e_2).
  const NormalForm g2{{{2, 1}}};
  const auto f = ball.find_face(g2);
  REQUIRE(f);
  const std::size_t moved = ball.face_edges[*f][0];
  CHECK(moved != base[0]);
  CHECK(ball.share_face(moved, base[2]));
  CHECK_FALSE(ball.share_face(moved, base[0]));
  CHECK(ball.edge_vertex_share_face(moved, ball.face_vertices[0][2]));
  CHECK_FALSE(ball.edge_vertex_share_face(moved, ball.face_vertices[0][0]));
}

TEST_CASE("parity trees are trees") {
  const auto ball = build_ball(uniform_spec(6, 2), 3);
  for (Parity p : {Parity::even, Parity::odd}) {
    const auto tree = build_trees(ball, p);
    CHECK(tree.acyclic);
    std::size_t base_rays = 0;
    for (auto [f, e] : tree.edges) base_rays += f == 0;
    CHECK(base_rays == 3);
    for (std::size_t e : tree.midpoints) CHECK(ball.edges[e].type % 2 == parity_index(p));
  }
  CHECK_THROWS_AS(build_trees(build_ball(uniform_spec(5, 2), 1), Parity::even), Error);
}

TEST_CASE("product sets of the hexagon") {
  const auto poly = uniform_polygon(6, 2);
  const auto phi = phi_sets(poly);
  CHECK(phi.tuple_count == 576);
  std::size_t witnesses = 0;
  for (const auto& c : phi.products) witnesses += c.witnesses.size();
  CHECK(witnesses == 576);
  for (int p = 0; p < 2; ++p)
    CHECK(phi.obvious[p].size() + phi.other[p].size() == phi.products.size());
  // The identity is obvious for both parities.
  for (int p = 0; p < 2; ++p) {
    bool found = false;
    for (std::size_t c : phi.obvious[p]) found = found || phi.products[c].key.is_identity();
    CHECK(found);
  }
  // Every obvious product lies in the parity subgroup, every other one does not.
  for (Parity p : {Parity::even, Parity::odd}) {
    for (std::size_t c : phi.obvious[parity_index(p)])
      CHECK(in_parity_subgroup(phi.products[c].key, 6, p));
    for (std::size_t c : phi.other[parity_index(p)])
      CHECK_FALSE(in_parity_subgroup(phi.products[c].key, 6, p));
  }
  CHECK_THROWS_AS(phi_sets(uniform_polygon(5, 2)), Error);
}

TEST_CASE("separation") {
  const auto spec = uniform_spec(6, 2);
  const auto poly = PolygonOfGroups::from_graph_product(spec);
  const auto phi = phi_sets(poly);

  const auto taut = vertex_hom_from_factor_hom(tautological_quotient(spec), spec);
  const auto ok = verify_separation(poly, phi, taut);
  CHECK(ok.passed);
  CHECK(ok.products_checked == phi.other[0].size() + phi.other[1].size());

  GroupHom trivial{FiniteGroup{}, {}};
  for (const auto& g : poly.vertex_groups) trivial.images.emplace_back(g.order(), 0);
  const auto bad = verify_separation(poly, phi, trivial);
  CHECK_FALSE(bad.passed);
  REQUIRE_FALSE(bad.violations.empty());
  for (const auto& v : bad.violations) CHECK(certificate_valid(poly, trivial, v));
  CHECK_FALSE(certificate_valid(poly, taut, bad.violations.front()));
  CHECK_THROWS_AS(quotient_complex(poly, trivial), Error);

  auto inconsistent = taut;
  inconsistent.images[1][1] = inconsistent.images[1][2];
  CHECK_THROWS_AS(verify_separation(poly, phi, inconsistent), Error);
}

TEST_CASE("quotient complex of the hexagon") {
  const auto spec = uniform_spec(6, 2);
  const auto poly = PolygonOfGroups::from_graph_product(spec);
  const auto q = quotient_complex(poly, vertex_hom_from_factor_hom(tautological_quotient(spec), spec));
  CHECK(q.image.size() == 64);
  CHECK(q.edge_count() == 192);
  CHECK(q.xi.norm() == doctest::Approx(1.0));
  CHECK(q.eta.norm() == doctest::Approx(1.0));
  CHECK(std::abs(q.xi.dot(q.eta)) < 1e-12);
  CHECK(q.p <= 2 * q.image.size());
  CHECK(q.p == 16);
  const Eigen::MatrixXd gram = q.basis.transpose() * q.basis;
  CHECK((gram - Eigen::MatrixXd::Identity(q.p, q.p)).norm() < 1e-10);
  // Action is an orthogonal representation.
  const auto& t = q.hom.target;
  for (Element x : {Element{1}, Element{5}, Element{37}}) {
    const auto ax = q.action(x);
    CHECK((ax.transpose() * ax - Eigen::MatrixXd::Identity(q.p, q.p)).norm() < 1e-10);
    for (Element y : {Element{2}, Element{20}})
      CHECK((q.action(t.mul(x, y)) - ax * q.action(y)).norm() < 1e-10);
  }
  // V is invariant: the projection of the orbit vectors is lossless.
  const Eigen::VectorXd xi_v = q.coords(q.xi);
  CHECK((q.basis * xi_v - q.xi).norm() < 1e-10);
}

TEST_CASE("stabilizers of the trees") {
  const auto spec = uniform_spec(6, 2);
  const auto poly = PolygonOfGroups::from_graph_product(spec);
  const auto phi = phi_sets(poly);
  CHECK_THROWS_AS(stabilizer_check(build_ball(spec, 2), poly, phi, Parity::even), Error);
  const auto ball = build_ball(spec, 3);
  for (Parity p : {Parity::even, Parity::odd}) {
    const auto r = stabilizer_check(ball, poly, phi, p);
    CHECK(r.products == phi.products.size());
    CHECK(r.violations.empty());
    CHECK(r.obvious_moving == 0);
    CHECK(r.obvious_preserving == phi.obvious[parity_index(p)].size());
    CHECK(r.min_displaced_nodes > 0);
  }
}

TEST_CASE("general polygons use heuristic product keys") {
  auto poly = uniform_polygon(6, 2);
  poly.graph_product.reset();
  const auto phi = phi_sets(poly);
  CHECK(phi.tuple_count == 576);
  for (const auto& c : phi.products) CHECK_FALSE(c.exact);
  const auto exact = phi_sets(uniform_polygon(6, 2));
  // Identifications only along edges, so the heuristic never merges more.
  CHECK(phi.products.size() >= exact.products.size() / 2);
}
