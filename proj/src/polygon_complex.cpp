#include "hypoly/polygon_complex.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <numeric>
#include <set>

#include "hypoly/error.hpp"

namespace hypoly {

const char* parity_name(Parity p) { return p == Parity::even ? "even" : "odd"; }

std::size_t PolygonOfGroups::wrap(long long k) const {
  const long long m = static_cast<long long>(n());
  return static_cast<std::size_t>(((k % m) + m) % m);
}

std::vector<Element> PolygonOfGroups::edge_image(std::size_t k, std::size_t v) const {
  const auto& maps = edge_to_vertex.at(k);
  if (v == k) return maps[0];
  require(v == wrap(static_cast<long long>(k) + 1), ErrorKind::invalid_input,
          "vertex is not an endpoint of the edge");
  return maps[1];
}

namespace {

void check_mono(const FiniteGroup& src, const FiniteGroup& dst,
                const std::vector<Element>& map, const std::string& what) {
  require(map.size() == src.order(), ErrorKind::invalid_input, what + ": map has wrong size");
  std::vector<bool> hit(dst.order(), false);
  for (Element x : map) {
    require(x < dst.order(), ErrorKind::invalid_input, what + ": image out of range");
    require(!hit[x], ErrorKind::invalid_input, what + ": map is not injective");
    hit[x] = true;
  }
  for (Element a = 0; a < src.order(); ++a)
    for (Element b = 0; b < src.order(); ++b)
      require(map[src.mul(a, b)] == dst.mul(map[a], map[b]), ErrorKind::invalid_input,
              what + ": map is not a homomorphism");
}

}  // namespace

void PolygonOfGroups::validate() const {
  const std::size_t m = n();
  require(m >= 3, ErrorKind::invalid_input, "polygon needs at least 3 sides");
  require(edge_groups.size() == m && edge_to_vertex.size() == m && face_to_edge.size() == m,
          ErrorKind::invalid_input, "polygon data has inconsistent sizes");
  for (std::size_t k = 0; k < m; ++k) {
    const std::string tag = "edge " + std::to_string(k);
    check_mono(edge_groups[k], vertex_groups[k], edge_to_vertex[k][0], tag + " -> x_k");
    check_mono(edge_groups[k], vertex_groups[wrap(static_cast<long long>(k) + 1)],
               edge_to_vertex[k][1], tag + " -> x_{k+1}");
    check_mono(face_group, edge_groups[k], face_to_edge[k], "face -> " + tag);
  }
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t prev = wrap(static_cast<long long>(k) - 1);
    for (Element f = 0; f < face_group.order(); ++f)
      require(edge_to_vertex[prev][1][face_to_edge[prev][f]] ==
                  edge_to_vertex[k][0][face_to_edge[k][f]],
              ErrorKind::invalid_input,
              "face group inclusions disagree at vertex " + std::to_string(k));
  }
}

PolygonOfGroups PolygonOfGroups::from_graph_product(const GraphProductSpec& spec) {
  PolygonOfGroups poly;
  const std::size_t m = spec.n();
  for (std::size_t k = 0; k < m; ++k) {
    const FiniteGroup& left = spec.factor(spec.wrap(static_cast<long long>(k) - 1));
    poly.vertex_groups.push_back(direct_product(left, spec.factor(k)));
    poly.edge_groups.push_back(spec.factor(k));
  }
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t t_next = spec.factor(spec.wrap(static_cast<long long>(k) + 1)).order();
    std::array<std::vector<Element>, 2> maps;
    for (Element e = 0; e < spec.factor(k).order(); ++e) {
      maps[0].push_back(e);                                   // second coordinate of x_k
      maps[1].push_back(static_cast<Element>(e * t_next));    // first coordinate of x_{k+1}
    }
    poly.edge_to_vertex.push_back(std::move(maps));
    poly.face_to_edge.push_back({0});
  }
  poly.graph_product = spec;
  return poly;
}

std::size_t parity_edge(std::size_t n, std::size_t k, Parity parity) {
  require(n % 2 == 0, ErrorKind::invalid_input,
          "edge parity is only defined for an even number of sides");
  const std::size_t prev = (k + n - 1) % n;
  return (k % 2 == static_cast<std::size_t>(parity)) ? k : prev;
}

NormalForm vertex_element_form(const GraphProductSpec& spec, std::size_t k, Element e) {
  const std::size_t left = spec.wrap(static_cast<long long>(k) - 1);
  const std::size_t t = spec.factor(k).order();
  const Word w{{left, static_cast<Element>(e / t)}, {k, static_cast<Element>(e % t)}};
  return normal_form(w, spec);
}

// ---------------------------------------------------------------------------

std::size_t LinkGraph::girth() const {
  const std::size_t m = cosets.size();
  std::vector<std::vector<std::size_t>> adj(m);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  std::size_t best = 0;
  for (std::size_t root = 0; root < m; ++root) {
    std::vector<long> dist(m, -1), parent(m, -1);
    std::deque<std::size_t> queue{root};
    dist[root] = 0;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t v : adj[u]) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          parent[v] = static_cast<long>(u);
          queue.push_back(v);
        } else if (parent[u] != static_cast<long>(v)) {
          const auto len = static_cast<std::size_t>(dist[u] + dist[v] + 1);
          if (best == 0 || len < best) best = len;
        }
      }
    }
  }
  return best;
}

bool LinkGraph::complete_bipartite() const {
  const auto left = static_cast<std::size_t>(std::count(side.begin(), side.end(), 0));
  const std::size_t right = side.size() - left;
  return edges.size() == left * right;
}

LinkGraph link_graph(const PolygonOfGroups& poly, std::size_t k) {
  require(k < poly.n(), ErrorKind::invalid_input, "vertex index out of range");
  const FiniteGroup& gx = poly.vertex_groups[k];
  const auto a = poly.edge_image(k, k);
  const auto b = poly.edge_image(poly.wrap(static_cast<long long>(k) - 1), k);
  for (const auto* sub : {&a, &b}) {
    std::vector<Element> sorted = *sub;
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
            ErrorKind::invalid_input, "edge group map is not injective");
  }
  LinkGraph link;
  link.vertex = k;
  std::map<std::vector<Element>, std::size_t> ids;
  auto coset_of = [&](Element g, const std::vector<Element>& sub, int side) {
    std::vector<Element> c;
    for (Element h : sub) c.push_back(gx.mul(g, h));
    std::sort(c.begin(), c.end());
    auto [it, fresh] = ids.try_emplace(c, link.cosets.size());
    if (fresh) {
      link.cosets.push_back(c);
      link.side.push_back(side);
    }
    return it->second;
  };
  for (Element g = 0; g < gx.order(); ++g) coset_of(g, a, 0);
  for (Element g = 0; g < gx.order(); ++g) coset_of(g, b, 1);
  std::set<std::pair<std::size_t, std::size_t>> edges;
  for (Element g = 0; g < gx.order(); ++g) edges.insert({coset_of(g, a, 0), coset_of(g, b, 1)});
  link.edges.assign(edges.begin(), edges.end());
  return link;
}

CurvatureVerdict angle_and_curvature(const PolygonOfGroups& poly) {
  CurvatureVerdict v;
  bool acute = true;
  for (std::size_t k = 0; k < poly.n(); ++k) {
    const std::size_t g = link_graph(poly, k).girth();
    v.girths.push_back(g);
    if (g == 0) {
      v.degenerate = true;
      v.angles.push_back(0.0);
    } else {
      v.angles.push_back(2 * std::numbers::pi / static_cast<double>(g));
      acute = acute && v.angles.back() <= std::numbers::pi / 2 + 1e-12;
    }
  }
  v.acute = acute && !v.degenerate;
  v.negatively_curved_right_angled = v.acute && poly.n() >= 5;
  return v;
}

// ---------------------------------------------------------------------------

std::optional<std::size_t> ComplexBall::find_face(const NormalForm& g) const {
  auto it = face_id.find(g);
  if (it == face_id.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> ComplexBall::find_vertex(std::size_t type, const NormalForm& g) const {
  const std::size_t prev = spec->wrap(static_cast<long long>(type) - 1);
  const std::array<std::size_t, 2> allowed{prev, type};
  auto it = vertex_id.find({type, coset_representative(g, allowed, *spec)});
  if (it == vertex_id.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> ComplexBall::find_edge(std::size_t type, const NormalForm& g) const {
  const std::array<std::size_t, 1> allowed{type};
  auto it = edge_id.find({type, coset_representative(g, allowed, *spec)});
  if (it == edge_id.end()) return std::nullopt;
  return it->second;
}

bool ComplexBall::share_face(std::size_t edge_a, std::size_t edge_b) const {
  const Cell& a = edges.at(edge_a);
  const Cell& b = edges.at(edge_b);
  const std::array<std::size_t, 1> allowed{b.type};
  // Faces through r e_k are r h F, h in G_{e_k}.
  for (Element h = 0; h < spec->factor(a.type).order(); ++h) {
    const NormalForm face = multiply(a.rep, NormalForm{h ? Word{{a.type, h}} : Word{}}, *spec);
    if (coset_representative(face, allowed, *spec) == b.rep) return true;
  }
  return false;
}

bool ComplexBall::edge_vertex_share_face(std::size_t edge, std::size_t vertex) const {
  const Cell& a = edges.at(edge);
  const Cell& v = vertices.at(vertex);
  const std::array<std::size_t, 2> allowed{spec->wrap(static_cast<long long>(v.type) - 1), v.type};
  for (Element h = 0; h < spec->factor(a.type).order(); ++h) {
    const NormalForm face = multiply(a.rep, NormalForm{h ? Word{{a.type, h}} : Word{}}, *spec);
    if (coset_representative(face, allowed, *spec) == v.rep) return true;
  }
  return false;
}

ComplexBall build_ball(const GraphProductSpec& spec, std::size_t radius, std::size_t cap) {
  ComplexBall ball;
  ball.spec = std::make_shared<const GraphProductSpec>(spec);
  ball.radius = radius;
  ball.faces = enumerate_ball(spec, radius, cap);
  const std::size_t n = spec.n();
  auto vertex_of = [&](const NormalForm& g, std::size_t k) {
    const std::array<std::size_t, 2> allowed{spec.wrap(static_cast<long long>(k) - 1), k};
    auto key = std::make_pair(k, coset_representative(g, allowed, spec));
    auto [it, fresh] = ball.vertex_id.try_emplace(key, ball.vertices.size());
    if (fresh) ball.vertices.push_back({k, key.second});
    return it->second;
  };
  for (std::size_t f = 0; f < ball.faces.size(); ++f) {
    const NormalForm& g = ball.faces[f];
    ball.face_id.emplace(g, f);
    std::vector<std::size_t> verts(n), eds(n);
    for (std::size_t k = 0; k < n; ++k) verts[k] = vertex_of(g, k);
    for (std::size_t k = 0; k < n; ++k) {
      const std::array<std::size_t, 1> allowed{k};
      auto key = std::make_pair(k, coset_representative(g, allowed, spec));
      auto [it, fresh] = ball.edge_id.try_emplace(key, ball.edges.size());
      if (fresh) {
        ball.edges.push_back({k, key.second});
        ball.edge_ends.push_back({verts[k], verts[(k + 1) % n]});
      }
      eds[k] = it->second;
    }
    ball.face_vertices.push_back(std::move(verts));
    ball.face_edges.push_back(std::move(eds));
  }
  ball.edge_faces.assign(ball.edges.size(), {});
  ball.vertex_faces.assign(ball.vertices.size(), {});
  for (std::size_t f = 0; f < ball.faces.size(); ++f) {
    for (std::size_t e : ball.face_edges[f]) ball.edge_faces[e].push_back(f);
    for (std::size_t v : ball.face_vertices[f]) ball.vertex_faces[v].push_back(f);
  }
  ball.adjacency.assign(ball.vertices.size(), {});
  for (std::size_t e = 0; e < ball.edges.size(); ++e) {
    const auto [a, b] = ball.edge_ends[e];
    ball.adjacency[a].push_back({b, e});
    ball.adjacency[b].push_back({a, e});
  }
  for (auto& row : ball.adjacency) std::sort(row.begin(), row.end());
  return ball;
}

bool in_parity_subgroup(const NormalForm& g, std::size_t n, Parity parity) {
  require(n % 2 == 0, ErrorKind::invalid_input, "parity subgroups need an even number of sides");
  return std::all_of(g.syllables.begin(), g.syllables.end(), [&](const Syllable& s) {
    return s.factor % 2 == static_cast<std::size_t>(parity);
  });
}

namespace {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t m) : parent(m) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  // Keeps the smaller index as root, so roots are canonical.
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent[b] = a;
    return true;
  }
};

}  // namespace

TreeSubgraph build_trees(const ComplexBall& ball, Parity parity) {
  const std::size_t n = ball.n();
  require(n % 2 == 0, ErrorKind::invalid_input,
          "parity trees are undefined for an odd number of sides");
  TreeSubgraph tree;
  tree.parity = parity;
  for (std::size_t f = 0; f < ball.faces.size(); ++f)
    if (in_parity_subgroup(ball.faces[f], n, parity)) tree.centers.push_back(f);
  for (std::size_t e = 0; e < ball.edges.size(); ++e) {
    const auto& cell = ball.edges[e];
    if (cell.type % 2 == static_cast<std::size_t>(parity) &&
        in_parity_subgroup(cell.rep, n, parity))
      tree.midpoints.push_back(e);
  }
  for (std::size_t f : tree.centers)
    for (std::size_t k = static_cast<std::size_t>(parity); k < n; k += 2)
      tree.edges.push_back({f, ball.face_edges[f][k]});
  DisjointSets sets(ball.faces.size() + ball.edges.size());
  for (auto [f, e] : tree.edges)
    if (!sets.unite(f, ball.faces.size() + e)) tree.acyclic = false;
  return tree;
}

// ---------------------------------------------------------------------------

bool obvious_tuple(const PolygonOfGroups& poly, const Witness& w, Parity parity) {
  const FiniteGroup& gi = poly.vertex_groups[w.i];
  auto in_edge = [&](std::size_t vertex, Element x) {
    const std::size_t e = parity_edge(poly.n(), vertex, parity);
    const auto img = poly.edge_image(e, vertex);
    return std::find(img.begin(), img.end(), x) != img.end();
  };
  if (w.i != w.j) return in_edge(w.i, w.g) && in_edge(w.j, w.h);
  return in_edge(w.i, gi.mul(gi.inv(w.h), w.g));
}

namespace {

// Key of a product for polygons without a solved word problem: identify
// vertex-group elements along the edge inclusions, multiply inside a common
// vertex group when possible, otherwise keep the pair.
class HeuristicKeys {
 public:
  explicit HeuristicKeys(const PolygonOfGroups& poly) : poly_(poly), sets_(0) {
    std::size_t total = 0;
    for (const auto& g : poly.vertex_groups) {
      offset_.push_back(total);
      total += g.order();
    }
    sets_ = DisjointSets(total);
    for (std::size_t k = 0; k < poly.n(); ++k) {
      const std::size_t next = poly.wrap(static_cast<long long>(k) + 1);
      for (Element a = 0; a < poly.edge_groups[k].order(); ++a)
        sets_.unite(offset_[k] + poly.edge_to_vertex[k][0][a],
                    offset_[next] + poly.edge_to_vertex[k][1][a]);
    }
    members_.resize(total);
    for (std::size_t x = 0; x < total; ++x) members_[sets_.find(x)].push_back(x);
  }

  NormalForm key(std::size_t j, Element h, std::size_t i, Element g) {
    const FiniteGroup& gj = poly_.vertex_groups[j];
    const Element hinv = gj.inv(h);
    if (i == j) return single(i, gj.mul(hinv, g));
    if (hinv == 0) return single(i, g);
    if (g == 0) return single(j, hinv);
    for (std::size_t x : members_[sets_.find(offset_[j] + hinv)]) {
      for (std::size_t y : members_[sets_.find(offset_[i] + g)]) {
        const auto [kx, ex] = locate(x);
        const auto [ky, ey] = locate(y);
        if (kx == ky) return single(kx, poly_.vertex_groups[kx].mul(ex, ey));
      }
    }
    return NormalForm{{canonical(j, hinv), canonical(i, g)}};
  }

 private:
  std::pair<std::size_t, Element> locate(std::size_t flat) const {
    const auto it = std::upper_bound(offset_.begin(), offset_.end(), flat) - 1;
    const auto k = static_cast<std::size_t>(it - offset_.begin());
    return {k, static_cast<Element>(flat - *it)};
  }
  Syllable canonical(std::size_t k, Element e) {
    const auto [ck, ce] = locate(sets_.find(offset_[k] + e));
    return Syllable{ck, ce};
  }
  NormalForm single(std::size_t k, Element e) {
    if (e == 0) return NormalForm{};
    return NormalForm{{canonical(k, e)}};
  }

  const PolygonOfGroups& poly_;
  std::vector<std::size_t> offset_;
  DisjointSets sets_;
  std::vector<std::vector<std::size_t>> members_;
};

}  // namespace

PhiSets phi_sets(const PolygonOfGroups& poly) {
  const std::size_t n = poly.n();
  require(n % 2 == 0, ErrorKind::invalid_input,
          "tree-preserving product sets need an even number of sides");
  PhiSets out;
  std::map<NormalForm, std::size_t> index;
  std::optional<HeuristicKeys> heuristic;
  std::vector<std::vector<NormalForm>> forms(n);
  if (poly.graph_product) {
    for (std::size_t k = 0; k < n; ++k)
      for (Element e = 0; e < poly.vertex_groups[k].order(); ++e)
        forms[k].push_back(vertex_element_form(*poly.graph_product, k, e));
  } else {
    heuristic.emplace(poly);
  }
  std::array<std::vector<bool>, 2> obvious_flag;
  for (std::size_t j = 0; j < n; ++j) {
    for (Element h = 0; h < poly.vertex_groups[j].order(); ++h) {
      for (std::size_t i = 0; i < n; ++i) {
        for (Element g = 0; g < poly.vertex_groups[i].order(); ++g) {
          ++out.tuple_count;
          NormalForm key;
          if (poly.graph_product) {
            const auto& spec = *poly.graph_product;
            key = multiply(inverse(forms[j][h], spec), forms[i][g], spec);
          } else {
            key = heuristic->key(j, h, i, g);
          }
          auto [it, fresh] = index.try_emplace(key, out.products.size());
          if (fresh) {
            out.products.push_back({key, {}, poly.graph_product.has_value()});
            for (auto& f : obvious_flag) f.push_back(false);
          }
          const Witness w{j, h, i, g};
          out.products[it->second].witnesses.push_back(w);
          for (Parity p : {Parity::even, Parity::odd})
            if (obvious_tuple(poly, w, p)) obvious_flag[parity_index(p)][it->second] = true;
        }
      }
    }
  }
  for (int p = 0; p < 2; ++p)
    for (std::size_t c = 0; c < out.products.size(); ++c)
      (obvious_flag[p][c] ? out.obvious[p] : out.other[p]).push_back(c);
  return out;
}

void check_vertex_hom(const GroupHom& hom, const PolygonOfGroups& poly) {
  const std::size_t n = poly.n();
  require(hom.images.size() == n, ErrorKind::invalid_input,
          "quotient must give images for every vertex group");
  const FiniteGroup& t = hom.target;
  for (std::size_t k = 0; k < n; ++k) {
    const FiniteGroup& src = poly.vertex_groups[k];
    const auto& img = hom.images[k];
    require(img.size() == src.order(), ErrorKind::invalid_input,
            "image table of vertex group " + std::to_string(k) + " has wrong size");
    for (Element x : img) require(x < t.order(), ErrorKind::invalid_input, "image outside target");
    for (Element a = 0; a < src.order(); ++a)
      for (Element b = 0; b < src.order(); ++b)
        require(img[src.mul(a, b)] == t.mul(img[a], img[b]), ErrorKind::invalid_input,
                "quotient is not a homomorphism on vertex group " + std::to_string(k));
  }
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t next = poly.wrap(static_cast<long long>(k) + 1);
    for (Element a = 0; a < poly.edge_groups[k].order(); ++a)
      require(hom.images[k][poly.edge_to_vertex[k][0][a]] ==
                  hom.images[next][poly.edge_to_vertex[k][1][a]],
              ErrorKind::invalid_input,
              "quotient disagrees on edge group " + std::to_string(k));
  }
}

GroupHom vertex_hom_from_factor_hom(const GroupHom& hom, const GraphProductSpec& spec) {
  check_factor_hom(hom, spec);
  GroupHom out{hom.target, {}};
  for (std::size_t k = 0; k < spec.n(); ++k) {
    const std::size_t left = spec.wrap(static_cast<long long>(k) - 1);
    const std::size_t t = spec.factor(k).order();
    std::vector<Element> img;
    for (Element a = 0; a < spec.factor(left).order(); ++a)
      for (Element b = 0; b < t; ++b)
        img.push_back(hom.target.mul(hom.images[left][a], hom.images[k][b]));
    out.images.push_back(std::move(img));
  }
  return out;
}

Element apply_vertex(const GroupHom& hom, std::size_t k, Element e) {
  return hom.images.at(k).at(e);
}

namespace {

Element witness_image(const GroupHom& hom, const Witness& w) {
  return hom.target.mul(hom.target.inv(apply_vertex(hom, w.j, w.h)), apply_vertex(hom, w.i, w.g));
}

std::vector<Element> parity_image(const PolygonOfGroups& poly, const GroupHom& hom, Parity p) {
  std::vector<Element> gens;
  for (std::size_t k = static_cast<std::size_t>(p); k < poly.n(); k += 2)
    for (Element x : poly.edge_to_vertex[k][0]) gens.push_back(apply_vertex(hom, k, x));
  return subgroup_generated(gens, hom.target);
}

}  // namespace

SeparationResult verify_separation(const PolygonOfGroups& poly, const GroupHom& hom) {
  return verify_separation(poly, phi_sets(poly), hom);
}

SeparationResult verify_separation(const PolygonOfGroups& poly, const PhiSets& phi,
                                   const GroupHom& hom) {
  check_vertex_hom(hom, poly);
  SeparationResult r;
  for (Parity p : {Parity::even, Parity::odd}) {
    const int pi = parity_index(p);
    r.parity_images[pi] = parity_image(poly, hom, p);
    const auto& sub = r.parity_images[pi];
    for (std::size_t c : phi.other[pi]) {
      ++r.products_checked;
      const Witness& w = phi.products[c].witnesses.front();
      const Element img = witness_image(hom, w);
      if (std::binary_search(sub.begin(), sub.end(), img)) r.violations.push_back({p, w, img});
    }
  }
  r.passed = r.violations.empty();
  return r;
}

bool certificate_valid(const PolygonOfGroups& poly, const GroupHom& hom,
                       const SeparationViolation& v) {
  const auto sub = parity_image(poly, hom, v.parity);
  const Element img = witness_image(hom, v.witness);
  return img == v.image && std::binary_search(sub.begin(), sub.end(), img) &&
         !obvious_tuple(poly, v.witness, v.parity);
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> QuotientComplex::permutation(Element x) const {
  std::vector<std::size_t> perm(edge_count());
  for (std::size_t c = 0; c < edge_count(); ++c)
    perm[c] = edge_index[edge_type[c]][hom.target.mul(x, edge_rep[c])];
  return perm;
}

Eigen::MatrixXd QuotientComplex::action(Element x) const {
  const auto perm = permutation(x);
  Eigen::MatrixXd moved(basis.rows(), basis.cols());
  for (std::size_t c = 0; c < perm.size(); ++c)
    moved.row(static_cast<Eigen::Index>(perm[c])) = basis.row(static_cast<Eigen::Index>(c));
  return basis.transpose() * moved;
}

Eigen::VectorXd QuotientComplex::coords(const Eigen::VectorXd& edge_vector) const {
  return basis.transpose() * edge_vector;
}

QuotientComplex quotient_complex(const PolygonOfGroups& poly, const GroupHom& hom) {
  const auto sep = verify_separation(poly, hom);
  require(sep.passed, ErrorKind::verification,
          "quotient does not separate the tree stabilizers; refusing to build the complex");
  QuotientComplex q;
  q.hom = hom;
  const FiniteGroup& t = hom.target;
  std::vector<Element> all;
  for (const auto& block : hom.images) all.insert(all.end(), block.begin(), block.end());
  q.image = subgroup_generated(all, t);
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  for (std::size_t k = 0; k < poly.n(); ++k) {
    std::vector<Element> gens;
    for (Element x : poly.edge_to_vertex[k][0]) gens.push_back(apply_vertex(hom, k, x));
    q.edge_subgroups.push_back(subgroup_generated(gens, t));
    std::vector<std::size_t> idx(t.order(), kNone);
    for (Element x : q.image) {
      if (idx[x] != kNone) continue;
      const std::size_t id = q.edge_type.size();
      q.edge_type.push_back(k);
      q.edge_rep.push_back(x);
      for (Element h : q.edge_subgroups[k]) idx[t.mul(x, h)] = id;
    }
    q.edge_index.push_back(std::move(idx));
  }
  const std::size_t m = q.edge_count();
  require(m * 2 * q.image.size() <= 50'000'000, ErrorKind::size_limit,
          "quotient complex too large for the orbit span");
  for (Parity p : {Parity::even, Parity::odd}) {
    std::set<std::size_t> s;
    for (std::size_t k = static_cast<std::size_t>(p); k < poly.n(); k += 2)
      for (Element x : sep.parity_images[parity_index(p)]) s.insert(q.edge_index[k][x]);
    q.support[parity_index(p)].assign(s.begin(), s.end());
  }
  auto indicator = [&](const std::vector<std::size_t>& s) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    for (std::size_t c : s) v(static_cast<Eigen::Index>(c)) = 1.0;
    return Eigen::VectorXd(v / std::sqrt(static_cast<double>(s.size())));
  };
  q.xi = indicator(q.support[0]);
  q.eta = indicator(q.support[1]);

  Eigen::MatrixXd orbit(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(2 * q.image.size()));
  Eigen::Index col = 0;
  for (Element x : q.image) {
    const auto perm = q.permutation(x);
    for (const Eigen::VectorXd* v : {&q.xi, &q.eta}) {
      Eigen::VectorXd moved = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
      for (std::size_t c = 0; c < m; ++c)
        moved(static_cast<Eigen::Index>(perm[c])) = (*v)(static_cast<Eigen::Index>(c));
      orbit.col(col++) = moved;
    }
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(orbit);
  qr.setThreshold(1e-10);
  const auto rank = qr.rank();
  q.basis = qr.householderQ() * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m), rank);
  q.p = static_cast<std::size_t>(rank);
  return q;
}

// ---------------------------------------------------------------------------

StabilizerReport stabilizer_check(const ComplexBall& ball, const PolygonOfGroups& poly,
                                  const PhiSets& phi, Parity parity) {
  require(ball.radius >= 3, ErrorKind::inconclusive,
          "stabilizer check needs a ball of radius at least 3");
  require(poly.graph_product.has_value(), ErrorKind::invalid_input,
          "stabilizer check needs a graph-product polygon");
  const auto& spec = *ball.spec;
  const std::size_t n = spec.n();
  const TreeSubgraph tree = build_trees(ball, parity);
  const int pi = parity_index(parity);
  std::vector<bool> obvious(phi.products.size(), false);
  for (std::size_t c : phi.obvious[pi]) obvious[c] = true;

  StabilizerReport r;
  r.parity = parity;
  r.min_displaced_nodes = static_cast<std::size_t>(-1);
  for (std::size_t c = 0; c < phi.products.size(); ++c) {
    const NormalForm& f = phi.products[c].key;
    std::size_t displaced = 0;
    for (std::size_t face : tree.centers) {
      if (!in_parity_subgroup(multiply(f, ball.faces[face], spec), n, parity)) ++displaced;
      ++r.nodes_checked;
    }
    for (std::size_t e : tree.midpoints) {
      const auto& cell = ball.edges[e];
      const std::array<std::size_t, 1> allowed{cell.type};
      const NormalForm rep = coset_representative(multiply(f, cell.rep, spec), allowed, spec);
      if (!in_parity_subgroup(rep, n, parity)) ++displaced;
      ++r.nodes_checked;
    }
    ++r.products;
    if (obvious[c]) {
      (displaced == 0 ? r.obvious_preserving : r.obvious_moving)++;
    } else {
      if (displaced == 0) r.violations.push_back(c);
      r.min_displaced_nodes = std::min(r.min_displaced_nodes, displaced);
    }
  }
  if (r.min_displaced_nodes == static_cast<std::size_t>(-1)) r.min_displaced_nodes = 0;
  return r;
}

}  // namespace hypoly
