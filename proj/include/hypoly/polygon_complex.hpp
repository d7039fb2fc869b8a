#pragma once

// Polygons of finite groups, their vertex links, finite balls of the
// universal cover (graph-product case), the parity trees, the sets of
// "obvious" tree-preserving products, and quotient complexes.
//
// Indexing is 0-based: edge e_k joins x_k and x_{k+1}; vertex x_k carries
// the edges e_{k-1} and e_k. For a cyclic graph product, factor k is the
// edge group G_{e_k} and G_{x_k} = G_{e_{k-1}} x G_{e_k}.

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hypoly/group_core.hpp"

namespace hypoly {

/// Edge parity: 0 = edges e_0, e_2, ...; 1 = edges e_1, e_3, ...
enum class Parity : int { even = 0, odd = 1 };

inline int parity_index(Parity p) { return static_cast<int>(p); }
const char* parity_name(Parity p);

struct PolygonOfGroups {
  std::vector<FiniteGroup> vertex_groups;  // G_{x_k}
  std::vector<FiniteGroup> edge_groups;    // G_{e_k}
  FiniteGroup face_group;
  /// edge_to_vertex[k][0]: G_{e_k} -> G_{x_k}; [k][1]: G_{e_k} -> G_{x_{k+1}}.
  std::vector<std::array<std::vector<Element>, 2>> edge_to_vertex;
  /// face_to_edge[k]: G_F -> G_{e_k}.
  std::vector<std::vector<Element>> face_to_edge;
  /// Set when the polygon came from a cyclic graph product; enables exact
  /// element identification and ball construction.
  std::optional<GraphProductSpec> graph_product;

  std::size_t n() const noexcept { return vertex_groups.size(); }
  std::size_t wrap(long long k) const;

  /// Image of G_{e_k} inside G_{x_v}, v in {k, k+1}.
  std::vector<Element> edge_image(std::size_t k, std::size_t v) const;

  /// Throws invalid_input unless every map is an injective homomorphism and
  /// the face -> edge -> vertex triangles commute.
  void validate() const;

  static PolygonOfGroups from_graph_product(const GraphProductSpec& spec);
};

/// The edge at vertex x_k (one of e_{k-1}, e_k) with the given parity.
/// Requires an even number of sides.
std::size_t parity_edge(std::size_t n, std::size_t k, Parity parity);

/// A vertex-group element as a graph-product normal form.
NormalForm vertex_element_form(const GraphProductSpec& spec, std::size_t k, Element e);

// --------------------------------------------------------------------------
// Links and angles

struct LinkGraph {
  std::size_t vertex = 0;
  /// Cosets g G_{e_k} (side 0) then g G_{e_{k-1}} (side 1), each as a sorted
  /// element list of G_{x_k}.
  std::vector<std::vector<Element>> cosets;
  std::vector<int> side;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  std::size_t girth() const;  // 0 if the graph is a forest
  bool complete_bipartite() const;
};

LinkGraph link_graph(const PolygonOfGroups& poly, std::size_t k);

struct CurvatureVerdict {
  std::vector<double> angles;  // 2 pi / girth, 0 for forests
  std::vector<std::size_t> girths;
  bool degenerate = false;  // some link is a forest
  bool acute = false;
  bool negatively_curved_right_angled = false;
};

CurvatureVerdict angle_and_curvature(const PolygonOfGroups& poly);

// --------------------------------------------------------------------------
// Balls of the universal cover

struct ComplexBall {
  std::shared_ptr<const GraphProductSpec> spec;
  std::size_t radius = 0;
  std::vector<NormalForm> faces;  // face g F, ordered as enumerate_ball
  std::map<NormalForm, std::size_t> face_id;

  struct Cell {
    std::size_t type = 0;  // k for x_k or e_k
    NormalForm rep;        // minimal coset representative
  };
  std::vector<Cell> vertices;  // g x_k
  std::vector<Cell> edges;     // g e_k
  std::map<std::pair<std::size_t, NormalForm>, std::size_t> vertex_id, edge_id;

  std::vector<std::vector<std::size_t>> face_vertices;  // [f][k] = id of g x_k
  std::vector<std::vector<std::size_t>> face_edges;     // [f][k] = id of g e_k
  std::vector<std::array<std::size_t, 2>> edge_ends;    // g x_k, g x_{k+1}
  std::vector<std::vector<std::size_t>> edge_faces;     // faces in the ball
  std::vector<std::vector<std::size_t>> vertex_faces;
  /// 1-skeleton: for each vertex, (neighbour, edge) sorted by neighbour id.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adjacency;

  std::size_t n() const { return spec->n(); }
  std::optional<std::size_t> find_face(const NormalForm& g) const;
  std::optional<std::size_t> find_vertex(std::size_t type, const NormalForm& g) const;
  std::optional<std::size_t> find_edge(std::size_t type, const NormalForm& g) const;
  /// Whether some face of X (not only of the ball) contains both edges.
  bool share_face(std::size_t edge_a, std::size_t edge_b) const;
  /// Whether some face of X contains both the edge and the vertex.
  bool edge_vertex_share_face(std::size_t edge, std::size_t vertex) const;
};

/// Faces of syllable length <= radius. Face-graph distance (faces adjacent
/// across edges) equals syllable length, so this is the face-radius ball.
ComplexBall build_ball(const GraphProductSpec& spec, std::size_t radius,
                       std::size_t cap = kDefaultElementCap);

struct TreeSubgraph {
  Parity parity = Parity::even;
  std::vector<std::size_t> centers;    // face ids
  std::vector<std::size_t> midpoints;  // edge ids
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // (face, edge)
  bool acyclic = true;
};

/// Parity subgroup membership of a normal form.
bool in_parity_subgroup(const NormalForm& g, std::size_t n, Parity parity);

TreeSubgraph build_trees(const ComplexBall& ball, Parity parity);

// --------------------------------------------------------------------------
// Products of vertex-group generators

struct Witness {
  std::size_t j = 0;  // h in G_{x_j}
  Element h = 0;
  std::size_t i = 0;  // g in G_{x_i}
  Element g = 0;
  auto operator<=>(const Witness&) const = default;
};

/// One group element h^{-1} g, with every witnessing pair.
struct ProductClass {
  NormalForm key;  // exact normal form, or a heuristic key for general polygons
  std::vector<Witness> witnesses;
  bool exact = true;
};

/// Phi'_P: products witnessed by an obvious pair (cases (a), (b));
/// Phi_P: the remaining products. Indexed by parity.
struct PhiSets {
  std::vector<ProductClass> products;
  std::array<std::vector<std::size_t>, 2> obvious;  // indices into products
  std::array<std::vector<std::size_t>, 2> other;
  std::size_t tuple_count = 0;  // (sum |G_x|)^2
};

PhiSets phi_sets(const PolygonOfGroups& poly);

/// True iff the tuple satisfies (a) or (b) for the parity.
bool obvious_tuple(const PolygonOfGroups& poly, const Witness& w, Parity parity);

/// A homomorphism given by images of every vertex group; must agree on edge
/// groups.
void check_vertex_hom(const GroupHom& hom, const PolygonOfGroups& poly);
/// Vertex-block homomorphism from a factor-block one.
GroupHom vertex_hom_from_factor_hom(const GroupHom& hom, const GraphProductSpec& spec);

struct SeparationViolation {
  Parity parity = Parity::even;
  Witness witness;
  Element image = 0;  // phi(h^{-1} g), lies in phi(G_parity)
};

struct SeparationResult {
  bool passed = false;
  std::array<std::vector<Element>, 2> parity_images;  // phi(G_even), phi(G_odd)
  std::vector<SeparationViolation> violations;
  std::size_t products_checked = 0;
};

Element apply_vertex(const GroupHom& hom, std::size_t k, Element e);

SeparationResult verify_separation(const PolygonOfGroups& poly, const GroupHom& hom);
SeparationResult verify_separation(const PolygonOfGroups& poly, const PhiSets& phi,
                                   const GroupHom& hom);

/// Checks that a reported violation really maps into phi(G_parity).
bool certificate_valid(const PolygonOfGroups& poly, const GroupHom& hom,
                       const SeparationViolation& v);

// --------------------------------------------------------------------------
// Quotient complex and the orbit representation

struct QuotientComplex {
  GroupHom hom;
  std::vector<Element> image;  // phi(G) inside the target
  std::vector<std::vector<Element>> edge_subgroups;  // phi(G_{e_k})
  /// Edge cosets x phi(G_{e_k}); edge_index[k][x] = global edge index of
  /// the coset containing x (x any target element of the image).
  std::vector<std::vector<std::size_t>> edge_index;
  std::vector<std::size_t> edge_type;
  std::vector<Element> edge_rep;
  std::array<std::vector<std::size_t>, 2> support;  // S_even, S_odd
  Eigen::VectorXd xi, eta;                           // in edge coordinates
  Eigen::MatrixXd basis;                             // orthonormal basis of V
  std::size_t p = 0;

  std::size_t edge_count() const { return edge_type.size(); }
  /// Permutation of edges by left multiplication with x.
  std::vector<std::size_t> permutation(Element x) const;
  /// Matrix of x acting on V in the stored basis.
  Eigen::MatrixXd action(Element x) const;
  Eigen::VectorXd coords(const Eigen::VectorXd& edge_vector) const;
};

/// Refuses (verification error) when the separation check fails.
QuotientComplex quotient_complex(const PolygonOfGroups& poly, const GroupHom& hom);

// --------------------------------------------------------------------------
// Stabilizers of the trees

struct StabilizerReport {
  Parity parity = Parity::even;
  std::size_t products = 0;
  std::size_t nodes_checked = 0;
  std::size_t obvious_preserving = 0;
  std::size_t obvious_moving = 0;  // members of Phi' that fail locally: bug
  std::vector<std::size_t> violations;  // products outside Phi' that preserve
  std::size_t min_displaced_nodes = 0;  // over products outside Phi'
};

StabilizerReport stabilizer_check(const ComplexBall& ball, const PolygonOfGroups& poly,
                                  const PhiSets& phi, Parity parity);

}  // namespace hypoly
