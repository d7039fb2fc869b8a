#pragma once

// Isometric actions of polygon-of-groups fundamental groups on H^p.
//
// Odd n (cyclic graph products): a flag space W with one regular block per
// edge group, carried around the polygon by bisector reflections.
// Even n: the orbit representation of a quotient complex, unfolded around the
// polygon by the same reflections.
//
// Generators are stored per edge group and per vertex group. Matrices act on
// R^{p+1} with the form diag(-1, 1, ..., 1).

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hypoly/group_core.hpp"
#include "hypoly/hyperbolic.hpp"
#include "hypoly/polygon_complex.hpp"

namespace hypoly {

enum class RepMode { odd, even, extended };
const char* rep_mode_name(RepMode m);
RepMode parse_rep_mode(const std::string& s);

/// A p x p orthogonal matrix drawn from the seed; seed 0 gives the identity.
Eigen::MatrixXd seeded_rotation(Index p, std::uint64_t seed);

/// Orthonormal basis of R^m whose first columns are `leading` (orthonormal),
/// completed by Gram-Schmidt over e_0, e_1, ... in order.
Eigen::MatrixXd complete_orthonormal(const Eigen::MatrixXd& leading, Index m);

struct ReflectionChain {
  std::vector<Eigen::MatrixXd> reflections;  // R_k: bisector of e_k
  std::vector<Eigen::MatrixXd> partial;      // partial[i] = R_{i-1} ... R_0, partial[0] = Id

  /// max |J_n - Id|
  double closure_defect() const;
};

ReflectionChain reflection_chain(const PolygonEmbedding<double>& poly);

/// Index of the flag/edge e_m after the dihedral reflection fixing e_b.
std::size_t dihedral_image(std::size_t n, std::size_t b, std::size_t m);

/// Flag space of the odd construction: one block of |G_{e_i}| flags per
/// edge, the identity flag of each block being the distinguished flag f_i.
struct FlagSpace {
  std::vector<std::size_t> offset;  // first flag of block i
  Index p = 0;
  std::size_t flag(std::size_t edge, Element g) const { return offset[edge] + g; }
  std::size_t distinguished(std::size_t edge) const { return offset[edge]; }
};

FlagSpace flag_space(const GraphProductSpec& spec);

struct Representation {
  RepMode mode = RepMode::odd;
  RepMode base_mode = RepMode::odd;  // construction before any extension
  Index p = 0;
  PolygonEmbedding<double> polygon;
  PolygonOfGroups poly;
  std::uint64_t seed = 0;
  /// edge_matrices[k][a]: image of element a of G_{e_k}.
  std::vector<std::vector<Eigen::MatrixXd>> edge_matrices;
  /// vertex_matrices[k][a]: image of element a of G_{x_k}.
  std::vector<std::vector<Eigen::MatrixXd>> vertex_matrices;
  /// Frames carried around the polygon: odd mode at the midpoints m_0..m_n,
  /// even mode at the vertices x_0..x_n (index n closes the loop).
  std::vector<Eigen::MatrixXd> frames;

  Index dim() const { return p + 1; }
  /// Image of a graph-product element (normal form or any word).
  Eigen::MatrixXd evaluate(const NormalForm& g) const;
};

/// Flag construction; n >= 5 odd, every link negatively curved.
Representation build_odd(const GraphProductSpec& spec, std::uint64_t seed = 0);

/// Unfolded orbit representation; n >= 6 even. Refuses unless the quotient
/// separates the tree stabilizers.
Representation build_even(const PolygonOfGroups& poly, const GroupHom& vertex_hom,
                          std::uint64_t seed = 0);
Representation build_even(const PolygonOfGroups& poly, const QuotientComplex& q,
                          std::uint64_t seed = 0);

struct RelationReport {
  double lorentz = 0;          // max J-orthogonality residual of generators
  double vertex_tables = 0;    // rho(ab) vs rho(a) rho(b) inside vertex groups
  double edge_agreement = 0;   // edge groups seen from both endpoint vertices
  double commutators = 0;      // adjacent edge groups commute
  double element_orders = 0;   // rho(g)^ord(g) vs Id
  double min_proper_power = 0; // min over g, 0 < e < ord(g) of |rho(g)^e - Id|
  std::string worst;           // which relation realised the max residual

  double max_residual() const;
  bool passed(double tol = 1e-9) const;
};

RelationReport verify_relations(const Representation& rep);

struct OrthogonalityCheck {
  std::size_t pairs = 0;
  std::size_t failures = 0;
  double worst_residual = 0;
  bool passed() const { return failures == 0; }
};

struct RepOrthogonality {
  /// Odd: planes H^2, rho(g)H^2, rho(g')H^2 for g in G_{e_i}, g' in G_{e_j},
  /// split by whether e_i, e_j are adjacent.
  OrthogonalityCheck planes_nonadjacent, planes_adjacent;
  /// Even: normal link vectors at x_i, x_j (|i - j| >= 2), and the reduced
  /// sets for adjacent vertices.
  OrthogonalityCheck links_far, links_adjacent;
  /// Spans of faces meeting the base face, pairwise.
  OrthogonalityCheck faces;

  bool passed() const;
};

RepOrthogonality verify_orthogonality(const Representation& rep, double tol = 1e-9);

/// Images of the cells of a ball under the equivariant map.
struct EquivariantImage {
  std::vector<Eigen::MatrixXd> face_matrices;   // rho(g) for each ball face
  std::vector<Eigen::VectorXd> vertices;        // mu(g x_k)
  std::vector<Eigen::VectorXd> edge_midpoints;  // mu(g m_k)
  std::vector<Eigen::VectorXd> face_centers;
  double well_definedness = 0;  // max spread over faces sharing a cell
};

EquivariantImage equivariant_map(const Representation& rep, const ComplexBall& ball,
                                 double tol = 1e-8);

/// Block-diagonal extension by a finite orthogonal representation of a
/// quotient; `vertex_hom` gives images per vertex group, `target_matrices`
/// the k x k orthogonal matrix of each target element.
Representation extend_representation(const Representation& rep, const GroupHom& vertex_hom,
                                     const std::vector<Eigen::MatrixXd>& target_matrices);

/// Permutation matrices of the left regular representation.
std::vector<Eigen::MatrixXd> regular_orthogonal_representation(const FiniteGroup& g);

struct DisplacementScan {
  std::vector<double> scores;  // per ball face
  double min_nontrivial = 0;
  std::size_t argmin = 0;
};

/// Score of g: max(|rho(g) - Id|_max, displacement of the polygon centre).
DisplacementScan min_displacement_scan(const Representation& rep, const ComplexBall& ball);

}  // namespace hypoly
