#pragma once

// Empirical quasi-isometry evidence for the equivariant map of the
// universal cover: 1-skeleton geodesics, diagonals, bisected edges and the
// separation of their image bisectors, and distance distortion statistics.

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hypoly/polygon_complex.hpp"
#include "hypoly/representation.hpp"

namespace hypoly {

struct PathSegment {
  std::size_t from = 0, to = 0;      // ball vertex ids
  std::optional<std::size_t> edge;   // ball edge id, unset for diagonals
  bool diagonal = false;
  NormalForm face;                   // face holding a diagonal
};

struct PathInComplex {
  std::vector<std::size_t> vertices;  // segments + 1 entries (1 if empty)
  std::vector<PathSegment> segments;

  std::size_t length() const { return segments.size(); }
};

/// Vertex level: syllable length of its minimal coset representative, i.e.
/// the smallest ball radius containing it.
std::size_t vertex_level(const ComplexBall& ball, std::size_t v);

/// BFS distances and parents from `source`, restricted to edges of level
/// <= max_level. Neighbours are scanned in increasing id order.
struct BfsTree {
  std::vector<long> dist;    // -1 when unreachable
  std::vector<long> parent;  // vertex id
  std::vector<long> via;     // edge id
};
BfsTree bfs_tree(const ComplexBall& ball, std::size_t source, std::size_t max_level);

/// Shortest 1-skeleton path; endpoints must have level <= core_radius.
PathInComplex graph_geodesic(const ComplexBall& ball, std::size_t z, std::size_t w,
                             std::size_t core_radius);
PathInComplex path_from_tree(const ComplexBall& ball, const BfsTree& tree, std::size_t z,
                             std::size_t w);

bool face_contains_edge(const ComplexBall& ball, const NormalForm& face, std::size_t edge);

/// Replaces runs of n/2 consecutive edges of one face by the diagonal
/// between their (antipodal) ends. Odd n: unchanged.
PathInComplex insert_diagonals(const ComplexBall& ball, const PathInComplex& path);

/// Whether two path segments lie in a common face of X.
bool segments_share_face(const ComplexBall& ball, const PathSegment& a, const PathSegment& b);

struct BisectedEdgeSet {
  std::vector<std::size_t> indices;  // into path.segments
  std::size_t max_gap = 0;           // largest index difference
};

BisectedEdgeSet select_bisected_edges(const ComplexBall& ball, const PathInComplex& path);

/// Which selected pairs must have disjoint bisector closures.
std::vector<std::pair<std::size_t, std::size_t>> required_disjoint_pairs(std::size_t n,
                                                                         std::size_t count);

struct SeparationStats {
  std::size_t consecutive_pairs = 0;
  std::size_t consecutive_disjoint = 0;
  std::size_t consecutive_asymptotic = 0;
  std::size_t consecutive_intersecting = 0;
  std::size_t required_pairs = 0;
  std::size_t required_failures = 0;  // required pairs not classified disjoint
  double delta_min = std::numeric_limits<double>::infinity();  // over required pairs
  std::size_t crossings = 0;          // required bisectors separating the ends
  std::size_t crossing_failures = 0;
  // Pentagon route through synthesized diagonals.
  std::size_t c1_triples = 0;
  std::size_t c1_failures = 0;
  double c1_worst_orthogonality = 0;
  double c1_worst_length = 0;  // deviation of |D| from b_5 and |E| from a_5

  void merge(const SeparationStats& o);
};

SeparationStats bisector_separation(const Representation& rep, const ComplexBall& ball,
                                    const EquivariantImage& image, const PathInComplex& path,
                                    const BisectedEdgeSet& be);

struct DistortionOptions {
  std::size_t radius = 3;    // endpoints range over the ball of this radius
  std::size_t margin = 2;    // geodesics are computed in radius + margin
  std::size_t sample = 0;    // 0: exhaustive over all pairs
  std::uint64_t seed = 0;
  double tol_classify = kTolClassify;
};

struct DistanceBucket {
  std::size_t k = 0;
  std::size_t count = 0;
  double min = 0, median = 0, max = 0;
};

struct DistortionReport {
  std::size_t pairs = 0;
  bool low_confidence = false;  // fewer than 100 pairs
  std::size_t unstable_pairs = 0;  // distance changes between the two outer radii
  std::vector<DistanceBucket> buckets;  // indexed by k
  double edge_length = 0;               // a_n
  double slope = 0, offset = 0;         // least squares on (k a_n, m(k)), k >= 3
  bool envelope_monotone = true;        // m(k) nondecreasing for 1 <= k <= 2 radius
  std::size_t max_gap = 0;              // largest gap between bisected edges
  std::size_t lipschitz_violations = 0; // pairs with image distance > k a_n
  SeparationStats separation;

  std::string csv() const;
};

DistortionReport distortion_report(const Representation& rep, const DistortionOptions& opt);

}  // namespace hypoly
