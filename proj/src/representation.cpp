#include "hypoly/representation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hypoly/error.hpp"

namespace hypoly {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Residual tolerance for construction-time invariants.
constexpr double kConstructTol = 1e-9;

double max_abs(const MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

MatrixXd identity(Index d) { return MatrixXd::Identity(d, d); }

// Columns 3..p of R^{p+1}: the normal directions of the H^2 slice.
MatrixXd slice_normals(Index p, std::uint64_t seed) {
  MatrixXd e = MatrixXd::Zero(p + 1, p - 2);
  for (Index j = 0; j < p - 2; ++j) e(3 + j, j) = 1.0;
  return e * seeded_rotation(p - 2, seed);
}

}  // namespace

const char* rep_mode_name(RepMode m) {
  switch (m) {
    case RepMode::odd: return "odd";
    case RepMode::even: return "even";
    case RepMode::extended: return "extended";
  }
  return "?";
}

RepMode parse_rep_mode(const std::string& s) {
  if (s == "odd") return RepMode::odd;
  if (s == "even") return RepMode::even;
  if (s == "extended") return RepMode::extended;
  fail(ErrorKind::invalid_input, "unknown representation mode '" + s + "'");
}

MatrixXd seeded_rotation(Index p, std::uint64_t seed) {
  if (seed == 0 || p <= 0) return identity(std::max<Index>(p, 0));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  MatrixXd a(p, p);
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < p; ++i) a(i, j) = normal(rng);
  Eigen::HouseholderQR<MatrixXd> qr(a);
  MatrixXd q = qr.householderQ() * identity(p);
  const MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < p; ++j)
    if (r(j, j) < 0) q.col(j) *= -1;
  return q;
}

MatrixXd complete_orthonormal(const MatrixXd& leading, Index m) {
  MatrixXd out(m, m);
  Index filled = 0;
  auto push = [&](VectorXd v) {
    for (int pass = 0; pass < 2; ++pass)
      for (Index j = 0; j < filled; ++j) v -= out.col(j).dot(v) * out.col(j);
    const double norm = v.norm();
    if (norm < 1e-6) return false;
    out.col(filled++) = v / norm;
    return true;
  };
  for (Index j = 0; j < leading.cols(); ++j)
    require(push(leading.col(j)), ErrorKind::verification,
            "leading vectors are not linearly independent");
  for (Index i = 0; i < m && filled < m; ++i) push(VectorXd::Unit(m, i));
  require(filled == m, ErrorKind::verification, "orthonormal completion failed");
  return out;
}

double ReflectionChain::closure_defect() const {
  return max_abs(partial.back() - identity(partial.back().rows()));
}

ReflectionChain reflection_chain(const PolygonEmbedding<double>& poly) {
  ReflectionChain chain;
  const Index dim = poly.p + 1;
  chain.partial.push_back(identity(dim));
  for (std::size_t k = 0; k < poly.vertices.size(); ++k) {
    const auto h = bisector(GeodesicSegment<double>{poly.vertices[k], poly.vertices[poly.next(k)]});
    chain.reflections.push_back(reflection_in_hyperplane(h.normal).m);
    chain.partial.push_back(chain.reflections.back() * chain.partial.back());
  }
  return chain;
}

std::size_t dihedral_image(std::size_t n, std::size_t b, std::size_t m) {
  return (2 * b + 2 * n - m) % n;
}

FlagSpace flag_space(const GraphProductSpec& spec) {
  FlagSpace w;
  std::size_t total = 0;
  for (std::size_t i = 0; i < spec.n(); ++i) {
    w.offset.push_back(total);
    total += spec.factor(i).order();
  }
  w.p = static_cast<Index>(total);
  return w;
}

MatrixXd Representation::evaluate(const NormalForm& g) const {
  require(poly.graph_product.has_value(), ErrorKind::invalid_input,
          "evaluating words needs a graph-product representation");
  MatrixXd m = identity(dim());
  int since = 0;
  for (const Syllable& s : g.syllables) {
    require(s.factor < edge_matrices.size() && s.element < edge_matrices[s.factor].size(),
            ErrorKind::invalid_input, "syllable outside the generator table");
    m = m * edge_matrices[s.factor][s.element];
    if (++since == kReorthonormalizeEvery) {
      m = reorthonormalize<double>(m);
      since = 0;
    }
  }
  return m;
}

// ---------------------------------------------------------------------------

Representation build_odd(const GraphProductSpec& spec, std::uint64_t seed) {
  const std::size_t n = spec.n();
  require(n % 2 == 1, ErrorKind::invalid_input,
          "the flag construction needs an odd number of sides; use the even builder");
  require(n >= 5, ErrorKind::invalid_input, "need at least 5 sides");
  Representation rep;
  rep.mode = rep.base_mode = RepMode::odd;
  rep.seed = seed;
  rep.poly = PolygonOfGroups::from_graph_product(spec);
  const auto verdict = angle_and_curvature(rep.poly);
  require(verdict.negatively_curved_right_angled, ErrorKind::invalid_input,
          "polygon of groups is not negatively curved and right-angled");

  const FlagSpace w = flag_space(spec);
  const Index p = w.p;
  rep.p = p;
  rep.polygon = regular_polygon<double>(static_cast<int>(n), p);
  const auto& emb = rep.polygon;
  const ReflectionChain chain = reflection_chain(emb);
  const std::size_t half = (n + 1) / 2;  // n = 2 half - 1

  // psi_0: f_0 -> inward normal at m_0, f_1 -> tangent of e_0, every other
  // flag -> the slice normals.
  MatrixXd psi(p + 1, p);
  const MatrixXd normals = slice_normals(p, seed);
  psi.col(static_cast<Index>(w.distinguished(0))) = emb.inward_normal(0);
  psi.col(static_cast<Index>(w.distinguished(1))) = tangent_toward(emb.midpoints[0], emb.vertices[1]);
  Index next_normal = 0;
  for (std::size_t i = 2; i < n; ++i)
    psi.col(static_cast<Index>(w.distinguished(i))) = normals.col(next_normal++);
  for (std::size_t i = 0; i < n; ++i)
    for (Element g = 1; g < spec.factor(i).order(); ++g)
      psi.col(static_cast<Index>(w.flag(i, g))) = normals.col(next_normal++);

  rep.frames.push_back(psi);
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t b = (a + half) % n;
    MatrixXd flip = identity(p);
    for (std::size_t m = 0; m < n; ++m) {
      const auto from = static_cast<Index>(w.distinguished(m));
      const auto to = static_cast<Index>(w.distinguished(dihedral_image(n, b, m)));
      flip(from, from) = 0;
      flip(to, from) = 1;
    }
    rep.frames.push_back(chain.reflections[b] * rep.frames.back() * flip);
  }
  for (std::size_t a = 0; a <= n; ++a) {
    const VectorXd got = rep.frames[a].col(static_cast<Index>(w.distinguished(a % n)));
    require((got - emb.inward_normal(a % n)).cwiseAbs().maxCoeff() <= 1e-10,
            ErrorKind::verification,
            "flag frame does not send f_i to the inward normal at m_" + std::to_string(a % n));
  }

  auto flag_action = [&](std::size_t i, Element g) {
    MatrixXd m = identity(p);
    const FiniteGroup& grp = spec.factor(i);
    for (Element h = 0; h < grp.order(); ++h) {
      const auto from = static_cast<Index>(w.flag(i, h));
      m(from, from) = 0;
      m(static_cast<Index>(w.flag(i, grp.mul(g, h))), from) = 1;
    }
    return m;
  };
  rep.edge_matrices.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    for (Element g = 0; g < spec.factor(i).order(); ++g)
      rep.edge_matrices[i].push_back(
          elliptic_at<double>(emb.midpoints[i], rep.frames[i], flag_action(i, g)).m);
  for (Element g = 0; g < spec.factor(0).order(); ++g) {
    const MatrixXd again = elliptic_at<double>(emb.midpoints[0], rep.frames[n], flag_action(0, g)).m;
    require(max_abs(again - rep.edge_matrices[0][g]) <= kConstructTol, ErrorKind::verification,
            "flag frames do not close up on the first edge group");
  }
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t left = spec.wrap(static_cast<long long>(k) - 1);
    const std::size_t t = spec.factor(k).order();
    std::vector<MatrixXd> block;
    for (Element a = 0; a < spec.factor(left).order(); ++a)
      for (Element b = 0; b < t; ++b)
        block.push_back(rep.edge_matrices[left][a] * rep.edge_matrices[k][b]);
    rep.vertex_matrices.push_back(std::move(block));
  }
  return rep;
}

Representation build_even(const PolygonOfGroups& poly, const GroupHom& vertex_hom,
                          std::uint64_t seed) {
  return build_even(poly, quotient_complex(poly, vertex_hom), seed);
}

Representation build_even(const PolygonOfGroups& poly, const QuotientComplex& q,
                          std::uint64_t seed) {
  const std::size_t n = poly.n();
  require(n % 2 == 0 && n >= 6, ErrorKind::invalid_input,
          "the unfolding construction needs an even number of sides >= 6");
  poly.validate();
  check_vertex_hom(q.hom, poly);
  const auto p = static_cast<Index>(q.p);
  require(p >= 2, ErrorKind::verification, "orbit representation has dimension < 2");

  Representation rep;
  rep.mode = rep.base_mode = RepMode::even;
  rep.seed = seed;
  rep.poly = poly;
  rep.p = p;
  rep.polygon = regular_polygon<double>(static_cast<int>(n), p);
  const auto& emb = rep.polygon;
  const ReflectionChain chain = reflection_chain(emb);
  require(chain.closure_defect() <= kConstructTol, ErrorKind::verification,
          "bisector reflections do not close up");

  MatrixXd lead(p, 2);
  lead << q.coords(q.xi), q.coords(q.eta);
  const MatrixXd basis = complete_orthonormal(lead, p);
  MatrixXd target(p + 1, p);
  target.col(0) = emb.forward_direction(0);
  target.col(1) = emb.backward_direction(0);
  if (p > 2) target.rightCols(p - 2) = slice_normals(p, seed);
  const MatrixXd phi0 = target * basis.transpose();
  for (std::size_t i = 0; i <= n; ++i) rep.frames.push_back(chain.partial[i] * phi0);

  rep.vertex_matrices.resize(n);
  for (std::size_t k = 0; k < n; ++k)
    for (Element a = 0; a < poly.vertex_groups[k].order(); ++a)
      rep.vertex_matrices[k].push_back(
          elliptic_at<double>(emb.vertices[k], rep.frames[k], q.action(q.hom.images[k][a])).m);

  rep.edge_matrices.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t next = poly.wrap(static_cast<long long>(k) + 1);
    for (Element a = 0; a < poly.edge_groups[k].order(); ++a) {
      const MatrixXd& here = rep.vertex_matrices[k][poly.edge_to_vertex[k][0][a]];
      const MatrixXd& there = rep.vertex_matrices[next][poly.edge_to_vertex[k][1][a]];
      require(max_abs(here - there) <= kConstructTol, ErrorKind::verification,
              "reflection R_" + std::to_string(k) +
                  " does not intertwine the edge group actions at its endpoints");
      rep.edge_matrices[k].push_back(here);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

double RelationReport::max_residual() const {
  return std::max({lorentz, vertex_tables, edge_agreement, commutators, element_orders});
}

bool RelationReport::passed(double tol) const { return max_residual() <= tol; }

RelationReport verify_relations(const Representation& rep) {
  RelationReport r;
  const PolygonOfGroups& poly = rep.poly;
  const std::size_t n = poly.n();
  const MatrixXd id = identity(rep.dim());
  double worst = -1;
  auto note = [&](double& slot, double value, const std::string& what) {
    slot = std::max(slot, value);
    if (value > worst) {
      worst = value;
      r.worst = what;
    }
  };
  r.min_proper_power = std::numeric_limits<double>::infinity();
  auto powers = [&](const MatrixXd& m, std::size_t order, const std::string& what) {
    MatrixXd acc = id;
    for (std::size_t e = 1; e <= order; ++e) {
      acc = acc * m;
      if (e < order) r.min_proper_power = std::min(r.min_proper_power, max_abs(acc - id));
    }
    note(r.element_orders, max_abs(acc - id), what);
  };

  for (std::size_t k = 0; k < n; ++k) {
    const FiniteGroup& gx = poly.vertex_groups[k];
    const auto& vm = rep.vertex_matrices.at(k);
    require(vm.size() == gx.order(), ErrorKind::invalid_input,
            "vertex generator table has the wrong size");
    for (Element a = 0; a < gx.order(); ++a) {
      const std::string tag = "vertex " + std::to_string(k) + " element " + std::to_string(a);
      note(r.lorentz, lorentz_residual(vm[a]), tag + " J-orthogonality");
      for (Element b = 0; b < gx.order(); ++b)
        note(r.vertex_tables, max_abs(vm[gx.mul(a, b)] - vm[a] * vm[b]), tag + " table");
      if (a != 0) powers(vm[a], gx.element_order(a), tag + " order");
    }
    note(r.vertex_tables, max_abs(vm[0] - id), "vertex " + std::to_string(k) + " identity");
  }
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t next = poly.wrap(static_cast<long long>(k) + 1);
    const auto& em = rep.edge_matrices.at(k);
    require(em.size() == poly.edge_groups[k].order(), ErrorKind::invalid_input,
            "edge generator table has the wrong size");
    for (Element a = 0; a < em.size(); ++a) {
      const std::string tag = "edge " + std::to_string(k) + " element " + std::to_string(a);
      note(r.lorentz, lorentz_residual(em[a]), tag + " J-orthogonality");
      note(r.edge_agreement,
           max_abs(em[a] - rep.vertex_matrices[k][poly.edge_to_vertex[k][0][a]]),
           tag + " vs its left vertex");
      note(r.edge_agreement,
           max_abs(em[a] - rep.vertex_matrices[next][poly.edge_to_vertex[k][1][a]]),
           tag + " vs its right vertex");
    }
    if (poly.graph_product) {
      for (Element a = 1; a < em.size(); ++a)
        for (Element b = 1; b < rep.edge_matrices[next].size(); ++b) {
          const MatrixXd& x = em[a];
          const MatrixXd& y = rep.edge_matrices[next][b];
          note(r.commutators, max_abs(x * y - y * x),
               "commutator of edges " + std::to_string(k) + " and " + std::to_string(next));
        }
    }
  }
  if (!std::isfinite(r.min_proper_power)) r.min_proper_power = 0;
  return r;
}

// ---------------------------------------------------------------------------

bool RepOrthogonality::passed() const {
  return planes_nonadjacent.passed() && planes_adjacent.passed() && links_far.passed() &&
         links_adjacent.passed() && faces.passed();
}

namespace {

using Subspace = TotallyGeodesicSubspace<double>;

Subspace image_of_slice(const MatrixXd& m) {
  return span_of_vectors<double>(MatrixXd(m.leftCols(3)));
}

void record(OrthogonalityCheck& check, const Subspace& a, const Subspace& b, double tol) {
  const auto r = subspaces_orthogonal<double>(a, b, tol);
  ++check.pairs;
  if (!r.orthogonal) ++check.failures;
  const double residual = r.relation == SubspaceRelation::asymptotic || r.nested
                              ? std::numeric_limits<double>::infinity()
                              : r.residual;
  check.worst_residual = std::max(check.worst_residual, residual);
}

// Deduplicated vectors (columns) up to tol.
void push_unique(std::vector<VectorXd>& set, const VectorXd& v) {
  for (const auto& u : set)
    if ((u - v).cwiseAbs().maxCoeff() <= 1e-8) return;
  set.push_back(v);
}

}  // namespace

RepOrthogonality verify_orthogonality(const Representation& rep, double tol) {
  RepOrthogonality out;
  const PolygonOfGroups& poly = rep.poly;
  const std::size_t n = poly.n();
  const Subspace slice = image_of_slice(identity(rep.dim()));

  if (rep.base_mode == RepMode::odd) {
    std::vector<std::vector<Subspace>> planes(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t g = 1; g < rep.edge_matrices[i].size(); ++g) {
        planes[i].push_back(image_of_slice(rep.edge_matrices[i][g]));
        record(out.planes_nonadjacent, slice, planes[i].back(), tol);
      }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
        for (const auto& a : planes[i])
          for (const auto& b : planes[j])
            record(adjacent ? out.planes_adjacent : out.planes_nonadjacent, a, b, tol);
      }
  } else {
    // Link vectors at x_i: images of the two edge directions under G_{x_i}.
    const ReflectionChain chain = reflection_chain(rep.polygon);
    const VectorXd fwd = rep.polygon.forward_direction(0);
    const VectorXd bwd = rep.polygon.backward_direction(0);
    std::vector<std::array<VectorXd, 2>> base(n);
    std::vector<std::vector<VectorXd>> full(n), reduced_left(n), reduced_right(n);
    for (std::size_t i = 0; i < n; ++i) {
      base[i] = {chain.partial[i] * fwd, chain.partial[i] * bwd};
      const std::size_t prev = poly.wrap(static_cast<long long>(i) - 1);
      const auto right_edge = poly.edge_image(i, i);      // G_{e_i} in G_{x_i}
      const auto left_edge = poly.edge_image(prev, i);    // G_{e_{i-1}} in G_{x_i}
      std::vector<VectorXd> from_right, from_left;
      for (Element a : right_edge)
        for (const auto& d : base[i]) push_unique(from_right, rep.vertex_matrices[i][a] * d);
      for (Element a : left_edge)
        for (const auto& d : base[i]) push_unique(from_left, rep.vertex_matrices[i][a] * d);
      for (Element g = 0; g < rep.vertex_matrices[i].size(); ++g)
        for (const auto& d : base[i]) {
          const VectorXd v = rep.vertex_matrices[i][g] * d;
          auto in = [&](const std::vector<VectorXd>& s) {
            return std::any_of(s.begin(), s.end(), [&](const VectorXd& u) {
              return (u - v).cwiseAbs().maxCoeff() <= 1e-8;
            });
          };
          const bool is_base = (v - base[i][0]).cwiseAbs().maxCoeff() <= 1e-8 ||
                               (v - base[i][1]).cwiseAbs().maxCoeff() <= 1e-8;
          if (!is_base) push_unique(full[i], v);
          if (!in(from_right)) push_unique(reduced_right[i], v);  // toward x_{i+1}
          if (!in(from_left)) push_unique(reduced_left[i], v);    // toward x_{i-1}
        }
    }
    auto as_frame = [](const std::vector<VectorXd>& vs, Index rows) {
      MatrixXd m(rows, static_cast<Index>(vs.size()));
      for (std::size_t c = 0; c < vs.size(); ++c) m.col(static_cast<Index>(c)) = vs[c];
      return m;
    };
    auto compare = [&](OrthogonalityCheck& check, std::size_t i, const std::vector<VectorXd>& a,
                       std::size_t j, const std::vector<VectorXd>& b) {
      const std::vector<VectorXd> path{rep.polygon.vertices[i], rep.polygon.vertices[j]};
      const MatrixXd fa = parallel_transport_normal<double>(slice, as_frame(a, rep.dim()), path);
      const MatrixXd fb = as_frame(b, rep.dim());
      const MatrixXd gram = fa.transpose() * form_matrix<double>(rep.dim()) * fb;
      ++check.pairs;
      const double worst = max_abs(gram);
      if (worst > tol) ++check.failures;
      check.worst_residual = std::max(check.worst_residual, worst);
    };
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 2; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;
        compare(out.links_far, i, full[i], j, full[j]);
      }
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = poly.wrap(static_cast<long long>(i) + 1);
      compare(out.links_adjacent, i, reduced_right[i], j, reduced_left[j]);
    }
  }

  // Faces meeting the base face: g F for g in some vertex group.
  std::vector<MatrixXd> faces{identity(rep.dim())};
  std::vector<NormalForm> keys{NormalForm{}};
  for (std::size_t k = 0; k < n; ++k)
    for (Element a = 1; a < rep.vertex_matrices[k].size(); ++a) {
      const MatrixXd& m = rep.vertex_matrices[k][a];
      if (poly.graph_product) {
        NormalForm key = vertex_element_form(*poly.graph_product, k, a);
        if (std::find(keys.begin(), keys.end(), key) != keys.end()) continue;
        keys.push_back(std::move(key));
      } else if (std::any_of(faces.begin(), faces.end(),
                             [&](const MatrixXd& f) { return max_abs(f - m) <= 1e-8; })) {
        continue;
      }
      faces.push_back(m);
    }
  std::vector<Subspace> spans;
  for (const auto& f : faces) spans.push_back(image_of_slice(f));
  for (std::size_t a = 0; a < spans.size(); ++a)
    for (std::size_t b = a + 1; b < spans.size(); ++b) record(out.faces, spans[a], spans[b], tol);
  return out;
}

// ---------------------------------------------------------------------------

EquivariantImage equivariant_map(const Representation& rep, const ComplexBall& ball, double tol) {
  require(rep.poly.graph_product.has_value(), ErrorKind::invalid_input,
          "equivariant map needs a graph-product representation");
  require(ball.n() == rep.poly.n(), ErrorKind::invalid_input, "ball and representation disagree on n");
  EquivariantImage img;
  const auto& emb = rep.polygon;
  for (const auto& f : ball.faces) {
    img.face_matrices.push_back(rep.evaluate(f));
    img.face_centers.push_back(img.face_matrices.back() * emb.center);
  }
  auto spread = [&](const VectorXd& v, const VectorXd& w) {
    img.well_definedness = std::max(img.well_definedness, (v - w).cwiseAbs().maxCoeff());
  };
  for (std::size_t v = 0; v < ball.vertices.size(); ++v) {
    const auto& cell = ball.vertices[v];
    img.vertices.push_back(rep.evaluate(cell.rep) * emb.vertices[cell.type]);
    for (std::size_t f : ball.vertex_faces[v])
      spread(img.vertices.back(), img.face_matrices[f] * emb.vertices[cell.type]);
  }
  for (std::size_t e = 0; e < ball.edges.size(); ++e) {
    const auto& cell = ball.edges[e];
    img.edge_midpoints.push_back(rep.evaluate(cell.rep) * emb.midpoints[cell.type]);
    for (std::size_t f : ball.edge_faces[e])
      spread(img.edge_midpoints.back(), img.face_matrices[f] * emb.midpoints[cell.type]);
  }
  require(img.well_definedness <= tol, ErrorKind::verification,
          "equivariant map is not well defined on shared cells");
  return img;
}

// ---------------------------------------------------------------------------

std::vector<MatrixXd> regular_orthogonal_representation(const FiniteGroup& g) {
  const auto m = static_cast<Index>(g.order());
  std::vector<MatrixXd> out;
  for (Element x = 0; x < g.order(); ++x) {
    MatrixXd p = MatrixXd::Zero(m, m);
    for (Element y = 0; y < g.order(); ++y) p(g.mul(x, y), y) = 1;
    out.push_back(std::move(p));
  }
  return out;
}

Representation extend_representation(const Representation& rep, const GroupHom& vertex_hom,
                                     const std::vector<MatrixXd>& target_matrices) {
  check_vertex_hom(vertex_hom, rep.poly);
  const FiniteGroup& t = vertex_hom.target;
  require(target_matrices.size() == t.order(), ErrorKind::invalid_input,
          "need one matrix per element of the quotient");
  const Index k = target_matrices.front().rows();
  for (const auto& m : target_matrices) {
    require(m.rows() == k && m.cols() == k, ErrorKind::invalid_input,
            "twist matrices must all be square of the same size");
    require(max_abs(m.transpose() * m - identity(k)) <= kTolOrth, ErrorKind::invalid_input,
            "twist matrix is not orthogonal");
  }
  for (Element x = 0; x < t.order(); ++x)
    for (Element y = 0; y < t.order(); ++y)
      require(max_abs(target_matrices[t.mul(x, y)] - target_matrices[x] * target_matrices[y]) <=
                  kTolOrth,
              ErrorKind::invalid_input, "twist matrices do not represent the quotient");

  Representation out = rep;
  out.mode = RepMode::extended;
  out.p = rep.p + k;
  out.polygon = regular_polygon<double>(rep.polygon.n, out.p);
  auto block = [&](const MatrixXd& a, Element x) {
    MatrixXd m = MatrixXd::Zero(out.dim(), out.dim());
    m.topLeftCorner(rep.dim(), rep.dim()) = a;
    m.bottomRightCorner(k, k) = target_matrices[x];
    return m;
  };
  for (std::size_t v = 0; v < rep.poly.n(); ++v)
    for (Element a = 0; a < rep.vertex_matrices[v].size(); ++a)
      out.vertex_matrices[v][a] = block(rep.vertex_matrices[v][a], vertex_hom.images[v][a]);
  for (std::size_t e = 0; e < rep.poly.n(); ++e)
    for (Element a = 0; a < rep.edge_matrices[e].size(); ++a)
      out.edge_matrices[e][a] =
          block(rep.edge_matrices[e][a], vertex_hom.images[e][rep.poly.edge_to_vertex[e][0][a]]);
  for (auto& f : out.frames) {
    MatrixXd padded = MatrixXd::Zero(out.dim(), f.cols());
    padded.topRows(f.rows()) = f;
    f = padded;
  }
  return out;
}

DisplacementScan min_displacement_scan(const Representation& rep, const ComplexBall& ball) {
  DisplacementScan scan;
  const MatrixXd id = identity(rep.dim());
  const VectorXd& c = rep.polygon.center;
  scan.min_nontrivial = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < ball.faces.size(); ++f) {
    const MatrixXd m = rep.evaluate(ball.faces[f]);
    const double score = std::max(max_abs(m - id), hyperbolic_distance<double>(m * c, c));
    scan.scores.push_back(score);
    if (!ball.faces[f].is_identity() && score < scan.min_nontrivial) {
      scan.min_nontrivial = score;
      scan.argmin = f;
    }
  }
  if (!std::isfinite(scan.min_nontrivial)) scan.min_nontrivial = 0;
  return scan;
}

}  // namespace hypoly
