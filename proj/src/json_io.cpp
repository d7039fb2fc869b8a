#include "hypoly/json_io.hpp"

#include <fstream>
#include <sstream>

#include "hypoly/error.hpp"

namespace hypoly {

namespace {

constexpr double kBasepointTol = 1e-9;

[[noreturn]] void schema(const std::string& path, const std::string& what) {
  fail(ErrorKind::invalid_input, (path.empty() ? std::string("/") : path) + ": " + what);
}

const Json& member(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) schema(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema(path, std::string("missing \"") + key + "\"");
  return *it;
}

std::size_t as_index(const Json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) schema(path, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

double as_number(const Json& j, const std::string& path) {
  if (!j.is_number()) schema(path, "expected a number");
  return j.get<double>();
}

const Json& as_array(const Json& j, const std::string& path, std::size_t size = SIZE_MAX) {
  if (!j.is_array()) schema(path, "expected an array");
  if (size != SIZE_MAX && j.size() != size)
    schema(path, "expected " + std::to_string(size) + " entries, got " + std::to_string(j.size()));
  return j;
}

std::vector<Element> element_list(const Json& j, const std::string& path) {
  std::vector<Element> out;
  as_array(j, path);
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(static_cast<Element>(as_index(j[i], path + "/" + std::to_string(i))));
  return out;
}

std::string type_of(const Json& j, const std::string& path) {
  const Json& t = member(j, "type", path);
  if (!t.is_string()) schema(path + "/type", "expected a string");
  return t.get<std::string>();
}

// Rethrow library errors with the JSON path in front.
template <class F>
auto at_path(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::invalid_input) throw;
    schema(path, e.what());
  }
}

bool is_cyclic(const FiniteGroup& g) { return g == make_cyclic_group(g.order()); }

}  // namespace

FiniteGroup group_from_json(const Json& j, const std::string& path) {
  const std::string type = type_of(j, path);
  if (type == "cyclic") {
    const std::size_t t = as_index(member(j, "order", path), path + "/order");
    return at_path(path, [&] { return make_cyclic_group(t); });
  }
  if (type != "table") schema(path + "/type", "unknown group type '" + type + "'");
  const std::size_t m = as_index(member(j, "order", path), path + "/order");
  if (m == 0 || m > kDefaultOrderCap)
    schema(path + "/order", "group order must be in 1.." + std::to_string(kDefaultOrderCap));
  const Json& rows = as_array(member(j, "mult", path), path + "/mult", m);
  std::vector<std::vector<Element>> mult;
  for (std::size_t r = 0; r < m; ++r) {
    const std::string rp = path + "/mult/" + std::to_string(r);
    as_array(rows[r], rp, m);
    mult.push_back(element_list(rows[r], rp));
  }
  return at_path(path, [&] { return FiniteGroup::from_table(mult); });
}

Json group_to_json(const FiniteGroup& g) {
  if (is_cyclic(g)) return Json{{"type", "cyclic"}, {"order", g.order()}};
  return Json{{"type", "table"}, {"order", g.order()}, {"mult", g.table()}};
}

GraphProductSpec graph_product_from_json(const Json& j, const std::string& path) {
  const std::string type = type_of(j, path);
  if (type == "cyclic-graph-product") {
    const Json& orders = as_array(member(j, "orders", path), path + "/orders");
    std::vector<std::size_t> t;
    for (std::size_t i = 0; i < orders.size(); ++i)
      t.push_back(as_index(orders[i], path + "/orders/" + std::to_string(i)));
    return at_path(path, [&] { return GraphProductSpec::cyclic(t); });
  }
  if (type == "graph-product") {
    const Json& factors = as_array(member(j, "factors", path), path + "/factors");
    std::vector<FiniteGroup> gs;
    for (std::size_t i = 0; i < factors.size(); ++i)
      gs.push_back(group_from_json(factors[i], path + "/factors/" + std::to_string(i)));
    return at_path(path, [&] { return GraphProductSpec(std::move(gs)); });
  }
  schema(path + "/type", "not a graph product: '" + type + "'");
}

PolygonOfGroups polygon_from_json(const Json& j, const std::string& path) {
  if (j.is_object() && j.contains("type"))
    return PolygonOfGroups::from_graph_product(graph_product_from_json(j, path));

  const std::size_t n = as_index(member(j, "n", path), path + "/n");
  if (n < 3) schema(path + "/n", "a polygon needs at least 3 sides");
  PolygonOfGroups poly;
  const Json& vg = as_array(member(j, "vertexGroups", path), path + "/vertexGroups", n);
  const Json& eg = as_array(member(j, "edgeGroups", path), path + "/edgeGroups", n);
  for (std::size_t k = 0; k < n; ++k) {
    poly.vertex_groups.push_back(group_from_json(vg[k], path + "/vertexGroups/" + std::to_string(k)));
    poly.edge_groups.push_back(group_from_json(eg[k], path + "/edgeGroups/" + std::to_string(k)));
  }
  poly.face_group = group_from_json(member(j, "faceGroup", path), path + "/faceGroup");
  const std::string mp = path + "/maps";
  const Json& maps = member(j, "maps", path);
  const Json& e2v = as_array(member(maps, "edgeToVertex", mp), mp + "/edgeToVertex", n);
  const Json& f2e = as_array(member(maps, "faceToEdge", mp), mp + "/faceToEdge", n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::string ep = mp + "/edgeToVertex/" + std::to_string(k);
    as_array(e2v[k], ep, 2);
    poly.edge_to_vertex.push_back({element_list(e2v[k][0], ep + "/0"), element_list(e2v[k][1], ep + "/1")});
    poly.face_to_edge.push_back(element_list(f2e[k], mp + "/faceToEdge/" + std::to_string(k)));
  }
  at_path(path, [&] {
    poly.validate();
    return 0;
  });
  return poly;
}

Json polygon_to_json(const PolygonOfGroups& poly) {
  if (poly.graph_product) {
    const auto& factors = poly.graph_product->factors();
    if (std::all_of(factors.begin(), factors.end(), is_cyclic)) {
      Json orders = Json::array();
      for (const auto& f : factors) orders.push_back(f.order());
      return Json{{"type", "cyclic-graph-product"}, {"orders", orders}};
    }
    Json fs = Json::array();
    for (const auto& f : factors) fs.push_back(group_to_json(f));
    return Json{{"type", "graph-product"}, {"factors", fs}};
  }
  Json j;
  j["n"] = poly.n();
  j["vertexGroups"] = Json::array();
  j["edgeGroups"] = Json::array();
  for (std::size_t k = 0; k < poly.n(); ++k) {
    j["vertexGroups"].push_back(group_to_json(poly.vertex_groups[k]));
    j["edgeGroups"].push_back(group_to_json(poly.edge_groups[k]));
  }
  j["faceGroup"] = group_to_json(poly.face_group);
  Json e2v = Json::array(), f2e = Json::array();
  for (std::size_t k = 0; k < poly.n(); ++k) {
    e2v.push_back(Json::array({poly.edge_to_vertex[k][0], poly.edge_to_vertex[k][1]}));
    f2e.push_back(poly.face_to_edge[k]);
  }
  j["maps"] = Json{{"edgeToVertex", e2v}, {"faceToEdge", f2e}};
  return j;
}

GroupHom quotient_from_json(const Json& j, const PolygonOfGroups& poly, const std::string& path) {
  GroupHom hom;
  hom.target = group_from_json(member(j, "target", path), path + "/target");
  const bool by_factor = j.contains("factorImages");
  const char* key = by_factor ? "factorImages" : "vertexImages";
  const Json& images = as_array(member(j, key, path), path + "/" + key, poly.n());
  for (std::size_t k = 0; k < poly.n(); ++k)
    hom.images.push_back(element_list(images[k], path + "/" + key + "/" + std::to_string(k)));
  return at_path(path, [&] {
    if (!by_factor) {
      check_vertex_hom(hom, poly);
      return hom;
    }
    require(poly.graph_product.has_value(), ErrorKind::invalid_input,
            "factorImages needs a graph-product polygon");
    check_factor_hom(hom, *poly.graph_product);
    return vertex_hom_from_factor_hom(hom, *poly.graph_product);
  });
}

Json quotient_to_json(const GroupHom& vertex_hom) {
  return Json{{"target", group_to_json(vertex_hom.target)}, {"vertexImages", vertex_hom.images}};
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j, Index rows, Index cols, const std::string& path) {
  as_array(j, path, static_cast<std::size_t>(rows));
  Eigen::MatrixXd m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const std::string rp = path + "/" + std::to_string(r);
    as_array(j[r], rp, static_cast<std::size_t>(cols));
    for (Index c = 0; c < cols; ++c) m(r, c) = as_number(j[r][c], rp + "/" + std::to_string(c));
  }
  return m;
}

Json vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json representation_to_json(const Representation& rep, const Json& extra) {
  Json j;
  j["mode"] = rep_mode_name(rep.mode);
  j["baseMode"] = rep_mode_name(rep.base_mode);
  j["p"] = rep.p;
  j["form"] = "diag(-1,1,...,1)";
  j["polygon"] = Json{{"n", rep.poly.n()}, {"groups", polygon_to_json(rep.poly)}};
  j["seed"] = rep.seed;
  Json gens = Json::array();
  for (std::size_t k = 0; k < rep.edge_matrices.size(); ++k)
    for (std::size_t a = 1; a < rep.edge_matrices[k].size(); ++a)
      gens.push_back(Json{{"edge", k}, {"element", a}, {"matrix", matrix_to_json(rep.edge_matrices[k][a])}});
  j["generators"] = std::move(gens);
  Json vgens = Json::array();
  for (std::size_t k = 0; k < rep.vertex_matrices.size(); ++k)
    for (std::size_t a = 1; a < rep.vertex_matrices[k].size(); ++a)
      vgens.push_back(Json{{"vertex", k}, {"element", a}, {"matrix", matrix_to_json(rep.vertex_matrices[k][a])}});
  j["vertexGenerators"] = std::move(vgens);
  Json frames = Json::array();
  for (const auto& f : rep.frames) frames.push_back(matrix_to_json(f));
  j["frames"] = std::move(frames);
  Json verts = Json::array(), mids = Json::array();
  for (const auto& v : rep.polygon.vertices) verts.push_back(vector_to_json(v));
  for (const auto& v : rep.polygon.midpoints) mids.push_back(vector_to_json(v));
  j["basepoints"] = Json{{"vertices", verts}, {"midpoints", mids}, {"center", vector_to_json(rep.polygon.center)}};
  for (const auto& [k, v] : extra.items()) j[k] = v;
  return j;
}

Representation representation_from_json(const Json& j) {
  Representation rep;
  const auto mode_of = [&](const char* key) {
    const Json& m = member(j, key, "");
    if (!m.is_string()) schema(std::string("/") + key, "expected a string");
    return at_path(std::string("/") + key, [&] { return parse_rep_mode(m.get<std::string>()); });
  };
  rep.mode = mode_of("mode");
  rep.base_mode = j.contains("baseMode") ? mode_of("baseMode") : rep.mode;
  const std::size_t p = as_index(member(j, "p", ""), "/p");
  if (p < 2) schema("/p", "dimension must be at least 2");
  rep.p = static_cast<Index>(p);
  const Json& form = member(j, "form", "");
  if (form != "diag(-1,1,...,1)") schema("/form", "unsupported quadratic form");
  const Json& polygon = member(j, "polygon", "");
  rep.poly = polygon_from_json(member(polygon, "groups", "/polygon"), "/polygon/groups");
  const std::size_t n = as_index(member(polygon, "n", "/polygon"), "/polygon/n");
  if (n != rep.poly.n()) schema("/polygon/n", "disagrees with the polygon groups");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) schema("/seed", "expected an integer");
    rep.seed = j["seed"].get<std::uint64_t>();
  }
  rep.polygon = regular_polygon<double>(static_cast<int>(n), rep.p);
  const Index d = rep.dim();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);

  rep.edge_matrices.resize(n);
  for (std::size_t k = 0; k < n; ++k) rep.edge_matrices[k].assign(rep.poly.edge_groups[k].order(), id);
  std::vector<std::vector<char>> seen(n);
  for (std::size_t k = 0; k < n; ++k) seen[k].assign(rep.poly.edge_groups[k].order(), 0);
  const Json& gens = as_array(member(j, "generators", ""), "/generators");
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const std::string gp = "/generators/" + std::to_string(i);
    const std::size_t k = as_index(member(gens[i], "edge", gp), gp + "/edge");
    if (k >= n) schema(gp + "/edge", "edge index out of range");
    const std::size_t a = as_index(member(gens[i], "element", gp), gp + "/element");
    if (a == 0 || a >= rep.edge_matrices[k].size()) schema(gp + "/element", "element index out of range");
    rep.edge_matrices[k][a] = matrix_from_json(member(gens[i], "matrix", gp), d, d, gp + "/matrix");
    seen[k][a] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t a = 1; a < seen[k].size(); ++a)
      if (!seen[k][a])
        schema("/generators", "missing edge " + std::to_string(k) + " element " + std::to_string(a));

  rep.vertex_matrices.resize(n);
  for (std::size_t k = 0; k < n; ++k) rep.vertex_matrices[k].assign(rep.poly.vertex_groups[k].order(), id);
  if (j.contains("vertexGenerators")) {
    const Json& vg = as_array(j["vertexGenerators"], "/vertexGenerators");
    for (std::size_t i = 0; i < vg.size(); ++i) {
      const std::string gp = "/vertexGenerators/" + std::to_string(i);
      const std::size_t k = as_index(member(vg[i], "vertex", gp), gp + "/vertex");
      if (k >= n) schema(gp + "/vertex", "vertex index out of range");
      const std::size_t a = as_index(member(vg[i], "element", gp), gp + "/element");
      if (a == 0 || a >= rep.vertex_matrices[k].size()) schema(gp + "/element", "element index out of range");
      rep.vertex_matrices[k][a] = matrix_from_json(member(vg[i], "matrix", gp), d, d, gp + "/matrix");
    }
  } else {
    require(rep.poly.graph_product.has_value(), ErrorKind::invalid_input,
            "/: vertexGenerators required for a general polygon");
    // x_k carries G_{e_{k-1}} x G_{e_k}.
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t left = rep.poly.wrap(static_cast<long long>(k) - 1);
      const std::size_t t = rep.edge_matrices[k].size();
      for (std::size_t a = 0; a < rep.edge_matrices[left].size(); ++a)
        for (std::size_t b = 0; b < t; ++b)
          rep.vertex_matrices[k][a * t + b] = rep.edge_matrices[left][a] * rep.edge_matrices[k][b];
    }
  }

  if (j.contains("frames")) {
    const Json& fr = as_array(j["frames"], "/frames");
    for (std::size_t i = 0; i < fr.size(); ++i) {
      const std::string fp = "/frames/" + std::to_string(i);
      as_array(fr[i], fp, static_cast<std::size_t>(d));
      const Index cols = fr[i].empty() || !fr[i][0].is_array() ? 0 : static_cast<Index>(fr[i][0].size());
      rep.frames.push_back(matrix_from_json(fr[i], d, cols, fp));
    }
  }

  if (j.contains("basepoints")) {
    const Json& bp = j["basepoints"];
    auto check = [&](const Json& v, const Eigen::VectorXd& want, const std::string& path) {
      as_array(v, path, static_cast<std::size_t>(d));
      for (Index i = 0; i < d; ++i)
        if (std::abs(as_number(v[i], path + "/" + std::to_string(i)) - want(i)) > kBasepointTol)
          schema(path, "basepoint disagrees with the regular polygon embedding");
    };
    if (bp.contains("vertices")) {
      as_array(bp["vertices"], "/basepoints/vertices", n);
      for (std::size_t k = 0; k < n; ++k)
        check(bp["vertices"][k], rep.polygon.vertices[k], "/basepoints/vertices/" + std::to_string(k));
    }
    if (bp.contains("center")) check(bp["center"], rep.polygon.center, "/basepoints/center");
  }
  return rep;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::invalid_input, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::invalid_input, path + ": " + e.what());
  }
}

}  // namespace hypoly
