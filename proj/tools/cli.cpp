#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <vector>

#include "hypoly/distortion.hpp"
#include "hypoly/error.hpp"
#include "hypoly/hyperbolic.hpp"
#include "hypoly/json_io.hpp"
#include "hypoly/polygon_complex.hpp"
#include "hypoly/representation.hpp"

namespace hypoly {

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

constexpr double kTolDisplacement = 1e-6;

struct Options {
  std::string command;
  std::string input;
  std::string mode;
  std::string quotient = "tautological";
  std::string twist = "regular";
  std::string out;
  std::string format = "text";
  std::size_t radius = 3;
  std::size_t sample = 0;
  std::uint64_t seed = 0;
  int from = 5, to = 12;
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string short_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::string hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::invalid_input, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  require(static_cast<bool>(f), ErrorKind::invalid_input, "cannot write '" + path + "'");
  f << text;
}

// Hash of everything that determines the output: options and input bytes.
std::string config_hash(const Options& o) {
  std::ostringstream s;
  s << o.command << '\n' << o.mode << '\n' << o.twist << '\n' << o.radius << '\n'
    << o.sample << '\n' << o.seed << '\n' << o.from << '\n' << o.to << '\n';
  std::uint64_t h = fnv1a(s.str());
  if (!o.input.empty()) h = fnv1a(slurp(o.input), h);
  if (!o.quotient.empty() && o.quotient != "tautological") {
    h = fnv1a(o.quotient, h);
    if (o.command == "build" || o.command == "extend") h = fnv1a(slurp(o.quotient), h);
  } else {
    h = fnv1a(o.quotient, h);
  }
  return hex(h);
}

Json provenance(const Options& o) {
  return Json{{"configHash", config_hash(o)},
              {"seed", o.seed},
              {"tolerances", Json{{"orth", kTolOrth}, {"classify", kTolClassify},
                                  {"displacement", kTolDisplacement}}}};
}

void stamp(Json& j, const Options& o) {
  const Json prov = provenance(o);
  for (const auto& [k, v] : prov.items()) j[k] = v;
}

std::string text_header(const Options& o) {
  return "# " + o.command + " config=" + config_hash(o) + " seed=" + std::to_string(o.seed) +
         " tol_orth=" + short_num(kTolOrth) + " tol_classify=" + short_num(kTolClassify) + "\n";
}

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

int report(const Options& o, const std::vector<Check>& checks, Json body, std::ostream& out) {
  bool all = true;
  for (const auto& c : checks) all = all && c.pass;
  if (o.format == "json") {
    Json j{{"command", o.command}};
    stamp(j, o);
    Json cs = Json::array();
    for (const auto& c : checks) cs.push_back(Json{{"name", c.name}, {"status", c.pass ? "PASS" : "FAIL"}, {"detail", c.detail}});
    j["checks"] = cs;
    for (const auto& [k, v] : body.items()) j[k] = v;
    j["status"] = all ? "PASS" : "FAIL";
    out << j.dump(2) << "\n";
  } else {
    out << text_header(o);
    char line[256];
    for (const auto& c : checks) {
      std::snprintf(line, sizeof line, "%-24s %s  %s\n", c.name.c_str(), c.pass ? "PASS" : "FAIL",
                    c.detail.c_str());
      out << line;
    }
    out << "overall                  " << (all ? "PASS" : "FAIL") << "\n";
  }
  return all ? kExitPass : kExitVerification;
}

void check_radius(std::size_t r) {
  require(r <= kRadiusCap, ErrorKind::size_limit,
          "radius " + std::to_string(r) + " exceeds the cap of " + std::to_string(kRadiusCap));
}

// --------------------------------------------------------------------------

int cmd_trig(const Options& o, std::ostream& out) {
  require(o.from >= 5 && o.to <= 64 && o.from <= o.to, ErrorKind::invalid_input,
          "trig range must satisfy 5 <= from <= to <= 64");
  auto status = [](double m) { return std::abs(m) <= 1e-12 ? "TANGENT" : m > 0 ? "PASS" : "FAIL"; };
  Json rows = Json::array();
  std::ostringstream text;
  text << text_header(o);
  text << "n,a_n,b_n,r_n,rho_n,L1,L1_margin,L2,L2_margin,C1,C1_margin\n";
  for (int n = o.from; n <= o.to; ++n) {
    const auto t = trig_table<double>(n);
    const double l1 = disjoint_bisectors_test(2 * t.circumradius, t.side);
    const double l2 = disjoint_bisectors_test(t.short_diag, t.side);
    const double c1 = three_orthogonal_margin(t.short_diag, t.side);
    const std::string l2s = n >= 7 ? status(l2) : "N/A";
    text << n << ',' << num(t.side) << ',' << num(t.short_diag) << ',' << num(t.inradius) << ','
         << num(t.circumradius) << ',' << status(l1) << ',' << num(l1) << ',' << l2s << ','
         << num(l2) << ',' << status(c1) << ',' << num(c1) << '\n';
    rows.push_back(Json{{"n", n}, {"a", t.side}, {"b", t.short_diag}, {"r", t.inradius},
                        {"rho", t.circumradius}, {"L1", status(l1)}, {"L1Margin", l1},
                        {"L2", l2s}, {"L2Margin", l2}, {"C1", status(c1)}, {"C1Margin", c1}});
  }
  if (o.format == "json") {
    Json j{{"command", "trig"}};
    stamp(j, o);
    j["rows"] = rows;
    out << j.dump(2) << "\n";
  } else {
    out << text.str();
  }
  return kExitPass;
}

PolygonOfGroups load_polygon(const Options& o) {
  require(!o.input.empty(), ErrorKind::invalid_input, "--input is required");
  return polygon_from_json(read_json_file(o.input));
}

GroupHom load_quotient(const Options& o, const PolygonOfGroups& poly) {
  if (o.quotient == "tautological") {
    require(poly.graph_product.has_value(), ErrorKind::invalid_input,
            "the tautological quotient needs a graph-product polygon");
    return vertex_hom_from_factor_hom(tautological_quotient(*poly.graph_product), *poly.graph_product);
  }
  return quotient_from_json(read_json_file(o.quotient), poly);
}

Json violation_json(const PolygonOfGroups& poly, const GroupHom& hom, const SeparationViolation& v) {
  return Json{{"parity", v.parity == Parity::even ? "even" : "odd"},
              {"h", Json{{"vertex", v.witness.j}, {"element", v.witness.h}}},
              {"g", Json{{"vertex", v.witness.i}, {"element", v.witness.g}}},
              {"image", v.image},
              {"certificateValid", certificate_valid(poly, hom, v)}};
}

void emit_artifact(const Options& o, const Json& doc, std::ostream& out) {
  if (o.out.empty()) {
    out << doc.dump(2) << "\n";
  } else {
    write_file(o.out, doc.dump(2) + "\n");
  }
}

int cmd_build(const Options& o, std::ostream& out, std::ostream& err) {
  const PolygonOfGroups poly = load_polygon(o);
  const std::string mode = o.mode.empty() ? (poly.n() % 2 ? "odd" : "even") : o.mode;
  Representation rep;
  if (mode == "odd") {
    require(poly.graph_product.has_value(), ErrorKind::invalid_input,
            "odd mode needs a graph-product polygon");
    rep = build_odd(*poly.graph_product, o.seed);
  } else if (mode == "even") {
    const GroupHom hom = load_quotient(o, poly);
    const SeparationResult sep = verify_separation(poly, hom);
    if (!sep.passed) {
      Json cert{{"command", "build"}, {"status", "FAIL"}, {"reason", "quotient does not separate the tree stabilizers"},
                {"productsChecked", sep.products_checked}, {"violationCount", sep.violations.size()}};
      Json vs = Json::array();
      for (std::size_t i = 0; i < sep.violations.size() && i < 16; ++i)
        vs.push_back(violation_json(poly, hom, sep.violations[i]));
      cert["violations"] = vs;
      stamp(cert, o);
      out << cert.dump(2) << "\n";
      err << "separation failed: " << sep.violations.size() << " violating products\n";
      return kExitVerification;
    }
    rep = build_even(poly, hom, o.seed);
  } else {
    fail(ErrorKind::invalid_input, "--mode must be odd or even");
  }
  const RelationReport rel = verify_relations(rep);
  require(rel.passed(kTolOrth), ErrorKind::verification,
          "construction residual " + num(rel.max_residual()) + " at " + rel.worst);
  emit_artifact(o, representation_to_json(rep, provenance(o)), out);
  return kExitPass;
}

Representation load_rep(const Options& o) {
  require(!o.input.empty(), ErrorKind::invalid_input, "--input is required");
  return representation_from_json(read_json_file(o.input));
}

int cmd_verify(const Options& o, std::ostream& out) {
  check_radius(o.radius);
  const Representation rep = load_rep(o);
  std::vector<Check> checks;
  Json body;
  const RelationReport rel = verify_relations(rep);
  checks.push_back({"relations", rel.passed(kTolOrth), "max_residual=" + num(rel.max_residual()) +
                                                       (rel.worst.empty() ? "" : " at " + rel.worst)});
  body["relations"] = Json{{"lorentz", rel.lorentz}, {"vertexTables", rel.vertex_tables},
                           {"edgeAgreement", rel.edge_agreement}, {"commutators", rel.commutators},
                           {"elementOrders", rel.element_orders}, {"minProperPower", rel.min_proper_power}};
  const RepOrthogonality orth = verify_orthogonality(rep, kTolOrth);
  auto orth_check = [&](const char* name, const OrthogonalityCheck& c) {
    if (!c.pairs) return;
    checks.push_back({name, c.passed(), std::to_string(c.pairs) + " pairs, worst=" + num(c.worst_residual)});
    body["orthogonality"][name] = Json{{"pairs", c.pairs}, {"failures", c.failures}, {"worst", c.worst_residual}};
  };
  orth_check("planes_nonadjacent", orth.planes_nonadjacent);
  orth_check("planes_adjacent", orth.planes_adjacent);
  orth_check("links_far", orth.links_far);
  orth_check("links_adjacent", orth.links_adjacent);
  orth_check("faces", orth.faces);
  if (rep.poly.graph_product) {
    const ComplexBall ball = build_ball(*rep.poly.graph_product, o.radius);
    const DisplacementScan scan = min_displacement_scan(rep, ball);
    checks.push_back({"displacement", scan.min_nontrivial > kTolDisplacement,
                      "radius " + std::to_string(o.radius) + ", min=" + num(scan.min_nontrivial)});
    body["displacement"] = Json{{"radius", o.radius}, {"faces", ball.faces.size()}, {"min", scan.min_nontrivial}};
    double spread = 0;
    bool ok = true;
    try {
      spread = equivariant_map(rep, ball).well_definedness;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::verification) throw;
      ok = false;
    }
    checks.push_back({"equivariant_map", ok, "spread=" + num(spread)});
  }
  return report(o, checks, body, out);
}

int cmd_distort(const Options& o, std::ostream& out) {
  check_radius(o.radius + 2);
  const Representation rep = load_rep(o);
  DistortionOptions opt;
  opt.radius = o.radius;
  opt.sample = o.sample;
  opt.seed = o.seed;
  const DistortionReport r = distortion_report(rep, opt);
  const auto& st = r.separation;
  if (!o.out.empty()) write_file(o.out, r.csv());
  auto nullable = [](double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); };
  Json body{{"slope", nullable(r.slope)},
            {"offset", nullable(r.offset)},
            {"delta_min", nullable(st.delta_min)},
            {"asymptotic_pairs", st.consecutive_asymptotic},
            {"pairs", r.pairs},
            {"lowConfidence", r.low_confidence},
            {"edgeLength", r.edge_length},
            {"maxGap", r.max_gap},
            {"unstablePairs", r.unstable_pairs},
            {"requiredPairs", st.required_pairs},
            {"requiredFailures", st.required_failures},
            {"consecutivePairs", st.consecutive_pairs},
            {"consecutiveDisjoint", st.consecutive_disjoint},
            {"consecutiveIntersecting", st.consecutive_intersecting},
            {"crossings", st.crossings},
            {"crossingFailures", st.crossing_failures},
            {"c1Triples", st.c1_triples},
            {"c1Failures", st.c1_failures}};
  Json m = Json::array();
  for (const auto& b : r.buckets)
    if (b.count) m.push_back(Json{{"k", b.k}, {"count", b.count}, {"min", b.min}, {"median", b.median}, {"max", b.max}});
  body["m"] = m;
  std::vector<Check> checks{
      {"m1_equals_side", r.buckets.size() > 1 && std::abs(r.buckets[1].min - r.edge_length) <= 1e-9,
       r.buckets.size() > 1 ? "m(1)=" + num(r.buckets[1].min) : "no pairs"},
      {"lipschitz", r.lipschitz_violations == 0, std::to_string(r.lipschitz_violations) + " violations"},
      {"envelope_monotone", r.envelope_monotone, "k <= " + std::to_string(2 * o.radius)},
      {"slope_positive", std::isfinite(r.slope) && r.slope > 0, "slope=" + num(r.slope)},
      {"required_disjoint", st.required_failures == 0 && (st.required_pairs == 0 || st.delta_min > 1e-3),
       std::to_string(st.required_failures) + "/" + std::to_string(st.required_pairs) + " fail, delta_min=" + num(st.delta_min)},
      {"geodesics_stable", r.unstable_pairs == 0, std::to_string(r.unstable_pairs) + " unstable pairs"},
  };
  if (o.format == "text" && o.out.empty()) {
    const int code = report(o, checks, body, out);
    out << r.csv();
    return code;
  }
  return report(o, checks, body, out);
}

int cmd_extend(const Options& o, std::ostream& out) {
  const Representation rep = load_rep(o);
  const GroupHom hom = load_quotient(o, rep.poly);
  std::vector<Eigen::MatrixXd> target;
  if (o.twist == "regular") {
    target = regular_orthogonal_representation(hom.target);
  } else if (o.twist == "trivial") {
    target.assign(hom.target.order(), Eigen::MatrixXd::Identity(1, 1));
  } else {
    fail(ErrorKind::invalid_input, "--twist must be regular or trivial");
  }
  const Representation ext = extend_representation(rep, hom, target);
  emit_artifact(o, representation_to_json(ext, provenance(o)), out);
  return kExitPass;
}

Json syllables_json(const NormalForm& g) {
  Json s = Json::array();
  for (const auto& y : g.syllables) s.push_back(Json::array({y.factor, y.element}));
  return s;
}

int cmd_ball(const Options& o, std::ostream& out) {
  check_radius(o.radius);
  const PolygonOfGroups poly = load_polygon(o);
  require(poly.graph_product.has_value(), ErrorKind::invalid_input, "balls need a graph-product polygon");
  const ComplexBall ball = build_ball(*poly.graph_product, o.radius);
  std::vector<std::size_t> counts(o.radius + 1, 0);
  for (const auto& f : ball.faces) ++counts[f.length()];
  std::vector<std::size_t> cumulative(counts.size());
  std::partial_sum(counts.begin(), counts.end(), cumulative.begin());
  Json doc{{"radius", o.radius}, {"counts", counts}, {"ballSizes", cumulative}};
  Json faces = Json::array(), vertices = Json::array(), edges = Json::array();
  for (std::size_t f = 0; f < ball.faces.size(); ++f)
    faces.push_back(Json{{"element", syllables_json(ball.faces[f])}, {"vertices", ball.face_vertices[f]},
                         {"edges", ball.face_edges[f]}});
  for (const auto& v : ball.vertices) vertices.push_back(Json{{"type", v.type}, {"rep", syllables_json(v.rep)}});
  for (std::size_t e = 0; e < ball.edges.size(); ++e)
    edges.push_back(Json{{"type", ball.edges[e].type}, {"rep", syllables_json(ball.edges[e].rep)},
                         {"ends", ball.edge_ends[e]}, {"faces", ball.edge_faces[e]}});
  doc["faces"] = faces;
  doc["vertices"] = vertices;
  doc["edges"] = edges;
  if (!o.out.empty()) write_file(o.out, doc.dump(2) + "\n");
  Json summary{{"command", "ball"}};
  stamp(summary, o);
  summary["radius"] = o.radius;
  summary["counts"] = counts;
  summary["ballSizes"] = cumulative;
  summary["faces"] = ball.faces.size();
  summary["vertices"] = ball.vertices.size();
  summary["edges"] = ball.edges.size();
  if (o.format == "json") {
    out << (o.out.empty() ? doc : summary).dump(2) << "\n";
  } else {
    out << text_header(o);
    std::size_t total = 0;
    for (std::size_t l = 0; l < counts.size(); ++l) {
      total += counts[l];
      out << "length " << l << ": " << counts[l] << " (ball " << total << ")\n";
    }
    out << "faces " << ball.faces.size() << ", vertices " << ball.vertices.size() << ", edges "
        << ball.edges.size() << "\n";
  }
  return kExitPass;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hyperbolic actions of right-angled polygons of finite groups"};
  app.require_subcommand(1);
  Options o;
  auto add_format = [&](CLI::App* c) {
    c->add_option("--format", o.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  };
  auto* trig = app.add_subcommand("trig", "Trigonometry of regular right-angled polygons");
  trig->add_option("--from", o.from, "smallest n");
  trig->add_option("--to", o.to, "largest n");
  add_format(trig);

  auto* build = app.add_subcommand("build", "Build a representation from a polygon of groups");
  build->add_option("--input", o.input, "polygon JSON")->required();
  build->add_option("--mode", o.mode, "odd or even (default by parity of n)");
  build->add_option("--quotient", o.quotient, "quotient JSON or 'tautological'");
  build->add_option("--seed", o.seed, "frame seed");
  build->add_option("--out", o.out, "output path");
  add_format(build);

  auto* verify = app.add_subcommand("verify", "Verify a representation file");
  verify->add_option("--input", o.input, "representation JSON")->required();
  verify->add_option("--radius", o.radius, "ball radius for the displacement scan");
  add_format(verify);

  auto* distort = app.add_subcommand("distort", "Distortion of the equivariant map");
  distort->add_option("--input", o.input, "representation JSON")->required();
  distort->add_option("--radius", o.radius, "endpoint ball radius");
  distort->add_option("--sample", o.sample, "random pairs (0: all pairs)");
  distort->add_option("--seed", o.seed, "sampling seed");
  distort->add_option("--out", o.out, "CSV output path");
  add_format(distort);

  auto* extend = app.add_subcommand("extend", "Extend by a finite orthogonal twist");
  extend->add_option("--input", o.input, "representation JSON")->required();
  extend->add_option("--quotient", o.quotient, "quotient JSON or 'tautological'");
  extend->add_option("--twist", o.twist, "regular or trivial")->check(CLI::IsMember({"regular", "trivial"}));
  extend->add_option("--out", o.out, "output path");
  add_format(extend);

  auto* ball = app.add_subcommand("ball", "Enumerate a ball of the universal cover");
  ball->add_option("--input", o.input, "polygon JSON")->required();
  ball->add_option("--radius", o.radius, "face radius");
  ball->add_option("--out", o.out, "ball JSON output path");
  add_format(ball);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitInvalid;
  }

  try {
    o.command = app.get_subcommands().front()->get_name();
    if (o.command == "trig") return cmd_trig(o, out);
    if (o.command == "build") return cmd_build(o, out, err);
    if (o.command == "verify") return cmd_verify(o, out);
    if (o.command == "distort") return cmd_distort(o, out);
    if (o.command == "extend") return cmd_extend(o, out);
    if (o.command == "ball") return cmd_ball(o, out);
    fail(ErrorKind::invalid_input, "unknown command");
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::invalid_input: return kExitInvalid;
      case ErrorKind::size_limit: return kExitCap;
      case ErrorKind::verification:
      case ErrorKind::inconclusive: return kExitVerification;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace hypoly
