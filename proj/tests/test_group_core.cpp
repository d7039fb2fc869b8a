#include "doctest.h"

#include <array>
#include <deque>
#include <map>
#include <set>

#include "hypoly/error.hpp"
#include "hypoly/group_core.hpp"

using namespace hypoly;

namespace {

GraphProductSpec z2_product(std::size_t n) {
  std::vector<std::size_t> orders(n, 2);
  return GraphProductSpec::cyclic(orders);
}

Word letters(std::initializer_list<std::size_t> factors) {
  Word w;
  for (std::size_t f : factors) w.push_back({f, 1});
  return w;
}

// Right-angled Coxeter oracle: a word of involutions is trivial iff it can
// be emptied by commuting adjacent letters and deleting equal neighbours
// (Tits). Search over all such moves, no normal forms involved.
bool trivial_by_moves(const std::vector<std::size_t>& word, const GraphProductSpec& spec) {
  std::set<std::vector<std::size_t>> seen{word};
  std::deque<std::vector<std::size_t>> queue{word};
  while (!queue.empty()) {
    auto w = queue.front();
    queue.pop_front();
    if (w.empty()) return true;
    for (std::size_t k = 0; k + 1 < w.size(); ++k) {
      std::vector<std::size_t> v = w;
      if (w[k] == w[k + 1]) {
        v.erase(v.begin() + static_cast<std::ptrdiff_t>(k),
                v.begin() + static_cast<std::ptrdiff_t>(k + 2));
      } else if (spec.adjacent(w[k], w[k + 1])) {
        std::swap(v[k], v[k + 1]);
      } else {
        continue;
      }
      if (seen.insert(v).second) queue.push_back(v);
    }
  }
  return false;
}

}  // namespace

TEST_CASE("cyclic groups") {
  CHECK(make_cyclic_group(1).order() == 1);
  const auto z2 = make_cyclic_group(2);
  CHECK(z2.table() == std::vector<std::vector<Element>>{{0, 1}, {1, 0}});
  CHECK(make_cyclic_group(4).inv(3) == 1);
  CHECK_THROWS_AS(make_cyclic_group(0), Error);
}

TEST_CASE("direct products") {
  const auto klein = direct_product(make_cyclic_group(2), make_cyclic_group(2));
  CHECK(klein.order() == 4);
  for (Element a = 1; a < 4; ++a) CHECK(klein.element_order(a) == 2);

  const auto z6 = direct_product(make_cyclic_group(2), make_cyclic_group(3));
  CHECK(z6.order() == 6);
  CHECK(z6.element_order(1 * 3 + 1) == 6);

  const auto copy = direct_product(FiniteGroup{}, make_cyclic_group(5));
  CHECK(copy == make_cyclic_group(5));

  CHECK_THROWS_AS(direct_product(make_cyclic_group(64), make_cyclic_group(64), 1000), Error);
  try {
    direct_product(make_cyclic_group(64), make_cyclic_group(64), 1000);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::size_limit);
  }
}

TEST_CASE("table validation") {
  CHECK(FiniteGroup::from_table({{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}) == make_cyclic_group(3));
  CHECK_THROWS_AS(FiniteGroup::from_table({{1, 0}, {0, 1}}), Error);  // identity not 0
  CHECK_THROWS_AS(FiniteGroup::from_table({{0, 1}, {1, 1}}), Error);  // not Latin
  CHECK_THROWS_AS(FiniteGroup::from_table({{0, 1}, {1, 2}}), Error);  // out of range
  // Latin square with identity 0 but not associative.
  CHECK_THROWS_AS(FiniteGroup::from_table({{0, 1, 2, 3, 4},
                                           {1, 0, 3, 4, 2},
                                           {2, 4, 0, 1, 3},
                                           {3, 2, 4, 0, 1},
                                           {4, 3, 1, 2, 0}}),
                  Error);
}

TEST_CASE("inverse table is an anti-homomorphism") {
  const auto g = direct_product(make_cyclic_group(3), make_cyclic_group(4));
  for (Element a = 0; a < g.order(); ++a)
    for (Element b = 0; b < g.order(); ++b)
      CHECK(g.inv(g.mul(a, b)) == g.mul(g.inv(b), g.inv(a)));
}

TEST_CASE("subgroup generation") {
  const auto klein = direct_product(make_cyclic_group(2), make_cyclic_group(2));
  CHECK(subgroup_generated({}, klein) == std::vector<Element>{0});
  const std::array<Element, 1> one{2};  // (1,0)
  CHECK(subgroup_generated(one, klein) == std::vector<Element>{0, 2});
  const auto z6 = direct_product(make_cyclic_group(2), make_cyclic_group(3));
  const std::array<Element, 1> gen{4};  // (1,1)
  CHECK(subgroup_generated(gen, z6).size() == 6);
}

TEST_CASE("graph product spec validation") {
  const std::array<std::size_t, 4> four{2, 2, 2, 2};
  CHECK_THROWS_AS(GraphProductSpec::cyclic(four), Error);
  const std::array<std::size_t, 5> trivial{2, 2, 1, 2, 2};
  CHECK_THROWS_AS(GraphProductSpec::cyclic(trivial), Error);
  const auto spec = z2_product(5);
  CHECK(spec.adjacent(0, 4));
  CHECK(spec.adjacent(2, 3));
  CHECK_FALSE(spec.adjacent(1, 3));
  CHECK_FALSE(spec.adjacent(2, 2));
}

TEST_CASE("normal form examples") {
  const auto spec = z2_product(5);
  CHECK(normal_form(Word{}, spec).is_identity());
  CHECK(normal_form(letters({1, 2, 1}), spec).syllables == letters({2}));
  CHECK(normal_form(letters({1, 3}), spec).syllables == letters({1, 3}));
  CHECK(normal_form(letters({3, 1}), spec).syllables == letters({3, 1}));
  CHECK(normal_form(letters({2, 1}), spec).syllables == letters({1, 2}));
  // Adjacent-swap rewriting is not confluent here; the normal form is.
  CHECK(normal_form(letters({2, 1, 0}), spec) == normal_form(letters({1, 2, 0}), spec));
  CHECK(normal_form(letters({2, 1, 0}), spec) == normal_form(letters({2, 0, 1}), spec));
  CHECK_THROWS_AS(normal_form(letters({5}), spec), Error);
  CHECK_THROWS_AS(normal_form(Word{{0, 2}}, spec), Error);
}

TEST_CASE("normal form invariants") {
  const std::array<std::size_t, 5> orders{2, 3, 2, 3, 4};
  const auto spec = GraphProductSpec::cyclic(orders);
  for (const auto& g : enumerate_ball(spec, 3)) {
    CHECK(normal_form(g.syllables, spec) == g);
    for (std::size_t k = 0; k + 1 < g.length(); ++k) {
      CHECK(g.syllables[k].factor != g.syllables[k + 1].factor);
      // Commuting neighbours appear in ascending order.
      if (spec.adjacent(g.syllables[k].factor, g.syllables[k + 1].factor))
        CHECK(g.syllables[k].factor < g.syllables[k + 1].factor);
    }
    CHECK(multiply(g, inverse(g, spec), spec).is_identity());
  }
}

TEST_CASE("normal forms agree with the word-move oracle") {
  const auto spec = z2_product(5);
  std::vector<std::vector<std::size_t>> words{{}};
  for (std::size_t len = 1; len <= 3; ++len) {
    const auto prev = words;
    for (const auto& w : prev) {
      if (w.size() != len - 1) continue;
      for (std::size_t f = 0; f < 5; ++f) {
        auto v = w;
        v.push_back(f);
        words.push_back(v);
      }
    }
  }
  REQUIRE(words.size() == 1 + 5 + 25 + 125);
  auto as_word = [](const std::vector<std::size_t>& w) {
    Word out;
    for (std::size_t f : w) out.push_back({f, 1});
    return out;
  };
  std::size_t equal_pairs = 0;
  for (const auto& u : words) {
    const NormalForm nu = normal_form(as_word(u), spec);
    for (const auto& v : words) {
      std::vector<std::size_t> uv = u;
      uv.insert(uv.end(), v.rbegin(), v.rend());
      const bool same = nu == normal_form(as_word(v), spec);
      CHECK(same == trivial_by_moves(uv, spec));
      equal_pairs += same;
    }
  }
  CHECK(equal_pairs > words.size());
}

TEST_CASE("ball sizes match the Coxeter oracle") {
  // Frozen from the integer Tits representation of the right-angled Coxeter
  // group (independent of normal forms).
  const std::map<std::size_t, std::vector<std::size_t>> expected{
      {5, {1, 6, 21, 61, 166}},
      {6, {1, 7, 31, 121, 457}},
      {7, {1, 8, 43, 211, 1016}},
  };
  for (const auto& [n, counts] : expected) {
    const auto spec = z2_product(n);
    for (std::size_t len = 0; len < counts.size(); ++len)
      CHECK(enumerate_ball(spec, len).size() == counts[len]);
  }
  const auto spec = z2_product(5);
  CHECK(enumerate_ball(spec, 6).size() == 1161);
  CHECK_THROWS_AS(enumerate_ball(spec, 6, 1000), Error);
}

TEST_CASE("ball enumeration is deterministic and duplicate-free") {
  const std::array<std::size_t, 6> orders{2, 3, 2, 2, 3, 2};
  const auto spec = GraphProductSpec::cyclic(orders);
  const auto a = enumerate_ball(spec, 3);
  const auto b = enumerate_ball(spec, 3);
  CHECK(a == b);
  CHECK(std::set<NormalForm>(a.begin(), a.end()).size() == a.size());
  for (std::size_t k = 1; k < a.size(); ++k) CHECK(a[k - 1].length() <= a[k].length());
}

TEST_CASE("coset representatives") {
  const auto spec = z2_product(6);
  const std::array<std::size_t, 2> vertex{0, 1};
  // g = s3 s0 s1: the trailing 0,1 are absorbed by <s0, s1>.
  const auto g = normal_form(letters({3, 0, 1}), spec);
  CHECK(coset_representative(g, vertex, spec).syllables == letters({3}));
  // s0 s3: s0 is not terminal (does not commute with s3).
  const auto h = normal_form(letters({0, 3}), spec);
  CHECK(coset_representative(h, vertex, spec) == h);
  // Same coset iff same representative.
  const auto gx = multiply(g, normal_form(letters({1, 0}), spec), spec);
  CHECK(coset_representative(gx, vertex, spec) == coset_representative(g, vertex, spec));
  const std::array<std::size_t, 1> edge{2};
  const auto k = normal_form(letters({2, 4, 2}), spec);
  CHECK(coset_representative(k, edge, spec).syllables == letters({2, 4}));
  CHECK(lies_in_factors(normal_form(letters({0, 1, 0}), spec), vertex));
  CHECK_FALSE(lies_in_factors(h, vertex));
}

TEST_CASE("tautological quotient") {
  const auto spec = z2_product(5);
  const auto hom = tautological_quotient(spec);
  CHECK(hom.target.order() == 32);
  CHECK_NOTHROW(check_factor_hom(hom, spec));
  // g_1 h_2 (first two factors) -> coordinates (1,1,0,0,0).
  CHECK(apply(hom, normal_form(letters({0, 1}), spec)) == 16 + 8);
  for (std::size_t f = 0; f < 5; ++f) CHECK(apply(hom, NormalForm{{{f, 1}}}) != 0);
  // Defining relations map to the identity.
  for (std::size_t f = 0; f < 5; ++f) {
    const std::size_t g = spec.wrap(static_cast<long long>(f) + 1);
    Word comm{{f, 1}, {g, 1}, {f, 1}, {g, 1}};
    Element acc = 0;
    for (const auto& s : comm) acc = hom.target.mul(acc, hom.images[s.factor][s.element]);
    CHECK(acc == 0);
  }
  const std::vector<std::size_t> big(8, 4);
  CHECK_THROWS_AS(tautological_quotient(GraphProductSpec::cyclic(big)), Error);
}

TEST_CASE("homomorphism checks reject broken images") {
  const auto spec = z2_product(5);
  auto hom = tautological_quotient(spec);
  hom.images[2][1] = 0;
  hom.images[2][0] = 1;  // identity not sent to identity
  CHECK_THROWS_AS(check_factor_hom(hom, spec), Error);

  // Non-commuting images of adjacent factors.
  const auto s3 = FiniteGroup::from_table({{0, 1, 2, 3, 4, 5},
                                           {1, 2, 0, 4, 5, 3},
                                           {2, 0, 1, 5, 3, 4},
                                           {3, 5, 4, 0, 2, 1},
                                           {4, 3, 5, 1, 0, 2},
                                           {5, 4, 3, 2, 1, 0}});
  GroupHom bad{s3, {{0, 3}, {0, 4}, {0, 0}, {0, 0}, {0, 0}}};
  CHECK_THROWS_AS(check_factor_hom(bad, spec), Error);
  GroupHom ok{s3, {{0, 3}, {0, 0}, {0, 4}, {0, 0}, {0, 0}}};
  CHECK_NOTHROW(check_factor_hom(ok, spec));
}
