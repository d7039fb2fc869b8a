#include "hypoly/group_core.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "hypoly/error.hpp"

namespace hypoly {

namespace {

std::vector<Element> inverse_table(std::size_t order,
                                   const std::vector<Element>& mult) {
  std::vector<Element> inv(order, 0);
  for (Element a = 0; a < order; ++a) {
    for (Element b = 0; b < order; ++b) {
      if (mult[a * order + b] == FiniteGroup::identity) {
        inv[a] = b;
        break;
      }
    }
  }
  return inv;
}

}  // namespace

FiniteGroup::FiniteGroup() : order_(1), mult_{0}, inv_{0} {}

FiniteGroup::FiniteGroup(std::size_t order, std::vector<Element> flat)
    : order_(order), mult_(std::move(flat)) {
  inv_ = inverse_table(order_, mult_);
}

FiniteGroup FiniteGroup::from_table(
    const std::vector<std::vector<Element>>& mult) {
  const std::size_t m = mult.size();
  require(m >= 1, ErrorKind::invalid_input, "group table is empty");
  require(m <= kDefaultOrderCap, ErrorKind::size_limit,
          "group order " + std::to_string(m) + " exceeds cap");
  std::vector<Element> flat;
  flat.reserve(m * m);
  for (std::size_t a = 0; a < m; ++a) {
    require(mult[a].size() == m, ErrorKind::invalid_input,
            "group table row " + std::to_string(a) + " has wrong length");
    std::vector<bool> seen(m, false);
    for (std::size_t b = 0; b < m; ++b) {
      const Element c = mult[a][b];
      require(c < m, ErrorKind::invalid_input, "group table entry out of range");
      require(!seen[c], ErrorKind::invalid_input,
              "group table row " + std::to_string(a) + " is not a permutation");
      seen[c] = true;
      flat.push_back(c);
    }
  }
  for (std::size_t a = 0; a < m; ++a) {
    require(flat[a] == a && flat[a * m] == a, ErrorKind::invalid_input,
            "identity must be element 0");
  }
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      for (std::size_t c = 0; c < m; ++c)
        require(flat[flat[a * m + b] * m + c] == flat[a * m + flat[b * m + c]],
                ErrorKind::invalid_input, "group table is not associative");
  return FiniteGroup(m, std::move(flat));
}

std::size_t FiniteGroup::element_order(Element a) const {
  std::size_t k = 1;
  for (Element x = a; x != identity; x = mul(x, a)) ++k;
  return k;
}

std::vector<std::vector<Element>> FiniteGroup::table() const {
  std::vector<std::vector<Element>> out(order_);
  for (std::size_t a = 0; a < order_; ++a)
    out[a].assign(mult_.begin() + a * order_, mult_.begin() + (a + 1) * order_);
  return out;
}

FiniteGroup make_cyclic_group(std::size_t t) {
  require(t >= 1, ErrorKind::invalid_input, "cyclic group order must be >= 1");
  require(t <= kDefaultOrderCap, ErrorKind::size_limit,
          "cyclic group order exceeds cap");
  std::vector<Element> flat(t * t);
  for (std::size_t a = 0; a < t; ++a)
    for (std::size_t b = 0; b < t; ++b)
      flat[a * t + b] = static_cast<Element>((a + b) % t);
  return FiniteGroup(t, std::move(flat));
}

FiniteGroup direct_product(const FiniteGroup& a, const FiniteGroup& b,
                           std::size_t cap) {
  const std::size_t na = a.order(), nb = b.order();
  require(na * nb <= cap, ErrorKind::size_limit,
          "direct product order " + std::to_string(na * nb) + " exceeds cap " +
              std::to_string(cap));
  const std::size_t m = na * nb;
  std::vector<Element> flat(m * m);
  for (std::size_t x = 0; x < m; ++x) {
    for (std::size_t y = 0; y < m; ++y) {
      const Element ea = a.mul(x / nb, y / nb);
      const Element eb = b.mul(x % nb, y % nb);
      flat[x * m + y] = static_cast<Element>(ea * nb + eb);
    }
  }
  return FiniteGroup(m, std::move(flat));
}

std::vector<Element> subgroup_generated(std::span<const Element> elems,
                                        const FiniteGroup& group) {
  std::vector<bool> in(group.order(), false);
  std::vector<Element> members{FiniteGroup::identity};
  in[FiniteGroup::identity] = true;
  for (std::size_t head = 0; head < members.size(); ++head) {
    for (Element s : elems) {
      require(s < group.order(), ErrorKind::invalid_input,
              "generator outside group");
      const Element x = group.mul(members[head], s);
      if (!in[x]) {
        in[x] = true;
        members.push_back(x);
      }
    }
  }
  std::sort(members.begin(), members.end());
  return members;
}

// ---------------------------------------------------------------------------

GraphProductSpec::GraphProductSpec(std::vector<FiniteGroup> factors)
    : factors_(std::move(factors)) {
  require(factors_.size() >= 5, ErrorKind::invalid_input,
          "cyclic graph product needs n >= 5 factors");
  for (const auto& f : factors_)
    require(f.order() >= 2, ErrorKind::invalid_input,
            "every factor of a graph product must be nontrivial");
}

GraphProductSpec GraphProductSpec::cyclic(std::span<const std::size_t> orders) {
  std::vector<FiniteGroup> factors;
  for (std::size_t t : orders) factors.push_back(make_cyclic_group(t));
  return GraphProductSpec(std::move(factors));
}

std::size_t GraphProductSpec::wrap(long long i) const {
  const long long m = static_cast<long long>(n());
  return static_cast<std::size_t>(((i % m) + m) % m);
}

bool GraphProductSpec::adjacent(std::size_t i, std::size_t j) const {
  return i != j && (wrap(static_cast<long long>(i) + 1) == j ||
                    wrap(static_cast<long long>(j) + 1) == i);
}

namespace {

// Appends s to a reduced word, merging it into the last syllable of the
// same factor that it can be shuffled next to.
void push_reduced(std::vector<Syllable>& out, Syllable s,
                  const GraphProductSpec& spec) {
  for (std::size_t pos = out.size(); pos-- > 0;) {
    if (out[pos].factor == s.factor) {
      const Element merged = spec.factor(s.factor).mul(out[pos].element, s.element);
      if (merged == FiniteGroup::identity)
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(pos));
      else
        out[pos].element = merged;
      return;
    }
    if (!spec.adjacent(out[pos].factor, s.factor)) break;
  }
  out.push_back(s);
}

// Lexicographically least shuffle of a reduced word: repeatedly emit the
// smallest-factor syllable that commutes with everything before it.
std::vector<Syllable> lex_least(std::vector<Syllable> rest,
                                const GraphProductSpec& spec) {
  std::vector<Syllable> out;
  out.reserve(rest.size());
  while (!rest.empty()) {
    std::size_t best = 0;
    for (std::size_t q = 1; q < rest.size(); ++q) {
      bool movable = true;
      for (std::size_t r = 0; r < q && movable; ++r)
        movable = spec.adjacent(rest[r].factor, rest[q].factor);
      if (movable && rest[q].factor < rest[best].factor) best = q;
    }
    out.push_back(rest[best]);
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return out;
}

}  // namespace

NormalForm normal_form(std::span<const Syllable> word,
                       const GraphProductSpec& spec) {
  std::vector<Syllable> reduced;
  for (const Syllable& s : word) {
    require(s.factor < spec.n(), ErrorKind::invalid_input,
            "syllable factor index " + std::to_string(s.factor) + " out of range");
    require(s.element < spec.factor(s.factor).order(), ErrorKind::invalid_input,
            "syllable element out of range");
    if (s.element == FiniteGroup::identity) continue;
    push_reduced(reduced, s, spec);
  }
  return NormalForm{lex_least(std::move(reduced), spec)};
}

NormalForm multiply(const NormalForm& a, const NormalForm& b,
                    const GraphProductSpec& spec) {
  std::vector<Syllable> reduced = a.syllables;
  for (const Syllable& s : b.syllables) push_reduced(reduced, s, spec);
  return NormalForm{lex_least(std::move(reduced), spec)};
}

NormalForm inverse(const NormalForm& a, const GraphProductSpec& spec) {
  Word w;
  for (auto it = a.syllables.rbegin(); it != a.syllables.rend(); ++it)
    w.push_back({it->factor, spec.factor(it->factor).inv(it->element)});
  return normal_form(w, spec);
}

NormalForm coset_representative(const NormalForm& g,
                                std::span<const std::size_t> allowed,
                                const GraphProductSpec& spec) {
  std::vector<Syllable> w = g.syllables;
  auto is_allowed = [&](std::size_t f) {
    return std::find(allowed.begin(), allowed.end(), f) != allowed.end();
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t q = w.size(); q-- > 0;) {
      if (!is_allowed(w[q].factor)) continue;
      bool terminal = true;
      for (std::size_t r = q + 1; r < w.size() && terminal; ++r)
        terminal = spec.adjacent(w[q].factor, w[r].factor);
      if (terminal) {
        w.erase(w.begin() + static_cast<std::ptrdiff_t>(q));
        changed = true;
        break;
      }
    }
  }
  return NormalForm{lex_least(std::move(w), spec)};
}

bool lies_in_factors(const NormalForm& g, std::span<const std::size_t> allowed) {
  return std::all_of(g.syllables.begin(), g.syllables.end(), [&](const Syllable& s) {
    return std::find(allowed.begin(), allowed.end(), s.factor) != allowed.end();
  });
}

std::vector<NormalForm> enumerate_ball(const GraphProductSpec& spec,
                                       std::size_t max_length, std::size_t cap) {
  std::vector<NormalForm> out{NormalForm{}};
  std::set<NormalForm> seen{NormalForm{}};
  std::vector<NormalForm> layer{NormalForm{}};
  for (std::size_t len = 1; len <= max_length; ++len) {
    std::set<NormalForm> next;
    for (const NormalForm& g : layer) {
      for (std::size_t f = 0; f < spec.n(); ++f) {
        for (Element e = 1; e < spec.factor(f).order(); ++e) {
          NormalForm h = multiply(g, NormalForm{{{f, e}}}, spec);
          if (h.length() == len && !seen.contains(h)) next.insert(std::move(h));
        }
      }
    }
    require(out.size() + next.size() <= cap, ErrorKind::size_limit,
            "ball enumeration exceeds element cap " + std::to_string(cap));
    layer.assign(next.begin(), next.end());
    seen.insert(next.begin(), next.end());
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

void check_factor_hom(const GroupHom& hom, const GraphProductSpec& spec) {
  const FiniteGroup& t = hom.target;
  require(hom.images.size() == spec.n(), ErrorKind::invalid_input,
          "homomorphism must give images for every factor");
  for (std::size_t f = 0; f < spec.n(); ++f) {
    const FiniteGroup& src = spec.factor(f);
    const auto& img = hom.images[f];
    require(img.size() == src.order(), ErrorKind::invalid_input,
            "image table of factor " + std::to_string(f) + " has wrong size");
    for (Element x : img)
      require(x < t.order(), ErrorKind::invalid_input, "image outside target");
    for (Element a = 0; a < src.order(); ++a)
      for (Element b = 0; b < src.order(); ++b)
        require(img[src.mul(a, b)] == t.mul(img[a], img[b]),
                ErrorKind::invalid_input,
                "images of factor " + std::to_string(f) + " do not multiply");
  }
  for (std::size_t f = 0; f < spec.n(); ++f) {
    const std::size_t g = spec.wrap(static_cast<long long>(f) + 1);
    for (Element a : hom.images[f])
      for (Element b : hom.images[g])
        require(t.mul(a, b) == t.mul(b, a), ErrorKind::invalid_input,
                "images of adjacent factors " + std::to_string(f) + "," +
                    std::to_string(g) + " do not commute");
  }
}

Element apply(const GroupHom& hom, const NormalForm& g) {
  Element acc = FiniteGroup::identity;
  for (const Syllable& s : g.syllables)
    acc = hom.target.mul(acc, hom.images.at(s.factor).at(s.element));
  return acc;
}

GroupHom tautological_quotient(const GraphProductSpec& spec, std::size_t cap) {
  GroupHom hom;
  hom.target = spec.factor(0);
  for (std::size_t f = 1; f < spec.n(); ++f)
    hom.target = direct_product(hom.target, spec.factor(f), cap);
  // Mixed radix with factor 0 most significant.
  std::vector<std::size_t> stride(spec.n(), 1);
  for (std::size_t f = spec.n() - 1; f-- > 0;)
    stride[f] = stride[f + 1] * spec.factor(f + 1).order();
  hom.images.resize(spec.n());
  for (std::size_t f = 0; f < spec.n(); ++f)
    for (Element e = 0; e < spec.factor(f).order(); ++e)
      hom.images[f].push_back(static_cast<Element>(e * stride[f]));
  return hom;
}

}  // namespace hypoly
