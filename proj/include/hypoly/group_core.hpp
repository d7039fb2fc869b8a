#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hypoly {

/// Dense element index of a finite group. The identity is always 0.
using Element = std::uint32_t;

inline constexpr std::size_t kDefaultOrderCap = 4096;
inline constexpr std::size_t kDefaultElementCap = 1'000'000;

/// A finite group given by its multiplication table.
class FiniteGroup {
 public:
  static constexpr Element identity = 0;

  /// The trivial group.
  FiniteGroup();

  /// Validates the table fully (closure, identity at 0, Latin rows,
  /// associativity). Throws invalid_input on any violation.
  static FiniteGroup from_table(const std::vector<std::vector<Element>>& mult);

  std::size_t order() const noexcept { return order_; }
  Element mul(Element a, Element b) const { return mult_[a * order_ + b]; }
  Element inv(Element a) const { return inv_[a]; }
  std::size_t element_order(Element a) const;

  std::vector<std::vector<Element>> table() const;

  bool operator==(const FiniteGroup&) const = default;

 private:
  friend FiniteGroup make_cyclic_group(std::size_t);
  friend FiniteGroup direct_product(const FiniteGroup&, const FiniteGroup&,
                                    std::size_t);
  FiniteGroup(std::size_t order, std::vector<Element> flat);

  std::size_t order_ = 1;
  std::vector<Element> mult_;
  std::vector<Element> inv_;
};

/// Z/t. Throws invalid_input for t = 0.
FiniteGroup make_cyclic_group(std::size_t t);

/// A x B with element index a * |B| + b. Throws size_limit past `cap`.
FiniteGroup direct_product(const FiniteGroup& a, const FiniteGroup& b,
                           std::size_t cap = kDefaultOrderCap);

/// Closure of `elems` under multiplication, as a sorted index set.
std::vector<Element> subgroup_generated(std::span<const Element> elems,
                                        const FiniteGroup& group);

/// A nontrivial element of one factor of a graph product.
struct Syllable {
  std::size_t factor = 0;
  Element element = 0;

  auto operator<=>(const Syllable&) const = default;
};

using Word = std::vector<Syllable>;

/// Canonical reduced word of a graph-product element.
struct NormalForm {
  std::vector<Syllable> syllables;

  std::size_t length() const noexcept { return syllables.size(); }
  bool is_identity() const noexcept { return syllables.empty(); }

  auto operator<=>(const NormalForm&) const = default;
};

/// The cyclic graph product of finite groups: factor i commutes elementwise
/// with factors i-1 and i+1 (mod n) and nothing else. Factor i is the edge
/// group of edge e_i of the underlying n-gon.
class GraphProductSpec {
 public:
  explicit GraphProductSpec(std::vector<FiniteGroup> factors);

  /// Factors Z/t_0, ..., Z/t_{n-1}.
  static GraphProductSpec cyclic(std::span<const std::size_t> orders);

  std::size_t n() const noexcept { return factors_.size(); }
  const FiniteGroup& factor(std::size_t i) const { return factors_.at(i); }
  const std::vector<FiniteGroup>& factors() const noexcept { return factors_; }
  /// Number of faces around an edge of type i, i.e. |G_{e_i}|.
  std::size_t thickness(std::size_t i) const { return factors_.at(i).order(); }

  std::size_t wrap(long long i) const;
  bool adjacent(std::size_t i, std::size_t j) const;

 private:
  std::vector<FiniteGroup> factors_;
};

NormalForm normal_form(std::span<const Syllable> word,
                       const GraphProductSpec& spec);
NormalForm multiply(const NormalForm& a, const NormalForm& b,
                    const GraphProductSpec& spec);
NormalForm inverse(const NormalForm& a, const GraphProductSpec& spec);

/// Representative of the coset g<factors in `allowed`> of minimal length.
NormalForm coset_representative(const NormalForm& g,
                                std::span<const std::size_t> allowed,
                                const GraphProductSpec& spec);

/// True iff every syllable of g lies in a factor listed in `allowed`.
bool lies_in_factors(const NormalForm& g, std::span<const std::size_t> allowed);

/// All elements of syllable length <= max_length, ordered by length and
/// then lexicographically. Throws size_limit past `cap`.
std::vector<NormalForm> enumerate_ball(const GraphProductSpec& spec,
                                       std::size_t max_length,
                                       std::size_t cap = kDefaultElementCap);

/// A homomorphism into a finite group, given by the images of each block of
/// generators. For a graph product the blocks are the factors; for a polygon
/// of groups they are the vertex groups.
struct GroupHom {
  FiniteGroup target;
  std::vector<std::vector<Element>> images;
};

/// Throws invalid_input unless `hom` respects every factor table and every
/// commutation relation of `spec`.
void check_factor_hom(const GroupHom& hom, const GraphProductSpec& spec);

Element apply(const GroupHom& hom, const NormalForm& g);

/// G -> prod_i G_{e_i}, sending factor i onto the i-th coordinate.
GroupHom tautological_quotient(const GraphProductSpec& spec,
                               std::size_t cap = kDefaultOrderCap);

}  // namespace hypoly
