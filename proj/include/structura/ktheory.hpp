#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "structura/abelian.hpp"
#include "structura/errors.hpp"
#include "structura/finspace.hpp"

namespace structura::ktheory {

using exactla::FgAbGroup;
using exactla::Int;
using finspace::FiniteSpace;
using finspace::Mask;

// Rank-function model of a structural vector bundle: a fiber dimension per
// point and per index p, constant on connected components of the base.
struct BundleModel {
  FiniteSpace base;
  std::string field;  // declared scalar field, a label only
  std::size_t m = 0;
  std::vector<std::vector<long>> ranks;      // ranks[point][p]
  std::vector<std::vector<long>> canonical;  // component x p rank matrix

  bool operator==(const BundleModel&) const = default;
};

inline BundleModel validate_bundle(
    const FiniteSpace& base, std::string field, std::size_t m,
    const std::map<std::string, std::vector<long>>& ranks) {
  if (m == 0)
    input_error(ErrorCode::ParseError, "a bundle needs at least one index");
  for (const auto& [name, row] : ranks) {
    base.point_index(name);
    if (row.size() != m)
      input_error(ErrorCode::ParseError,
                  "point " + name + " lists " + std::to_string(row.size()) +
                      " ranks for m = " + std::to_string(m));
    for (long r : row)
      if (r < 0)
        input_error(ErrorCode::ParseError,
                    "point " + name + " has a negative rank");
  }

  BundleModel e{base, std::move(field), m, {}, {}};
  for (std::size_t x = 0; x < base.point_count(); ++x) {
    auto it = ranks.find(base.label(x));
    if (it == ranks.end())
      input_error(ErrorCode::ParseError, "ranks missing for point " + base.label(x));
    e.ranks.push_back(it->second);
  }

  for (Mask comp : base.components(base.full_mask())) {
    std::size_t first = 0;
    while (!(comp >> first & 1)) ++first;
    for (std::size_t x = first + 1; x < base.point_count(); ++x) {
      if (!(comp >> x & 1)) continue;
      for (std::size_t p = 0; p < m; ++p)
        if (e.ranks[x][p] != e.ranks[first][p])
          math_error(ErrorCode::RankNotLocallyConstant,
                     "points " + base.label(first) + " and " + base.label(x) +
                         " share a component but differ at index " +
                         std::to_string(p + 1));
    }
    e.canonical.push_back(e.ranks[first]);
  }
  return e;
}

inline BundleModel zero_bundle(const FiniteSpace& base, std::string field,
                               std::size_t m) {
  std::map<std::string, std::vector<long>> ranks;
  for (std::size_t x = 0; x < base.point_count(); ++x)
    ranks.emplace(base.label(x), std::vector<long>(m));
  return validate_bundle(base, std::move(field), m, ranks);
}

inline BundleModel whitney_sum(const BundleModel& a, const BundleModel& b) {
  if (!(a.base == b.base))
    math_error(ErrorCode::BaseMismatch, "bundles live on different bases");
  if (a.m != b.m)
    math_error(ErrorCode::IndexMismatch, "bundles use " + std::to_string(a.m) +
                                             " and " + std::to_string(b.m) +
                                             " indices");
  if (a.field != b.field)
    math_error(ErrorCode::IndexMismatch,
               "bundles declare scalars " + a.field + " and " + b.field);
  BundleModel s = a;
  for (std::size_t x = 0; x < s.ranks.size(); ++x)
    for (std::size_t p = 0; p < s.m; ++p) s.ranks[x][p] += b.ranks[x][p];
  for (std::size_t i = 0; i < s.canonical.size(); ++i)
    for (std::size_t p = 0; p < s.m; ++p) s.canonical[i][p] += b.canonical[i][p];
  return s;
}

// A finite window of an abelian monoid: a distinguished zero and a partial
// operation table.  `outside` marks sums falling beyond the window, which
// lets a finite table carry the visible part of an infinite monoid; the
// axioms are enforced wherever the table is defined.
struct AbelianMonoidPresentation {
  static constexpr std::size_t outside = static_cast<std::size_t>(-1);

  std::vector<std::string> labels;
  std::size_t zero = 0;
  std::vector<std::size_t> table;  // n x n, row major

  std::size_t size() const { return labels.size(); }
  std::size_t at(std::size_t i, std::size_t j) const { return table[i * size() + j]; }

  static AbelianMonoidPresentation make(std::vector<std::string> labels,
                                        std::size_t zero,
                                        std::vector<std::size_t> table,
                                        std::size_t max_elements = 64) {
    const std::size_t n = labels.size();
    if (n == 0)
      input_error(ErrorCode::ParseError, "a monoid needs at least one element");
    if (n > max_elements)
      math_error(ErrorCode::TooLarge, "monoids are capped at " +
                                          std::to_string(max_elements) +
                                          " elements, got " + std::to_string(n));
    if (zero >= n)
      input_error(ErrorCode::ParseError, "the zero index is out of range");
    if (table.size() != n * n)
      input_error(ErrorCode::ParseError, "the operation table must be n x n");
    for (std::size_t v : table)
      if (v != outside && v >= n)
        input_error(ErrorCode::ParseError, "operation table entry out of range");

    AbelianMonoidPresentation m{std::move(labels), zero, std::move(table)};
    for (std::size_t j = 0; j < n; ++j)
      if (m.at(m.zero, j) != j || m.at(j, m.zero) != j)
        math_error(ErrorCode::MonoidAxiomsFail,
                   "adding zero must restore " + m.labels[j]);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (m.at(i, j) != m.at(j, i))
          math_error(ErrorCode::MonoidAxiomsFail,
                     "the operation is not commutative at (" + m.labels[i] +
                         ", " + m.labels[j] + ")");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t ij = m.at(i, j);
        if (ij == outside) continue;
        for (std::size_t k = 0; k < n; ++k) {
          const std::size_t jk = m.at(j, k);
          if (jk == outside) continue;
          const std::size_t left = m.at(ij, k), right = m.at(i, jk);
          if (left != right)
            math_error(ErrorCode::MonoidAxiomsFail,
                       "associativity fails at (" + m.labels[i] + ", " +
                           m.labels[j] + ", " + m.labels[k] + ")");
        }
      }
    return m;
  }
};

// The first bound+1 naturals under addition, sums past the window outside.
inline AbelianMonoidPresentation bounded_naturals(std::size_t bound,
                                                  std::size_t max_elements = 64) {
  const std::size_t n = bound + 1;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  std::vector<std::size_t> table(n * n, AbelianMonoidPresentation::outside);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; i + j < n; ++j) table[i * n + j] = i + j;
  return AbelianMonoidPresentation::make(std::move(labels), 0, std::move(table),
                                         max_elements);
}

// Rank matrices with `slots` entries, each between 0 and bound, summed
// entrywise; the iso-class window of the bundle monoid with slots = c * m.
inline AbelianMonoidPresentation bounded_rank_monoid(std::size_t slots,
                                                     std::size_t bound,
                                                     std::size_t max_elements = 64) {
  if (slots == 0)
    input_error(ErrorCode::ParseError, "a rank monoid needs at least one slot");
  std::size_t n = 1;
  for (std::size_t s = 0; s < slots; ++s) {
    n *= bound + 1;
    if (n > max_elements)
      math_error(ErrorCode::TooLarge,
                 "monoids are capped at " + std::to_string(max_elements) +
                     " elements; the rank window does not fit");
  }
  auto digits = [&](std::size_t v) {
    std::vector<std::size_t> d(slots);
    for (std::size_t s = slots; s-- > 0; v /= bound + 1) d[s] = v % (bound + 1);
    return d;
  };
  std::vector<std::string> labels;
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<std::size_t> d = digits(v);
    std::string s = "(";
    for (std::size_t k = 0; k < slots; ++k) {
      if (k) s += ",";
      s += std::to_string(d[k]);
    }
    labels.push_back(s + ")");
  }
  std::vector<std::size_t> table(n * n, AbelianMonoidPresentation::outside);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) {
      std::vector<std::size_t> du = digits(u), dv = digits(v);
      std::size_t sum = 0;
      bool fits = true;
      for (std::size_t k = 0; k < slots && fits; ++k) {
        if (du[k] + dv[k] > bound) fits = false;
        sum = sum * (bound + 1) + du[k] + dv[k];
      }
      if (fits) table[u * n + v] = sum;
    }
  return AbelianMonoidPresentation::make(std::move(labels), 0, std::move(table),
                                         max_elements);
}

// Pairs (a1, a2) stand for formal differences; (a1, a2) ~ (b1, b2) when some
// c gives a1 + b2 + c = a2 + b1 + c.  The closure is reached through the
// shift relations (a1, a2) ~ (a1 + c, a2 + c) alone: any direct witness c
// lands both pairs on the common shift (a1 + b2 + c, a2 + b2 + c).  The
// group itself is presented on one generator per element with the relation
// g_a + g_b = g_(a+b) for every defined table entry, then reduced.
struct GrothendieckCompletion {
  FgAbGroup group;
  std::size_t classes = 0;
  std::vector<std::size_t> pair_class;          // class of (i, j) at i*n+j
  std::vector<std::vector<Int>> element_image;  // coords of (a, zero) in group
};

inline GrothendieckCompletion grothendieck_complete(
    const AbelianMonoidPresentation& m) {
  const std::size_t n = m.size();
  const std::size_t outside = AbelianMonoidPresentation::outside;

  std::vector<std::size_t> parent(n * n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t a1 = 0; a1 < n; ++a1)
    for (std::size_t a2 = 0; a2 < n; ++a2)
      for (std::size_t c = 0; c < n; ++c) {
        const std::size_t s1 = m.at(a1, c), s2 = m.at(a2, c);
        if (s1 == outside || s2 == outside) continue;
        parent[find(a1 * n + a2)] = find(s1 * n + s2);
      }

  GrothendieckCompletion out;
  std::map<std::size_t, std::size_t> dense;
  for (std::size_t p = 0; p < n * n; ++p) {
    const std::size_t root = find(p);
    auto [it, fresh] = dense.emplace(root, dense.size());
    out.pair_class.push_back(it->second);
    (void)fresh;
  }
  out.classes = dense.size();

  std::vector<std::array<std::size_t, 3>> rels;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      if (m.at(i, j) != outside) rels.push_back({i, j, m.at(i, j)});
  exactla::IntMatrix rel(n, rels.size());
  for (std::size_t k = 0; k < rels.size(); ++k) {
    rel(rels[k][0], k) += 1;
    rel(rels[k][1], k) += 1;
    rel(rels[k][2], k) -= 1;
  }
  exactla::Canonicalized can =
      exactla::canonicalize({n, std::move(rel)});
  out.group = can.group;
  for (std::size_t a = 0; a < n; ++a) {
    std::vector<Int> e(n);
    e[a] = 1;
    out.element_image.push_back(can.coords_of(e));
  }

  // the images must respect the visible operation
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (m.at(i, j) == outside) continue;
      std::vector<Int> sum = out.element_image[i];
      for (std::size_t k = 0; k < sum.size(); ++k)
        sum[k] += out.element_image[j][k];
      require_invariant(exactla::reduce_mod_group(out.group, sum) ==
                            out.element_image[m.at(i, j)],
                        "the canonical map is not a monoid homomorphism");
    }
  return out;
}

// Iso classes of rank models form the free commutative monoid on the
// component x p unit bundles, so completion gives that many copies of Z.
inline FgAbGroup k0(const FiniteSpace& base, std::size_t m) {
  if (m == 0) input_error(ErrorCode::ParseError, "k0 needs at least one index");
  const std::size_t c = base.components(base.full_mask()).size();
  return FgAbGroup::free_group(static_cast<long>(c * m));
}

inline std::vector<std::string> k0_generator_labels(const FiniteSpace& base,
                                                    std::size_t m) {
  if (m == 0) input_error(ErrorCode::ParseError, "k0 needs at least one index");
  std::vector<std::string> out;
  for (Mask comp : base.components(base.full_mask()))
    for (std::size_t p = 0; p < m; ++p)
      out.push_back(base.set_label(comp) + "#" + std::to_string(p + 1));
  return out;
}

}  // namespace structura::ktheory
