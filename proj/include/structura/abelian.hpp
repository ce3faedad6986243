#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "structura/errors.hpp"
#include "structura/smith.hpp"

namespace structura::exactla {

// Finitely generated abelian group in invariant-factor form: a free rank plus
// a divisibility chain d_1 | d_2 | ... of torsion orders, each at least 2.
// Two groups are isomorphic exactly when these data agree, so operator== is
// an isomorphism test.  Generator convention everywhere: free generators come
// first, then the torsion generators in chain order.
struct FgAbGroup {
  long rank = 0;
  std::vector<Int> torsion;

  bool operator==(const FgAbGroup&) const = default;

  std::size_t gens() const { return static_cast<std::size_t>(rank) + torsion.size(); }
  bool is_trivial() const { return rank == 0 && torsion.empty(); }

  // 0 for free generators, d for torsion ones
  Int gen_order(std::size_t i) const {
    return i < static_cast<std::size_t>(rank) ? Int(0)
                                              : torsion[i - static_cast<std::size_t>(rank)];
  }

  static FgAbGroup trivial() { return {}; }
  static FgAbGroup free_group(long r) { return {r, {}}; }
  static FgAbGroup cyclic(const Int& n) {
    if (n == 0) return free_group(1);
    if (n == 1 || n == -1) return trivial();
    return {0, {abs(n)}};
  }
};

inline std::string to_string(const FgAbGroup& g) {
  std::ostringstream os;
  bool first = true;
  if (g.rank == 1) { os << "Z"; first = false; }
  else if (g.rank > 1) { os << "Z^" << g.rank; first = false; }
  for (const Int& d : g.torsion) {
    if (!first) os << " (+) ";
    os << "Z/" << d;
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

// Columns generating the relation subgroup of Z^gens for this group: one
// column d_i * e_i per torsion generator.
inline IntMatrix relation_matrix(const FgAbGroup& g) {
  IntMatrix r(g.gens(), g.torsion.size());
  for (std::size_t j = 0; j < g.torsion.size(); ++j)
    r(static_cast<std::size_t>(g.rank) + j, j) = g.torsion[j];
  return r;
}

inline std::vector<Int> reduce_mod_group(const FgAbGroup& g, std::vector<Int> v) {
  for (std::size_t i = 0; i < g.gens(); ++i) {
    Int d = g.gen_order(i);
    if (d != 0) {
      v[i] %= d;
      if (v[i] < 0) v[i] += d;
    }
  }
  return v;
}

// Homomorphism between groups in canonical form, stored as a matrix of shape
// target.gens x source.gens acting on generator columns.  Construction
// validates that torsion generators land on elements killed by their order
// and normalizes torsion rows, so structural equality of maps is equality.
struct GroupMap {
  FgAbGroup source, target;
  IntMatrix matrix;

  GroupMap() = default;
  GroupMap(FgAbGroup src, FgAbGroup tgt, IntMatrix m)
      : source(std::move(src)), target(std::move(tgt)), matrix(std::move(m)) {
    if (matrix.rows() != target.gens() || matrix.cols() != source.gens())
      math_error(ErrorCode::ShapeMismatch,
                 "map matrix must be target.gens x source.gens, got " +
                     std::to_string(matrix.rows()) + "x" + std::to_string(matrix.cols()));
    normalize();
    for (std::size_t j = 0; j < source.gens(); ++j) {
      Int dj = source.gen_order(j);
      if (dj == 0) continue;
      for (std::size_t i = 0; i < target.gens(); ++i) {
        Int di = target.gen_order(i);
        Int v = dj * matrix(i, j);
        bool ok = (di == 0) ? (v == 0) : (v % di == 0);
        if (!ok)
          math_error(ErrorCode::ShapeMismatch,
                     "not a homomorphism: generator " + std::to_string(j) +
                         " of order " + dj.str() + " maps to an element not killed by it");
      }
    }
  }

  bool operator==(const GroupMap&) const = default;

  static GroupMap identity(const FgAbGroup& g) {
    return GroupMap(g, g, IntMatrix::identity(g.gens()));
  }
  static GroupMap zero(const FgAbGroup& src, const FgAbGroup& tgt) {
    return GroupMap(src, tgt, IntMatrix(tgt.gens(), src.gens()));
  }

  bool is_zero() const { return matrix.is_zero(); }

  std::vector<Int> apply_to(const std::vector<Int>& v) const {
    return reduce_mod_group(target, mat_apply(matrix, v));
  }

 private:
  void normalize() {
    for (std::size_t i = 0; i < target.gens(); ++i) {
      Int d = target.gen_order(i);
      if (d == 0) continue;
      for (std::size_t j = 0; j < matrix.cols(); ++j) {
        matrix(i, j) %= d;
        if (matrix(i, j) < 0) matrix(i, j) += d;
      }
    }
  }
};

inline GroupMap compose(const GroupMap& g, const GroupMap& f) {
  if (!(f.target == g.source))
    math_error(ErrorCode::ShapeMismatch, "compose needs middle groups to agree: " +
                                             to_string(f.target) + " vs " + to_string(g.source));
  return GroupMap(f.source, g.target, mul(g.matrix, f.matrix));
}

// A presentation Z^gens / (column span of rels).
struct Presentation {
  std::size_t gens = 0;
  IntMatrix rels;  // gens x k
};

// Canonical form of a presented group together with coordinate changes:
// to_can maps presentation coordinates to canonical generator coordinates,
// from_can picks representative presentation vectors for canonical
// generators, and to_can * from_can is the identity modulo relations.
struct Canonicalized {
  FgAbGroup group;
  IntMatrix to_can;    // group.gens x presentation.gens
  IntMatrix from_can;  // presentation.gens x group.gens

  std::vector<Int> coords_of(const std::vector<Int>& presentation_vec) const {
    return reduce_mod_group(group, mat_apply(to_can, presentation_vec));
  }
};

inline Canonicalized canonicalize(const Presentation& p) {
  if (p.rels.rows() != p.gens)
    math_error(ErrorCode::ShapeMismatch, "relation matrix rows must equal generator count");
  SmithResult sr = smith_normal_form(p.rels);
  const std::size_t g = p.gens;
  const std::size_t bound = std::min(p.rels.rows(), p.rels.cols());
  // in coordinates y = U x the relations become s_i y_i = 0
  std::vector<std::size_t> free_idx, tors_idx;
  std::vector<Int> orders;
  for (std::size_t i = 0; i < g; ++i) {
    Int s = (i < bound) ? sr.S(i, i) : Int(0);
    if (s == 0) free_idx.push_back(i);
    else if (s >= 2) { tors_idx.push_back(i); orders.push_back(s); }
    // s == 1 kills the generator
  }
  Canonicalized c;
  c.group.rank = static_cast<long>(free_idx.size());
  c.group.torsion = orders;
  const std::size_t h = c.group.gens();
  c.to_can = IntMatrix(h, g);
  c.from_can = IntMatrix(g, h);
  std::vector<std::size_t> sel = free_idx;
  sel.insert(sel.end(), tors_idx.begin(), tors_idx.end());
  for (std::size_t a = 0; a < h; ++a) {
    for (std::size_t k = 0; k < g; ++k) c.to_can(a, k) = sr.U(sel[a], k);
    for (std::size_t k = 0; k < g; ++k) c.from_can(k, a) = sr.Uinv(k, sel[a]);
    Int d = c.group.gen_order(a);
    if (d != 0)
      for (std::size_t k = 0; k < g; ++k) {
        c.to_can(a, k) %= d;
        if (c.to_can(a, k) < 0) c.to_can(a, k) += d;
      }
  }
  return c;
}

// Direct sum of canonical groups, canonicalized again, with the block
// bookkeeping needed to build maps blockwise and then change coordinates.
struct BlockSum {
  FgAbGroup group;
  std::vector<FgAbGroup> parts;
  std::vector<std::size_t> offsets;  // generator offsets in block coordinates
  std::size_t block_gens = 0;
  IntMatrix to_can, from_can;

  GroupMap injection(std::size_t i) const {
    IntMatrix m(group.gens(), parts[i].gens());
    for (std::size_t a = 0; a < group.gens(); ++a)
      for (std::size_t j = 0; j < parts[i].gens(); ++j)
        m(a, j) = to_can(a, offsets[i] + j);
    return GroupMap(parts[i], group, std::move(m));
  }

  GroupMap projection(std::size_t i) const {
    IntMatrix m(parts[i].gens(), group.gens());
    for (std::size_t j = 0; j < parts[i].gens(); ++j)
      for (std::size_t a = 0; a < group.gens(); ++a)
        m(j, a) = from_can(offsets[i] + j, a);
    return GroupMap(group, parts[i], std::move(m));
  }
};

inline BlockSum block_sum(const std::vector<FgAbGroup>& parts) {
  BlockSum b;
  b.parts = parts;
  std::size_t total = 0, tcols = 0;
  for (const FgAbGroup& p : parts) {
    b.offsets.push_back(total);
    total += p.gens();
    tcols += p.torsion.size();
  }
  b.block_gens = total;
  IntMatrix rels(total, tcols);
  std::size_t col = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    IntMatrix r = relation_matrix(parts[i]);
    rels.set_block(b.offsets[i], col, r);
    col += r.cols();
  }
  Canonicalized c = canonicalize({total, rels});
  b.group = c.group;
  b.to_can = c.to_can;
  b.from_can = c.from_can;
  return b;
}

// Map between block sums given its blocks; missing blocks are zero.
inline GroupMap assemble_block_map(
    const BlockSum& source, const BlockSum& target,
    const std::vector<std::tuple<std::size_t, std::size_t, GroupMap>>& blocks) {
  IntMatrix m(target.block_gens, source.block_gens);
  for (const auto& [ti, sj, f] : blocks) {
    if (!(f.source == source.parts[sj] && f.target == target.parts[ti]))
      math_error(ErrorCode::ShapeMismatch, "block map does not match its slot");
    for (std::size_t a = 0; a < f.matrix.rows(); ++a)
      for (std::size_t c = 0; c < f.matrix.cols(); ++c)
        m(target.offsets[ti] + a, source.offsets[sj] + c) += f.matrix(a, c);
  }
  return GroupMap(source.group, target.group,
                  mul(target.to_can, mul(m, source.from_can)));
}

// The subquotient ker(g) / im(f) for composable maps A -f-> B -g-> C with
// g o f = 0.  Besides the canonical group this keeps enough coordinate data
// to move elements in and out: lift picks representative vectors in B for
// the canonical generators, project sends a vector of B lying in ker(g) to
// its class.
struct SubquotientData {
  FgAbGroup group;
  IntMatrix kernel_gens;  // B.gens x k, columns span the kernel in B coordinates
  Canonicalized quot;     // of the quotient by the image relations
  IntMatrix lift;         // B.gens x group.gens

  std::vector<Int> project(const std::vector<Int>& cycle) const {
    auto y = solve(kernel_gens, cycle);
    if (!y)
      math_error(ErrorCode::InvariantViolation,
                 "vector claimed to be a cycle is not in the kernel span");
    return quot.coords_of(*y);
  }
};

inline SubquotientData subquotient_data(const GroupMap& g, const GroupMap& f) {
  if (!(f.target == g.source))
    math_error(ErrorCode::ShapeMismatch,
               "subquotient needs f into the source of g: " + to_string(f.target) +
                   " vs " + to_string(g.source));
  if (!compose(g, f).is_zero())
    math_error(ErrorCode::CompositionNotZero,
               "g o f must vanish before ker(g)/im(f) makes sense");
  const FgAbGroup& B = g.source;
  const std::size_t nb = B.gens();

  // kernel of g as a subgroup of Z^nb: x with g(x) = 0 in C, i.e. the matrix
  // [g | R_C] has (x, aux) in its kernel
  IntMatrix gc = hstack(g.matrix, relation_matrix(g.target));
  IntMatrix kfull = kernel_basis(gc);
  SubquotientData d;
  d.kernel_gens = IntMatrix(nb, kfull.cols());
  for (std::size_t i = 0; i < nb; ++i)
    for (std::size_t j = 0; j < kfull.cols(); ++j) d.kernel_gens(i, j) = kfull(i, j);

  // relations on those kernel generators: combinations landing in
  // im(f) + relations of B
  IntMatrix w = hstack(f.matrix, relation_matrix(B));
  IntMatrix kw = kernel_basis(hstack(d.kernel_gens, w));
  IntMatrix rels(d.kernel_gens.cols(), kw.cols());
  for (std::size_t i = 0; i < rels.rows(); ++i)
    for (std::size_t j = 0; j < kw.cols(); ++j) rels(i, j) = kw(i, j);

  d.quot = canonicalize({d.kernel_gens.cols(), rels});
  d.group = d.quot.group;
  d.lift = mul(d.kernel_gens, d.quot.from_can);
  return d;
}

inline FgAbGroup subquotient(const GroupMap& g, const GroupMap& f) {
  return subquotient_data(g, f).group;
}

inline FgAbGroup kernel_group(const GroupMap& g) {
  return subquotient(g, GroupMap::zero(FgAbGroup::trivial(), g.source));
}

inline FgAbGroup cokernel_group(const GroupMap& f) {
  return subquotient(GroupMap::zero(f.target, FgAbGroup::trivial()), f);
}

inline bool is_isomorphism(const GroupMap& m) {
  return kernel_group(m).is_trivial() && cokernel_group(m).is_trivial();
}

// Inverse of an isomorphism, found by solving for preimages of the target
// generators.  Returns nothing if m is not invertible.
inline std::optional<GroupMap> inverse_of_iso(const GroupMap& m) {
  const std::size_t nt = m.target.gens();
  IntMatrix ext = hstack(m.matrix, relation_matrix(m.target));
  IntMatrix inv(m.source.gens(), nt);
  for (std::size_t j = 0; j < nt; ++j) {
    std::vector<Int> e(nt);
    e[j] = 1;
    auto x = solve(ext, e);
    if (!x) return std::nullopt;
    for (std::size_t i = 0; i < m.source.gens(); ++i) inv(i, j) = (*x)[i];
  }
  GroupMap cand(m.target, m.source, std::move(inv));
  if (!(compose(m, cand) == GroupMap::identity(m.target))) return std::nullopt;
  if (!(compose(cand, m) == GroupMap::identity(m.source))) return std::nullopt;
  return cand;
}

// A commuting diagram of groups over a directed index preorder, given by its
// objects and generating arrows.  The limit is the quotient of the block sum
// by the insertion relations; the returned insertions satisfy
// ins_to o map = ins_from for every arrow.
struct DiagramArrow {
  std::size_t from = 0, to = 0;
  GroupMap map;
};

struct DirectLimit {
  FgAbGroup group;
  std::vector<GroupMap> insertions;
};

inline DirectLimit direct_limit(const std::vector<FgAbGroup>& objects,
                                const std::vector<DiagramArrow>& arrows) {
  const std::size_t n = objects.size();
  for (const DiagramArrow& a : arrows) {
    if (a.from >= n || a.to >= n)
      input_error(ErrorCode::ParseError, "arrow endpoint out of range");
    if (!(a.map.source == objects[a.from] && a.map.target == objects[a.to]))
      math_error(ErrorCode::ShapeMismatch,
                 "arrow " + std::to_string(a.from) + "->" + std::to_string(a.to) +
                     " does not match its endpoint groups");
  }

  // close under composition, checking that parallel composites agree
  std::vector<std::vector<std::optional<GroupMap>>> hom(
      n, std::vector<std::optional<GroupMap>>(n));
  for (std::size_t i = 0; i < n; ++i) hom[i][i] = GroupMap::identity(objects[i]);
  auto install = [&](std::size_t i, std::size_t j, const GroupMap& m) {
    if (hom[i][j]) {
      if (!(*hom[i][j] == m))
        math_error(ErrorCode::NotFunctorial,
                   "two different composites from object " + std::to_string(i) +
                       " to object " + std::to_string(j));
      return false;
    }
    hom[i][j] = m;
    return true;
  };
  for (const DiagramArrow& a : arrows) install(a.from, a.to, a.map);
  bool grew = true;
  while (grew) {
    grew = false;
    for (const DiagramArrow& a : arrows)
      for (std::size_t i = 0; i < n; ++i)
        if (hom[i][a.from])
          if (install(i, a.to, compose(a.map, *hom[i][a.from]))) grew = true;
  }

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      bool found = false;
      for (std::size_t k = 0; k < n && !found; ++k)
        if (hom[i][k] && hom[j][k]) found = true;
      if (!found)
        math_error(ErrorCode::NotDirected,
                   "objects " + std::to_string(i) + " and " + std::to_string(j) +
                       " have no common upper bound");
    }

  BlockSum sum = block_sum(objects);
  std::vector<IntMatrix> extra;
  for (const DiagramArrow& a : arrows) {
    if (a.from == a.to) continue;
    // one relation column per source generator: e_from,g - map(e_from,g)
    for (std::size_t gidx = 0; gidx < objects[a.from].gens(); ++gidx) {
      IntMatrix col(sum.block_gens, 1);
      col(sum.offsets[a.from] + gidx, 0) = 1;
      for (std::size_t t = 0; t < objects[a.to].gens(); ++t)
        col(sum.offsets[a.to] + t, 0) -= a.map.matrix(t, gidx);
      extra.push_back(col);
    }
  }
  // full relation matrix in block coordinates: part relations plus the
  // identification columns
  std::size_t tcols = 0;
  for (const FgAbGroup& p : objects) tcols += p.torsion.size();
  IntMatrix all(sum.block_gens, tcols + extra.size());
  std::size_t col = 0;
  for (std::size_t i = 0; i < n; ++i) {
    IntMatrix r = relation_matrix(objects[i]);
    all.set_block(sum.offsets[i], col, r);
    col += r.cols();
  }
  for (const IntMatrix& c : extra) {
    all.set_block(0, col, c);
    ++col;
  }

  Canonicalized c = canonicalize({sum.block_gens, all});
  DirectLimit lim;
  lim.group = c.group;
  for (std::size_t i = 0; i < n; ++i) {
    IntMatrix m(c.group.gens(), objects[i].gens());
    for (std::size_t a = 0; a < c.group.gens(); ++a)
      for (std::size_t j = 0; j < objects[i].gens(); ++j)
        m(a, j) = c.to_can(a, sum.offsets[i] + j);
    lim.insertions.emplace_back(objects[i], c.group, std::move(m));
  }
  return lim;
}

}  // namespace structura::exactla
