#pragma once

#include <algorithm>
#include <string>
#include <tuple>
#include <vector>

#include "structura/abelian.hpp"
#include "structura/complexes.hpp"
#include "structura/errors.hpp"
#include "structura/finspace.hpp"
#include "structura/presheaf.hpp"

namespace structura::cohom {

using complexes::CochainComplex;
using exactla::BlockSum;
using exactla::FgAbGroup;
using exactla::GroupMap;
using exactla::IntMatrix;
using finspace::Cover;
using finspace::Mask;
using sheaf::Presheaf;

// The alternating Cech complex of a cover: degree p sums the presheaf values
// on the intersections over strictly increasing member tuples.  Tuple lists
// and block data are kept so refinements can act on cochains later.
struct CechComplex {
  Cover cover;
  CochainComplex complex;
  std::vector<std::vector<std::vector<std::size_t>>> tuples;  // per degree, lex order
  std::vector<BlockSum> sums;
};

namespace detail {

inline void increasing_tuples(std::size_t members, std::size_t size,
                              std::vector<std::size_t>& scratch,
                              std::vector<std::vector<std::size_t>>& out) {
  if (scratch.size() == size) {
    out.push_back(scratch);
    return;
  }
  std::size_t from = scratch.empty() ? 0 : scratch.back() + 1;
  for (std::size_t i = from; i < members; ++i) {
    scratch.push_back(i);
    increasing_tuples(members, size, scratch, out);
    scratch.pop_back();
  }
}

inline Mask tuple_meet(const Cover& cover, const std::vector<std::size_t>& t) {
  Mask m = cover.space.full_mask();
  for (std::size_t i : t) m &= cover.members[i];
  return m;
}

inline std::size_t index_of(const std::vector<std::vector<std::size_t>>& tuples,
                            const std::vector<std::size_t>& t) {
  return std::find(tuples.begin(), tuples.end(), t) - tuples.begin();
}

}  // namespace detail

inline CechComplex cech_complex(const Cover& cover, const Presheaf& f,
                                std::size_t max_degree) {
  if (f.kind() != sheaf::ValueKind::AbGroup)
    math_error(ErrorCode::WrongValueKind,
               "Cech cochains need a group valued presheaf");
  sheaf::require_presheaf_laws(f);
  if (!(f.space() == cover.space))
    math_error(ErrorCode::BaseMismatch, "cover and presheaf live on different spaces");

  CechComplex out{cover, complexes::zero_complex(1), {}, {}};
  for (std::size_t p = 0; p <= max_degree; ++p) {
    std::vector<std::vector<std::size_t>> ts;
    std::vector<std::size_t> scratch;
    detail::increasing_tuples(cover.members.size(), p + 1, scratch, ts);
    std::vector<FgAbGroup> parts;
    for (const auto& t : ts) parts.push_back(f.group_value(detail::tuple_meet(cover, t)));
    out.sums.push_back(exactla::block_sum(parts));
    out.tuples.push_back(std::move(ts));
  }

  std::vector<FgAbGroup> groups;
  for (const BlockSum& b : out.sums) groups.push_back(b.group);
  std::vector<GroupMap> diffs;
  for (std::size_t p = 0; p + 1 <= max_degree; ++p) {
    std::vector<std::tuple<std::size_t, std::size_t, GroupMap>> blocks;
    for (std::size_t ti = 0; ti < out.tuples[p + 1].size(); ++ti) {
      const std::vector<std::size_t>& t = out.tuples[p + 1][ti];
      Mask meet_t = detail::tuple_meet(cover, t);
      for (std::size_t k = 0; k < t.size(); ++k) {
        std::vector<std::size_t> s = t;
        s.erase(s.begin() + static_cast<std::ptrdiff_t>(k));
        std::size_t si = detail::index_of(out.tuples[p], s);
        GroupMap rho = f.group_rho(meet_t, detail::tuple_meet(cover, s));
        if (k % 2 == 1) rho = GroupMap(rho.source, rho.target, exactla::negate(rho.matrix));
        blocks.emplace_back(ti, si, rho);
      }
    }
    diffs.push_back(exactla::assemble_block_map(out.sums[p], out.sums[p + 1], blocks));
  }
  out.complex = CochainComplex(std::move(groups), std::move(diffs));
  return out;
}

inline std::vector<FgAbGroup> cech_cohomology(const CechComplex& c) {
  return complexes::cohomology(c.complex);
}

// The cochain map induced by a refinement assignment: pull a coarse cochain
// back along the member assignment, with the alternating sign of sorting the
// image tuple and zero whenever two members collapse.
inline GroupMap induced_cochain_map(const CechComplex& coarse, const CechComplex& fine,
                                    const Presheaf& f,
                                    const std::vector<std::size_t>& assign,
                                    std::size_t p) {
  std::vector<std::tuple<std::size_t, std::size_t, GroupMap>> blocks;
  for (std::size_t ti = 0; ti < fine.tuples[p].size(); ++ti) {
    const std::vector<std::size_t>& t = fine.tuples[p][ti];
    std::vector<std::size_t> image;
    for (std::size_t j : t) image.push_back(assign[j]);
    bool degenerate = false;
    long inversions = 0;
    for (std::size_t a = 0; a < image.size(); ++a)
      for (std::size_t b = a + 1; b < image.size(); ++b) {
        if (image[a] == image[b]) degenerate = true;
        if (image[a] > image[b]) ++inversions;
      }
    if (degenerate) continue;
    std::vector<std::size_t> sorted = image;
    std::sort(sorted.begin(), sorted.end());
    std::size_t si = detail::index_of(coarse.tuples[p], sorted);
    GroupMap rho = f.group_rho(detail::tuple_meet(fine.cover, t),
                               detail::tuple_meet(coarse.cover, sorted));
    if (inversions % 2 == 1)
      rho = GroupMap(rho.source, rho.target, exactla::negate(rho.matrix));
    blocks.emplace_back(ti, si, rho);
  }
  return exactla::assemble_block_map(coarse.sums[p], fine.sums[p], blocks);
}

// Push a map of cochain groups down to cohomology through representative
// lifts; valid whenever the map sends cycles to cycles and boundaries to
// boundaries, which chain maps do.
inline GroupMap induced_on_cohomology(const CochainComplex& src,
                                      const CochainComplex& tgt,
                                      const GroupMap& level, std::size_t p) {
  exactla::SubquotientData hs = complexes::cohomology_data_at(src, p);
  exactla::SubquotientData ht = complexes::cohomology_data_at(tgt, p);
  IntMatrix m(ht.group.gens(), hs.group.gens());
  for (std::size_t c = 0; c < hs.group.gens(); ++c) {
    std::vector<exactla::Int> rep(level.source.gens());
    for (std::size_t i = 0; i < rep.size(); ++i) rep[i] = hs.lift(i, c);
    std::vector<exactla::Int> coords = ht.project(level.apply_to(rep));
    for (std::size_t r = 0; r < coords.size(); ++r) m(r, c) = coords[r];
  }
  return GroupMap(hs.group, ht.group, std::move(m));
}

// Thm-style refined cohomology: run the Cech complex along a coarse-to-fine
// chain of covers and take the direct limit of each degree over the induced
// maps.
inline std::vector<FgAbGroup> refined_cech_cohomology(const Presheaf& f,
                                                      const std::vector<Cover>& chain,
                                                      std::size_t max_degree) {
  if (chain.empty())
    input_error(ErrorCode::ParseError, "a refinement chain needs at least one cover");
  std::vector<CechComplex> cs;
  for (const Cover& c : chain) cs.push_back(cech_complex(c, f, max_degree));
  std::vector<std::vector<std::size_t>> assigns;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i)
    assigns.push_back(finspace::refine_cover(chain[i], chain[i + 1]));

  std::vector<FgAbGroup> out;
  for (std::size_t p = 0; p <= max_degree; ++p) {
    std::vector<FgAbGroup> objects;
    for (const CechComplex& c : cs)
      objects.push_back(complexes::cohomology_at(c.complex, p));
    std::vector<exactla::DiagramArrow> arrows;
    for (std::size_t i = 0; i + 1 < cs.size(); ++i) {
      GroupMap level = induced_cochain_map(cs[i], cs[i + 1], f, assigns[i], p);
      arrows.push_back(
          {i, i + 1, induced_on_cohomology(cs[i].complex, cs[i + 1].complex, level, p)});
    }
    out.push_back(exactla::direct_limit(objects, arrows).group);
  }
  return out;
}

// The derived-limit complex: degree n sums the stalk values over strict
// specialization chains x_0 < ... < x_n, differential by dropping points,
// with a restriction to the new smallest stalk when the start is dropped.
// For sheaves this computes the right derived functors of global sections.
struct DerivedLimitComplex {
  CochainComplex complex;
  std::vector<std::vector<std::vector<std::size_t>>> chains;  // per degree
  std::vector<BlockSum> sums;
};

namespace detail {

inline void strict_chains(const finspace::FiniteSpace& s, std::size_t size,
                          std::vector<std::size_t>& scratch,
                          std::vector<std::vector<std::size_t>>& out) {
  if (scratch.size() == size) {
    out.push_back(scratch);
    return;
  }
  for (std::size_t x = 0; x < s.point_count(); ++x) {
    if (!scratch.empty() &&
        !(s.below(scratch.back(), x) && scratch.back() != x))
      continue;
    scratch.push_back(x);
    strict_chains(s, size, scratch, out);
    scratch.pop_back();
  }
}

}  // namespace detail

inline DerivedLimitComplex derived_limit_complex(const Presheaf& f,
                                                 std::size_t max_degree) {
  if (f.kind() != sheaf::ValueKind::AbGroup)
    math_error(ErrorCode::WrongValueKind,
               "the derived-limit complex needs a group valued presheaf");
  sheaf::require_presheaf_laws(f);
  const finspace::FiniteSpace& s = f.space();

  DerivedLimitComplex out{complexes::zero_complex(1), {}, {}};
  for (std::size_t n = 0; n <= max_degree; ++n) {
    std::vector<std::vector<std::size_t>> cs;
    std::vector<std::size_t> scratch;
    detail::strict_chains(s, n + 1, scratch, cs);
    std::vector<FgAbGroup> parts;
    for (const auto& c : cs) parts.push_back(f.group_value(s.minimal_open(c[0])));
    out.sums.push_back(exactla::block_sum(parts));
    out.chains.push_back(std::move(cs));
  }

  std::vector<FgAbGroup> groups;
  for (const BlockSum& b : out.sums) groups.push_back(b.group);
  std::vector<GroupMap> diffs;
  for (std::size_t n = 0; n + 1 <= max_degree; ++n) {
    std::vector<std::tuple<std::size_t, std::size_t, GroupMap>> blocks;
    for (std::size_t ti = 0; ti < out.chains[n + 1].size(); ++ti) {
      const std::vector<std::size_t>& c = out.chains[n + 1][ti];
      for (std::size_t k = 0; k < c.size(); ++k) {
        std::vector<std::size_t> d = c;
        d.erase(d.begin() + static_cast<std::ptrdiff_t>(k));
        std::size_t si = detail::index_of(out.chains[n], d);
        GroupMap m = k == 0
                         ? f.group_rho(s.minimal_open(c[0]), s.minimal_open(c[1]))
                         : GroupMap::identity(f.group_value(s.minimal_open(c[0])));
        if (k % 2 == 1) m = GroupMap(m.source, m.target, exactla::negate(m.matrix));
        blocks.emplace_back(ti, si, m);
      }
    }
    diffs.push_back(exactla::assemble_block_map(out.sums[n], out.sums[n + 1], blocks));
  }
  out.complex = CochainComplex(std::move(groups), std::move(diffs));
  return out;
}

inline std::vector<FgAbGroup> derived_limit_cohomology(const Presheaf& f,
                                                       std::size_t max_degree) {
  sheaf::SheafReport rep = sheaf::check_sheaf_axioms(f);
  if (!rep.ok)
    math_error(ErrorCode::NotASheaf,
               "derived-limit cohomology needs a sheaf; " +
                   rep.failures.front().axiom + " fails on " +
                   f.space().set_label(rep.failures.front().open));
  DerivedLimitComplex d = derived_limit_complex(f, max_degree);
  std::vector<FgAbGroup> h;
  for (std::size_t n = 0; n <= max_degree; ++n)
    h.push_back(complexes::cohomology_at(d.complex, n));
  return h;
}

enum class Mode { Sheaf, Cech };
enum class Assembly { Rows, Hpq, Total };

struct StructuredResult {
  Assembly assembly = Assembly::Rows;
  // rows and hpq carry one row per family member; total a single row of
  // merged degrees
  std::vector<std::vector<FgAbGroup>> table;
};

// The decompose, sheafify, compute, reassemble pipeline for structured
// presheaves whose members are all group valued.
inline StructuredResult structured_cohomology(
    const Presheaf& f, Mode mode, const complexes::VerticalFamily& verticals,
    Assembly assembly, std::size_t max_degree,
    const std::vector<Cover>& cover_chain = {}) {
  std::vector<Presheaf> comps = sheaf::decompose_structured(f);
  for (std::size_t p = 0; p < comps.size(); ++p)
    if (comps[p].kind() != sheaf::ValueKind::AbGroup)
      math_error(ErrorCode::WrongValueKind,
                 "member " + std::to_string(p + 1) +
                     " is ring valued; cohomology needs group members");
  std::vector<Presheaf> sheaves;
  for (const Presheaf& c : comps) sheaves.push_back(sheaf::sheafify(c));

  StructuredResult out;
  out.assembly = assembly;

  if (mode == Mode::Cech) {
    if (cover_chain.empty())
      input_error(ErrorCode::OptionConflict, "mode cech needs a cover chain");
    if (!verticals.is_trivial())
      input_error(ErrorCode::OptionConflict,
                  "mode cech supports only the trivial vertical family");
    std::vector<std::vector<FgAbGroup>> rows;
    for (const Presheaf& sh : sheaves)
      rows.push_back(refined_cech_cohomology(sh, cover_chain, max_degree));
    if (assembly == Assembly::Total) {
      std::vector<FgAbGroup> tot;
      for (std::size_t n = 0; n <= max_degree; ++n) {
        std::vector<FgAbGroup> parts;
        for (std::size_t p = 0; p < rows.size() && p <= n; ++p)
          parts.push_back(rows[p][n - p]);
        tot.push_back(exactla::block_sum(parts).group);
      }
      out.table.push_back(std::move(tot));
    } else {
      out.table = std::move(rows);
    }
    return out;
  }

  std::vector<CochainComplex> rows;
  for (const Presheaf& sh : sheaves)
    rows.push_back(derived_limit_complex(sh, max_degree).complex);
  complexes::ComplexGrid grid = complexes::assemble_grid(rows, verticals);
  if (assembly == Assembly::Total) {
    out.table.push_back(complexes::total_cohomology(grid, max_degree));
  } else {
    out.table = complexes::grid_cohomologies(grid);
  }
  return out;
}

}  // namespace structura::cohom
