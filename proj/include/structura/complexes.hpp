#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "structura/abelian.hpp"
#include "structura/errors.hpp"

namespace structura::complexes {

using exactla::FgAbGroup;
using exactla::GroupMap;

// A finitely truncated cochain complex: groups in degrees 0..length-1 with a
// differential per consecutive pair.  Outside the truncation everything is
// zero, so top-degree cohomology is a plain cokernel.
struct CochainComplex {
  std::vector<FgAbGroup> groups;
  std::vector<GroupMap> diffs;  // diffs[k] maps groups[k] into groups[k+1]

  CochainComplex(std::vector<FgAbGroup> gs, std::vector<GroupMap> ds)
      : groups(std::move(gs)), diffs(std::move(ds)) {
    if (groups.empty())
      input_error(ErrorCode::ParseError, "a complex needs at least one degree");
    if (diffs.size() + 1 != groups.size())
      math_error(ErrorCode::ShapeMismatch,
                 "expected " + std::to_string(groups.size() - 1) +
                     " differentials, got " + std::to_string(diffs.size()));
    for (std::size_t k = 0; k < diffs.size(); ++k)
      if (!(diffs[k].source == groups[k] && diffs[k].target == groups[k + 1]))
        math_error(ErrorCode::ShapeMismatch,
                   "differential at degree " + std::to_string(k) +
                       " does not match its endpoint groups");
    for (std::size_t k = 0; k + 1 < diffs.size(); ++k)
      if (!compose(diffs[k + 1], diffs[k]).is_zero())
        math_error(ErrorCode::RowNotAComplex,
                   "d o d is nonzero between degrees " + std::to_string(k) +
                       " and " + std::to_string(k + 2));
  }

  std::size_t length() const { return groups.size(); }

  const FgAbGroup& group_at(std::size_t k) const {
    static const FgAbGroup zero = FgAbGroup::trivial();
    return k < groups.size() ? groups[k] : zero;
  }

  GroupMap outgoing(std::size_t k) const {
    if (k < diffs.size()) return diffs[k];
    return GroupMap::zero(group_at(k), FgAbGroup::trivial());
  }

  GroupMap incoming(std::size_t k) const {
    if (k >= 1 && k - 1 < diffs.size()) return diffs[k - 1];
    return GroupMap::zero(FgAbGroup::trivial(), group_at(k));
  }

  bool operator==(const CochainComplex&) const = default;
};

inline CochainComplex zero_complex(std::size_t length) {
  std::vector<FgAbGroup> gs(length == 0 ? 1 : length, FgAbGroup::trivial());
  std::vector<GroupMap> ds(gs.size() - 1,
                           GroupMap::zero(FgAbGroup::trivial(), FgAbGroup::trivial()));
  return CochainComplex(std::move(gs), std::move(ds));
}

inline exactla::SubquotientData cohomology_data_at(const CochainComplex& c,
                                                   std::size_t k) {
  return exactla::subquotient_data(c.outgoing(k), c.incoming(k));
}

inline FgAbGroup cohomology_at(const CochainComplex& c, std::size_t k) {
  if (k >= c.length()) return FgAbGroup::trivial();
  return exactla::subquotient(c.outgoing(k), c.incoming(k));
}

inline std::vector<FgAbGroup> cohomology(const CochainComplex& c) {
  std::vector<FgAbGroup> h;
  for (std::size_t k = 0; k < c.length(); ++k) h.push_back(cohomology_at(c, k));
  return h;
}

// Vertical maps between consecutive rows of a grid; an empty map table is
// the always admissible trivial family of zero maps.
struct VerticalFamily {
  std::vector<std::vector<GroupMap>> maps;  // maps[r][c]: row r -> row r+1 at column c

  bool is_trivial() const { return maps.empty(); }
  static VerticalFamily trivial() { return {}; }
  static VerticalFamily given(std::vector<std::vector<GroupMap>> m) {
    return {std::move(m)};
  }
};

// Rows of cochain complexes joined by a vertical family.  Stored verticals
// anticommute with the horizontal differentials around every square, which
// is exactly what makes the merged total differential square to zero.  A
// commuting family becomes admissible through the sign_twist flag, which
// multiplies the column c maps by (-1)^c on the way in.
struct ComplexGrid {
  std::vector<CochainComplex> rows;
  std::vector<std::vector<GroupMap>> verts;  // rows.size()-1 entries, one per column
  std::size_t columns = 0;
};

inline ComplexGrid assemble_grid(std::vector<CochainComplex> rows,
                                 const VerticalFamily& family,
                                 bool sign_twist = false) {
  if (rows.empty())
    input_error(ErrorCode::ParseError, "a grid needs at least one row");
  std::size_t columns = 0;
  for (const CochainComplex& r : rows) columns = std::max(columns, r.length());

  if (family.is_trivial()) {
    // ragged rows are fine here: pad with zero degrees
    for (CochainComplex& r : rows) {
      std::vector<FgAbGroup> gs = r.groups;
      std::vector<GroupMap> ds = r.diffs;
      while (gs.size() < columns) {
        gs.push_back(FgAbGroup::trivial());
        ds.push_back(GroupMap::zero(gs[gs.size() - 2], gs.back()));
      }
      r = CochainComplex(std::move(gs), std::move(ds));
    }
    ComplexGrid g{std::move(rows), {}, columns};
    for (std::size_t r = 0; r + 1 < g.rows.size(); ++r) {
      std::vector<GroupMap> zeros;
      for (std::size_t c = 0; c < columns; ++c)
        zeros.push_back(GroupMap::zero(g.rows[r].group_at(c), g.rows[r + 1].group_at(c)));
      g.verts.push_back(std::move(zeros));
    }
    return g;
  }

  for (const CochainComplex& r : rows)
    if (r.length() != columns)
      math_error(ErrorCode::VerticalShapeMismatch,
                 "a nontrivial vertical family needs rows of equal length");
  if (family.maps.size() + 1 != rows.size())
    math_error(ErrorCode::VerticalShapeMismatch,
               "expected " + std::to_string(rows.size() - 1) +
                   " vertical map rows, got " + std::to_string(family.maps.size()));
  ComplexGrid g{std::move(rows), family.maps, columns};
  for (std::size_t r = 0; r < g.verts.size(); ++r) {
    if (g.verts[r].size() != columns)
      math_error(ErrorCode::VerticalShapeMismatch,
                 "vertical maps below row " + std::to_string(r) + " cover " +
                     std::to_string(g.verts[r].size()) + " of " +
                     std::to_string(columns) + " columns");
    for (std::size_t c = 0; c < columns; ++c) {
      GroupMap& v = g.verts[r][c];
      if (!(v.source == g.rows[r].group_at(c) && v.target == g.rows[r + 1].group_at(c)))
        math_error(ErrorCode::VerticalShapeMismatch,
                   "vertical map at row " + std::to_string(r) + ", column " +
                       std::to_string(c) + " does not match the grid groups");
      if (sign_twist && c % 2 == 1)
        v = GroupMap(v.source, v.target, exactla::negate(v.matrix));
    }
  }
  for (std::size_t r = 0; r + 1 < g.rows.size(); ++r)
    for (std::size_t c = 0; c + 1 < columns; ++c) {
      GroupMap via_h = compose(g.verts[r][c + 1], g.rows[r].diffs[c]);
      GroupMap via_v = compose(g.rows[r + 1].diffs[c], g.verts[r][c]);
      GroupMap sum(via_h.source, via_h.target,
                   exactla::add(via_h.matrix, via_v.matrix));
      if (!sum.is_zero())
        math_error(ErrorCode::AnticommutationFails,
                   "square (" + std::to_string(r) + "," + std::to_string(c) +
                       ") does not anticommute");
    }
  return g;
}

// Horizontal cohomology at every grid position, rows first.
inline std::vector<std::vector<FgAbGroup>> grid_cohomologies(const ComplexGrid& g) {
  std::vector<std::vector<FgAbGroup>> table;
  for (const CochainComplex& r : g.rows) table.push_back(cohomology(r));
  return table;
}

// The merged single complex: degree N sums the positions with r + c = N and
// the differential applies horizontal and vertical maps at once.
inline CochainComplex total_complex(const ComplexGrid& g) {
  using namespace exactla;
  const std::size_t nrows = g.rows.size();
  const std::size_t top = nrows - 1 + g.columns - 1;

  std::vector<BlockSum> sums;
  std::vector<std::vector<std::size_t>> rows_at;  // which r contributes to degree N
  for (std::size_t n = 0; n <= top; ++n) {
    std::vector<FgAbGroup> parts;
    std::vector<std::size_t> rs;
    for (std::size_t r = 0; r < nrows; ++r) {
      if (n < r || n - r >= g.columns) continue;
      parts.push_back(g.rows[r].group_at(n - r));
      rs.push_back(r);
    }
    sums.push_back(block_sum(parts));
    rows_at.push_back(std::move(rs));
  }

  std::vector<FgAbGroup> groups;
  for (const BlockSum& b : sums) groups.push_back(b.group);
  std::vector<GroupMap> diffs;
  for (std::size_t n = 0; n + 1 <= top; ++n) {
    std::vector<std::tuple<std::size_t, std::size_t, GroupMap>> blocks;
    for (std::size_t i = 0; i < rows_at[n].size(); ++i) {
      std::size_t r = rows_at[n][i], c = n - rows_at[n][i];
      if (c + 1 < g.columns) {
        std::size_t ti = std::find(rows_at[n + 1].begin(), rows_at[n + 1].end(), r) -
                         rows_at[n + 1].begin();
        blocks.emplace_back(ti, i, g.rows[r].diffs[c]);
      }
      if (r + 1 < nrows) {
        std::size_t ti = std::find(rows_at[n + 1].begin(), rows_at[n + 1].end(), r + 1) -
                         rows_at[n + 1].begin();
        blocks.emplace_back(ti, i, g.verts[r][c]);
      }
    }
    diffs.push_back(assemble_block_map(sums[n], sums[n + 1], blocks));
  }
  return CochainComplex(std::move(groups), std::move(diffs));
}

inline std::vector<FgAbGroup> total_cohomology(const ComplexGrid& g,
                                               std::size_t max_degree) {
  const std::size_t top = g.rows.size() - 1 + g.columns - 1;
  if (max_degree > top)
    math_error(ErrorCode::TruncationExceeded,
               "degree " + std::to_string(max_degree) + " lies beyond the grid, " +
                   "which stops at total degree " + std::to_string(top));
  CochainComplex tot = total_complex(g);
  std::vector<FgAbGroup> h;
  for (std::size_t n = 0; n <= max_degree; ++n) h.push_back(cohomology_at(tot, n));
  return h;
}

}  // namespace structura::complexes
