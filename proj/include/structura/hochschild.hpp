#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "structura/cohom.hpp"
#include "structura/errors.hpp"
#include "structura/field.hpp"
#include "structura/ringspec.hpp"

namespace structura::hochschild {

using exactla::ExactField;
using exactla::FieldMatrix;
using exactla::Rat;
using finspace::Mask;
using ringspec::FiniteRing;
using sheaf::Presheaf;

// A finite dimensional unital associative algebra over an exact field, held
// as structure constants: e_i e_j = sum_k c[i][j][k] e_k.
struct FiniteDimAlgebra {
  ExactField field;
  std::size_t dim = 0;
  std::vector<Rat> structure;  // c[i][j][k] flattened with k fastest
  std::vector<Rat> unit;       // coordinates of 1

  const Rat& c(std::size_t i, std::size_t j, std::size_t k) const {
    return structure[(i * dim + j) * dim + k];
  }

  std::vector<Rat> multiply(const std::vector<Rat>& x,
                            const std::vector<Rat>& y) const {
    std::vector<Rat> z(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      if (x[i] == 0) continue;
      for (std::size_t j = 0; j < dim; ++j) {
        if (y[j] == 0) continue;
        for (std::size_t k = 0; k < dim; ++k)
          z[k] = field.add(z[k], field.mul(field.mul(x[i], y[j]), c(i, j, k)));
      }
    }
    return z;
  }

  static FiniteDimAlgebra make(ExactField field, std::size_t dim,
                               std::vector<Rat> structure,
                               std::vector<Rat> unit) {
    if (dim == 0)
      input_error(ErrorCode::ParseError, "an algebra needs at least one basis element");
    if (structure.size() != dim * dim * dim || unit.size() != dim)
      math_error(ErrorCode::ShapeMismatch,
                 "structure constants for dimension " + std::to_string(dim) +
                     " need " + std::to_string(dim * dim * dim) +
                     " entries and a unit vector of length " + std::to_string(dim));
    for (Rat& x : structure) x = field.normalize(x);
    for (Rat& x : unit) x = field.normalize(x);
    FiniteDimAlgebra a{field, dim, std::move(structure), std::move(unit)};

    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        for (std::size_t k = 0; k < dim; ++k)
          for (std::size_t m = 0; m < dim; ++m) {
            Rat left = 0, right = 0;
            for (std::size_t l = 0; l < dim; ++l) {
              left = field.add(left, field.mul(a.c(i, j, l), a.c(l, k, m)));
              right = field.add(right, field.mul(a.c(j, k, l), a.c(i, l, m)));
            }
            if (left != right)
              math_error(ErrorCode::NotAssociative,
                         "associativity fails at basis triple (" +
                             std::to_string(i) + ", " + std::to_string(j) +
                             ", " + std::to_string(k) + ")");
          }
    for (std::size_t j = 0; j < dim; ++j)
      for (std::size_t m = 0; m < dim; ++m) {
        Rat want = j == m ? 1 : 0;
        Rat left = 0, right = 0;
        for (std::size_t l = 0; l < dim; ++l) {
          left = field.add(left, field.mul(a.unit[l], a.c(l, j, m)));
          right = field.add(right, field.mul(a.unit[l], a.c(j, l, m)));
        }
        if (left != want || right != want)
          math_error(ErrorCode::NotAssociative,
                     "the unit vector is not a two sided unit at basis element " +
                         std::to_string(j));
      }
    return a;
  }

  bool operator==(const FiniteDimAlgebra&) const = default;
};

// A finitely truncated cochain complex of field vector spaces: dimensions in
// degrees 0..length-1 with a matrix differential per consecutive pair.
struct FieldComplex {
  ExactField field;
  std::vector<std::size_t> dims;
  std::vector<FieldMatrix> deltas;  // deltas[k] maps degree k into degree k+1

  bool operator==(const FieldComplex&) const = default;
};

inline FieldComplex make_field_complex(ExactField field,
                                       std::vector<std::size_t> dims,
                                       std::vector<FieldMatrix> deltas) {
  if (dims.empty())
    input_error(ErrorCode::ParseError, "a complex needs at least one degree");
  if (deltas.size() + 1 != dims.size())
    math_error(ErrorCode::ShapeMismatch,
               "expected " + std::to_string(dims.size() - 1) +
                   " differentials, got " + std::to_string(deltas.size()));
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (!(deltas[k].field == field))
      math_error(ErrorCode::MixedCharacteristic,
                 "differential at degree " + std::to_string(k) +
                     " lives over the wrong field");
    if (deltas[k].cols != dims[k] || deltas[k].rows != dims[k + 1])
      math_error(ErrorCode::ShapeMismatch,
                 "differential at degree " + std::to_string(k) +
                     " does not match its endpoint dimensions");
  }
  for (std::size_t k = 0; k + 1 < deltas.size(); ++k)
    if (!mul(deltas[k + 1], deltas[k]).is_zero())
      math_error(ErrorCode::CompositionNotZero,
                 "d o d is nonzero between degrees " + std::to_string(k) +
                     " and " + std::to_string(k + 2));
  return {field, std::move(dims), std::move(deltas)};
}

// Cohomology dimensions in degrees 0..through; the complex must extend one
// degree further so every requested degree still sees its outgoing map.
inline std::vector<long> cohomology_dims(const FieldComplex& x, std::size_t through) {
  if (through + 2 > x.dims.size())
    math_error(ErrorCode::TruncationExceeded,
               "degree " + std::to_string(through) + " needs the complex through degree " +
                   std::to_string(through + 1) + ", but it stops at degree " +
                   std::to_string(x.dims.size() - 1));
  std::vector<long> h;
  for (std::size_t n = 0; n <= through; ++n) {
    FieldMatrix d_in = n > 0 ? x.deltas[n - 1] : FieldMatrix(x.field, x.dims[0], 0);
    h.push_back(exactla::field_cohomology_dim(x.dims[n], x.deltas[n], d_in));
  }
  return h;
}

namespace detail {

inline std::size_t power(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) out *= base;
  return out;
}

inline FieldMatrix mat_add(const FieldMatrix& x, const FieldMatrix& y) {
  FieldMatrix z = x;
  for (std::size_t i = 0; i < z.a.size(); ++i) z.a[i] = z.field.add(z.a[i], y.a[i]);
  return z;
}

}  // namespace detail

// The degree n coboundary on Hom(A^{tensor n}, A).  A basis cochain is an
// input tuple t together with an output basis index b, flattened with b last;
// the alternating sum multiplies on the left, merges consecutive inputs, and
// multiplies on the right with sign (-1)^(n+1).
inline FieldMatrix hochschild_delta(const FiniteDimAlgebra& a, std::size_t n) {
  const std::size_t d = a.dim;
  FieldMatrix out(a.field, detail::power(d, n + 2), detail::power(d, n + 1));
  auto encode = [&](const std::vector<std::size_t>& s, std::size_t b) {
    std::size_t r = 0;
    for (std::size_t x : s) r = r * d + x;
    return r * d + b;
  };
  auto put = [&](std::size_t row, std::size_t col, const Rat& v) {
    out(row, col) = out.field.add(out(row, col), v);
  };
  for (std::size_t col = 0; col < out.cols; ++col) {
    const std::size_t b = col % d;
    std::vector<std::size_t> t(n);
    for (std::size_t i = n, rem = col / d; i-- > 0; rem /= d) t[i] = rem % d;

    std::vector<std::size_t> s(n + 1);
    for (std::size_t x = 0; x < d; ++x) {
      s[0] = x;
      std::copy(t.begin(), t.end(), s.begin() + 1);
      for (std::size_t m = 0; m < d; ++m) put(encode(s, m), col, a.c(x, b, m));
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < i; ++j) s[j] = t[j];
      for (std::size_t j = i + 2; j <= n; ++j) s[j] = t[j - 1];
      for (std::size_t u = 0; u < d; ++u)
        for (std::size_t v = 0; v < d; ++v) {
          s[i] = u;
          s[i + 1] = v;
          Rat coeff = a.c(u, v, t[i]);
          put(encode(s, b), col, i % 2 == 0 ? Rat(-coeff) : coeff);
        }
    }
    std::copy(t.begin(), t.end(), s.begin());
    for (std::size_t y = 0; y < d; ++y) {
      s[n] = y;
      for (std::size_t m = 0; m < d; ++m) {
        Rat coeff = a.c(b, y, m);
        put(encode(s, m), col, n % 2 == 0 ? Rat(-coeff) : coeff);
      }
    }
  }
  return out;
}

// The Hochschild cochain complex through degree max_degree + 1, so that
// cohomology_dims can answer up to max_degree.
inline FieldComplex hochschild_complex(const FiniteDimAlgebra& a,
                                       std::size_t max_degree,
                                       std::size_t degree_bound = 3) {
  if (max_degree > degree_bound)
    math_error(ErrorCode::DegreeTooLarge,
               "Hochschild degree " + std::to_string(max_degree) +
                   " exceeds the bound " + std::to_string(degree_bound));
  std::vector<std::size_t> dims;
  for (std::size_t n = 0; n <= max_degree + 1; ++n)
    dims.push_back(detail::power(a.dim, n + 1));
  if (a.dim > 1 && dims.back() * dims[dims.size() - 2] > (std::size_t{1} << 21))
    math_error(ErrorCode::TooLarge,
               "the top coboundary would hold " +
                   std::to_string(dims.back() * dims[dims.size() - 2]) +
                   " cells, over the 2097152 cap");
  std::vector<FieldMatrix> deltas;
  for (std::size_t n = 0; n <= max_degree; ++n)
    deltas.push_back(hochschild_delta(a, n));
  return make_field_complex(a.field, std::move(dims), std::move(deltas));
}

inline std::vector<long> hochschild_cohomology(const FiniteDimAlgebra& a,
                                               std::size_t max_degree,
                                               std::size_t degree_bound = 3) {
  return cohomology_dims(hochschild_complex(a, max_degree, degree_bound), max_degree);
}

// A finite ring of prime characteristic p is a vector space over F_p; pick a
// greedy basis and read the multiplication off as structure constants.
inline FiniteDimAlgebra section_algebra(const FiniteRing& r) {
  const int p = r.characteristic();
  if (!exactla::is_prime(exactla::Int(p)))
    math_error(ErrorCode::SectionRingNotAlgebra,
               "characteristic " + std::to_string(p) +
                   " is not prime, so the ring is not an algebra over a prime field");
  ExactField field = ExactField::prime_field(p);

  std::vector<int> basis;
  std::map<int, std::vector<Rat>> coords;
  auto enumerate = [&]() {
    coords.clear();
    coords.emplace(r.zero(), std::vector<Rat>(basis.size()));
    for (std::size_t bi = 0; bi < basis.size(); ++bi) {
      std::map<int, std::vector<Rat>> next = coords;
      for (const auto& [e, co] : coords) {
        int acc = e;
        for (int k = 1; k < p; ++k) {
          acc = r.add(acc, basis[bi]);
          std::vector<Rat> c2 = co;
          c2[bi] = k;
          require_invariant(next.emplace(acc, std::move(c2)).second,
                            "the additive group is not free over the chosen basis");
        }
      }
      coords = std::move(next);
    }
  };
  enumerate();
  for (int x = 0; x < static_cast<int>(r.size()); ++x) {
    if (coords.count(x)) continue;
    basis.push_back(x);
    enumerate();
  }
  require_invariant(coords.size() == r.size(),
                    "the basis does not span the additive group");

  const std::size_t dim = basis.size();
  std::vector<Rat> structure(dim * dim * dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      const std::vector<Rat>& co = coords.at(r.mul(basis[i], basis[j]));
      for (std::size_t k = 0; k < dim; ++k) structure[(i * dim + j) * dim + k] = co[k];
    }
  return FiniteDimAlgebra::make(field, dim, std::move(structure), coords.at(r.one()));
}

// Vertical matrices between consecutive rows of a field grid; an empty table
// is the always admissible trivial family of zero maps.
struct FieldVerticalFamily {
  std::vector<std::vector<FieldMatrix>> maps;  // maps[r][c]: row r -> row r+1 at column c

  bool is_trivial() const { return maps.empty(); }
  static FieldVerticalFamily trivial() { return {}; }
  static FieldVerticalFamily given(std::vector<std::vector<FieldMatrix>> m) {
    return {std::move(m)};
  }
};

// Rows of field complexes joined by a vertical family; stored verticals
// anticommute with the horizontal differentials, and sign_twist multiplies
// the column c maps by (-1)^c on the way in for a commuting family.
struct FieldGrid {
  std::vector<FieldComplex> rows;
  std::vector<std::vector<FieldMatrix>> verts;  // rows.size()-1 entries, one per column
  std::size_t columns = 0;
};

inline FieldGrid assemble_field_grid(std::vector<FieldComplex> rows,
                                     const FieldVerticalFamily& family,
                                     bool sign_twist = false) {
  if (rows.empty())
    input_error(ErrorCode::ParseError, "a grid needs at least one row");
  for (const FieldComplex& r : rows)
    if (!(r.field == rows.front().field))
      math_error(ErrorCode::MixedCharacteristic, "grid rows live over different fields");
  std::size_t columns = 0;
  for (const FieldComplex& r : rows) columns = std::max(columns, r.dims.size());

  if (family.is_trivial()) {
    for (FieldComplex& r : rows)
      while (r.dims.size() < columns) {
        r.deltas.emplace_back(r.field, 0, r.dims.back());
        r.dims.push_back(0);
      }
    FieldGrid g{std::move(rows), {}, columns};
    for (std::size_t r = 0; r + 1 < g.rows.size(); ++r) {
      std::vector<FieldMatrix> zeros;
      for (std::size_t c = 0; c < columns; ++c)
        zeros.emplace_back(g.rows[r].field, g.rows[r + 1].dims[c], g.rows[r].dims[c]);
      g.verts.push_back(std::move(zeros));
    }
    return g;
  }

  for (const FieldComplex& r : rows)
    if (r.dims.size() != columns)
      math_error(ErrorCode::VerticalShapeMismatch,
                 "a nontrivial vertical family needs rows of equal length");
  if (family.maps.size() + 1 != rows.size())
    math_error(ErrorCode::VerticalShapeMismatch,
               "expected " + std::to_string(rows.size() - 1) +
                   " vertical map rows, got " + std::to_string(family.maps.size()));
  FieldGrid g{std::move(rows), family.maps, columns};
  for (std::size_t r = 0; r < g.verts.size(); ++r) {
    if (g.verts[r].size() != columns)
      math_error(ErrorCode::VerticalShapeMismatch,
                 "vertical maps below row " + std::to_string(r) + " cover " +
                     std::to_string(g.verts[r].size()) + " of " +
                     std::to_string(columns) + " columns");
    for (std::size_t c = 0; c < columns; ++c) {
      FieldMatrix& v = g.verts[r][c];
      if (!(v.field == g.rows[r].field))
        math_error(ErrorCode::MixedCharacteristic,
                   "vertical map at row " + std::to_string(r) + ", column " +
                       std::to_string(c) + " lives over the wrong field");
      if (v.cols != g.rows[r].dims[c] || v.rows != g.rows[r + 1].dims[c])
        math_error(ErrorCode::VerticalShapeMismatch,
                   "vertical map at row " + std::to_string(r) + ", column " +
                       std::to_string(c) + " does not match the grid dimensions");
      if (sign_twist && c % 2 == 1)
        for (Rat& x : v.a) x = v.field.mul(x, Rat(-1));
    }
  }
  for (std::size_t r = 0; r + 1 < g.rows.size(); ++r)
    for (std::size_t c = 0; c + 1 < columns; ++c) {
      FieldMatrix via_h = mul(g.verts[r][c + 1], g.rows[r].deltas[c]);
      FieldMatrix via_v = mul(g.rows[r + 1].deltas[c], g.verts[r][c]);
      if (!detail::mat_add(via_h, via_v).is_zero())
        math_error(ErrorCode::AnticommutationFails,
                   "square (" + std::to_string(r) + "," + std::to_string(c) +
                       ") does not anticommute");
    }
  return g;
}

// Cohomology dimensions of the merged single complex in degrees
// 0..max_degree.  The rows are truncations, so every requested degree must
// see all its outgoing horizontal maps.
inline std::vector<long> total_field_cohomology(const FieldGrid& g,
                                                std::size_t max_degree) {
  const std::size_t nrows = g.rows.size();
  if (max_degree + 2 > g.columns)
    math_error(ErrorCode::TruncationExceeded,
               "total degree " + std::to_string(max_degree) +
                   " needs row degrees through " + std::to_string(max_degree + 1) +
                   ", but the rows stop at degree " + std::to_string(g.columns - 1));
  const ExactField field = g.rows.front().field;

  auto rows_at = [&](std::size_t n) {
    std::vector<std::size_t> rs;
    for (std::size_t r = 0; r < nrows && r <= n; ++r)
      if (n - r < g.columns) rs.push_back(r);
    return rs;
  };
  auto dim_at = [&](std::size_t n) {
    std::size_t s = 0;
    for (std::size_t r : rows_at(n)) s += g.rows[r].dims[n - r];
    return s;
  };
  auto merged = [&](std::size_t n) {
    FieldMatrix big(field, dim_at(n + 1), dim_at(n));
    std::map<std::size_t, std::size_t> dst_off;
    std::size_t off = 0;
    for (std::size_t r : rows_at(n + 1)) {
      dst_off[r] = off;
      off += g.rows[r].dims[n + 1 - r];
    }
    std::size_t src_off = 0;
    for (std::size_t r : rows_at(n)) {
      const std::size_t c = n - r;
      auto paste = [&](const FieldMatrix& blk, std::size_t row0) {
        for (std::size_t i = 0; i < blk.rows; ++i)
          for (std::size_t j = 0; j < blk.cols; ++j)
            big(row0 + i, src_off + j) = blk(i, j);
      };
      if (c + 1 < g.columns) paste(g.rows[r].deltas[c], dst_off.at(r));
      if (r + 1 < nrows) paste(g.verts[r][c], dst_off.at(r + 1));
      src_off += g.rows[r].dims[c];
    }
    return big;
  };

  std::vector<long> h;
  FieldMatrix d_in(field, dim_at(0), 0);
  for (std::size_t n = 0; n <= max_degree; ++n) {
    FieldMatrix d_out = merged(n);
    h.push_back(exactla::field_cohomology_dim(dim_at(n), d_out, d_in));
    d_in = std::move(d_out);
  }
  return h;
}

struct StructuredHochschild {
  cohom::Assembly assembly = cohom::Assembly::Rows;
  std::vector<FiniteDimAlgebra> algebras;  // section algebra per family member
  // rows and hpq carry one row of dimensions per member; total a single row
  std::vector<std::vector<long>> table;
};

// Decompose, sheafify each ring member, take global sections as algebras
// over a common prime field, and reassemble the Hochschild rows.  The
// disjoint union carries one base copy per member, so its per copy sections
// must reproduce the member rows; that route is cross checked every time.
inline StructuredHochschild structured_hochschild(
    const Presheaf& f, const FieldVerticalFamily& verticals,
    cohom::Assembly assembly, std::size_t max_degree,
    std::size_t degree_bound = 3, std::size_t max_elements = 64) {
  std::vector<Presheaf> comps = ringspec::decompose_ring_members(f);
  const Mask full = f.space().full_mask();

  StructuredHochschild out;
  out.assembly = assembly;
  for (std::size_t p = 0; p < comps.size(); ++p) {
    FiniteRing gamma =
        ringspec::sheafify_ring(comps[p], max_elements).result.ring_value(full);
    if (!exactla::is_prime(exactla::Int(gamma.characteristic())))
      math_error(ErrorCode::SectionRingNotAlgebra,
                 "member " + std::to_string(p + 1) +
                     " has global sections of characteristic " +
                     std::to_string(gamma.characteristic()) + ", which is not prime");
    out.algebras.push_back(section_algebra(gamma));
    if (!(out.algebras[p].field == out.algebras[0].field))
      math_error(ErrorCode::MixedCharacteristic,
                 "member 1 lives over " + out.algebras[0].field.name() +
                     " but member " + std::to_string(p + 1) + " lives over " +
                     out.algebras[p].field.name());
  }

  std::vector<FieldComplex> rows;
  for (const FiniteDimAlgebra& a : out.algebras)
    rows.push_back(hochschild_complex(a, max_degree, degree_bound));
  FieldGrid grid = assemble_field_grid(rows, verticals);

  ringspec::DisjointUnion du = ringspec::disjoint_union_assembly(f, max_elements);
  for (std::size_t p = 0; p < comps.size(); ++p) {
    FiniteDimAlgebra au =
        section_algebra(du.total.structure.ring_value(du.copy_masks[p]));
    require_invariant(hochschild_cohomology(au, max_degree, degree_bound) ==
                          cohomology_dims(rows[p], max_degree),
                      "the disjoint union route disagrees with member " +
                          std::to_string(p + 1));
  }

  if (assembly == cohom::Assembly::Total) {
    out.table.push_back(total_field_cohomology(grid, max_degree));
  } else {
    for (const FieldComplex& r : rows) out.table.push_back(cohomology_dims(r, max_degree));
  }
  return out;
}

}  // namespace structura::hochschild
