#include "structura/hochschild.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <functional>
#include <vector>

#include "oracle.hpp"
#include "spaces.hpp"

using namespace structura;
using namespace structura::hochschild;
using exactla::ExactField;
using exactla::FieldMatrix;
using exactla::Rat;
using finspace::FiniteSpace;
using finspace::Mask;
using ringspec::FiniteRing;
using sheaf::Morphism;
using sheaf::Presheaf;
using sheaf::Value;
using sheaf::ValueKind;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvariantViolation;
}

// Q[x]/(f) for monic f = x^n + lower[n-1] x^(n-1) + ... + lower[0]
FiniteDimAlgebra poly_algebra(const std::vector<long>& lower) {
  const std::size_t n = lower.size();
  std::vector<std::vector<Rat>> red;  // coordinates of x^m, m <= 2n-2
  for (std::size_t m = 0; m < n; ++m) {
    std::vector<Rat> e(n);
    e[m] = 1;
    red.push_back(e);
  }
  for (std::size_t m = n; n >= 2 && m <= 2 * n - 2; ++m) {
    const std::vector<Rat>& prev = red[m - 1];
    std::vector<Rat> next(n);
    for (std::size_t k = 0; k + 1 < n; ++k) next[k + 1] = prev[k];
    for (std::size_t k = 0; k < n; ++k) next[k] -= prev[n - 1] * lower[k];
    red.push_back(std::move(next));
  }
  std::vector<Rat> structure(n * n * n), unit(n);
  unit[0] = 1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        structure[(i * n + j) * n + k] = red[i + j][k];
  return FiniteDimAlgebra::make(ExactField::rationals(), n, std::move(structure),
                                std::move(unit));
}

// basis e11, e12, e22 of the upper triangular 2x2 matrices
std::vector<Rat> upper_triangular_structure() {
  std::vector<Rat> structure(27);
  auto set = [&](std::size_t i, std::size_t j, std::size_t k) {
    structure[(i * 3 + j) * 3 + k] = 1;
  };
  set(0, 0, 0);  // e11 e11 = e11
  set(0, 1, 1);  // e11 e12 = e12
  set(1, 2, 1);  // e12 e22 = e12
  set(2, 2, 2);  // e22 e22 = e22
  return structure;
}

FiniteDimAlgebra upper_triangular() {
  return FiniteDimAlgebra::make(ExactField::rationals(), 3,
                                upper_triangular_structure(), {1, 0, 1});
}

// Z/2[x]/(x^2): elements 0, 1, x, 1+x with Klein addition
FiniteRing dual_numbers_mod2() {
  return FiniteRing::from_tables(
      {"0", "1", "x", "1+x"},
      {0, 1, 2, 3, 1, 0, 3, 2, 2, 3, 0, 1, 3, 2, 1, 0},
      {0, 0, 0, 0, 0, 1, 2, 3, 0, 2, 0, 2, 0, 3, 2, 1});
}

// the field with four elements, a^2 = a+1
FiniteRing gf4() {
  return FiniteRing::from_tables(
      {"0", "1", "a", "a+1"},
      {0, 1, 2, 3, 1, 0, 3, 2, 2, 3, 0, 1, 3, 2, 1, 0},
      {0, 0, 0, 0, 0, 1, 2, 3, 0, 2, 3, 1, 0, 3, 1, 2});
}

Presheaf constant_ring(const FiniteSpace& s, const FiniteRing& r) {
  std::map<Mask, Value> values;
  std::map<std::pair<Mask, Mask>, Morphism> rho;
  for (Mask u : s.opens()) {
    if (u == 0) continue;
    values.emplace(u, r);
    for (Mask v : s.opens())
      if (v != 0 && v != u && (u & ~v) == 0)
        rho.emplace(std::make_pair(u, v), ringspec::RingMap::identity(r));
  }
  return Presheaf(s, ValueKind::RingFamily, std::move(values), rho);
}

FieldMatrix from_rows(ExactField f, const std::vector<std::vector<long>>& rows) {
  FieldMatrix m(f, rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) m(i, j) = rows[i][j];
  return m;
}

using oracle::Big;

// an invertible integer change of basis and its inverse, built from random
// row operations so both stay integral
struct Uni {
  std::vector<std::vector<Big>> p, pinv;
};

unsigned advance(unsigned& state) {
  state = state * 1664525u + 1013904223u;
  return state >> 16;
}

Uni random_unimodular(unsigned& state, std::size_t n, int ops) {
  Uni u;
  u.p.assign(n, std::vector<Big>(n));
  u.pinv = u.p;
  for (std::size_t i = 0; i < n; ++i) u.p[i][i] = u.pinv[i][i] = 1;
  for (int k = 0; k < ops; ++k) {
    std::size_t a = advance(state) % n;
    std::size_t b = advance(state) % n;
    if (a == b) continue;
    Big c = oracle::random_entry(state, 2);
    for (std::size_t j = 0; j < n; ++j) u.p[a][j] += c * u.p[b][j];
    for (std::size_t i = 0; i < n; ++i) u.pinv[i][b] -= c * u.pinv[i][a];
  }
  return u;
}

// e'_i = sum_l p[l][i] e_l, so c'(i,j,k) = sum p[l][i] p[m][j] c(l,m,n) pinv[k][n]
std::vector<Big> transport_cube(const std::vector<Big>& c, const Uni& u,
                                std::size_t n) {
  std::vector<Big> out(n * n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        Big sum = 0;
        for (std::size_t l = 0; l < n; ++l)
          for (std::size_t m = 0; m < n; ++m)
            for (std::size_t w = 0; w < n; ++w)
              sum += u.p[l][i] * u.p[m][j] * c[(l * n + m) * n + w] * u.pinv[k][w];
        out[(i * n + j) * n + k] = sum;
      }
  return out;
}

std::vector<Big> transport_vector(const std::vector<Big>& v, const Uni& u,
                                  std::size_t n) {
  std::vector<Big> out(n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t w = 0; w < n; ++w) out[k] += u.pinv[k][w] * v[w];
  return out;
}

// dim of the solution space of x e_j = e_j x for all j, by plain elimination
long center_dim_oracle(const std::vector<Big>& c, std::size_t n) {
  oracle::Mat m;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t w = 0; w < n; ++w) {
      std::vector<Big> row(n);
      for (std::size_t i = 0; i < n; ++i)
        row[i] = c[(i * n + j) * n + w] - c[(j * n + i) * n + w];
      m.push_back(std::move(row));
    }
  return static_cast<long>(n) - static_cast<long>(oracle::rank_over_q(m));
}

std::vector<Rat> to_rats(const std::vector<Big>& v) {
  std::vector<Rat> out;
  for (const Big& x : v) out.emplace_back(x);
  return out;
}

}  // namespace

TEST_CASE("algebra validation and section algebras", "[hochschild]") {
  SECTION("structure constants are checked exhaustively") {
    REQUIRE_NOTHROW(upper_triangular());
    std::vector<Rat> broken = upper_triangular_structure();
    broken[(1 * 3 + 1) * 3 + 0] = 1;  // force e12 e12 = e11
    REQUIRE(code_of([&] {
              FiniteDimAlgebra::make(ExactField::rationals(), 3, broken, {1, 0, 1});
            }) == ErrorCode::NotAssociative);
    REQUIRE(code_of([&] {
              FiniteDimAlgebra::make(ExactField::rationals(), 3,
                                     upper_triangular_structure(), {1, 0, 0});
            }) == ErrorCode::NotAssociative);
    REQUIRE(code_of([&] {
              FiniteDimAlgebra::make(ExactField::rationals(), 2,
                                     std::vector<Rat>(7), std::vector<Rat>(2));
            }) == ErrorCode::ShapeMismatch);
  }

  SECTION("multiplication follows the constants") {
    FiniteDimAlgebra u2 = upper_triangular();
    REQUIRE(u2.multiply(u2.unit, {0, 1, 0}) == std::vector<Rat>{0, 1, 0});
    REQUIRE(u2.multiply({0, 1, 0}, {0, 1, 0}) == std::vector<Rat>{0, 0, 0});
    REQUIRE(u2.multiply({1, 0, 0}, {0, 0, 1}) == std::vector<Rat>{0, 0, 0});
  }

  SECTION("prime characteristic rings become algebras over their prime field") {
    FiniteDimAlgebra f2 = section_algebra(FiniteRing::zmod(2));
    REQUIRE(f2.dim == 1);
    REQUIRE(f2.field.characteristic == 2);
    REQUIRE(f2.c(0, 0, 0) == 1);
    REQUIRE(f2.unit == std::vector<Rat>{1});
    REQUIRE(section_algebra(FiniteRing::zmod(3)).dim == 1);

    FiniteDimAlgebra k =
        section_algebra(FiniteRing::product(FiniteRing::zmod(2), FiniteRing::zmod(2)));
    REQUIRE(k.dim == 2);
    REQUIRE(k.c(0, 0, 0) == 1);
    REQUIRE(k.c(0, 0, 1) == 0);
    REQUIRE(k.c(0, 1, 0) == 0);
    REQUIRE(k.c(0, 1, 1) == 0);
    REQUIRE(k.c(1, 1, 1) == 1);
    REQUIRE(k.unit == std::vector<Rat>{1, 1});

    REQUIRE(section_algebra(dual_numbers_mod2()).dim == 2);
    REQUIRE(section_algebra(gf4()).dim == 2);
  }

  SECTION("composite characteristic is rejected") {
    REQUIRE(code_of([] { section_algebra(FiniteRing::zmod(4)); }) ==
            ErrorCode::SectionRingNotAlgebra);
    REQUIRE(code_of([] { section_algebra(FiniteRing::zmod(6)); }) ==
            ErrorCode::SectionRingNotAlgebra);
    REQUIRE(code_of([] { section_algebra(FiniteRing::zmod(1)); }) ==
            ErrorCode::SectionRingNotAlgebra);
  }
}

TEST_CASE("Hochschild complexes and their cohomology", "[hochschild]") {
  SECTION("the one dimensional coboundaries are 0 and 1") {
    FiniteDimAlgebra q = poly_algebra({-1});  // Q[x]/(x-1) = Q
    FieldMatrix d0 = hochschild_delta(q, 0);
    REQUIRE(d0.rows == 1);
    REQUIRE(d0.cols == 1);
    REQUIRE(d0(0, 0) == 0);
    REQUIRE(hochschild_delta(q, 1)(0, 0) == 1);
    REQUIRE(hochschild_cohomology(q, 2) == std::vector<long>{1, 0, 0});
  }

  SECTION("one dimensional algebras over a prime field") {
    FiniteDimAlgebra f2 = section_algebra(FiniteRing::zmod(2));
    REQUIRE(hochschild_cohomology(f2, 2) == std::vector<long>{1, 0, 0});
  }

  SECTION("separable extensions are rigid") {
    REQUIRE(hochschild_cohomology(poly_algebra({-2, 0}), 2) ==
            std::vector<long>{2, 0, 0});  // Q(sqrt 2)
    REQUIRE(hochschild_cohomology(poly_algebra({0, -1, 0}), 2) ==
            std::vector<long>{3, 0, 0});  // Q[x]/(x^3-x) = Q^3
    REQUIRE(hochschild_cohomology(section_algebra(gf4()), 2) ==
            std::vector<long>{2, 0, 0});
  }

  SECTION("dual numbers carry higher cohomology") {
    FiniteDimAlgebra dn = poly_algebra({0, 0});  // Q[x]/(x^2)
    REQUIRE(hochschild_cohomology(dn, 2) == std::vector<long>{2, 1, 1});
    REQUIRE(hochschild_cohomology(dn, 4, 5) == std::vector<long>{2, 1, 1, 1, 1});
    // in characteristic 2 every coboundary of the periodic resolution dies
    REQUIRE(hochschild_cohomology(section_algebra(dual_numbers_mod2()), 2) ==
            std::vector<long>{2, 2, 2});
  }

  SECTION("the upper triangular matrices have scalar center and nothing above") {
    REQUIRE(hochschild_cohomology(upper_triangular(), 2) ==
            std::vector<long>{1, 0, 0});
  }

  SECTION("degree and size guards") {
    FiniteDimAlgebra dn = poly_algebra({0, 0});
    REQUIRE(code_of([&] { hochschild_complex(dn, 4); }) == ErrorCode::DegreeTooLarge);
    FiniteDimAlgebra six = poly_algebra({-1, 0, 0, 0, 0, 0});  // Q[x]/(x^6-1)
    REQUIRE(code_of([&] { hochschild_complex(six, 3); }) == ErrorCode::TooLarge);
  }

  SECTION("complex construction checks shapes and squares") {
    ExactField q = ExactField::rationals();
    REQUIRE(code_of([&] {
              make_field_complex(q, {1, 1, 1}, {from_rows(q, {{1}})});
            }) == ErrorCode::ShapeMismatch);
    REQUIRE(code_of([&] {
              make_field_complex(q, {1, 1, 1},
                                 {from_rows(q, {{1}}), from_rows(q, {{1}})});
            }) == ErrorCode::CompositionNotZero);
    REQUIRE(code_of([&] {
              make_field_complex(q, {1, 1},
                                 {from_rows(ExactField::prime_field(2), {{1}})});
            }) == ErrorCode::MixedCharacteristic);
    FieldComplex ok = make_field_complex(
        q, {1, 1, 1}, {from_rows(q, {{1}}), from_rows(q, {{0}})});
    REQUIRE(cohomology_dims(ok, 1) == std::vector<long>{0, 0});
    REQUIRE(code_of([&] { cohomology_dims(ok, 2); }) == ErrorCode::TruncationExceeded);
  }
}

TEST_CASE("random algebras match the center oracle", "[hochschild]") {
  // three dimensional associative algebras through random changes of basis:
  // a split etale algebra, the upper triangular matrices, dual numbers plus
  // a line; the zeroth Hochschild dimension must equal the center dimension
  // found by the oracle's independent elimination
  std::vector<Big> etale(27), upper(27), mixed(27);
  {
    // Q[x]/(x^3-x): x^3 = x, x^4 = x^2
    std::size_t reduce[5] = {0, 1, 2, 1, 2};
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) etale[(i * 3 + j) * 3 + reduce[i + j]] = 1;
    std::vector<Rat> u2 = upper_triangular_structure();
    for (std::size_t s = 0; s < 27; ++s) upper[s] = numerator(u2[s]);
    // Q[x]/(x^2) on basis 0,1 and a split line on basis 2
    mixed[(0 * 3 + 0) * 3 + 0] = 1;
    mixed[(0 * 3 + 1) * 3 + 1] = 1;
    mixed[(1 * 3 + 0) * 3 + 1] = 1;
    mixed[(2 * 3 + 2) * 3 + 2] = 1;
  }
  const std::vector<std::vector<Big>> cubes = {etale, upper, mixed};
  const std::vector<std::vector<Big>> units = {{1, 0, 0}, {1, 0, 1}, {1, 0, 1}};
  const std::vector<long> expected = {3, 1, 3};

  unsigned state = 20260823u;
  for (int round = 0; round < 20; ++round) {
    std::size_t type = advance(state) % 3;
    Uni u = random_unimodular(state, 3, 6);
    std::vector<Big> cube = transport_cube(cubes[type], u, 3);
    std::vector<Big> unit = transport_vector(units[type], u, 3);

    FiniteDimAlgebra a = FiniteDimAlgebra::make(ExactField::rationals(), 3,
                                                to_rats(cube), to_rats(unit));
    long center = center_dim_oracle(cube, 3);
    REQUIRE(center == expected[type]);
    REQUIRE(hochschild_cohomology(a, 0) == std::vector<long>{center});
  }
}

TEST_CASE("field grids and merged totals", "[hochschild]") {
  ExactField q = ExactField::rationals();

  SECTION("trivial verticals shift and sum the rows") {
    FieldComplex line = make_field_complex(
        q, {1, 0, 0}, {FieldMatrix(q, 0, 1), FieldMatrix(q, 0, 0)});
    FieldGrid g = assemble_field_grid({line, line}, FieldVerticalFamily::trivial());
    REQUIRE(total_field_cohomology(g, 1) == std::vector<long>{1, 1});
  }

  SECTION("identity verticals between equal rows need the sign twist") {
    FieldComplex row = make_field_complex(
        q, {1, 1, 1}, {from_rows(q, {{1}}), from_rows(q, {{0}})});
    std::vector<std::vector<FieldMatrix>> ids{
        {FieldMatrix::identity(q, 1), FieldMatrix::identity(q, 1),
         FieldMatrix::identity(q, 1)}};
    REQUIRE(code_of([&] {
              assemble_field_grid({row, row}, FieldVerticalFamily::given(ids));
            }) == ErrorCode::AnticommutationFails);
    FieldGrid g =
        assemble_field_grid({row, row}, FieldVerticalFamily::given(ids), true);
    // the merged complex is the cone of an isomorphism, so nothing survives
    REQUIRE(total_field_cohomology(g, 1) == std::vector<long>{0, 0});
  }

  SECTION("family shapes are validated") {
    FieldComplex row = make_field_complex(
        q, {1, 1, 1}, {from_rows(q, {{1}}), from_rows(q, {{0}})});
    std::vector<std::vector<FieldMatrix>> three{
        {FieldMatrix::identity(q, 1), FieldMatrix::identity(q, 1)}};
    REQUIRE(code_of([&] {
              assemble_field_grid({row, row}, FieldVerticalFamily::given(three));
            }) == ErrorCode::VerticalShapeMismatch);
    FieldComplex modrow = make_field_complex(
        ExactField::prime_field(2), {1, 1}, {FieldMatrix(ExactField::prime_field(2), 1, 1)});
    REQUIRE(code_of([&] {
              assemble_field_grid({row, modrow}, FieldVerticalFamily::trivial());
            }) == ErrorCode::MixedCharacteristic);
  }

  SECTION("totals refuse to run past the truncation") {
    FieldComplex row = make_field_complex(
        q, {1, 1, 1}, {from_rows(q, {{1}}), from_rows(q, {{0}})});
    FieldGrid g = assemble_field_grid({row, row}, FieldVerticalFamily::trivial());
    REQUIRE(code_of([&] { total_field_cohomology(g, 2); }) ==
            ErrorCode::TruncationExceeded);
  }
}

TEST_CASE("structured Hochschild tables", "[hochschild]") {
  FiniteSpace pt = testbed::one_point();
  FiniteRing z2 = FiniteRing::zmod(2);

  SECTION("two prime field members over a point") {
    Presheaf f = sheaf::rebundle_structured(
        {constant_ring(pt, z2), constant_ring(pt, z2)});
    StructuredHochschild total = structured_hochschild(
        f, FieldVerticalFamily::trivial(), cohom::Assembly::Total, 2);
    REQUIRE(total.table == std::vector<std::vector<long>>{{1, 1, 0}});
    REQUIRE(total.algebras.size() == 2);
    REQUIRE(total.algebras[0].dim == 1);
    REQUIRE(total.algebras[0].field.characteristic == 2);

    StructuredHochschild rows = structured_hochschild(
        f, FieldVerticalFamily::trivial(), cohom::Assembly::Rows, 2);
    REQUIRE(rows.table ==
            std::vector<std::vector<long>>{{1, 0, 0}, {1, 0, 0}});

    // the disjoint union route, retraced by hand over each copy
    ringspec::DisjointUnion du = ringspec::disjoint_union_assembly(f);
    REQUIRE(du.copies == 2);
    for (Mask copy : du.copy_masks) {
      FiniteDimAlgebra a =
          section_algebra(du.total.structure.ring_value(copy));
      REQUIRE(hochschild_cohomology(a, 2) == std::vector<long>{1, 0, 0});
    }
  }

  SECTION("the same table through spectra of prime fields") {
    ringspec::SpecResult sp = ringspec::spec_of_ring(z2);
    Presheaf f = sheaf::rebundle_structured(
        {sp.ringed.structure, sp.ringed.structure});
    StructuredHochschild total = structured_hochschild(
        f, FieldVerticalFamily::trivial(), cohom::Assembly::Total, 2);
    REQUIRE(total.table == std::vector<std::vector<long>>{{1, 1, 0}});
  }

  SECTION("a single member degenerates to its own row") {
    Presheaf f = sheaf::rebundle_structured(
        {constant_ring(testbed::sierpinski(), FiniteRing::zmod(3))});
    StructuredHochschild one = structured_hochschild(
        f, FieldVerticalFamily::trivial(), cohom::Assembly::Total, 2);
    REQUIRE(one.table == std::vector<std::vector<long>>{{1, 0, 0}});
    REQUIRE(one.algebras[0].field.characteristic == 3);
  }

  SECTION("identity verticals over F_2 collapse the equal rows") {
    Presheaf f = sheaf::rebundle_structured(
        {constant_ring(pt, z2), constant_ring(pt, z2)});
    ExactField f2 = ExactField::prime_field(2);
    std::vector<std::vector<FieldMatrix>> ids{
        {FieldMatrix::identity(f2, 1), FieldMatrix::identity(f2, 1),
         FieldMatrix::identity(f2, 1), FieldMatrix::identity(f2, 1)}};
    StructuredHochschild cone = structured_hochschild(
        f, FieldVerticalFamily::given(ids), cohom::Assembly::Total, 2);
    REQUIRE(cone.table == std::vector<std::vector<long>>{{0, 0, 0}});
    std::vector<std::vector<FieldMatrix>> two{
        {FieldMatrix::identity(f2, 1), FieldMatrix::identity(f2, 1)}};
    REQUIRE(code_of([&] {
              structured_hochschild(f, FieldVerticalFamily::given(two),
                                    cohom::Assembly::Rows, 2);
            }) == ErrorCode::VerticalShapeMismatch);
  }

  SECTION("members must share one prime field") {
    Presheaf f = sheaf::rebundle_structured(
        {constant_ring(pt, z2), constant_ring(pt, FiniteRing::zmod(3))});
    REQUIRE(code_of([&] {
              structured_hochschild(f, FieldVerticalFamily::trivial(),
                                    cohom::Assembly::Total, 2);
            }) == ErrorCode::MixedCharacteristic);
    Presheaf g = sheaf::rebundle_structured({constant_ring(pt, FiniteRing::zmod(4))});
    REQUIRE(code_of([&] {
              structured_hochschild(g, FieldVerticalFamily::trivial(),
                                    cohom::Assembly::Total, 2);
            }) == ErrorCode::SectionRingNotAlgebra);
  }
}
