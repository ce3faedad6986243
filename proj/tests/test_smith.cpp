#include "structura/smith.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "oracle.hpp"

using namespace structura::exactla;

namespace {

IntMatrix from_rows(const std::vector<std::vector<int>>& rows) {
  IntMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

oracle::Mat to_oracle(const IntMatrix& m) {
  oracle::Mat out(m.rows(), std::vector<oracle::Big>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

void check_smith_contract(const IntMatrix& a) {
  SmithResult r = smith_normal_form(a);
  // U A V = S
  REQUIRE(mul(mul(r.U, a), r.V) == r.S);
  // tracked inverses really invert
  REQUIRE(mul(r.U, r.Uinv) == IntMatrix::identity(a.rows()));
  REQUIRE(mul(r.V, r.Vinv) == IntMatrix::identity(a.cols()));
  // unimodularity
  REQUIRE(abs(determinant(r.U)) == 1);
  REQUIRE(abs(determinant(r.V)) == 1);
  // S diagonal, nonnegative, divisibility chain
  const std::size_t bound = std::min(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) REQUIRE(r.S(i, j) == 0);
  for (std::size_t i = 0; i < bound; ++i) REQUIRE(r.S(i, i) >= 0);
  for (std::size_t i = 0; i + 1 < bound; ++i) {
    if (r.S(i + 1, i + 1) != 0) {
      REQUIRE(r.S(i, i) != 0);
      REQUIRE(r.S(i + 1, i + 1) % r.S(i, i) == 0);
    }
  }
  // diagonal agrees with the independent reduction
  std::vector<oracle::Big> expect = oracle::elementary_diagonal(to_oracle(a));
  for (std::size_t i = 0; i < bound; ++i) {
    oracle::Big want = i < expect.size() ? expect[i] : oracle::Big(0);
    REQUIRE(Int(want.str()) == r.S(i, i));
  }
}

}  // namespace

TEST_CASE("smith form of frozen examples", "[smith]") {
  SECTION("identity stays put") {
    SmithResult r = smith_normal_form(IntMatrix::identity(3));
    REQUIRE(r.S == IntMatrix::identity(3));
    REQUIRE(r.diag_rank == 3);
  }
  SECTION("2x2 with determinant -8") {
    // gcd of entries is 2 and |det| = 8, so the chain must be (2, 4)
    IntMatrix a = from_rows({{2, 4}, {6, 8}});
    SmithResult r = smith_normal_form(a);
    REQUIRE(r.S(0, 0) == 2);
    REQUIRE(r.S(1, 1) == 4);
    REQUIRE(r.diag_rank == 2);
    check_smith_contract(a);
  }
  SECTION("zero matrix") {
    IntMatrix a(2, 3);
    SmithResult r = smith_normal_form(a);
    REQUIRE(r.S == a);
    REQUIRE(r.diag_rank == 0);
  }
  SECTION("empty shapes survive") {
    check_smith_contract(IntMatrix(0, 0));
    check_smith_contract(IntMatrix(0, 4));
    check_smith_contract(IntMatrix(3, 0));
  }
  SECTION("single row") {
    IntMatrix a = from_rows({{6, 10, 15}});
    SmithResult r = smith_normal_form(a);
    REQUIRE(r.S(0, 0) == 1);  // gcd(6,10,15) = 1
    check_smith_contract(a);
  }
}

TEST_CASE("smith form contract on random matrices", "[smith]") {
  unsigned state = 20260823u;
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t rows = 1 + state % 6;
    std::size_t cols = 1 + (state >> 8) % 6;
    IntMatrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        a(i, j) = Int(oracle::random_entry(state, 9).str());
    check_smith_contract(a);
  }
}

TEST_CASE("integer solve and kernels", "[smith]") {
  IntMatrix a = from_rows({{2, 0}, {0, 3}});
  SECTION("solvable system") {
    auto x = solve(a, {Int(4), Int(9)});
    REQUIRE(x.has_value());
    REQUIRE(mat_apply(a, *x) == std::vector<Int>{Int(4), Int(9)});
  }
  SECTION("obstructed by divisibility") {
    REQUIRE_FALSE(solve(a, {Int(1), Int(0)}).has_value());
  }
  SECTION("obstructed by rank") {
    IntMatrix b = from_rows({{1, 1}, {2, 2}});
    REQUIRE_FALSE(solve(b, {Int(0), Int(1)}).has_value());
    REQUIRE(solve(b, {Int(3), Int(6)}).has_value());
  }
  SECTION("kernel basis spans the kernel") {
    IntMatrix b = from_rows({{1, 2, 3}});
    IntMatrix k = kernel_basis(b);
    REQUIRE(k.cols() == 2);
    REQUIRE(mul(b, k).is_zero());
    // (2, -1, 0) is in the kernel, so it must lie in the span
    REQUIRE(in_column_span(k, {Int(2), Int(-1), Int(0)}));
  }
  SECTION("random solve round trips") {
    unsigned state = 7u;
    for (int trial = 0; trial < 100; ++trial) {
      std::size_t rows = 1 + state % 4, cols = 1 + (state >> 5) % 4;
      IntMatrix m(rows, cols);
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
          m(i, j) = Int(oracle::random_entry(state, 5).str());
      std::vector<Int> x(cols);
      for (std::size_t j = 0; j < cols; ++j)
        x[j] = Int(oracle::random_entry(state, 5).str());
      std::vector<Int> b = mat_apply(m, x);
      auto y = solve(m, b);
      REQUIRE(y.has_value());
      REQUIRE(mat_apply(m, *y) == b);
    }
  }
}

TEST_CASE("determinant matches cofactor facts", "[smith]") {
  REQUIRE(determinant(IntMatrix::identity(4)) == 1);
  REQUIRE(determinant(from_rows({{2, 4}, {6, 8}})) == -8);
  REQUIRE(determinant(from_rows({{0, 1}, {1, 0}})) == -1);
  REQUIRE(determinant(IntMatrix(0, 0)) == 1);
  unsigned state = 99u;
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 1 + state % 5;
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        m(i, j) = Int(oracle::random_entry(state, 6).str());
    REQUIRE(determinant(m) == Int(oracle::det(to_oracle(m)).str()));
  }
}
