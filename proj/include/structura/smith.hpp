#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "structura/errors.hpp"

namespace structura::exactla {

using Int = boost::multiprecision::cpp_int;

// Dense integer matrix with arbitrary-precision entries.  Zero-row and
// zero-column shapes are legal everywhere; they show up constantly as
// presentations of trivial groups and maps in or out of them.
class IntMatrix {
 public:
  IntMatrix() : rows_(0), cols_(0) {}
  IntMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols) {}

  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Int& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Int& operator()(std::size_t i, std::size_t j) const {
    return a_[i * cols_ + j];
  }

  bool operator==(const IntMatrix& o) const = default;

  bool is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](const Int& x) { return x == 0; });
  }

  std::vector<Int> col(std::size_t j) const {
    std::vector<Int> v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  void set_col(std::size_t j, const std::vector<Int>& v) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
  }

  void set_block(std::size_t r0, std::size_t c0, const IntMatrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) (*this)(r0 + i, c0 + j) = m(i, j);
  }

 private:
  std::size_t rows_, cols_;
  std::vector<Int> a_;
};

inline IntMatrix mul(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.rows())
    math_error(ErrorCode::ShapeMismatch,
               "matrix product needs inner dimensions to agree, got " +
                   std::to_string(a.cols()) + " and " + std::to_string(b.rows()));
  IntMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Int& aik = a(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline IntMatrix add(const IntMatrix& a, const IntMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    math_error(ErrorCode::ShapeMismatch, "matrix sum needs equal shapes");
  IntMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

inline IntMatrix negate(const IntMatrix& a) {
  IntMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = -a(i, j);
  return c;
}

inline IntMatrix hstack(const IntMatrix& a, const IntMatrix& b) {
  if (a.rows() != b.rows())
    math_error(ErrorCode::ShapeMismatch, "hstack needs equal row counts");
  IntMatrix c(a.rows(), a.cols() + b.cols());
  c.set_block(0, 0, a);
  c.set_block(0, a.cols(), b);
  return c;
}

inline std::vector<Int> mat_apply(const IntMatrix& a, const std::vector<Int>& x) {
  if (a.cols() != x.size())
    math_error(ErrorCode::ShapeMismatch, "matrix-vector product shape mismatch");
  std::vector<Int> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

inline std::string to_string(const IntMatrix& a) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < a.rows(); ++i) {
    os << (i ? "; " : "") << "[";
    for (std::size_t j = 0; j < a.cols(); ++j)
      os << (j ? "," : "") << a(i, j);
    os << "]";
  }
  os << "]";
  return os.str();
}

// Smith normal form U*A*V = S with U, V unimodular and the diagonal of S a
// divisibility chain s_1 | s_2 | ... of nonnegative entries.  Inverses of the
// transforms are accumulated alongside, so callers can move vectors between
// the original and diagonal coordinates without ever inverting a matrix.
struct SmithResult {
  IntMatrix U, Uinv;  // rows of A
  IntMatrix S;
  IntMatrix V, Vinv;  // columns of A
  std::size_t diag_rank = 0;  // number of nonzero diagonal entries
};

inline SmithResult smith_normal_form(const IntMatrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  SmithResult r;
  r.U = IntMatrix::identity(m);
  r.Uinv = IntMatrix::identity(m);
  r.V = IntMatrix::identity(n);
  r.Vinv = IntMatrix::identity(n);
  r.S = a;
  IntMatrix& S = r.S;

  auto swap_rows = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < n; ++k) std::swap(S(i, k), S(j, k));
    for (std::size_t k = 0; k < m; ++k) std::swap(r.U(i, k), r.U(j, k));
    for (std::size_t k = 0; k < m; ++k) std::swap(r.Uinv(k, i), r.Uinv(k, j));
  };
  auto swap_cols = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    for (std::size_t k = 0; k < m; ++k) std::swap(S(k, i), S(k, j));
    for (std::size_t k = 0; k < n; ++k) std::swap(r.V(k, i), r.V(k, j));
    for (std::size_t k = 0; k < n; ++k) std::swap(r.Vinv(i, k), r.Vinv(j, k));
  };
  // row_i += c * row_j
  auto add_row = [&](std::size_t i, std::size_t j, const Int& c) {
    for (std::size_t k = 0; k < n; ++k) S(i, k) += c * S(j, k);
    for (std::size_t k = 0; k < m; ++k) r.U(i, k) += c * r.U(j, k);
    for (std::size_t k = 0; k < m; ++k) r.Uinv(k, j) -= c * r.Uinv(k, i);
  };
  // col_i += c * col_j
  auto add_col = [&](std::size_t i, std::size_t j, const Int& c) {
    for (std::size_t k = 0; k < m; ++k) S(k, i) += c * S(k, j);
    for (std::size_t k = 0; k < n; ++k) r.V(k, i) += c * r.V(k, j);
    for (std::size_t k = 0; k < n; ++k) r.Vinv(j, k) -= c * r.Vinv(i, k);
  };
  auto negate_row = [&](std::size_t i) {
    for (std::size_t k = 0; k < n; ++k) S(i, k) = -S(i, k);
    for (std::size_t k = 0; k < m; ++k) r.U(i, k) = -r.U(i, k);
    for (std::size_t k = 0; k < m; ++k) r.Uinv(k, i) = -r.Uinv(k, i);
  };

  std::size_t t = 0;
  const std::size_t bound = std::min(m, n);
  while (t < bound) {
    // pick the smallest nonzero entry of the trailing block as pivot
    std::size_t pi = m, pj = n;
    for (std::size_t i = t; i < m; ++i)
      for (std::size_t j = t; j < n; ++j) {
        if (S(i, j) == 0) continue;
        if (pi == m || abs(S(i, j)) < abs(S(pi, pj))) { pi = i; pj = j; }
      }
    if (pi == m) break;  // trailing block is zero
    swap_rows(t, pi);
    swap_cols(t, pj);

    bool dirty = true;
    while (dirty) {
      dirty = false;
      // clear column t by Euclidean steps
      for (std::size_t i = t + 1; i < m; ++i) {
        while (S(i, t) != 0) {
          Int q = S(i, t) / S(t, t);
          if (q != 0) add_row(i, t, -q);
          if (S(i, t) != 0) { swap_rows(t, i); dirty = true; }
        }
      }
      // clear row t
      for (std::size_t j = t + 1; j < n; ++j) {
        while (S(t, j) != 0) {
          Int q = S(t, j) / S(t, t);
          if (q != 0) add_col(j, t, -q);
          if (S(t, j) != 0) { swap_cols(t, j); dirty = true; }
        }
      }
      if (dirty) continue;
      // force the pivot to divide the whole trailing block, so the final
      // diagonal forms a chain
      for (std::size_t i = t + 1; i < m && !dirty; ++i)
        for (std::size_t j = t + 1; j < n && !dirty; ++j)
          if (S(i, j) % S(t, t) != 0) {
            add_row(t, i, 1);
            dirty = true;
          }
    }
    if (S(t, t) < 0) negate_row(t);
    ++t;
  }
  for (std::size_t i = 0; i < bound; ++i)
    if (S(i, i) != 0) ++r.diag_rank;
  return r;
}

// Exact determinant by fraction-free (Bareiss) elimination.
inline Int determinant(const IntMatrix& a) {
  if (a.rows() != a.cols())
    math_error(ErrorCode::ShapeMismatch, "determinant needs a square matrix");
  const std::size_t n = a.rows();
  if (n == 0) return 1;
  IntMatrix w = a;
  Int prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (w(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && w(p, k) == 0) ++p;
      if (p == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(w(k, j), w(p, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        w(i, j) = (w(i, j) * w(k, k) - w(i, k) * w(k, j)) / prev;
    prev = w(k, k);
  }
  return sign * w(n - 1, n - 1);
}

// One integer solution x of A x = b, if any.  Works through the Smith form:
// with U A V = S the system becomes S y = U b, which is solvable exactly when
// each diagonal entry divides its right-hand side and the remainder is zero.
inline std::optional<std::vector<Int>> solve(const IntMatrix& a,
                                             const std::vector<Int>& b) {
  if (a.rows() != b.size())
    math_error(ErrorCode::ShapeMismatch, "solve needs len(b) = rows(A)");
  SmithResult sr = smith_normal_form(a);
  std::vector<Int> c = mat_apply(sr.U, b);
  std::vector<Int> y(a.cols());
  const std::size_t bound = std::min(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Int d = (i < bound) ? sr.S(i, i) : Int(0);
    if (d == 0) {
      if (c[i] != 0) return std::nullopt;
    } else {
      if (c[i] % d != 0) return std::nullopt;
      y[i] = c[i] / d;
    }
  }
  return mat_apply(sr.V, y);
}

// Basis of the integer kernel {x : A x = 0}, as columns.
inline IntMatrix kernel_basis(const IntMatrix& a) {
  SmithResult sr = smith_normal_form(a);
  const std::size_t n = a.cols();
  const std::size_t k = n - sr.diag_rank;
  IntMatrix out(n, k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < n; ++i) out(i, j) = sr.V(i, sr.diag_rank + j);
  return out;
}

inline bool in_column_span(const IntMatrix& a, const std::vector<Int>& b) {
  return solve(a, b).has_value();
}

}  // namespace structura::exactla
