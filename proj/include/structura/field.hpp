#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "structura/errors.hpp"
#include "structura/smith.hpp"

namespace structura::exactla {

using Rat = boost::multiprecision::cpp_rational;

inline bool is_prime(const Int& n) {
  if (n < 2) return false;
  for (Int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// The two exact coefficient fields in play: the rationals (characteristic 0)
// and prime fields F_p.  Elements are stored as rationals; F_p elements are
// kept normalized to integers in [0, p).
struct ExactField {
  Int characteristic = 0;

  static ExactField rationals() { return {}; }
  static ExactField prime_field(const Int& p) {
    if (!is_prime(p))
      math_error(ErrorCode::NotPrime, p.str() + " is not a prime characteristic");
    return {p};
  }

  bool operator==(const ExactField&) const = default;

  std::string name() const {
    return characteristic == 0 ? "Q" : "F_" + characteristic.str();
  }

  Rat normalize(const Rat& x) const {
    if (characteristic == 0) return x;
    Int num = numerator(x), den = denominator(x);
    Int d = den % characteristic;
    if (d < 0) d += characteristic;
    require_invariant(d != 0, "denominator vanishes in F_" + characteristic.str());
    // d^(p-2) is the inverse mod p
    Int inv = 1, base = d, e = characteristic - 2;
    while (e > 0) {
      if (e % 2 == 1) inv = inv * base % characteristic;
      base = base * base % characteristic;
      e /= 2;
    }
    Int v = num % characteristic * inv % characteristic;
    if (v < 0) v += characteristic;
    return Rat(v);
  }

  Rat add(const Rat& a, const Rat& b) const { return normalize(a + b); }
  Rat sub(const Rat& a, const Rat& b) const { return normalize(a - b); }
  Rat mul(const Rat& a, const Rat& b) const { return normalize(a * b); }
  Rat div(const Rat& a, const Rat& b) const {
    require_invariant(normalize(b) != 0, "division by zero");
    if (characteristic == 0) return a / b;
    return mul(a, normalize(Rat(1) / b));  // 1/b as a rational, then reduced
  }
};

// Dense matrix over an exact field.
struct FieldMatrix {
  ExactField field;
  std::size_t rows = 0, cols = 0;
  std::vector<Rat> a;

  FieldMatrix() = default;
  FieldMatrix(ExactField f, std::size_t r, std::size_t c)
      : field(f), rows(r), cols(c), a(r * c) {}

  static FieldMatrix identity(ExactField f, std::size_t n) {
    FieldMatrix m(f, n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  Rat& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const Rat& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  bool operator==(const FieldMatrix&) const = default;

  bool is_zero() const {
    for (const Rat& x : a)
      if (x != 0) return false;
    return true;
  }
};

inline FieldMatrix mul(const FieldMatrix& x, const FieldMatrix& y) {
  if (!(x.field == y.field))
    math_error(ErrorCode::MixedCharacteristic, "matrix product over different fields");
  if (x.cols != y.rows)
    math_error(ErrorCode::ShapeMismatch, "field matrix product shape mismatch");
  FieldMatrix z(x.field, x.rows, y.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t k = 0; k < x.cols; ++k) {
      if (x(i, k) == 0) continue;
      for (std::size_t j = 0; j < y.cols; ++j)
        z(i, j) = z.field.add(z(i, j), z.field.mul(x(i, k), y(k, j)));
    }
  return z;
}

inline std::size_t rank(FieldMatrix m) {
  std::size_t r = 0;
  for (std::size_t col = 0; col < m.cols && r < m.rows; ++col) {
    std::size_t p = r;
    while (p < m.rows && m.field.normalize(m(p, col)) == 0) ++p;
    if (p == m.rows) continue;
    for (std::size_t j = 0; j < m.cols; ++j) std::swap(m(r, j), m(p, j));
    Rat pivot = m(r, col);
    for (std::size_t i = r + 1; i < m.rows; ++i) {
      Rat factor = m.field.div(m(i, col), pivot);
      if (m.field.normalize(factor) == 0) continue;
      for (std::size_t j = col; j < m.cols; ++j)
        m(i, j) = m.field.sub(m(i, j), m.field.mul(factor, m(r, j)));
    }
    ++r;
  }
  return r;
}

// dim ker(d_out) - rank(d_in) for consecutive differentials out of and into a
// space of dimension dim_here; the composition must vanish.
inline long field_cohomology_dim(std::size_t dim_here, const FieldMatrix& d_out,
                                 const FieldMatrix& d_in) {
  if (d_out.cols != dim_here || d_in.rows != dim_here)
    math_error(ErrorCode::ShapeMismatch, "differentials do not meet in the given degree");
  if (d_in.cols > 0 && d_out.rows > 0 && !mul(d_out, d_in).is_zero())
    math_error(ErrorCode::CompositionNotZero, "differentials do not compose to zero");
  long ker = static_cast<long>(dim_here) - static_cast<long>(rank(d_out));
  return ker - static_cast<long>(rank(d_in));
}

}  // namespace structura::exactla
