#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "structura/errors.hpp"

namespace structura::ringspec {

using IdealMask = std::uint64_t;

// A finite commutative unital ring given by its operation tables.  The table
// check in from_tables is the single gate: every instance in circulation has
// passed it, so arithmetic downstream never revalidates.
class FiniteRing {
 public:
  static FiniteRing from_tables(std::vector<std::string> labels,
                                std::vector<int> add, std::vector<int> mul) {
    const std::size_t n = labels.size();
    if (n == 0) input_error(ErrorCode::ParseError, "a ring needs at least one element");
    if (n > 64)
      math_error(ErrorCode::TooLarge,
                 "rings are capped at 64 elements, got " + std::to_string(n));
    if (add.size() != n * n || mul.size() != n * n)
      input_error(ErrorCode::ParseError, "operation tables must be n x n");
    for (int v : add)
      if (v < 0 || v >= static_cast<int>(n))
        input_error(ErrorCode::ParseError, "addition table entry out of range");
    for (int v : mul)
      if (v < 0 || v >= static_cast<int>(n))
        input_error(ErrorCode::ParseError, "multiplication table entry out of range");

    FiniteRing r;
    r.labels_ = std::move(labels);
    r.add_ = std::move(add);
    r.mul_ = std::move(mul);

    auto a = [&](int x, int y) { return r.add_[x * n + y]; };
    auto m = [&](int x, int y) { return r.mul_[x * n + y]; };
    const int N = static_cast<int>(n);
    for (int x = 0; x < N; ++x)
      for (int y = 0; y < N; ++y) {
        if (a(x, y) != a(y, x))
          math_error(ErrorCode::NotARing, "addition is not commutative at " +
                                              r.labels_[x] + ", " + r.labels_[y]);
        if (m(x, y) != m(y, x))
          math_error(ErrorCode::NotARing, "multiplication is not commutative at " +
                                              r.labels_[x] + ", " + r.labels_[y]);
      }
    for (int x = 0; x < N; ++x)
      for (int y = 0; y < N; ++y)
        for (int z = 0; z < N; ++z) {
          if (a(a(x, y), z) != a(x, a(y, z)))
            math_error(ErrorCode::NotARing, "addition is not associative");
          if (m(m(x, y), z) != m(x, m(y, z)))
            math_error(ErrorCode::NotARing, "multiplication is not associative");
          if (m(x, a(y, z)) != a(m(x, y), m(x, z)))
            math_error(ErrorCode::NotARing, "distributivity fails at " + r.labels_[x] +
                                                ", " + r.labels_[y] + ", " + r.labels_[z]);
        }
    r.zero_ = -1;
    for (int e = 0; e < N && r.zero_ < 0; ++e) {
      bool ok = true;
      for (int x = 0; x < N; ++x) ok = ok && a(e, x) == x;
      if (ok) r.zero_ = e;
    }
    if (r.zero_ < 0) math_error(ErrorCode::NotARing, "no additive identity");
    r.neg_.resize(n, -1);
    for (int x = 0; x < N; ++x) {
      for (int y = 0; y < N; ++y)
        if (a(x, y) == r.zero_) { r.neg_[x] = y; break; }
      if (r.neg_[x] < 0)
        math_error(ErrorCode::NotARing, "no additive inverse for " + r.labels_[x]);
    }
    r.one_ = -1;
    for (int e = 0; e < N && r.one_ < 0; ++e) {
      bool ok = true;
      for (int x = 0; x < N; ++x) ok = ok && m(e, x) == x;
      if (ok) r.one_ = e;
    }
    if (r.one_ < 0) math_error(ErrorCode::NotARing, "no multiplicative identity");
    return r;
  }

  static FiniteRing zmod(int n) {
    if (n <= 0) input_error(ErrorCode::ParseError, "zmod needs a positive modulus");
    std::vector<std::string> labels;
    std::vector<int> add(n * n), mul(n * n);
    for (int i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        add[i * n + j] = (i + j) % n;
        mul[i * n + j] = (i * j) % n;
      }
    return from_tables(std::move(labels), std::move(add), std::move(mul));
  }

  static FiniteRing product(const FiniteRing& x, const FiniteRing& y) {
    const std::size_t nx = x.size(), ny = y.size(), n = nx * ny;
    if (n > 64) math_error(ErrorCode::TooLarge, "product ring exceeds 64 elements");
    std::vector<std::string> labels;
    std::vector<int> add(n * n), mul(n * n);
    auto idx = [&](std::size_t i, std::size_t j) { return static_cast<int>(i * ny + j); };
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < ny; ++j)
        labels.push_back("(" + x.label(i) + "," + y.label(j) + ")");
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t k = 0; k < nx; ++k)
          for (std::size_t l = 0; l < ny; ++l) {
            add[idx(i, j) * n + idx(k, l)] = idx(x.add(i, k), y.add(j, l));
            mul[idx(i, j) * n + idx(k, l)] = idx(x.mul(i, k), y.mul(j, l));
          }
    return from_tables(std::move(labels), std::move(add), std::move(mul));
  }

  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_[i]; }
  int add(int x, int y) const { return add_[x * size() + y]; }
  int mul(int x, int y) const { return mul_[x * size() + y]; }
  int neg(int x) const { return neg_[x]; }
  int zero() const { return zero_; }
  int one() const { return one_; }

  bool is_unit(int x) const {
    for (std::size_t t = 0; t < size(); ++t)
      if (mul(x, static_cast<int>(t)) == one_) return true;
    return false;
  }

  int additive_order(int x) const {
    int k = 1, y = x;
    while (y != zero_) { y = add(y, x); ++k; }
    return k;
  }

  // additive order of 1, i.e. the characteristic
  int characteristic() const { return additive_order(one_); }

  bool operator==(const FiniteRing&) const = default;

 private:
  FiniteRing() = default;
  std::vector<std::string> labels_;
  std::vector<int> add_, mul_, neg_;
  int zero_ = -1, one_ = -1;
};

inline std::string set_label(const FiniteRing& r, IdealMask m) {
  std::string s = "(";
  bool first = true;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (m >> i & 1) {
      if (!first) s += ",";
      s += r.label(i);
      first = false;
    }
  return s + ")";
}

// smallest ideal containing the seed elements
inline IdealMask ideal_closure(const FiniteRing& r, IdealMask seed) {
  IdealMask m = seed | (IdealMask(1) << r.zero());
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t x = 0; x < r.size(); ++x) {
      if (!(m >> x & 1)) continue;
      for (std::size_t y = 0; y < r.size(); ++y) {
        if ((m >> y & 1)) {
          IdealMask s = IdealMask(1) << r.add(static_cast<int>(x), static_cast<int>(y));
          if (!(m & s)) { m |= s; grew = true; }
        }
        IdealMask p = IdealMask(1) << r.mul(static_cast<int>(x), static_cast<int>(y));
        if (!(m & p)) { m |= p; grew = true; }
      }
    }
  }
  return m;
}

// every ideal, obtained by closing the principal ideals under ideal sums
inline std::vector<IdealMask> all_ideals(const FiniteRing& r) {
  std::vector<IdealMask> found;
  auto push = [&](IdealMask m) {
    if (std::find(found.begin(), found.end(), m) == found.end()) {
      found.push_back(m);
      return true;
    }
    return false;
  };
  for (std::size_t x = 0; x < r.size(); ++x)
    push(ideal_closure(r, IdealMask(1) << x));
  bool grew = true;
  while (grew) {
    grew = false;
    const std::size_t upto = found.size();
    for (std::size_t i = 0; i < upto; ++i)
      for (std::size_t j = i + 1; j < upto; ++j)
        if (push(ideal_closure(r, found[i] | found[j]))) grew = true;
  }
  std::sort(found.begin(), found.end(), [](IdealMask a, IdealMask b) {
    int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa < pb : a < b;
  });
  return found;
}

inline bool is_prime_ideal(const FiniteRing& r, IdealMask ideal) {
  IdealMask full = r.size() == 64 ? ~IdealMask(0) : (IdealMask(1) << r.size()) - 1;
  if (ideal == full) return false;
  for (std::size_t a = 0; a < r.size(); ++a) {
    if (ideal >> a & 1) continue;
    for (std::size_t b = a; b < r.size(); ++b) {
      if (ideal >> b & 1) continue;
      if (ideal >> r.mul(static_cast<int>(a), static_cast<int>(b)) & 1) return false;
    }
  }
  return true;
}

inline std::vector<IdealMask> prime_ideals(const FiniteRing& r) {
  std::vector<IdealMask> out;
  for (IdealMask m : all_ideals(r))
    if (is_prime_ideal(r, m)) out.push_back(m);
  return out;
}

inline std::vector<IdealMask> maximal_ideals(const FiniteRing& r) {
  IdealMask full = r.size() == 64 ? ~IdealMask(0) : (IdealMask(1) << r.size()) - 1;
  std::vector<IdealMask> ideals = all_ideals(r);
  std::vector<IdealMask> out;
  for (IdealMask m : ideals) {
    if (m == full) continue;
    bool topped = false;
    for (IdealMask o : ideals)
      if (o != m && o != full && (m & ~o) == 0) { topped = true; break; }
    if (!topped) out.push_back(m);
  }
  return out;
}

inline bool is_local_ring(const FiniteRing& r) { return maximal_ideals(r).size() == 1; }

struct QuotientRing {
  FiniteRing ring;
  std::vector<int> to_quotient;  // element of r -> element of ring
};

// r / ideal with cosets named after their least representative
inline QuotientRing quotient_ring(const FiniteRing& r, IdealMask ideal) {
  const std::size_t n = r.size();
  std::vector<int> coset(n, -1);
  std::vector<std::string> labels;
  std::vector<int> reps;
  for (std::size_t x = 0; x < n; ++x) {
    if (coset[x] >= 0) continue;
    int c = static_cast<int>(reps.size());
    for (std::size_t i = 0; i < n; ++i)
      if (ideal >> i & 1) coset[r.add(static_cast<int>(x), static_cast<int>(i))] = c;
    require_invariant(coset[x] == c, "ideal cosets do not partition the ring");
    reps.push_back(static_cast<int>(x));
    labels.push_back(r.label(x) + "~");
  }
  const std::size_t q = reps.size();
  std::vector<int> add(q * q), mul(q * q);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j) {
      add[i * q + j] = coset[r.add(reps[i], reps[j])];
      mul[i * q + j] = coset[r.mul(reps[i], reps[j])];
    }
  return {FiniteRing::from_tables(std::move(labels), std::move(add), std::move(mul)),
          std::move(coset)};
}

struct Localization {
  FiniteRing ring;
  std::vector<int> to_local;  // r -> its image
};

// Localizing a finite ring at a prime collapses exactly the elements with a
// zero multiple outside the prime, so the result is the quotient by that
// annihilator.  The construction verifies its own contract: images of the
// complement must become units and the result must be local.
inline Localization localize_at_prime(const FiniteRing& r, IdealMask prime) {
  if (ideal_closure(r, prime) != prime || !is_prime_ideal(r, prime))
    math_error(ErrorCode::NotPrime,
               set_label(r, prime) + " is not a prime ideal of the ring");
  const std::size_t n = r.size();
  IdealMask ann = 0;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t s = 0; s < n; ++s) {
      if (prime >> s & 1) continue;
      if (r.mul(static_cast<int>(x), static_cast<int>(s)) == r.zero()) {
        ann |= IdealMask(1) << x;
        break;
      }
    }
  require_invariant(ideal_closure(r, ann) == ann,
                    "annihilator of the complement is not an ideal");
  QuotientRing q = quotient_ring(r, ann);
  for (std::size_t s = 0; s < n; ++s) {
    if (prime >> s & 1) continue;
    if (!q.ring.is_unit(q.to_quotient[s]))
      math_error(ErrorCode::StalkNotLocal,
                 "image of " + r.label(s) + " fails to become a unit");
  }
  if (!is_local_ring(q.ring))
    math_error(ErrorCode::StalkNotLocal, "localization did not come out local");
  return {std::move(q.ring), std::move(q.to_quotient)};
}

// A unital ring homomorphism as an image table.
struct RingMap {
  FiniteRing source, target;
  std::vector<int> images;

  RingMap(FiniteRing src, FiniteRing tgt, std::vector<int> img)
      : source(std::move(src)), target(std::move(tgt)), images(std::move(img)) {
    const std::size_t n = source.size();
    if (images.size() != n)
      math_error(ErrorCode::ShapeMismatch, "image table has the wrong length");
    if (images[source.zero()] != target.zero() || images[source.one()] != target.one())
      math_error(ErrorCode::ShapeMismatch, "ring map must fix zero and one");
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) {
        if (images[source.add(static_cast<int>(x), static_cast<int>(y))] !=
            target.add(images[x], images[y]))
          math_error(ErrorCode::ShapeMismatch, "image table does not respect addition");
        if (images[source.mul(static_cast<int>(x), static_cast<int>(y))] !=
            target.mul(images[x], images[y]))
          math_error(ErrorCode::ShapeMismatch,
                     "image table does not respect multiplication");
      }
  }

  static RingMap identity(const FiniteRing& r) {
    std::vector<int> img(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) img[i] = static_cast<int>(i);
    return RingMap(r, r, std::move(img));
  }

  bool is_bijective() const {
    if (source.size() != target.size()) return false;
    std::vector<bool> hit(target.size(), false);
    for (int v : images) {
      if (hit[v]) return false;
      hit[v] = true;
    }
    return true;
  }

  bool operator==(const RingMap&) const = default;
};

inline RingMap compose(const RingMap& g, const RingMap& f) {
  if (!(f.target == g.source))
    math_error(ErrorCode::ShapeMismatch, "ring maps do not compose");
  std::vector<int> img(f.images.size());
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = g.images[f.images[i]];
  return RingMap(f.source, g.target, std::move(img));
}

namespace detail {

// greedy generating set: add the first element outside the closure so far
inline std::vector<int> generating_set(const FiniteRing& r) {
  std::vector<bool> known(r.size(), false);
  auto close = [&]() {
    bool grew = true;
    while (grew) {
      grew = false;
      for (std::size_t x = 0; x < r.size(); ++x) {
        if (!known[x]) continue;
        for (std::size_t y = 0; y < r.size(); ++y) {
          if (!known[y]) continue;
          int s = r.add(static_cast<int>(x), static_cast<int>(y));
          int p = r.mul(static_cast<int>(x), static_cast<int>(y));
          if (!known[s]) { known[s] = true; grew = true; }
          if (!known[p]) { known[p] = true; grew = true; }
        }
      }
    }
  };
  std::vector<int> gens;
  known[r.zero()] = known[r.one()] = true;
  close();
  for (std::size_t x = 0; x < r.size(); ++x)
    if (!known[x]) {
      gens.push_back(static_cast<int>(x));
      known[x] = true;
      close();
    }
  return gens;
}

// propagate a partial map from its defined entries; false on conflict
inline bool propagate(const FiniteRing& a, const FiniteRing& b, std::vector<int>& phi) {
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t x = 0; x < a.size(); ++x) {
      if (phi[x] < 0) continue;
      for (std::size_t y = 0; y < a.size(); ++y) {
        if (phi[y] < 0) continue;
        struct { int src, tgt; } ops[2] = {
            {a.add(static_cast<int>(x), static_cast<int>(y)), b.add(phi[x], phi[y])},
            {a.mul(static_cast<int>(x), static_cast<int>(y)), b.mul(phi[x], phi[y])}};
        for (auto [src, tgt] : ops) {
          if (phi[src] < 0) { phi[src] = tgt; grew = true; }
          else if (phi[src] != tgt) return false;
        }
      }
    }
  }
  return true;
}

inline bool iso_dfs(const FiniteRing& a, const FiniteRing& b,
                    const std::vector<int>& gens, std::size_t at, std::vector<int> phi,
                    const std::function<bool(const RingMap&)>& visit) {
  if (at == gens.size()) {
    std::vector<bool> hit(b.size(), false);
    for (std::size_t x = 0; x < a.size(); ++x) {
      if (phi[x] < 0 || hit[phi[x]]) return false;
      hit[phi[x]] = true;
    }
    for (std::size_t x = 0; x < a.size(); ++x)
      for (std::size_t y = 0; y < a.size(); ++y) {
        if (phi[a.add(static_cast<int>(x), static_cast<int>(y))] !=
            b.add(phi[x], phi[y]))
          return false;
        if (phi[a.mul(static_cast<int>(x), static_cast<int>(y))] !=
            b.mul(phi[x], phi[y]))
          return false;
      }
    return visit(RingMap(a, b, phi));
  }
  int g = gens[at];
  if (phi[g] >= 0) return iso_dfs(a, b, gens, at + 1, std::move(phi), visit);
  for (std::size_t img = 0; img < b.size(); ++img) {
    if (a.additive_order(g) != b.additive_order(static_cast<int>(img))) continue;
    if (a.is_unit(g) != b.is_unit(static_cast<int>(img))) continue;
    std::vector<int> next = phi;
    if (std::find(next.begin(), next.end(), static_cast<int>(img)) != next.end())
      continue;
    next[g] = static_cast<int>(img);
    if (!propagate(a, b, next)) continue;
    if (iso_dfs(a, b, gens, at + 1, std::move(next), visit)) return true;
  }
  return false;
}

}  // namespace detail

// Visit ring isomorphisms a -> b until the callback returns true; returns
// whether it ever did.
inline bool for_each_ring_isomorphism(const FiniteRing& a, const FiniteRing& b,
                                      const std::function<bool(const RingMap&)>& visit) {
  if (a.size() != b.size() || a.characteristic() != b.characteristic()) return false;
  std::vector<int> phi(a.size(), -1);
  phi[a.zero()] = b.zero();
  phi[a.one()] = b.one();
  if (!detail::propagate(a, b, phi)) return false;
  std::vector<int> gens = detail::generating_set(a);
  // generators already forced by 0 and 1 would stall the search; drop them
  std::vector<int> open_gens;
  for (int g : gens)
    if (phi[g] < 0) open_gens.push_back(g);
  return detail::iso_dfs(a, b, open_gens, 0, std::move(phi), visit);
}

inline std::optional<RingMap> find_ring_isomorphism(const FiniteRing& a,
                                                    const FiniteRing& b) {
  std::optional<RingMap> out;
  for_each_ring_isomorphism(a, b, [&](const RingMap& m) {
    out = m;
    return true;
  });
  return out;
}

inline bool rings_isomorphic(const FiniteRing& a, const FiniteRing& b) {
  return find_ring_isomorphism(a, b).has_value();
}

}  // namespace structura::ringspec
