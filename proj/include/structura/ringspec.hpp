#pragma once

#include <algorithm>
#include <bit>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "structura/abelian.hpp"
#include "structura/errors.hpp"
#include "structura/finite_ring.hpp"
#include "structura/finspace.hpp"
#include "structura/presheaf.hpp"

namespace structura::ringspec {

using finspace::FiniteSpace;
using finspace::Mask;
using sheaf::Presheaf;

// ---------------------------------------------------------------------------
// Additive shadows: the underlying abelian group of a finite ring, with
// coordinate changes between ring elements and canonical generators.  The
// sheaf axioms for ring valued presheaves are exactly the sheaf axioms of
// these shadows, since both locality and gluing only mention addition.

struct AdditiveShadow {
  exactla::FgAbGroup group;
  exactla::IntMatrix to_can;    // group.gens x ring.size()
  exactla::IntMatrix from_can;  // ring.size() x group.gens
};

inline AdditiveShadow additive_shadow(const FiniteRing& r) {
  const std::size_t n = r.size();
  // one generator per element, one relation e_x + e_y - e_{x+y} per pair
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x; y < n; ++y) pairs.push_back({x, y});
  exactla::IntMatrix rels(n, pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    auto [x, y] = pairs[k];
    rels(x, k) += 1;
    rels(y, k) += 1;
    rels(static_cast<std::size_t>(
             r.add(static_cast<int>(x), static_cast<int>(y))),
         k) -= 1;
  }
  exactla::Canonicalized c = exactla::canonicalize({n, std::move(rels)});
  return {std::move(c.group), std::move(c.to_can), std::move(c.from_can)};
}

inline exactla::GroupMap additive_map(const RingMap& f, const AdditiveShadow& src,
                                      const AdditiveShadow& tgt) {
  exactla::IntMatrix images(f.target.size(), f.source.size());
  for (std::size_t x = 0; x < f.source.size(); ++x)
    images(static_cast<std::size_t>(f.images[x]), x) = 1;
  return exactla::GroupMap(src.group, tgt.group,
                           mul(tgt.to_can, mul(images, src.from_can)));
}

// The group valued presheaf underlying a ring valued one.
inline Presheaf additive_presheaf(const Presheaf& f) {
  if (f.kind() != sheaf::ValueKind::RingFamily)
    math_error(ErrorCode::WrongValueKind,
               "additive shadows need a ring valued presheaf");
  const FiniteSpace& s = f.space();
  std::map<Mask, AdditiveShadow> shadows;
  std::map<Mask, sheaf::Value> values;
  for (Mask u : s.opens()) {
    if (u == 0) continue;
    shadows.emplace(u, additive_shadow(f.ring_value(u)));
    values.emplace(u, shadows.at(u).group);
  }
  std::map<std::pair<Mask, Mask>, sheaf::Morphism> rho;
  for (Mask v : s.opens())
    for (Mask u : s.opens()) {
      if (u == 0 || u == v || (u & ~v) != 0) continue;
      rho.emplace(std::make_pair(u, v),
                  additive_map(f.ring_rho(u, v), shadows.at(v), shadows.at(u)));
    }
  return Presheaf(s, sheaf::ValueKind::AbGroup, std::move(values), rho);
}

inline sheaf::SheafReport check_ring_sheaf_axioms(const Presheaf& f) {
  return sheaf::check_sheaf_axioms(additive_presheaf(f));
}

// ---------------------------------------------------------------------------
// Ringed finite spaces: a space together with a sheaf of finite rings.  The
// factory is the validation gate, so instances in circulation are sheaves.

struct RingedFiniteSpace {
  FiniteSpace space;
  Presheaf structure;

  bool operator==(const RingedFiniteSpace&) const = default;
};

inline RingedFiniteSpace ringed_space(const FiniteSpace& s, const Presheaf& f) {
  if (!(f.space() == s))
    math_error(ErrorCode::BaseMismatch,
               "structure sheaf lives on a different space");
  if (f.kind() != sheaf::ValueKind::RingFamily)
    math_error(ErrorCode::WrongValueKind, "a ringed space needs ring values");
  sheaf::require_presheaf_laws(f);
  sheaf::SheafReport rep = check_ring_sheaf_axioms(f);
  if (!rep.ok)
    math_error(ErrorCode::NotASheaf,
               rep.failures.front().axiom + " fails additively on " +
                   s.set_label(rep.failures.front().open));
  return {s, f};
}

inline const FiniteRing& stalk_ring(const RingedFiniteSpace& x, std::size_t point) {
  return x.structure.ring_value(x.space.minimal_open(point));
}

struct PointLocality {
  std::string point;
  bool local = false;
  std::size_t maximal_count = 0;
};

struct LocallyRingedReport {
  bool ok = true;
  std::vector<PointLocality> points;
};

inline LocallyRingedReport check_locally_ringed(const RingedFiniteSpace& x) {
  LocallyRingedReport rep;
  for (std::size_t i = 0; i < x.space.point_count(); ++i) {
    std::size_t count = maximal_ideals(stalk_ring(x, i)).size();
    rep.points.push_back({x.space.label(i), count == 1, count});
    rep.ok = rep.ok && count == 1;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Section rings by compatible tuples.  A TupleRing remembers which component
// choices each element stands for, which is what restriction maps project.

struct TupleRing {
  FiniteRing ring;
  std::vector<std::vector<int>> tuples;  // element -> one pick per factor

  std::size_t index_of(const std::vector<int>& t) const {
    auto it = std::find(tuples.begin(), tuples.end(), t);
    require_invariant(it != tuples.end(), "tuple ring lost a componentwise image");
    return static_cast<std::size_t>(it - tuples.begin());
  }
};

// component `at` must equal what `via` makes of component `from`
struct TupleConstraint {
  std::size_t at = 0;
  std::size_t from = 0;
  RingMap via;
};

namespace detail {

inline std::string tuple_label(const std::vector<FiniteRing>& factors,
                               const std::vector<int>& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ",";
    s += factors[i].label(static_cast<std::size_t>(t[i]));
  }
  return s + ")";
}

inline void compatible_tuples(const std::vector<FiniteRing>& factors,
                              const std::vector<TupleConstraint>& constraints,
                              std::vector<int>& scratch,
                              std::vector<std::vector<int>>& out) {
  std::size_t at = scratch.size();
  if (at == factors.size()) {
    out.push_back(scratch);
    return;
  }
  for (std::size_t v = 0; v < factors[at].size(); ++v) {
    bool ok = true;
    for (const TupleConstraint& c : constraints) {
      if (c.at == at && c.from < at)
        ok = ok && static_cast<int>(v) == c.via.images[scratch[c.from]];
      if (c.from == at && c.at < at)
        ok = ok && scratch[c.at] == c.via.images[v];
    }
    if (!ok) continue;
    scratch.push_back(static_cast<int>(v));
    compatible_tuples(factors, constraints, scratch, out);
    scratch.pop_back();
  }
}

}  // namespace detail

// All constraint-compatible tuples over the factors, made into a ring with
// componentwise operations.  A single unconstrained factor passes through
// untouched, so stalk values keep their own element labels.
inline TupleRing compatible_tuple_ring(const std::vector<FiniteRing>& factors,
                                       const std::vector<TupleConstraint>& constraints,
                                       std::size_t max_elements,
                                       const std::string& what) {
  if (factors.empty()) {
    FiniteRing zero = FiniteRing::zmod(1);
    return {zero, {{}}};
  }
  if (factors.size() == 1 && constraints.empty()) {
    std::vector<std::vector<int>> ts;
    for (std::size_t i = 0; i < factors[0].size(); ++i)
      ts.push_back({static_cast<int>(i)});
    return {factors[0], std::move(ts)};
  }
  std::vector<std::vector<int>> ts;
  std::vector<int> scratch;
  detail::compatible_tuples(factors, constraints, scratch, ts);
  if (ts.size() > max_elements || ts.size() > 64)
    math_error(ErrorCode::TooLarge,
               what + " has " + std::to_string(ts.size()) +
                   " sections, above the bound " +
                   std::to_string(std::min<std::size_t>(max_elements, 64)));
  require_invariant(!ts.empty(), "no compatible tuples: zero sections missing");
  auto find = [&](const std::vector<int>& t) {
    auto it = std::find(ts.begin(), ts.end(), t);
    require_invariant(it != ts.end(), "compatible tuples are not closed under ops");
    return static_cast<int>(it - ts.begin());
  };
  const std::size_t n = ts.size();
  std::vector<std::string> labels;
  std::vector<int> add(n * n), mul(n * n);
  for (const auto& t : ts) labels.push_back(detail::tuple_label(factors, t));
  std::vector<int> sum(factors.size()), prod(factors.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < factors.size(); ++k) {
        sum[k] = factors[k].add(ts[i][k], ts[j][k]);
        prod[k] = factors[k].mul(ts[i][k], ts[j][k]);
      }
      add[i * n + j] = find(sum);
      mul[i * n + j] = find(prod);
    }
  return {FiniteRing::from_tables(std::move(labels), std::move(add), std::move(mul)),
          std::move(ts)};
}

// ---------------------------------------------------------------------------
// Sheafification for ring valued presheaves, by compatible families of stalk
// germs, mirroring the group valued construction.

struct RingSheafification {
  Presheaf result;
  std::map<Mask, RingMap> unit;  // F(u) -> result(u)
};

inline RingSheafification sheafify_ring(const Presheaf& f,
                                        std::size_t max_elements = 64) {
  if (f.kind() != sheaf::ValueKind::RingFamily)
    math_error(ErrorCode::WrongValueKind,
               "ring sheafification needs a ring valued presheaf");
  sheaf::require_presheaf_laws(f);
  const FiniteSpace& s = f.space();

  std::map<Mask, TupleRing> rings;
  std::map<Mask, std::vector<std::size_t>> points_of;
  for (Mask u : s.opens()) {
    if (u == 0) continue;
    std::vector<std::size_t> pts;
    for (std::size_t x = 0; x < s.point_count(); ++x)
      if (u >> x & 1) pts.push_back(x);
    std::vector<FiniteRing> factors;
    for (std::size_t x : pts) factors.push_back(f.ring_value(s.minimal_open(x)));
    std::vector<TupleConstraint> constraints;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = 0; j < pts.size(); ++j) {
        if (i == j || !s.below(pts[i], pts[j])) continue;
        constraints.push_back(
            {i, j, f.ring_rho(s.minimal_open(pts[i]), s.minimal_open(pts[j]))});
      }
    rings.emplace(u, compatible_tuple_ring(factors, constraints, max_elements,
                                           "germ families over " + s.set_label(u)));
    points_of.emplace(u, std::move(pts));
  }

  std::map<Mask, sheaf::Value> values;
  for (const auto& [u, tr] : rings) values.emplace(u, tr.ring);
  std::map<std::pair<Mask, Mask>, sheaf::Morphism> rho;
  for (Mask v : s.opens())
    for (Mask u : s.opens()) {
      if (u == 0 || u == v || (u & ~v) != 0) continue;
      const TupleRing& big = rings.at(v);
      const TupleRing& small = rings.at(u);
      std::vector<std::size_t> keep;
      for (std::size_t i = 0; i < points_of.at(v).size(); ++i)
        if (u >> points_of.at(v)[i] & 1) keep.push_back(i);
      std::vector<int> images;
      for (const auto& t : big.tuples) {
        std::vector<int> cut;
        for (std::size_t i : keep) cut.push_back(t[i]);
        images.push_back(static_cast<int>(small.index_of(cut)));
      }
      rho.emplace(std::make_pair(u, v), RingMap(big.ring, small.ring, std::move(images)));
    }

  RingSheafification out{Presheaf(s, sheaf::ValueKind::RingFamily,
                                  std::move(values), rho),
                         {}};
  for (Mask u : s.opens()) {
    if (u == 0) continue;
    const FiniteRing& src = f.ring_value(u);
    const TupleRing& tr = rings.at(u);
    std::vector<int> images;
    for (std::size_t e = 0; e < src.size(); ++e) {
      std::vector<int> t;
      for (std::size_t x : points_of.at(u))
        t.push_back(f.ring_rho(s.minimal_open(x), u).images[e]);
      images.push_back(static_cast<int>(tr.index_of(t)));
    }
    out.unit.emplace(u, RingMap(src, tr.ring, std::move(images)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spec of a finite commutative ring: prime ideals with the Zariski topology
// and the localizations as a structure sheaf.

namespace detail {

// label a prime by a greedy generating set, "(0)" for the zero ideal
inline std::string prime_label(const FiniteRing& r, IdealMask p) {
  std::vector<int> gens;
  IdealMask have = ideal_closure(r, 0);
  for (std::size_t x = 0; x < r.size(); ++x) {
    if (!(p >> x & 1) || (have >> x & 1)) continue;
    gens.push_back(static_cast<int>(x));
    IdealMask seed = have;
    for (int g : gens) seed |= IdealMask(1) << g;
    have = ideal_closure(r, seed);
  }
  if (gens.empty()) return "(" + r.label(static_cast<std::size_t>(r.zero())) + ")";
  std::string s = "(";
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (i) s += ",";
    s += r.label(static_cast<std::size_t>(gens[i]));
  }
  return s + ")";
}

}  // namespace detail

struct SpecResult {
  RingedFiniteSpace ringed;
  std::vector<IdealMask> primes;  // per point, as element masks in the input ring
};

inline SpecResult spec_of_ring(const FiniteRing& r, std::size_t max_elements = 64) {
  std::vector<IdealMask> primes = prime_ideals(r);
  require_invariant(!primes.empty(), "a nonzero ring has at least one prime");
  std::vector<std::string> labels;
  for (IdealMask p : primes) labels.push_back(detail::prime_label(r, p));

  // closed sets are the primes above an ideal; opens are their complements
  const Mask full =
      primes.size() == 64 ? ~Mask(0) : (Mask(1) << primes.size()) - 1;
  std::vector<Mask> opens;
  for (IdealMask ideal : all_ideals(r)) {
    Mask vanish = 0;
    for (std::size_t j = 0; j < primes.size(); ++j)
      if ((ideal & ~primes[j]) == 0) vanish |= Mask(1) << j;
    opens.push_back(full & ~vanish);
  }
  finspace::SpaceValidation sv = finspace::validate_space(labels, opens);
  require_invariant(sv.was_t0, "distinct primes became indistinguishable points");
  const FiniteSpace& space = sv.space;

  std::vector<Localization> stalks;
  for (IdealMask p : primes) stalks.push_back(localize_at_prime(r, p));

  // sections over an open are stalk tuples compatible with further
  // localization along specialization
  std::map<Mask, TupleRing> rings;
  std::map<Mask, std::vector<std::size_t>> points_of;
  for (Mask u : space.opens()) {
    if (u == 0) continue;
    std::vector<std::size_t> pts;
    for (std::size_t j = 0; j < primes.size(); ++j)
      if (u >> j & 1) pts.push_back(j);
    std::vector<FiniteRing> factors;
    for (std::size_t j : pts) factors.push_back(stalks[j].ring);
    std::vector<TupleConstraint> constraints;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = 0; j < pts.size(); ++j) {
        if (i == j || !space.below(pts[i], pts[j])) continue;
        // localize further: any preimage in r of a stalk element works
        std::vector<int> images(stalks[pts[j]].ring.size(), -1);
        for (std::size_t x = 0; x < r.size(); ++x)
          images[static_cast<std::size_t>(stalks[pts[j]].to_local[x])] =
              stalks[pts[i]].to_local[x];
        constraints.push_back({i, j,
                               RingMap(stalks[pts[j]].ring, stalks[pts[i]].ring,
                                       std::move(images))});
      }
    rings.emplace(u, compatible_tuple_ring(factors, constraints, max_elements,
                                           "sections over " + space.set_label(u)));
    points_of.emplace(u, std::move(pts));
  }

  std::map<Mask, sheaf::Value> values;
  for (const auto& [u, tr] : rings) values.emplace(u, tr.ring);
  std::map<std::pair<Mask, Mask>, sheaf::Morphism> rho;
  for (Mask v : space.opens())
    for (Mask u : space.opens()) {
      if (u == 0 || u == v || (u & ~v) != 0) continue;
      const TupleRing& big = rings.at(v);
      const TupleRing& small = rings.at(u);
      std::vector<std::size_t> keep;
      for (std::size_t i = 0; i < points_of.at(v).size(); ++i)
        if (u >> points_of.at(v)[i] & 1) keep.push_back(i);
      std::vector<int> images;
      for (const auto& t : big.tuples) {
        std::vector<int> cut;
        for (std::size_t i : keep) cut.push_back(t[i]);
        images.push_back(static_cast<int>(small.index_of(cut)));
      }
      rho.emplace(std::make_pair(u, v), RingMap(big.ring, small.ring, std::move(images)));
    }

  Presheaf structure(space, sheaf::ValueKind::RingFamily, std::move(values), rho);
  return {ringed_space(space, structure), std::move(primes)};
}

// ---------------------------------------------------------------------------
// Structural ringed spaces: a structured presheaf whose members are rings.
// Decomposition plus stalk locality is the entry check for everything below.

// split a structured presheaf into its members, insisting on ring values
inline std::vector<Presheaf> decompose_ring_members(const Presheaf& f) {
  std::vector<Presheaf> comps;
  try {
    comps = sheaf::decompose_structured(f);
  } catch (const MathError& e) {
    math_error(ErrorCode::DecompositionFails, e.what());
  }
  for (std::size_t p = 0; p < comps.size(); ++p)
    if (comps[p].kind() != sheaf::ValueKind::RingFamily)
      math_error(ErrorCode::DecompositionFails,
                 "member " + std::to_string(p + 1) + " is not ring valued");
  return comps;
}

namespace detail {

inline void require_local_stalks(const std::vector<Presheaf>& comps) {
  for (std::size_t p = 0; p < comps.size(); ++p) {
    const FiniteSpace& s = comps[p].space();
    for (std::size_t x = 0; x < s.point_count(); ++x) {
      const FiniteRing& st = comps[p].ring_value(s.minimal_open(x));
      if (!is_local_ring(st))
        math_error(ErrorCode::StalkNotLocal,
                   "stalk at " + s.label(x) + " for member " +
                       std::to_string(p + 1) + " has " +
                       std::to_string(maximal_ideals(st).size()) +
                       " maximal ideals");
    }
  }
}

// the open subspace on u, with its piece of a ring valued presheaf
inline RingedFiniteSpace open_subspace(const Presheaf& f, Mask u) {
  const FiniteSpace& s = f.space();
  std::vector<std::size_t> pts;
  for (std::size_t x = 0; x < s.point_count(); ++x)
    if (u >> x & 1) pts.push_back(x);
  std::vector<std::string> labels;
  for (std::size_t x : pts) labels.push_back(s.label(x));
  auto shrink = [&](Mask o) {
    Mask m = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (o >> pts[i] & 1) m |= Mask(1) << i;
    return m;
  };
  std::vector<Mask> sub_opens;
  for (Mask o : s.opens_within(u)) sub_opens.push_back(shrink(o));
  finspace::SpaceValidation sv = finspace::validate_space(labels, sub_opens);
  require_invariant(sv.was_t0, "an open subspace of a T0 space must be T0");

  std::map<Mask, sheaf::Value> values;
  std::map<std::pair<Mask, Mask>, sheaf::Morphism> rho;
  for (Mask o : s.opens_within(u)) {
    if (o == 0) continue;
    values.emplace(shrink(o), f.ring_value(o));
    for (Mask i : s.opens_within(o))
      if (i != 0 && i != o)
        rho.emplace(std::make_pair(shrink(i), shrink(o)), f.ring_rho(i, o));
  }
  Presheaf piece(sv.space, sheaf::ValueKind::RingFamily, std::move(values), rho);
  return ringed_space(sv.space, piece);
}

// Isomorphism of locally ringed spaces by exhaustive search: an order
// bijection of points together with stalk ring isomorphisms commuting with
// the stalk-to-stalk restrictions.  Sheaves on finite spaces are pinned by
// this data, so nothing beyond stalks needs matching.
inline bool stalk_isos_from(const RingedFiniteSpace& a, const RingedFiniteSpace& b,
                            const std::vector<std::size_t>& to_b, std::size_t at,
                            std::vector<RingMap>& chosen) {
  if (at == a.space.point_count()) return true;
  bool found = false;
  for_each_ring_isomorphism(
      stalk_ring(a, at), stalk_ring(b, to_b[at]), [&](const RingMap& iso) {
        for (std::size_t prev = 0; prev < at; ++prev) {
          if (a.space.below(prev, at) && prev != at) {
            RingMap down_a = a.structure.ring_rho(a.space.minimal_open(prev),
                                                  a.space.minimal_open(at));
            RingMap down_b = b.structure.ring_rho(b.space.minimal_open(to_b[prev]),
                                                  b.space.minimal_open(to_b[at]));
            if (!(compose(down_b, iso) == compose(chosen[prev], down_a))) return false;
          }
          if (a.space.below(at, prev) && prev != at) {
            RingMap down_a = a.structure.ring_rho(a.space.minimal_open(at),
                                                  a.space.minimal_open(prev));
            RingMap down_b = b.structure.ring_rho(b.space.minimal_open(to_b[at]),
                                                  b.space.minimal_open(to_b[prev]));
            if (!(compose(down_b, chosen[prev]) == compose(iso, down_a))) return false;
          }
        }
        chosen.push_back(iso);
        if (stalk_isos_from(a, b, to_b, at + 1, chosen)) {
          found = true;
          return true;
        }
        chosen.pop_back();
        return false;
      });
  return found;
}

inline bool locally_ringed_isomorphic(const RingedFiniteSpace& a,
                                      const RingedFiniteSpace& b) {
  const std::size_t n = a.space.point_count();
  if (n != b.space.point_count()) return false;
  std::vector<std::size_t> to_b(n);
  std::iota(to_b.begin(), to_b.end(), 0);
  do {
    bool order_iso = true;
    for (std::size_t x = 0; x < n && order_iso; ++x)
      for (std::size_t y = 0; y < n && order_iso; ++y)
        order_iso = a.space.below(x, y) == b.space.below(to_b[x], to_b[y]);
    if (!order_iso) continue;
    std::vector<RingMap> chosen;
    if (stalk_isos_from(a, b, to_b, 0, chosen)) return true;
  } while (std::next_permutation(to_b.begin(), to_b.end()));
  return false;
}

}  // namespace detail

struct SchemeVerdict {
  std::size_t member = 0;  // cover member index
  std::size_t p = 0;       // family member index
  bool ok = false;
  std::string detail;
};

struct SchemeReport {
  bool scheme = true;
  std::vector<SchemeVerdict> verdicts;
};

// Decides whether each cover member, in each family slot, is isomorphic as a
// locally ringed space to the spectrum of the named candidate ring.
inline SchemeReport recognize_structural_scheme(
    const Presheaf& f, const std::vector<Mask>& cover_members,
    const std::vector<std::vector<FiniteRing>>& candidates,
    std::size_t max_elements = 64) {
  std::vector<Presheaf> comps = decompose_ring_members(f);
  detail::require_local_stalks(comps);
  finspace::make_cover(f.space(), f.space().full_mask(), cover_members);
  if (candidates.size() != cover_members.size())
    input_error(ErrorCode::ShapeMismatch,
                "one candidate list per cover member is required");
  for (const auto& row : candidates)
    if (row.size() != comps.size())
      input_error(ErrorCode::ShapeMismatch,
                  "each candidate list needs one ring per family member");

  SchemeReport rep;
  for (std::size_t i = 0; i < cover_members.size(); ++i)
    for (std::size_t p = 0; p < comps.size(); ++p) {
      RingedFiniteSpace piece = detail::open_subspace(comps[p], cover_members[i]);
      SpecResult model = spec_of_ring(candidates[i][p], max_elements);
      SchemeVerdict v{i, p, false, ""};
      if (detail::locally_ringed_isomorphic(model.ringed, piece)) {
        v.ok = true;
        v.detail = f.space().set_label(cover_members[i]) + " matches the spectrum";
      } else {
        v.detail = f.space().set_label(cover_members[i]) +
                   " is not the spectrum of the candidate";
        rep.scheme = false;
      }
      rep.verdicts.push_back(std::move(v));
    }
  return rep;
}

// ---------------------------------------------------------------------------
// The disjoint union of one copy of the base per family member, each copy
// carrying its sheafified component.  Sections over a union open multiply
// the per-copy sections with empty traces dropped.

struct DisjointUnion {
  RingedFiniteSpace total;
  std::size_t copies = 0;
  std::vector<Mask> copy_masks;  // the p-th copy of the base, as an open
};

inline DisjointUnion disjoint_union_assembly(const Presheaf& f,
                                             std::size_t max_elements = 64) {
  std::vector<Presheaf> comps = decompose_ring_members(f);
  std::vector<Presheaf> tilded;
  for (const Presheaf& c : comps)
    tilded.push_back(sheafify_ring(c, max_elements).result);

  const FiniteSpace& base = f.space();
  const std::size_t n = base.point_count(), m = comps.size();
  if (n * m > 64)
    math_error(ErrorCode::TooLarge,
               std::to_string(m) + " copies of " + std::to_string(n) +
                   " points exceed the 64 point cap");
  std::vector<std::string> labels;
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t x = 0; x < n; ++x)
      labels.push_back(base.label(x) + "@" + std::to_string(p + 1));

  std::size_t open_count = 1;
  for (std::size_t p = 0; p < m; ++p) {
    open_count *= base.opens().size();
    if (open_count > 4096)
      math_error(ErrorCode::TooLarge,
                 "the union topology exceeds 4096 open sets");
  }
  std::vector<Mask> opens(1, 0);
  for (std::size_t p = 0; p < m; ++p) {
    std::vector<Mask> next;
    for (Mask sofar : opens)
      for (Mask o : base.opens()) next.push_back(sofar | o << (p * n));
    opens = std::move(next);
  }
  finspace::SpaceValidation sv = finspace::validate_space(labels, opens);
  require_invariant(sv.was_t0, "a union of T0 spaces must be T0");
  const FiniteSpace& space = sv.space;

  const Mask base_full = base.full_mask();
  auto trace = [&](Mask u, std::size_t p) { return u >> (p * n) & base_full; };

  std::map<Mask, TupleRing> rings;
  std::map<Mask, std::vector<std::size_t>> live_of;
  for (Mask u : space.opens()) {
    if (u == 0) continue;
    std::vector<std::size_t> live;
    std::vector<FiniteRing> factors;
    for (std::size_t p = 0; p < m; ++p)
      if (trace(u, p) != 0) {
        live.push_back(p);
        factors.push_back(tilded[p].ring_value(trace(u, p)));
      }
    rings.emplace(u, compatible_tuple_ring(factors, {}, max_elements,
                                           "sections over " + space.set_label(u)));
    live_of.emplace(u, std::move(live));
  }

  std::map<Mask, sheaf::Value> values;
  for (const auto& [u, tr] : rings) values.emplace(u, tr.ring);
  std::map<std::pair<Mask, Mask>, sheaf::Morphism> rho;
  for (Mask v : space.opens())
    for (Mask u : space.opens()) {
      if (u == 0 || u == v || (u & ~v) != 0) continue;
      const TupleRing& big = rings.at(v);
      const TupleRing& small = rings.at(u);
      const auto& live_v = live_of.at(v);
      std::vector<int> images;
      for (const auto& t : big.tuples) {
        std::vector<int> cut;
        for (std::size_t i = 0; i < live_v.size(); ++i) {
          std::size_t p = live_v[i];
          if (trace(u, p) == 0) continue;
          cut.push_back(
              tilded[p].ring_rho(trace(u, p), trace(v, p)).images[t[i]]);
        }
        images.push_back(static_cast<int>(small.index_of(cut)));
      }
      rho.emplace(std::make_pair(u, v), RingMap(big.ring, small.ring, std::move(images)));
    }

  Presheaf structure(space, sheaf::ValueKind::RingFamily, std::move(values), rho);
  DisjointUnion out{ringed_space(space, structure), m, {}};
  for (std::size_t p = 0; p < m; ++p) out.copy_masks.push_back(base_full << (p * n));
  return out;
}

}  // namespace structura::ringspec
