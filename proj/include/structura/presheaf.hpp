#pragma once

#include <algorithm>
#include <bit>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "structura/abelian.hpp"
#include "structura/errors.hpp"
#include "structura/finspace.hpp"
#include "structura/strcat.hpp"

namespace structura::sheaf {

using finspace::FiniteSpace;
using finspace::Mask;

enum class ValueKind { AbGroup, RingFamily, Structured };

inline const char* kind_name(ValueKind k) {
  switch (k) {
    case ValueKind::AbGroup: return "AbGroup";
    case ValueKind::RingFamily: return "RingFamily";
    case ValueKind::Structured: return "Structured";
  }
  return "";
}

using Value =
    std::variant<exactla::FgAbGroup, ringspec::FiniteRing, strcat::StructuredFamily>;
using Morphism =
    std::variant<exactla::GroupMap, ringspec::RingMap, strcat::StructuredHom>;

namespace detail {

inline Morphism identity_morphism(const Value& v) {
  if (const auto* g = std::get_if<exactla::FgAbGroup>(&v))
    return exactla::GroupMap::identity(*g);
  if (const auto* r = std::get_if<ringspec::FiniteRing>(&v))
    return ringspec::RingMap::identity(*r);
  return strcat::StructuredHom::identity(std::get<strcat::StructuredFamily>(v));
}

inline Morphism compose_morphism(const Morphism& g, const Morphism& f) {
  if (const auto* gm = std::get_if<exactla::GroupMap>(&g))
    return exactla::compose(*gm, std::get<exactla::GroupMap>(f));
  if (const auto* rm = std::get_if<ringspec::RingMap>(&g))
    return ringspec::compose(*rm, std::get<ringspec::RingMap>(f));
  return strcat::compose(std::get<strcat::StructuredHom>(g),
                         std::get<strcat::StructuredHom>(f));
}

inline strcat::StructuredFamily trivial_family_like(const strcat::StructuredFamily& t) {
  std::vector<strcat::FamilyEntry> es;
  for (const strcat::FamilyEntry& e : t.entries) {
    strcat::Carrier c;
    switch (e.tag.kind) {
      case strcat::StructureTag::Kind::AbGroup:
        c = exactla::FgAbGroup::trivial();
        break;
      case strcat::StructureTag::Kind::Ring:
        c = ringspec::FiniteRing::zmod(1);
        break;
      case strcat::StructureTag::Kind::VectorSpace:
        c = std::size_t(0);
        break;
      case strcat::StructureTag::Kind::Opaque:
        c = e.carrier;  // nothing smaller to offer
        break;
    }
    es.push_back({e.tag, std::move(c)});
  }
  return strcat::StructuredFamily(t.partitionable, std::move(es));
}

inline Value zero_value_like(ValueKind kind, const Value& top) {
  switch (kind) {
    case ValueKind::AbGroup: return exactla::FgAbGroup::trivial();
    case ValueKind::RingFamily: return ringspec::FiniteRing::zmod(1);
    case ValueKind::Structured:
      return trivial_family_like(std::get<strcat::StructuredFamily>(top));
  }
  return exactla::FgAbGroup::trivial();
}

inline Morphism zero_morphism(const Value& from, const Value& to) {
  if (const auto* g = std::get_if<exactla::FgAbGroup>(&from))
    return exactla::GroupMap::zero(*g, std::get<exactla::FgAbGroup>(to));
  if (const auto* r = std::get_if<ringspec::FiniteRing>(&from)) {
    const auto& tgt = std::get<ringspec::FiniteRing>(to);
    std::vector<int> images(r->size(), tgt.zero());
    return ringspec::RingMap(*r, tgt, std::move(images));
  }
  const auto& sf = std::get<strcat::StructuredFamily>(from);
  const auto& tf = std::get<strcat::StructuredFamily>(to);
  std::vector<strcat::HomComponent> comps;
  for (std::size_t i = 0; i < sf.size(); ++i) {
    switch (sf.entries[i].tag.kind) {
      case strcat::StructureTag::Kind::AbGroup:
        comps.emplace_back(exactla::GroupMap::zero(
            std::get<exactla::FgAbGroup>(sf.entries[i].carrier),
            std::get<exactla::FgAbGroup>(tf.entries[i].carrier)));
        break;
      case strcat::StructureTag::Kind::Ring: {
        const auto& src = std::get<ringspec::FiniteRing>(sf.entries[i].carrier);
        const auto& tgt = std::get<ringspec::FiniteRing>(tf.entries[i].carrier);
        std::vector<int> images(src.size(), tgt.zero());
        comps.emplace_back(ringspec::RingMap(src, tgt, std::move(images)));
        break;
      }
      case strcat::StructureTag::Kind::VectorSpace:
        comps.emplace_back(exactla::FieldMatrix(
            sf.entries[i].tag.field,
            std::get<std::size_t>(tf.entries[i].carrier),
            std::get<std::size_t>(sf.entries[i].carrier)));
        break;
      case strcat::StructureTag::Kind::Opaque:
        comps.emplace_back(std::monostate{});
        break;
    }
  }
  return strcat::StructuredHom(sf, tf, strcat::Alignment::identity(sf.size()),
                               std::move(comps));
}

inline void check_morphism_endpoints(const Morphism& m, const Value& from,
                                     const Value& to, const std::string& where) {
  bool ok = false;
  if (const auto* gm = std::get_if<exactla::GroupMap>(&m))
    ok = gm->source == std::get<exactla::FgAbGroup>(from) &&
         gm->target == std::get<exactla::FgAbGroup>(to);
  else if (const auto* rm = std::get_if<ringspec::RingMap>(&m))
    ok = rm->source == std::get<ringspec::FiniteRing>(from) &&
         rm->target == std::get<ringspec::FiniteRing>(to);
  else if (const auto* sm = std::get_if<strcat::StructuredHom>(&m))
    ok = sm->source == std::get<strcat::StructuredFamily>(from) &&
         sm->target == std::get<strcat::StructuredFamily>(to);
  if (!ok) input_error(ErrorCode::ParseError, where + ": restriction endpoints do not match the values");
}

inline bool kind_fits(ValueKind kind, const Value& v) {
  switch (kind) {
    case ValueKind::AbGroup: return std::holds_alternative<exactla::FgAbGroup>(v);
    case ValueKind::RingFamily: return std::holds_alternative<ringspec::FiniteRing>(v);
    case ValueKind::Structured:
      return std::holds_alternative<strcat::StructuredFamily>(v);
  }
  return false;
}

}  // namespace detail

// A presheaf of values on the opens of a finite space.  Construction takes
// values on the nonempty opens and restriction morphisms for at least every
// covering pair of the open lattice, normalizes the empty open to the zero
// object, and fills in the full restriction table by composing along
// deterministic intermediate opens.  Whether the result obeys the functor
// laws is a separate question answered by check_presheaf_laws.
class Presheaf {
 public:
  Presheaf(FiniteSpace space, ValueKind kind, std::map<Mask, Value> values,
           const std::map<std::pair<Mask, Mask>, Morphism>& given)
      : space_(std::move(space)), kind_(kind), values_(std::move(values)) {
    for (Mask u : space_.opens()) {
      if (u == 0) continue;
      auto it = values_.find(u);
      if (it == values_.end())
        input_error(ErrorCode::ParseError,
                    "no value given on open " + space_.set_label(u));
      if (!detail::kind_fits(kind_, it->second))
        math_error(ErrorCode::WrongValueKind,
                   "value on " + space_.set_label(u) + " does not have kind " +
                       kind_name(kind_));
    }
    for (const auto& [u, v] : values_)
      if (!space_.is_open(u))
        math_error(ErrorCode::NotAnOpen,
                   "value attached to non-open " + space_.set_label(u));
    values_.erase(Mask(0));
    values_.emplace(Mask(0), detail::zero_value_like(kind_, values_.at(space_.full_mask())));

    // order the inclusion pairs by gap so intermediates are always ready
    std::vector<std::pair<Mask, Mask>> pairs;
    for (Mask v : space_.opens())
      for (Mask u : space_.opens())
        if ((u & ~v) == 0) pairs.push_back({u, v});
    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
      return std::popcount(a.second & ~a.first) < std::popcount(b.second & ~b.first);
    });
    for (const auto& [u, v] : pairs) {
      auto g = given.find({u, v});
      if (g != given.end()) {
        detail::check_morphism_endpoints(g->second, values_.at(v), values_.at(u),
                                         space_.set_label(u) + " <= " + space_.set_label(v));
        rho_.emplace(std::make_pair(u, v), g->second);
        continue;
      }
      if (u == v) {
        rho_.emplace(std::make_pair(u, v), detail::identity_morphism(values_.at(u)));
        continue;
      }
      if (u == 0) {
        rho_.emplace(std::make_pair(u, v),
                     detail::zero_morphism(values_.at(v), values_.at(0)));
        continue;
      }
      // compose through the largest strictly intermediate open
      Mask chosen = 0;
      bool found = false;
      for (Mask w : space_.opens()) {
        if (w == u || w == v) continue;
        if ((u & ~w) != 0 || (w & ~v) != 0) continue;
        if (!found || FiniteSpace::open_order(chosen, w)) { chosen = w; found = true; }
      }
      if (!found)
        input_error(ErrorCode::ParseError,
                    "no restriction given for covering pair " + space_.set_label(u) +
                        " <= " + space_.set_label(v));
      rho_.emplace(std::make_pair(u, v),
                   detail::compose_morphism(rho_.at({u, chosen}), rho_.at({chosen, v})));
    }
  }

  const FiniteSpace& space() const { return space_; }
  ValueKind kind() const { return kind_; }

  const Value& value(Mask u) const {
    auto it = values_.find(u);
    if (it == values_.end())
      math_error(ErrorCode::NotAnOpen, "no value on " + space_.set_label(u));
    return it->second;
  }

  const exactla::FgAbGroup& group_value(Mask u) const {
    return std::get<exactla::FgAbGroup>(value(u));
  }
  const ringspec::FiniteRing& ring_value(Mask u) const {
    return std::get<ringspec::FiniteRing>(value(u));
  }
  const strcat::StructuredFamily& family_value(Mask u) const {
    return std::get<strcat::StructuredFamily>(value(u));
  }

  // restriction from sections over v to sections over u, for u inside v
  const Morphism& rho(Mask u, Mask v) const {
    auto it = rho_.find({u, v});
    if (it == rho_.end())
      math_error(ErrorCode::NotAnOpen, "no restriction " + space_.set_label(u) +
                                           " <= " + space_.set_label(v));
    return it->second;
  }
  const exactla::GroupMap& group_rho(Mask u, Mask v) const {
    return std::get<exactla::GroupMap>(rho(u, v));
  }
  const ringspec::RingMap& ring_rho(Mask u, Mask v) const {
    return std::get<ringspec::RingMap>(rho(u, v));
  }
  const strcat::StructuredHom& family_rho(Mask u, Mask v) const {
    return std::get<strcat::StructuredHom>(rho(u, v));
  }

  bool operator==(const Presheaf&) const = default;

 private:
  FiniteSpace space_;
  ValueKind kind_;
  std::map<Mask, Value> values_;
  std::map<std::pair<Mask, Mask>, Morphism> rho_;
};

struct LawReport {
  bool ok = true;
  std::vector<std::string> violations;
};

// The two functor laws over the whole materialized table: identity on every
// open and compatibility along every inclusion triple.
inline LawReport check_presheaf_laws(const Presheaf& f) {
  LawReport rep;
  const FiniteSpace& s = f.space();
  for (Mask u : s.opens()) {
    if (!(f.rho(u, u) == detail::identity_morphism(f.value(u)))) {
      rep.ok = false;
      rep.violations.push_back("restriction on " + s.set_label(u) +
                               " to itself is not the identity");
    }
  }
  for (Mask w : s.opens())
    for (Mask v : s.opens()) {
      if ((v & ~w) != 0) continue;
      for (Mask u : s.opens()) {
        if ((u & ~v) != 0) continue;
        Morphism lhs = detail::compose_morphism(f.rho(u, v), f.rho(v, w));
        if (!(lhs == f.rho(u, w))) {
          rep.ok = false;
          rep.violations.push_back(
              "composite through " + s.set_label(v) + " disagrees with the direct " +
              "restriction " + s.set_label(u) + " <= " + s.set_label(w));
        }
      }
    }
  return rep;
}

inline void require_presheaf_laws(const Presheaf& f) {
  LawReport rep = check_presheaf_laws(f);
  if (!rep.ok)
    math_error(ErrorCode::PresheafLawsViolated, rep.violations.front());
}

namespace detail {

// the canonical cover of an open: the distinct minimal opens of its points
inline std::vector<Mask> canonical_cover(const FiniteSpace& s, Mask u) {
  std::vector<Mask> members;
  for (std::size_t x = 0; x < s.point_count(); ++x)
    if (u >> x & 1) {
      Mask m = s.minimal_open(x);
      if (std::find(members.begin(), members.end(), m) == members.end())
        members.push_back(m);
    }
  std::sort(members.begin(), members.end(), FiniteSpace::open_order);
  return members;
}

inline std::string render_vector(const std::vector<exactla::Int>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].str();
  return s + ")";
}

}  // namespace detail

struct SheafFailure {
  Mask open = 0;
  std::string axiom;    // "locality" or "gluing"
  std::string witness;  // the offending section or compatible family
};

struct SheafReport {
  bool ok = true;
  std::vector<SheafFailure> failures;
};

// Sheaf test for group valued presheaves against the canonical minimal-open
// cover of each open.  On a finite space those covers are the hardest ones:
// every cover of u refines the minimal cover memberwise, so locality and
// gluing here imply both axioms for all covers (the suite cross-checks that
// claim exhaustively on small spaces).
inline SheafReport check_sheaf_axioms(const Presheaf& f) {
  if (f.kind() != ValueKind::AbGroup)
    math_error(ErrorCode::WrongValueKind, "sheaf axioms are checked for AbGroup values");
  require_presheaf_laws(f);
  using namespace exactla;
  SheafReport rep;
  const FiniteSpace& s = f.space();
  for (Mask u : s.opens()) {
    if (u == 0) continue;
    std::vector<Mask> cov = detail::canonical_cover(s, u);
    std::vector<FgAbGroup> parts;
    for (Mask m : cov) parts.push_back(f.group_value(m));
    BlockSum b = block_sum(parts);

    IntMatrix stacked(b.block_gens, f.group_value(u).gens());
    for (std::size_t i = 0; i < cov.size(); ++i)
      stacked.set_block(b.offsets[i], 0, f.group_rho(cov[i], u).matrix);
    GroupMap phi(f.group_value(u), b.group, mul(b.to_can, stacked));

    std::vector<FgAbGroup> pair_parts;
    std::vector<std::pair<std::size_t, std::size_t>> pair_idx;
    for (std::size_t i = 0; i < cov.size(); ++i)
      for (std::size_t j = i + 1; j < cov.size(); ++j) {
        pair_parts.push_back(f.group_value(cov[i] & cov[j]));
        pair_idx.push_back({i, j});
      }
    BlockSum p = block_sum(pair_parts);
    std::vector<std::tuple<std::size_t, std::size_t, GroupMap>> delta_blocks;
    for (std::size_t k = 0; k < pair_idx.size(); ++k) {
      auto [i, j] = pair_idx[k];
      Mask meet = cov[i] & cov[j];
      delta_blocks.emplace_back(k, i, f.group_rho(meet, cov[i]));
      GroupMap neg = f.group_rho(meet, cov[j]);
      neg = GroupMap(neg.source, neg.target, negate(neg.matrix));
      delta_blocks.emplace_back(k, j, neg);
    }
    GroupMap delta = assemble_block_map(b, p, delta_blocks);

    SubquotientData ker_phi =
        subquotient_data(phi, GroupMap::zero(FgAbGroup::trivial(), phi.source));
    if (!ker_phi.group.is_trivial()) {
      std::vector<Int> wit(phi.source.gens());
      for (std::size_t i = 0; i < wit.size(); ++i) wit[i] = ker_phi.lift(i, 0);
      wit = reduce_mod_group(phi.source, wit);
      rep.ok = false;
      rep.failures.push_back(
          {u, "locality",
           "nonzero section " + detail::render_vector(wit) + " of " +
               to_string(f.group_value(u)) + " on " + s.set_label(u) +
               " restricts to zero on every member of the minimal cover"});
    }

    SubquotientData compat =
        subquotient_data(delta, GroupMap::zero(FgAbGroup::trivial(), b.group));
    IntMatrix glue = hstack(phi.matrix, relation_matrix(b.group));
    for (std::size_t c = 0; c < compat.group.gens(); ++c) {
      std::vector<Int> fam(b.group.gens());
      for (std::size_t i = 0; i < fam.size(); ++i) fam[i] = compat.lift(i, c);
      if (!solve(glue, fam)) {
        std::vector<Int> blocks = mat_apply(b.from_can, fam);
        std::string w = "compatible family";
        for (std::size_t i = 0; i < cov.size(); ++i) {
          std::vector<Int> piece(parts[i].gens());
          for (std::size_t j = 0; j < piece.size(); ++j)
            piece[j] = blocks[b.offsets[i] + j];
          w += " " + s.set_label(cov[i]) + ":" +
               detail::render_vector(reduce_mod_group(parts[i], piece));
        }
        rep.ok = false;
        rep.failures.push_back({u, "gluing", w + " has no section over " + s.set_label(u)});
        break;
      }
    }
  }
  return rep;
}

// Stalk at a point: the value on the minimal open, with the germ map from
// every open containing the point.
struct Stalk {
  Mask minimal = 0;
  Value value;
  std::vector<std::pair<Mask, Morphism>> germs;
};

inline Stalk stalk(const Presheaf& f, std::size_t point) {
  Mask ux = f.space().minimal_open(point);
  Stalk st{ux, f.value(ux), {}};
  for (Mask u : f.space().opens())
    if (u >> point & 1) st.germs.push_back({u, f.rho(ux, u)});
  return st;
}

// Sheafification of a group valued presheaf, built openwise from compatible
// families of germs: over u these are tuples (s_x) in the sum of the stalks
// with s_x the restriction of s_y whenever x specializes to y.  Keeping the
// kernel data per open lets the restriction of the result be computed by
// truncating representative tuples.
struct Sheafification {
  Presheaf result;
  std::map<Mask, exactla::GroupMap> unit;  // F(u) -> result(u)
};

inline Sheafification sheafify_with_unit(const Presheaf& f) {
  if (f.kind() != ValueKind::AbGroup)
    math_error(ErrorCode::WrongValueKind, "sheafification works on AbGroup values");
  require_presheaf_laws(f);
  using namespace exactla;
  const FiniteSpace& s = f.space();

  struct OpenData {
    std::vector<std::size_t> pts;
    BlockSum sum;
    SubquotientData families;
  };
  std::map<Mask, OpenData> data;
  for (Mask u : s.opens()) {
    OpenData d;
    for (std::size_t x = 0; x < s.point_count(); ++x)
      if (u >> x & 1) d.pts.push_back(x);
    std::vector<FgAbGroup> parts;
    for (std::size_t x : d.pts) parts.push_back(f.group_value(s.minimal_open(x)));
    d.sum = block_sum(parts);

    std::vector<FgAbGroup> cparts;
    std::vector<std::tuple<std::size_t, std::size_t, GroupMap>> blocks;
    std::size_t row = 0;
    for (std::size_t yi = 0; yi < d.pts.size(); ++yi)
      for (std::size_t xi = 0; xi < d.pts.size(); ++xi) {
        if (xi == yi) continue;
        std::size_t x = d.pts[xi], y = d.pts[yi];
        if (!s.below(x, y)) continue;
        // constraint rho(s_y) - s_x over the pair x below y
        cparts.push_back(f.group_value(s.minimal_open(x)));
        blocks.emplace_back(row, yi,
                            f.group_rho(s.minimal_open(x), s.minimal_open(y)));
        GroupMap neg = GroupMap::identity(f.group_value(s.minimal_open(x)));
        neg = GroupMap(neg.source, neg.target, negate(neg.matrix));
        blocks.emplace_back(row, xi, neg);
        ++row;
      }
    BlockSum csum = block_sum(cparts);
    GroupMap delta = assemble_block_map(d.sum, csum, blocks);
    d.families =
        subquotient_data(delta, GroupMap::zero(FgAbGroup::trivial(), d.sum.group));
    data.emplace(u, std::move(d));
  }

  std::map<Mask, Value> values;
  for (auto& [u, d] : data) values.emplace(u, d.families.group);

  std::map<std::pair<Mask, Mask>, Morphism> rho;
  for (Mask v : s.opens())
    for (Mask u : s.opens()) {
      if (u == v || (u & ~v) != 0) continue;
      OpenData& dv = data.at(v);
      OpenData& du = data.at(u);
      // positions of u's points inside v's list
      std::vector<std::size_t> pos;
      for (std::size_t x : du.pts)
        pos.push_back(std::find(dv.pts.begin(), dv.pts.end(), x) - dv.pts.begin());
      IntMatrix m(du.families.group.gens(), dv.families.group.gens());
      for (std::size_t c = 0; c < dv.families.group.gens(); ++c) {
        std::vector<Int> rep(dv.sum.group.gens());
        for (std::size_t i = 0; i < rep.size(); ++i) rep[i] = dv.families.lift(i, c);
        std::vector<Int> blocks_v = mat_apply(dv.sum.from_can, rep);
        std::vector<Int> blocks_u(du.sum.block_gens);
        for (std::size_t i = 0; i < du.pts.size(); ++i)
          for (std::size_t g = 0; g < du.sum.parts[i].gens(); ++g)
            blocks_u[du.sum.offsets[i] + g] = blocks_v[dv.sum.offsets[pos[i]] + g];
        std::vector<Int> coords =
            du.families.project(reduce_mod_group(du.sum.group,
                                                 mat_apply(du.sum.to_can, blocks_u)));
        for (std::size_t r = 0; r < coords.size(); ++r) m(r, c) = coords[r];
      }
      rho.emplace(std::make_pair(u, v),
                  GroupMap(dv.families.group, du.families.group, std::move(m)));
    }

  Sheafification out{Presheaf(s, ValueKind::AbGroup, std::move(values), rho), {}};
  for (Mask u : s.opens()) {
    OpenData& d = data.at(u);
    IntMatrix m(d.families.group.gens(), f.group_value(u).gens());
    for (std::size_t c = 0; c < f.group_value(u).gens(); ++c) {
      std::vector<Int> sec(f.group_value(u).gens());
      sec[c] = 1;
      std::vector<Int> blocks(d.sum.block_gens);
      for (std::size_t i = 0; i < d.pts.size(); ++i) {
        std::vector<Int> piece =
            f.group_rho(s.minimal_open(d.pts[i]), u).apply_to(sec);
        for (std::size_t g = 0; g < piece.size(); ++g)
          blocks[d.sum.offsets[i] + g] = piece[g];
      }
      std::vector<Int> coords = d.families.project(
          reduce_mod_group(d.sum.group, mat_apply(d.sum.to_can, blocks)));
      for (std::size_t r = 0; r < coords.size(); ++r) m(r, c) = coords[r];
    }
    out.unit.emplace(u, exactla::GroupMap(f.group_value(u), d.families.group,
                                          std::move(m)));
  }
  return out;
}

inline Presheaf sheafify(const Presheaf& f) { return sheafify_with_unit(f).result; }

// Constant presheaf: the same group everywhere with identity restrictions.
// Not a sheaf as soon as some open has two components.
inline Presheaf constant_presheaf(const FiniteSpace& s, const exactla::FgAbGroup& g) {
  std::map<Mask, Value> values;
  std::map<std::pair<Mask, Mask>, Morphism> rho;
  for (Mask u : s.opens())
    if (u != 0) values.emplace(u, g);
  for (Mask v : s.opens())
    for (Mask u : s.opens())
      if (u != 0 && u != v && (u & ~v) == 0)
        rho.emplace(std::make_pair(u, v), exactla::GroupMap::identity(g));
  return Presheaf(s, ValueKind::AbGroup, std::move(values), rho);
}

// Constant sheaf: one copy of the group per connected component, restrictions
// collapsing along the component inclusions.
inline Presheaf constant_sheaf(const FiniteSpace& s, const exactla::FgAbGroup& g) {
  using namespace exactla;
  std::map<Mask, BlockSum> sums;
  std::map<Mask, std::vector<Mask>> comps;
  for (Mask u : s.opens()) {
    comps[u] = s.components(u);
    sums.emplace(u, block_sum(std::vector<FgAbGroup>(comps[u].size(), g)));
  }
  std::map<Mask, Value> values;
  for (Mask u : s.opens())
    if (u != 0) values.emplace(u, sums.at(u).group);
  std::map<std::pair<Mask, Mask>, Morphism> rho;
  for (Mask v : s.opens())
    for (Mask u : s.opens()) {
      if (u == 0 || u == v || (u & ~v) != 0) continue;
      std::vector<std::tuple<std::size_t, std::size_t, GroupMap>> blocks;
      for (std::size_t j = 0; j < comps[u].size(); ++j) {
        std::size_t i = 0;
        while ((comps[u][j] & comps[v][i]) == 0) ++i;
        blocks.emplace_back(j, i, GroupMap::identity(g));
      }
      rho.emplace(std::make_pair(u, v),
                  assemble_block_map(sums.at(v), sums.at(u), blocks));
    }
  return Presheaf(s, ValueKind::AbGroup, std::move(values), rho);
}

// Split a structured presheaf into one presheaf per family member.  Only
// group and ring members admit a computable component presheaf.
inline std::vector<Presheaf> decompose_structured(const Presheaf& f) {
  if (f.kind() != ValueKind::Structured)
    math_error(ErrorCode::WrongValueKind, "only structured presheaves decompose");
  const FiniteSpace& s = f.space();
  const strcat::StructuredFamily& top = f.family_value(s.full_mask());
  const std::size_t m = top.size();
  for (Mask v : s.opens())
    for (Mask u : s.opens()) {
      if ((u & ~v) != 0) continue;
      const strcat::StructuredHom& h = f.family_rho(u, v);
      if (!(h.alignment == strcat::Alignment::identity(h.alignment.image.size())))
        math_error(ErrorCode::IndexSetMismatch,
                   "restriction " + s.set_label(u) + " <= " + s.set_label(v) +
                       " permutes the member indices");
    }
  require_presheaf_laws(f);
  for (Mask u : s.opens()) {
    const strcat::StructuredFamily& fam = f.family_value(u);
    if (!fam.partitionable)
      math_error(ErrorCode::NotPartitionable,
                 "family on " + s.set_label(u) + " is not marked partitionable");
    if (fam.size() != m)
      math_error(ErrorCode::IndexSetMismatch,
                 "family on " + s.set_label(u) + " has " + std::to_string(fam.size()) +
                     " members instead of " + std::to_string(m));
    for (std::size_t p = 0; p < m; ++p)
      if (!(fam.entries[p].tag == top.entries[p].tag))
        math_error(ErrorCode::TagMismatch,
                   "member " + std::to_string(p + 1) + " on " + s.set_label(u) +
                       " is tagged " + fam.entries[p].tag.to_string() +
                       " instead of " + top.entries[p].tag.to_string());
  }
  std::vector<Presheaf> out;
  for (std::size_t p = 0; p < m; ++p) {
    const strcat::StructureTag& tag = top.entries[p].tag;
    std::map<Mask, Value> values;
    std::map<std::pair<Mask, Mask>, Morphism> rho;
    switch (tag.kind) {
      case strcat::StructureTag::Kind::AbGroup: {
        for (Mask u : s.opens())
          if (u != 0)
            values.emplace(u,
                           std::get<exactla::FgAbGroup>(f.family_value(u).entries[p].carrier));
        for (Mask v : s.opens())
          for (Mask u : s.opens())
            if (u != 0 && u != v && (u & ~v) == 0)
              rho.emplace(std::make_pair(u, v),
                          std::get<exactla::GroupMap>(f.family_rho(u, v).components[p]));
        out.emplace_back(s, ValueKind::AbGroup, std::move(values), rho);
        break;
      }
      case strcat::StructureTag::Kind::Ring: {
        for (Mask u : s.opens())
          if (u != 0)
            values.emplace(u,
                           std::get<ringspec::FiniteRing>(f.family_value(u).entries[p].carrier));
        for (Mask v : s.opens())
          for (Mask u : s.opens())
            if (u != 0 && u != v && (u & ~v) == 0)
              rho.emplace(std::make_pair(u, v),
                          std::get<ringspec::RingMap>(f.family_rho(u, v).components[p]));
        out.emplace_back(s, ValueKind::RingFamily, std::move(values), rho);
        break;
      }
      default:
        math_error(ErrorCode::TagMismatch,
                   "member " + std::to_string(p + 1) + " carries " + tag.to_string() +
                       ", which does not decompose into a computable presheaf");
    }
  }
  return out;
}

// Reassemble componentwise presheaves into a structured one; inverse to
// decompose_structured up to the partitionable flag.
inline Presheaf rebundle_structured(const std::vector<Presheaf>& comps) {
  if (comps.empty())
    input_error(ErrorCode::ParseError, "nothing to bundle");
  const FiniteSpace& s = comps[0].space();
  for (const Presheaf& c : comps)
    if (!(c.space() == s))
      math_error(ErrorCode::BaseMismatch, "components live on different spaces");
  std::map<Mask, Value> values;
  for (Mask u : s.opens()) {
    if (u == 0) continue;
    std::vector<strcat::FamilyEntry> es;
    for (const Presheaf& c : comps) {
      if (c.kind() == ValueKind::AbGroup)
        es.push_back({strcat::StructureTag::ab_group(), c.group_value(u)});
      else if (c.kind() == ValueKind::RingFamily)
        es.push_back({strcat::StructureTag::ring(), c.ring_value(u)});
      else
        math_error(ErrorCode::WrongValueKind, "components must be groups or rings");
    }
    values.emplace(u, strcat::StructuredFamily(true, std::move(es)));
  }
  std::map<std::pair<Mask, Mask>, Morphism> rho;
  for (Mask v : s.opens())
    for (Mask u : s.opens()) {
      if (u == 0 || u == v || (u & ~v) != 0) continue;
      std::vector<strcat::HomComponent> hs;
      for (const Presheaf& c : comps) {
        if (c.kind() == ValueKind::AbGroup) hs.emplace_back(c.group_rho(u, v));
        else hs.emplace_back(c.ring_rho(u, v));
      }
      rho.emplace(std::make_pair(u, v),
                  strcat::StructuredHom(
                      std::get<strcat::StructuredFamily>(values.at(v)),
                      std::get<strcat::StructuredFamily>(values.at(u)),
                      strcat::Alignment::identity(comps.size()), std::move(hs)));
    }
  return Presheaf(s, ValueKind::Structured, std::move(values), rho);
}

}  // namespace structura::sheaf
