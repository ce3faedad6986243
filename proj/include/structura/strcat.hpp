#pragma once

#include <string>
#include <variant>
#include <vector>

#include "structura/abelian.hpp"
#include "structura/errors.hpp"
#include "structura/field.hpp"
#include "structura/finite_ring.hpp"

namespace structura::strcat {

// What kind of structure a family member carries.  Opaque tags name a
// structure the workbench cannot compute with; they compare by name alone.
struct StructureTag {
  enum class Kind { AbGroup, Ring, VectorSpace, Opaque };
  Kind kind = Kind::AbGroup;
  exactla::ExactField field;  // meaningful for VectorSpace
  std::string name;           // meaningful for Opaque, nonempty there

  static StructureTag ab_group() { return {Kind::AbGroup, {}, ""}; }
  static StructureTag ring() { return {Kind::Ring, {}, ""}; }
  static StructureTag vector_space(exactla::ExactField f) {
    return {Kind::VectorSpace, f, ""};
  }
  static StructureTag opaque(const std::string& n) {
    if (n.empty()) input_error(ErrorCode::ParseError, "opaque tags need a name");
    return {Kind::Opaque, {}, n};
  }

  bool operator==(const StructureTag&) const = default;

  std::string to_string() const {
    switch (kind) {
      case Kind::AbGroup: return "AbGroup";
      case Kind::Ring: return "Ring";
      case Kind::VectorSpace: return "VectorSpace(" + field.name() + ")";
      case Kind::Opaque: return "Opaque(" + name + ")";
    }
    return "";
  }
};

// Carrier of one family member.  Which alternative is engaged follows the
// tag: a group, a ring, a dimension, or just a name.
using Carrier =
    std::variant<exactla::FgAbGroup, ringspec::FiniteRing, std::size_t, std::string>;

struct FamilyEntry {
  StructureTag tag;
  Carrier carrier;

  bool operator==(const FamilyEntry&) const = default;
};

inline void check_entry(const FamilyEntry& e, const std::string& where) {
  bool ok = false;
  switch (e.tag.kind) {
    case StructureTag::Kind::AbGroup:
      ok = std::holds_alternative<exactla::FgAbGroup>(e.carrier);
      break;
    case StructureTag::Kind::Ring:
      ok = std::holds_alternative<ringspec::FiniteRing>(e.carrier);
      break;
    case StructureTag::Kind::VectorSpace:
      ok = std::holds_alternative<std::size_t>(e.carrier);
      break;
    case StructureTag::Kind::Opaque:
      ok = std::holds_alternative<std::string>(e.carrier);
      break;
  }
  if (!ok)
    math_error(ErrorCode::TagMismatch,
               where + ": carrier does not fit tag " + e.tag.to_string());
}

// An indexed family of tagged structures; member p of m lives at index p-1.
struct StructuredFamily {
  bool partitionable = true;
  std::vector<FamilyEntry> entries;

  StructuredFamily() = default;
  StructuredFamily(bool part, std::vector<FamilyEntry> es)
      : partitionable(part), entries(std::move(es)) {
    for (std::size_t i = 0; i < entries.size(); ++i)
      check_entry(entries[i], "member " + std::to_string(i + 1));
  }

  std::size_t size() const { return entries.size(); }
  bool operator==(const StructuredFamily&) const = default;
};

// A tag-preserving bijection between the index sets of two families.
struct Alignment {
  std::vector<std::size_t> image;  // source index -> target index

  static Alignment identity(std::size_t n) {
    Alignment a;
    for (std::size_t i = 0; i < n; ++i) a.image.push_back(i);
    return a;
  }

  bool operator==(const Alignment&) const = default;
};

inline void check_alignment(const StructuredFamily& x, const StructuredFamily& y,
                            const Alignment& h) {
  if (h.image.size() != x.size() || x.size() != y.size())
    math_error(ErrorCode::AlignmentMismatch,
               "alignment must pair off equally sized index sets, got " +
                   std::to_string(x.size()) + " and " + std::to_string(y.size()));
  std::vector<bool> hit(y.size(), false);
  for (std::size_t v : h.image) {
    if (v >= y.size() || hit[v])
      math_error(ErrorCode::AlignmentMismatch, "alignment is not a bijection");
    hit[v] = true;
  }
}

struct PairVerdict {
  std::size_t source_index = 0, target_index = 0;
  bool tags_agree = false;
  bool carriers_isomorphic = false;
  std::string note;
};

struct MembershipReport {
  bool accepted = false;
  bool both_partitionable = false;
  std::vector<PairVerdict> pairs;
  std::string first_violation;
};

// Do two families present the same object, member by member along h?  Tags
// must agree on the nose; carriers are compared up to isomorphism where that
// is decidable (groups by canonical form, rings by search, vector spaces by
// dimension) and by name for opaque structures.
inline MembershipReport check_category_membership(const StructuredFamily& x,
                                                  const StructuredFamily& y,
                                                  const Alignment& h) {
  check_alignment(x, y, h);
  MembershipReport rep;
  rep.accepted = true;
  rep.both_partitionable = x.partitionable && y.partitionable;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const FamilyEntry& a = x.entries[i];
    const FamilyEntry& b = y.entries[h.image[i]];
    PairVerdict v;
    v.source_index = i;
    v.target_index = h.image[i];
    v.tags_agree = a.tag == b.tag;
    if (!v.tags_agree) {
      v.note = a.tag.to_string() + " vs " + b.tag.to_string();
    } else {
      switch (a.tag.kind) {
        case StructureTag::Kind::AbGroup: {
          const auto& ga = std::get<exactla::FgAbGroup>(a.carrier);
          const auto& gb = std::get<exactla::FgAbGroup>(b.carrier);
          v.carriers_isomorphic = ga == gb;
          if (!v.carriers_isomorphic)
            v.note = to_string(ga) + " vs " + to_string(gb);
          break;
        }
        case StructureTag::Kind::Ring: {
          const auto& ra = std::get<ringspec::FiniteRing>(a.carrier);
          const auto& rb = std::get<ringspec::FiniteRing>(b.carrier);
          v.carriers_isomorphic = ringspec::rings_isomorphic(ra, rb);
          if (!v.carriers_isomorphic) v.note = "rings are not isomorphic";
          break;
        }
        case StructureTag::Kind::VectorSpace:
          v.carriers_isomorphic =
              std::get<std::size_t>(a.carrier) == std::get<std::size_t>(b.carrier);
          if (!v.carriers_isomorphic) v.note = "dimensions differ";
          break;
        case StructureTag::Kind::Opaque:
          // the tag already matched by name; carriers compare literally
          v.carriers_isomorphic =
              std::get<std::string>(a.carrier) == std::get<std::string>(b.carrier);
          if (!v.carriers_isomorphic) v.note = "opaque carriers named differently";
          break;
      }
    }
    if ((!v.tags_agree || !v.carriers_isomorphic) && rep.accepted) {
      rep.accepted = false;
      rep.first_violation = "pair (" + std::to_string(i + 1) + " -> " +
                            std::to_string(h.image[i] + 1) + "): " + v.note;
    }
    rep.pairs.push_back(std::move(v));
  }
  return rep;
}

// One leg of a structured morphism.  Opaque members only admit the identity,
// recorded as monostate.
using HomComponent = std::variant<exactla::GroupMap, ringspec::RingMap,
                                  exactla::FieldMatrix, std::monostate>;

// A morphism of structured families: an alignment of the index sets plus a
// structure map for every member, checked against the carriers on both ends.
struct StructuredHom {
  StructuredFamily source, target;
  Alignment alignment;
  std::vector<HomComponent> components;  // indexed like source

  StructuredHom(StructuredFamily src, StructuredFamily tgt, Alignment al,
                std::vector<HomComponent> comps)
      : source(std::move(src)), target(std::move(tgt)), alignment(std::move(al)),
        components(std::move(comps)) {
    check_alignment(source, target, alignment);
    if (components.size() != source.size())
      math_error(ErrorCode::ComponentShapeMismatch,
                 "need one component per family member");
    for (std::size_t i = 0; i < source.size(); ++i) {
      const FamilyEntry& a = source.entries[i];
      const FamilyEntry& b = target.entries[alignment.image[i]];
      if (a.tag != b.tag)
        math_error(ErrorCode::TagMismatch, "member " + std::to_string(i + 1) +
                                               " crosses tags " + a.tag.to_string() +
                                               " -> " + b.tag.to_string());
      const HomComponent& c = components[i];
      auto bad = [&](const std::string& why) {
        math_error(ErrorCode::ComponentShapeMismatch,
                   "component " + std::to_string(i + 1) + ": " + why);
      };
      switch (a.tag.kind) {
        case StructureTag::Kind::AbGroup: {
          const auto* m = std::get_if<exactla::GroupMap>(&c);
          if (!m) bad("expected a group map");
          if (!(m->source == std::get<exactla::FgAbGroup>(a.carrier)) ||
              !(m->target == std::get<exactla::FgAbGroup>(b.carrier)))
            bad("group map endpoints do not match the carriers");
          break;
        }
        case StructureTag::Kind::Ring: {
          const auto* m = std::get_if<ringspec::RingMap>(&c);
          if (!m) bad("expected a ring map");
          if (!(m->source == std::get<ringspec::FiniteRing>(a.carrier)) ||
              !(m->target == std::get<ringspec::FiniteRing>(b.carrier)))
            bad("ring map endpoints do not match the carriers");
          break;
        }
        case StructureTag::Kind::VectorSpace: {
          const auto* m = std::get_if<exactla::FieldMatrix>(&c);
          if (!m) bad("expected a matrix over the tag field");
          if (!(m->field == a.tag.field)) bad("matrix field does not match the tag");
          if (m->rows != std::get<std::size_t>(b.carrier) ||
              m->cols != std::get<std::size_t>(a.carrier))
            bad("matrix shape does not match the dimensions");
          break;
        }
        case StructureTag::Kind::Opaque:
          if (!std::holds_alternative<std::monostate>(c))
            bad("opaque members only carry the identity");
          if (std::get<std::string>(a.carrier) != std::get<std::string>(b.carrier))
            bad("opaque carriers differ, and only identities exist between equals");
          break;
      }
    }
  }

  static StructuredHom identity(const StructuredFamily& f) {
    std::vector<HomComponent> comps;
    for (const FamilyEntry& e : f.entries) {
      switch (e.tag.kind) {
        case StructureTag::Kind::AbGroup:
          comps.emplace_back(
              exactla::GroupMap::identity(std::get<exactla::FgAbGroup>(e.carrier)));
          break;
        case StructureTag::Kind::Ring:
          comps.emplace_back(
              ringspec::RingMap::identity(std::get<ringspec::FiniteRing>(e.carrier)));
          break;
        case StructureTag::Kind::VectorSpace:
          comps.emplace_back(exactla::FieldMatrix::identity(
              e.tag.field, std::get<std::size_t>(e.carrier)));
          break;
        case StructureTag::Kind::Opaque:
          comps.emplace_back(std::monostate{});
          break;
      }
    }
    return StructuredHom(f, f, Alignment::identity(f.size()), std::move(comps));
  }

  bool operator==(const StructuredHom&) const = default;
};

// g after f, componentwise along the composed alignment.
inline StructuredHom compose(const StructuredHom& g, const StructuredHom& f) {
  if (!(f.target == g.source))
    math_error(ErrorCode::AlignmentMismatch,
               "middle families of a composition must agree");
  Alignment al;
  std::vector<HomComponent> comps;
  for (std::size_t i = 0; i < f.source.size(); ++i) {
    std::size_t mid = f.alignment.image[i];
    al.image.push_back(g.alignment.image[mid]);
    const HomComponent& a = f.components[i];
    const HomComponent& b = g.components[mid];
    switch (f.source.entries[i].tag.kind) {
      case StructureTag::Kind::AbGroup:
        comps.emplace_back(compose(std::get<exactla::GroupMap>(b),
                                   std::get<exactla::GroupMap>(a)));
        break;
      case StructureTag::Kind::Ring:
        comps.emplace_back(compose(std::get<ringspec::RingMap>(b),
                                   std::get<ringspec::RingMap>(a)));
        break;
      case StructureTag::Kind::VectorSpace:
        comps.emplace_back(mul(std::get<exactla::FieldMatrix>(b),
                               std::get<exactla::FieldMatrix>(a)));
        break;
      case StructureTag::Kind::Opaque:
        comps.emplace_back(std::monostate{});
        break;
    }
  }
  return StructuredHom(f.source, g.target, std::move(al), std::move(comps));
}

}  // namespace structura::strcat
