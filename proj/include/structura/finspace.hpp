#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "structura/errors.hpp"

namespace structura::finspace {

// Opens of a finite space are bitmasks over the point list, which caps spaces
// at 64 points.  That bound is far above anything the assembly pipeline can
// digest anyway.
using Mask = std::uint64_t;

// A finite T0 topological space with named points.  Instances are built by
// validate_space, which checks the lattice axioms and collapses
// topologically indistinguishable points first; everything downstream can
// therefore rely on minimal opens being distinct per point.
class FiniteSpace {
 public:
  std::size_t point_count() const { return points_.size(); }
  const std::vector<std::string>& points() const { return points_; }
  const std::string& label(std::size_t i) const { return points_[i]; }

  std::size_t point_index(const std::string& name) const {
    for (std::size_t i = 0; i < points_.size(); ++i)
      if (points_[i] == name) return i;
    math_error(ErrorCode::UnknownPoint, "no point named '" + name + "'");
  }

  Mask full_mask() const {
    return points_.size() == 64 ? ~Mask(0) : (Mask(1) << points_.size()) - 1;
  }

  const std::vector<Mask>& opens() const { return opens_; }

  bool is_open(Mask m) const {
    return std::binary_search(opens_.begin(), opens_.end(), m, open_order);
  }

  Mask minimal_open(std::size_t point) const { return minimal_[point]; }
  Mask minimal_open(const std::string& name) const {
    return minimal_[point_index(name)];
  }

  // specialization order: x below y when every open containing y contains x
  bool below(std::size_t x, std::size_t y) const {
    return (minimal_[x] & ~minimal_[y]) == 0;
  }

  // opens contained in u, i.e. the topology of the open subspace
  std::vector<Mask> opens_within(Mask u) const {
    std::vector<Mask> out;
    for (Mask o : opens_)
      if ((o & ~u) == 0) out.push_back(o);
    return out;
  }

  // connected components of an open, each a mask, ordered by least point
  std::vector<Mask> components(Mask u) const {
    if (!is_open(u))
      math_error(ErrorCode::NotAnOpen, "components of " + set_label(u) + " need an open set");
    std::vector<std::size_t> parent(points_.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t a) {
      while (parent[a] != a) a = parent[a] = parent[parent[a]];
      return a;
    };
    for (std::size_t x = 0; x < points_.size(); ++x) {
      if (!(u >> x & 1)) continue;
      for (std::size_t y = x + 1; y < points_.size(); ++y) {
        if (!(u >> y & 1)) continue;
        if (minimal_[x] & minimal_[y]) parent[find(x)] = find(y);
      }
    }
    std::map<std::size_t, Mask> comps;
    for (std::size_t x = 0; x < points_.size(); ++x)
      if (u >> x & 1) comps[find(x)] |= Mask(1) << x;
    std::vector<Mask> out;
    for (auto& [root, m] : comps) out.push_back(m);
    std::sort(out.begin(), out.end(),
              [](Mask a, Mask b) { return std::countr_zero(a) < std::countr_zero(b); });
    return out;
  }

  std::string set_label(Mask m) const {
    std::string s = "{";
    bool first = true;
    for (std::size_t i = 0; i < points_.size(); ++i)
      if (m >> i & 1) {
        if (!first) s += ",";
        s += points_[i];
        first = false;
      }
    return s + "}";
  }

  Mask mask_of(const std::vector<std::string>& names) const {
    Mask m = 0;
    for (const std::string& n : names) m |= Mask(1) << point_index(n);
    return m;
  }

  bool operator==(const FiniteSpace&) const = default;

  // opens sorted by size then value keeps every listing deterministic
  static bool open_order(Mask a, Mask b) {
    int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa < pb : a < b;
  }

 private:
  FiniteSpace() = default;
  friend struct SpaceValidation;

  std::vector<std::string> points_;
  std::vector<Mask> opens_;
  std::vector<Mask> minimal_;
};

struct SpaceValidation {
  FiniteSpace space;
  bool was_t0 = true;
  // original point index -> index in the validated space
  std::vector<std::size_t> collapse;

  static SpaceValidation run(const std::vector<std::string>& points,
                             std::vector<Mask> opens);
};

inline SpaceValidation validate_space(const std::vector<std::string>& points,
                                      std::vector<Mask> opens) {
  return SpaceValidation::run(points, std::move(opens));
}

inline SpaceValidation SpaceValidation::run(const std::vector<std::string>& points,
                                            std::vector<Mask> opens) {
  if (points.empty())
    input_error(ErrorCode::ParseError, "a space needs at least one point");
  if (points.size() > 64)
    math_error(ErrorCode::TooLarge, "at most 64 points are supported, got " +
                                        std::to_string(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (points[i] == points[j])
        input_error(ErrorCode::ParseError, "duplicate point label '" + points[i] + "'");

  const Mask full =
      points.size() == 64 ? ~Mask(0) : (Mask(1) << points.size()) - 1;
  std::sort(opens.begin(), opens.end(), FiniteSpace::open_order);
  opens.erase(std::unique(opens.begin(), opens.end()), opens.end());

  auto label = [&](Mask m) {
    std::string s = "{";
    bool first = true;
    for (std::size_t i = 0; i < points.size(); ++i)
      if (m >> i & 1) {
        if (!first) s += ",";
        s += points[i];
        first = false;
      }
    return s + "}";
  };

  auto has = [&](Mask m) {
    return std::binary_search(opens.begin(), opens.end(), m, FiniteSpace::open_order);
  };
  if (!has(0) || !has(full))
    math_error(ErrorCode::MissingEmptyOrFull,
               std::string(!has(0) ? "the empty set" : "the full set") +
                   " is not among the opens");
  for (std::size_t i = 0; i < opens.size(); ++i)
    for (std::size_t j = i + 1; j < opens.size(); ++j) {
      if (!has(opens[i] | opens[j]))
        math_error(ErrorCode::NotClosedUnderUnion,
                   label(opens[i]) + " and " + label(opens[j]) +
                       " have no union in the topology");
      if (!has(opens[i] & opens[j]))
        math_error(ErrorCode::NotClosedUnderIntersection,
                   label(opens[i]) + " and " + label(opens[j]) +
                       " have no intersection in the topology");
    }

  std::vector<Mask> minimal(points.size(), full);
  for (std::size_t x = 0; x < points.size(); ++x)
    for (Mask o : opens)
      if (o >> x & 1) minimal[x] &= o;
  // closure under intersection puts every minimal open in the topology

  SpaceValidation v;
  v.collapse.resize(points.size());
  // group points by identical minimal opens; representatives keep point order
  std::vector<std::size_t> reps;
  for (std::size_t x = 0; x < points.size(); ++x) {
    std::size_t found = reps.size();
    for (std::size_t r = 0; r < reps.size(); ++r)
      if (minimal[reps[r]] == minimal[x]) { found = r; break; }
    if (found == reps.size()) reps.push_back(x);
    v.collapse[x] = found;
  }
  v.was_t0 = reps.size() == points.size();

  FiniteSpace s;
  if (v.was_t0) {
    s.points_ = points;
    s.opens_ = opens;
    s.minimal_ = minimal;
  } else {
    for (std::size_t r : reps) s.points_.push_back(points[r]);
    std::vector<Mask> collapsed;
    for (Mask o : opens) {
      Mask m = 0;
      for (std::size_t x = 0; x < points.size(); ++x)
        if (o >> x & 1) m |= Mask(1) << v.collapse[x];
      collapsed.push_back(m);
    }
    std::sort(collapsed.begin(), collapsed.end(), FiniteSpace::open_order);
    collapsed.erase(std::unique(collapsed.begin(), collapsed.end()), collapsed.end());
    s.opens_ = collapsed;
    s.minimal_.assign(s.points_.size(), 0);
    for (std::size_t r = 0; r < reps.size(); ++r) {
      Mask m = 0;
      for (std::size_t x = 0; x < points.size(); ++x)
        if (minimal[reps[r]] >> x & 1) m |= Mask(1) << v.collapse[x];
      s.minimal_[r] = m;
    }
  }
  v.space = std::move(s);
  return v;
}

// An ordered open cover of one open set.
struct Cover {
  FiniteSpace space;
  Mask target = 0;
  std::vector<Mask> members;
};

inline Cover make_cover(const FiniteSpace& space, Mask target,
                        const std::vector<Mask>& members) {
  if (!space.is_open(target))
    math_error(ErrorCode::NotAnOpen,
               "cover target " + space.set_label(target) + " is not open");
  Mask u = 0;
  for (Mask m : members) {
    if (!space.is_open(m))
      math_error(ErrorCode::NotAnOpen,
                 "cover member " + space.set_label(m) + " is not open");
    u |= m;
  }
  if (u != target)
    math_error(ErrorCode::NotACover, "members unite to " + space.set_label(u) +
                                         " instead of " + space.set_label(target));
  return {space, target, members};
}

// For each member of the fine cover, the index of a coarse member containing
// it: an exact match if there is one, otherwise the least containing index.
// Preferring exact matches makes refining a cover by itself the identity.
inline std::vector<std::size_t> refine_cover(const Cover& coarse, const Cover& fine) {
  if (!(coarse.space == fine.space) || coarse.target != fine.target)
    math_error(ErrorCode::NotARefinement,
               "covers live on different spaces or targets");
  std::vector<std::size_t> assign;
  for (Mask f : fine.members) {
    std::size_t chosen = coarse.members.size();
    for (std::size_t i = 0; i < coarse.members.size(); ++i) {
      if (coarse.members[i] == f) { chosen = i; break; }
      if ((f & ~coarse.members[i]) == 0 && chosen == coarse.members.size()) chosen = i;
    }
    if (chosen == coarse.members.size())
      math_error(ErrorCode::NotARefinement,
                 "fine member " + fine.space.set_label(f) +
                     " is contained in no coarse member");
    assign.push_back(chosen);
  }
  return assign;
}

}  // namespace structura::finspace
