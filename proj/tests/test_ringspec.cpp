#include "structura/ringspec.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <bit>
#include <functional>

#include "oracle.hpp"
#include "spaces.hpp"

using namespace structura;
using namespace structura::ringspec;
using exactla::FgAbGroup;
using exactla::GroupMap;
using finspace::FiniteSpace;
using finspace::Mask;
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

Presheaf constant_ring(const FiniteSpace& s, const FiniteRing& r) {
  std::map<Mask, Value> values;
  std::map<std::pair<Mask, Mask>, Morphism> rho;
  for (Mask u : s.opens()) {
    if (u == 0) continue;
    values.emplace(u, r);
    for (Mask v : s.opens())
      if (v != 0 && v != u && (u & ~v) == 0)
        rho.emplace(std::make_pair(u, v), RingMap::identity(r));
  }
  return Presheaf(s, ValueKind::RingFamily, std::move(values), rho);
}

// Z/4 over the whole of a two point discrete space but Z/2 on the halves;
// additively this loses the section 2, so locality fails
Presheaf mod_two_collapse() {
  FiniteSpace s = testbed::discrete(2);
  FiniteRing z4 = FiniteRing::zmod(4), z2 = FiniteRing::zmod(2);
  std::map<Mask, Value> values;
  values.emplace(s.full_mask(), z4);
  values.emplace(s.mask_of({"p"}), z2);
  values.emplace(s.mask_of({"q"}), z2);
  RingMap drop(z4, z2, {0, 1, 0, 1});
  std::map<std::pair<Mask, Mask>, Morphism> rho;
  rho.emplace(std::make_pair(s.mask_of({"p"}), s.full_mask()), drop);
  rho.emplace(std::make_pair(s.mask_of({"q"}), s.full_mask()), drop);
  return Presheaf(s, ValueKind::RingFamily, std::move(values), rho);
}

std::size_t label_index(const FiniteSpace& s, const std::string& name) {
  return s.point_index(name);
}

}  // namespace

TEST_CASE("additive shadows of finite rings", "[ringspec]") {
  SECTION("cyclic and product shadows have the expected shapes") {
    REQUIRE(additive_shadow(FiniteRing::zmod(12)).group == FgAbGroup::cyclic(12));
    REQUIRE(additive_shadow(FiniteRing::zmod(1)).group.is_trivial());
    FiniteRing klein = FiniteRing::product(FiniteRing::zmod(2), FiniteRing::zmod(2));
    FgAbGroup g = additive_shadow(klein).group;
    REQUIRE(g.rank == 0);
    REQUIRE(g.torsion == std::vector<exactla::Int>{2, 2});
  }

  SECTION("ring maps become group maps") {
    FiniteRing z6 = FiniteRing::zmod(6);
    AdditiveShadow sh = additive_shadow(z6);
    REQUIRE(additive_map(RingMap::identity(z6), sh, sh) ==
            GroupMap::identity(sh.group));
    FiniteRing z4 = FiniteRing::zmod(4), z2 = FiniteRing::zmod(2);
    GroupMap drop = additive_map(RingMap(z4, z2, {0, 1, 0, 1}),
                                 additive_shadow(z4), additive_shadow(z2));
    REQUIRE(!drop.is_zero());
    REQUIRE(exactla::cokernel_group(drop).is_trivial());
  }

  SECTION("constant ring presheaves on connected spaces pass additively") {
    Presheaf f = constant_ring(testbed::sierpinski(), FiniteRing::zmod(4));
    REQUIRE(check_ring_sheaf_axioms(f).ok);
  }
}

TEST_CASE("ringed space validation", "[ringspec]") {
  SECTION("sheaf valued instances pass the gate") {
    FiniteSpace s = testbed::sierpinski();
    RingedFiniteSpace x = ringed_space(s, constant_ring(s, FiniteRing::zmod(4)));
    REQUIRE(stalk_ring(x, s.point_index("x")).size() == 4);
  }

  SECTION("constant values on a disconnected space fail gluing") {
    FiniteSpace s = testbed::discrete(2);
    REQUIRE(code_of([&] { ringed_space(s, constant_ring(s, FiniteRing::zmod(4))); }) ==
            ErrorCode::NotASheaf);
  }

  SECTION("collapsed sections fail locality") {
    REQUIRE(code_of([&] {
              ringed_space(testbed::discrete(2), mod_two_collapse());
            }) == ErrorCode::NotASheaf);
  }

  SECTION("group valued presheaves are rejected") {
    FiniteSpace s = testbed::one_point();
    Presheaf groups =
        sheaf::constant_presheaf(s, FgAbGroup::free_group(1));
    REQUIRE(code_of([&] { ringed_space(s, groups); }) == ErrorCode::WrongValueKind);
  }
}

TEST_CASE("locally ringed reports", "[ringspec]") {
  FiniteSpace pt = testbed::one_point();

  SECTION("a field stalk is local") {
    LocallyRingedReport rep =
        check_locally_ringed(ringed_space(pt, constant_ring(pt, FiniteRing::zmod(2))));
    REQUIRE(rep.ok);
    REQUIRE(rep.points.size() == 1);
    REQUIRE(rep.points[0].maximal_count == 1);
  }

  SECTION("Z/6 has two maximal ideals and is not local") {
    LocallyRingedReport rep =
        check_locally_ringed(ringed_space(pt, constant_ring(pt, FiniteRing::zmod(6))));
    REQUIRE(!rep.ok);
    REQUIRE(rep.points[0].maximal_count == 2);
  }
}

TEST_CASE("spectra of finite rings", "[ringspec]") {
  SECTION("Z/12 splits into its two local factors") {
    SpecResult sp = spec_of_ring(FiniteRing::zmod(12));
    const FiniteSpace& s = sp.ringed.space;
    REQUIRE(s.point_count() == 2);
    std::vector<std::string> names = s.points();
    std::sort(names.begin(), names.end());
    REQUIRE(names == std::vector<std::string>{"(2)", "(3)"});
    REQUIRE(s.opens().size() == 4);
    for (std::size_t i = 0; i < 2; ++i)
      REQUIRE(std::popcount(s.minimal_open(i)) == 1);
    const FiniteRing& at2 = stalk_ring(sp.ringed, label_index(s, "(2)"));
    const FiniteRing& at3 = stalk_ring(sp.ringed, label_index(s, "(3)"));
    REQUIRE(rings_isomorphic(at2, FiniteRing::zmod(4)));
    REQUIRE(rings_isomorphic(at3, FiniteRing::zmod(3)));
    const FiniteRing& global = sp.ringed.structure.ring_value(s.full_mask());
    REQUIRE(rings_isomorphic(global, FiniteRing::zmod(12)));
    REQUIRE(rings_isomorphic(
        global, FiniteRing::product(FiniteRing::zmod(4), FiniteRing::zmod(3))));
    REQUIRE(check_locally_ringed(sp.ringed).ok);
  }

  SECTION("local rings give one point spectra") {
    SpecResult sp = spec_of_ring(FiniteRing::zmod(4));
    REQUIRE(sp.ringed.space.point_count() == 1);
    REQUIRE(sp.ringed.space.label(0) == "(2)");
    REQUIRE(rings_isomorphic(stalk_ring(sp.ringed, 0), FiniteRing::zmod(4)));
  }

  SECTION("fields have the zero ideal as their only point") {
    SpecResult sp = spec_of_ring(FiniteRing::zmod(2));
    REQUIRE(sp.ringed.space.point_count() == 1);
    REQUIRE(sp.ringed.space.label(0) == "(0)");
    REQUIRE(stalk_ring(sp.ringed, 0).size() == 2);
  }

  SECTION("points of a product add up") {
    auto points = [](const FiniteRing& r) {
      return spec_of_ring(r).ringed.space.point_count();
    };
    FiniteRing z4 = FiniteRing::zmod(4), z9 = FiniteRing::zmod(9);
    FiniteRing z6 = FiniteRing::zmod(6), z2 = FiniteRing::zmod(2);
    REQUIRE(points(FiniteRing::product(z4, z9)) == points(z4) + points(z9));
    REQUIRE(points(FiniteRing::product(z6, z2)) == points(z6) + points(z2));
  }

  SECTION("the section bound is enforced") {
    REQUIRE(code_of([] { spec_of_ring(FiniteRing::zmod(12), 8); }) ==
            ErrorCode::TooLarge);
  }
}

TEST_CASE("ring sheafification", "[ringspec]") {
  SECTION("sheaves come back unchanged up to isomorphism") {
    FiniteSpace s = testbed::sierpinski();
    Presheaf f = constant_ring(s, FiniteRing::zmod(4));
    RingSheafification sf = sheafify_ring(f);
    for (Mask u : s.opens()) {
      if (u == 0) continue;
      REQUIRE(sf.unit.at(u).is_bijective());
      REQUIRE(rings_isomorphic(sf.result.ring_value(u), f.ring_value(u)));
    }
  }

  SECTION("gluing failures are repaired") {
    FiniteSpace s = testbed::discrete(2);
    Presheaf f = constant_ring(s, FiniteRing::zmod(2));
    RingSheafification sf = sheafify_ring(f);
    REQUIRE(sf.result.ring_value(s.full_mask()).size() == 4);
    REQUIRE(!sf.unit.at(s.full_mask()).is_bijective());
    RingedFiniteSpace fixed = ringed_space(s, sf.result);
    REQUIRE(check_locally_ringed(fixed).ok);
  }

  SECTION("locality failures are repaired") {
    FiniteSpace s = testbed::discrete(2);
    RingSheafification sf = sheafify_ring(mod_two_collapse());
    REQUIRE(sf.result.ring_value(s.full_mask()).size() == 4);
    REQUIRE(!sf.unit.at(s.full_mask()).is_bijective());
    ringed_space(s, sf.result);
  }

  SECTION("group presheaves are rejected") {
    REQUIRE(code_of([] {
              sheafify_ring(sheaf::constant_presheaf(testbed::one_point(),
                                                     FgAbGroup::free_group(1)));
            }) == ErrorCode::WrongValueKind);
  }
}

TEST_CASE("structural scheme recognition", "[ringspec]") {
  FiniteSpace pt = testbed::one_point();

  SECTION("a family of local one point spectra is an affine scheme") {
    Presheaf f = sheaf::rebundle_structured(
        {constant_ring(pt, FiniteRing::zmod(4)), constant_ring(pt, FiniteRing::zmod(3))});
    SchemeReport rep = recognize_structural_scheme(
        f, {pt.full_mask()},
        {{FiniteRing::zmod(4), FiniteRing::zmod(3)}});
    REQUIRE(rep.scheme);
    REQUIRE(rep.verdicts.size() == 2);
    for (const SchemeVerdict& v : rep.verdicts) REQUIRE(v.ok);
  }

  SECTION("a wrong candidate is refused without an error") {
    Presheaf f = sheaf::rebundle_structured(
        {constant_ring(pt, FiniteRing::zmod(4)), constant_ring(pt, FiniteRing::zmod(3))});
    SchemeReport rep = recognize_structural_scheme(
        f, {pt.full_mask()},
        {{FiniteRing::zmod(4), FiniteRing::zmod(5)}});
    REQUIRE(!rep.scheme);
    REQUIRE(rep.verdicts[0].ok);
    REQUIRE(!rep.verdicts[1].ok);
  }

  SECTION("the degenerate singleton family recovers an affine spectrum") {
    SpecResult sp = spec_of_ring(FiniteRing::zmod(12));
    Presheaf f = sheaf::rebundle_structured({sp.ringed.structure});
    SchemeReport rep = recognize_structural_scheme(
        f, {sp.ringed.space.full_mask()}, {{FiniteRing::zmod(12)}});
    REQUIRE(rep.scheme);
  }

  SECTION("non local stalks are named") {
    Presheaf f = sheaf::rebundle_structured({constant_ring(pt, FiniteRing::zmod(6))});
    REQUIRE(code_of([&] {
              recognize_structural_scheme(f, {pt.full_mask()},
                                          {{FiniteRing::zmod(6)}});
            }) == ErrorCode::StalkNotLocal);
  }

  SECTION("the cover must cover") {
    FiniteSpace s = testbed::sierpinski();
    Presheaf f =
        sheaf::rebundle_structured({constant_ring(s, FiniteRing::zmod(2))});
    REQUIRE(code_of([&] {
              recognize_structural_scheme(f, {s.mask_of({"x"})},
                                          {{FiniteRing::zmod(2)}});
            }) == ErrorCode::NotACover);
  }

  SECTION("non structured or group valued inputs fail to decompose") {
    REQUIRE(code_of([&] {
              recognize_structural_scheme(constant_ring(pt, FiniteRing::zmod(2)),
                                          {pt.full_mask()}, {{FiniteRing::zmod(2)}});
            }) == ErrorCode::DecompositionFails);
    Presheaf groups = sheaf::rebundle_structured(
        {sheaf::constant_sheaf(pt, FgAbGroup::free_group(1))});
    REQUIRE(code_of([&] {
              recognize_structural_scheme(groups, {pt.full_mask()},
                                          {{FiniteRing::zmod(2)}});
            }) == ErrorCode::DecompositionFails);
  }

  SECTION("a connected two point piece is never a spectrum") {
    FiniteSpace s = testbed::sierpinski();
    Presheaf f =
        sheaf::rebundle_structured({constant_ring(s, FiniteRing::zmod(2))});
    SchemeReport rep = recognize_structural_scheme(
        f, {s.full_mask()}, {{FiniteRing::product(FiniteRing::zmod(2),
                                                  FiniteRing::zmod(2))}});
    REQUIRE(!rep.scheme);
  }
}

TEST_CASE("disjoint union assembly", "[ringspec]") {
  SECTION("two constant members over the Sierpinski space") {
    FiniteSpace s = testbed::sierpinski();
    Presheaf f = sheaf::rebundle_structured(
        {constant_ring(s, FiniteRing::zmod(2)), constant_ring(s, FiniteRing::zmod(3))});
    DisjointUnion du = disjoint_union_assembly(f);
    const FiniteSpace& t = du.total.space;
    REQUIRE(du.copies == 2);
    REQUIRE(t.point_count() == 4);
    REQUIRE(t.points() ==
            std::vector<std::string>{"x@1", "y@1", "x@2", "y@2"});
    REQUIRE(t.opens().size() == 9);
    REQUIRE(t.components(t.full_mask()).size() == 2);
    REQUIRE(du.copy_masks[0] == t.mask_of({"x@1", "y@1"}));
    REQUIRE(rings_isomorphic(du.total.structure.ring_value(du.copy_masks[0]),
                             FiniteRing::zmod(2)));
    REQUIRE(rings_isomorphic(du.total.structure.ring_value(du.copy_masks[1]),
                             FiniteRing::zmod(3)));
    REQUIRE(rings_isomorphic(du.total.structure.ring_value(t.full_mask()),
                             FiniteRing::zmod(6)));
    REQUIRE(check_locally_ringed(du.total).ok);
  }

  SECTION("one member reproduces the base with tagged points") {
    FiniteSpace s = testbed::sierpinski();
    Presheaf f =
        sheaf::rebundle_structured({constant_ring(s, FiniteRing::zmod(4))});
    DisjointUnion du = disjoint_union_assembly(f);
    REQUIRE(du.copies == 1);
    REQUIRE(du.total.space.points() == std::vector<std::string>{"x@1", "y@1"});
    REQUIRE(rings_isomorphic(
        du.total.structure.ring_value(du.total.space.full_mask()),
        FiniteRing::zmod(4)));
  }

  SECTION("components multiply with the member count") {
    FiniteSpace s = testbed::discrete(2);
    Presheaf fixed = sheaf::rebundle_structured(
        {sheafify_ring(constant_ring(s, FiniteRing::zmod(2))).result,
         sheafify_ring(constant_ring(s, FiniteRing::zmod(3))).result});
    DisjointUnion du = disjoint_union_assembly(fixed);
    const FiniteSpace& t = du.total.space;
    REQUIRE(t.components(t.full_mask()).size() == 4);
  }
}
