#include "structura/strcat.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "oracle.hpp"

using namespace structura;
using namespace structura::strcat;
using exactla::ExactField;
using exactla::FgAbGroup;
using exactla::FieldMatrix;
using exactla::GroupMap;
using exactla::Int;
using exactla::IntMatrix;
using ringspec::FiniteRing;
using ringspec::RingMap;

namespace {

StructuredFamily mixed_family() {
  std::vector<FamilyEntry> es;
  es.push_back({StructureTag::ab_group(), Carrier(FgAbGroup::cyclic(6))});
  es.push_back({StructureTag::ring(), Carrier(FiniteRing::zmod(4))});
  es.push_back({StructureTag::vector_space(ExactField::prime_field(2)), Carrier(std::size_t(2))});
  es.push_back({StructureTag::opaque("mystery"), Carrier(std::string("M"))});
  return StructuredFamily(true, std::move(es));
}

}  // namespace

TEST_CASE("membership reports", "[strcat]") {
  StructuredFamily x = mixed_family();
  SECTION("a family presents itself") {
    auto rep = check_category_membership(x, x, Alignment::identity(x.size()));
    REQUIRE(rep.accepted);
    REQUIRE(rep.both_partitionable);
    REQUIRE(rep.pairs.size() == 4);
  }
  SECTION("group carriers compare by canonical form") {
    StructuredFamily a(true, {{StructureTag::ab_group(), Carrier(FgAbGroup::cyclic(6))}});
    StructuredFamily b(true, {{StructureTag::ab_group(), Carrier(FgAbGroup{0, {Int(6)}})}});
    REQUIRE(check_category_membership(a, b, Alignment::identity(1)).accepted);
  }
  SECTION("ring carriers compare up to isomorphism") {
    FiniteRing crt = FiniteRing::product(FiniteRing::zmod(2), FiniteRing::zmod(3));
    StructuredFamily a(true, {{StructureTag::ring(), Carrier(crt)}});
    StructuredFamily b(true, {{StructureTag::ring(), Carrier(FiniteRing::zmod(6))}});
    REQUIRE(check_category_membership(a, b, Alignment::identity(1)).accepted);
    StructuredFamily c(true, {{StructureTag::ring(), Carrier(FiniteRing::zmod(4))}});
    auto rep = check_category_membership(b, c, Alignment::identity(1));
    REQUIRE_FALSE(rep.accepted);
    REQUIRE(rep.first_violation.find("pair (1 -> 1)") != std::string::npos);
  }
  SECTION("tag mismatches are named") {
    StructuredFamily a(true, {{StructureTag::ab_group(), Carrier(FgAbGroup::cyclic(2))}});
    StructuredFamily b(true, {{StructureTag::ring(), Carrier(FiniteRing::zmod(2))}});
    auto rep = check_category_membership(a, b, Alignment::identity(1));
    REQUIRE_FALSE(rep.accepted);
    REQUIRE(rep.pairs[0].tags_agree == false);
    REQUIRE(rep.first_violation.find("AbGroup vs Ring") != std::string::npos);
  }
  SECTION("opaque structures compare by name only") {
    StructuredFamily a(true, {{StructureTag::opaque("blob"), Carrier(std::string("B"))}});
    StructuredFamily b(true, {{StructureTag::opaque("blob"), Carrier(std::string("B"))}});
    StructuredFamily c(true, {{StructureTag::opaque("blip"), Carrier(std::string("B"))}});
    REQUIRE(check_category_membership(a, b, Alignment::identity(1)).accepted);
    REQUIRE_FALSE(check_category_membership(a, c, Alignment::identity(1)).accepted);
  }
  SECTION("bad alignments throw") {
    Alignment repeat;
    repeat.image = {0, 0, 2, 3};
    try {
      check_category_membership(x, x, repeat);
      FAIL("expected AlignmentMismatch");
    } catch (const MathError& e) {
      REQUIRE(e.code() == ErrorCode::AlignmentMismatch);
    }
  }
}

TEST_CASE("structured hom validation", "[strcat]") {
  StructuredFamily x = mixed_family();
  SECTION("identity typechecks and is neutral") {
    StructuredHom id = StructuredHom::identity(x);
    REQUIRE(compose(id, id) == id);
  }
  SECTION("component of the wrong kind is rejected") {
    StructuredFamily a(true, {{StructureTag::ab_group(), Carrier(FgAbGroup::cyclic(2))}});
    std::vector<HomComponent> comps;
    comps.emplace_back(std::monostate{});
    try {
      StructuredHom(a, a, Alignment::identity(1), std::move(comps));
      FAIL("expected ComponentShapeMismatch");
    } catch (const MathError& e) {
      REQUIRE(e.code() == ErrorCode::ComponentShapeMismatch);
    }
  }
  SECTION("carrier endpoint mismatch is rejected") {
    StructuredFamily a(true, {{StructureTag::ab_group(), Carrier(FgAbGroup::cyclic(2))}});
    std::vector<HomComponent> comps;
    comps.emplace_back(GroupMap::identity(FgAbGroup::cyclic(4)));
    REQUIRE_THROWS_AS(StructuredHom(a, a, Alignment::identity(1), std::move(comps)),
                      MathError);
  }
  SECTION("tags may not cross even with plausible data") {
    StructuredFamily a(true, {{StructureTag::opaque("left"), Carrier(std::string("L"))}});
    StructuredFamily b(true, {{StructureTag::opaque("right"), Carrier(std::string("R"))}});
    std::vector<HomComponent> comps;
    comps.emplace_back(std::monostate{});
    try {
      StructuredHom(a, b, Alignment::identity(1), std::move(comps));
      FAIL("expected TagMismatch");
    } catch (const MathError& e) {
      REQUIRE(e.code() == ErrorCode::TagMismatch);
    }
  }
}

TEST_CASE("composition laws", "[strcat]") {
  // families of two group members swapped by the alignment, plus a vector leg
  ExactField f3 = ExactField::prime_field(3);
  auto family = [&](long r1, long r2) {
    std::vector<FamilyEntry> es;
    es.push_back({StructureTag::ab_group(), Carrier(FgAbGroup::free_group(r1))});
    es.push_back({StructureTag::ab_group(), Carrier(FgAbGroup::free_group(r2))});
    es.push_back({StructureTag::vector_space(f3), Carrier(std::size_t(1))});
    return StructuredFamily(true, std::move(es));
  };
  StructuredFamily A = family(1, 2), B = family(2, 1), C = family(1, 2), D = family(2, 1);

  unsigned state = 5u;
  auto rand_map = [&](const FgAbGroup& s, const FgAbGroup& t) {
    IntMatrix m(t.gens(), s.gens());
    for (std::size_t i = 0; i < t.gens(); ++i)
      for (std::size_t j = 0; j < s.gens(); ++j)
        m(i, j) = Int(oracle::random_entry(state, 3).str());
    return GroupMap(s, t, std::move(m));
  };
  auto swap_hom = [&](const StructuredFamily& s, const StructuredFamily& t) {
    Alignment al;
    al.image = {1, 0, 2};
    std::vector<HomComponent> comps;
    comps.emplace_back(rand_map(std::get<FgAbGroup>(s.entries[0].carrier),
                                std::get<FgAbGroup>(t.entries[1].carrier)));
    comps.emplace_back(rand_map(std::get<FgAbGroup>(s.entries[1].carrier),
                                std::get<FgAbGroup>(t.entries[0].carrier)));
    FieldMatrix fm(f3, 1, 1);
    fm(0, 0) = 2;
    comps.emplace_back(fm);
    return StructuredHom(s, t, std::move(al), std::move(comps));
  };

  for (int trial = 0; trial < 25; ++trial) {
    StructuredHom f = swap_hom(A, B), g = swap_hom(B, C), h = swap_hom(C, D);
    SECTION("associativity, trial " + std::to_string(trial)) {}
    REQUIRE(compose(h, compose(g, f)) == compose(compose(h, g), f));
    REQUIRE(compose(StructuredHom::identity(B), f) == f);
    REQUIRE(compose(f, StructuredHom::identity(A)) == f);
  }
}
