#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "gradus/ring.hpp"

using namespace gradus;

namespace {

RingPtr make_KU(long p = 0) {
  Ground g = p ? Ground::localized_at(p) : Ground::integers();
  RingFlags f;
  if (p) {
    f.graded_local = true;
    f.max_ideal = {std::to_string(p)};
  }
  return Ring::validate_strings(
      g, {{"u", 2, false, GenKind::Invertible}}, {}, f);
}

RingPtr make_ku(bool at2 = false) {
  Ground g = at2 ? Ground::localized_at(2) : Ground::integers();
  RingFlags f;
  f.connective = true;
  if (at2) {
    f.graded_local = true;
    f.max_ideal = {"2"};
  }
  return Ring::validate_strings(g, {{"u", 2, false, GenKind::Poly}}, {}, f);
}

RingPtr make_KO(std::vector<std::string> rels = {"2*eta", "eta^3", "eta*y",
                                                 "y^2 - 4*w"},
                Ground g = Ground::integers(), bool local = false) {
  RingFlags f;
  if (local) {
    f.graded_local = true;
    f.max_ideal = {"2"};
  }
  return Ring::validate_strings(g,
                                {{"eta", 1, true, GenKind::Poly},
                                 {"y", 4, false, GenKind::Poly},
                                 {"w", 8, false, GenKind::Invertible}},
                                rels, f);
}

RingPtr make_trunc_sphere(bool at2 = false) {
  Ground g = at2 ? Ground::localized_at(2) : Ground::integers();
  RingFlags f;
  f.connective = true;
  if (at2) {
    f.graded_local = true;
    f.max_ideal = {"2"};
  }
  return Ring::validate_strings(g,
                                {{"eta", 1, true, GenKind::Poly},
                                 {"nu", 3, true, GenKind::Nilpotent, 2}},
                                {"2*eta", "eta^3 - 12*nu", "eta*nu", "24*nu"},
                                f);
}

AbInvariants inv(const RingPtr& R, int d) { return R->degree_basis(d).invariants; }

}  // namespace

TEST_CASE("KU degree bases") {
  auto KU = make_KU();
  const DegreeBasis& b4 = KU->degree_basis(4);
  CHECK(b4.invariants.free_rank == 1);
  CHECK(b4.invariants.torsion.empty());
  REQUIRE(b4.monomials.size() == 1);
  CHECK(b4.monomials[0] == Monomial{2});  // u^2
  CHECK(inv(KU, 3).is_zero());
  CHECK(inv(KU, -2).free_rank == 1);
}

TEST_CASE("ku degree bases") {
  auto ku = make_ku();
  CHECK(inv(ku, 3).is_zero());
  CHECK(inv(ku, 4).free_rank == 1);
  CHECK(inv(ku, -2).is_zero());
}

TEST_CASE("KO degree bases") {
  auto KO = make_KO();
  CHECK(inv(KO, 0) == AbInvariants{1, {}});
  CHECK(inv(KO, 1) == AbInvariants{0, {2}});
  CHECK(inv(KO, 2) == AbInvariants{0, {2}});  // eta^2
  CHECK(inv(KO, 3).is_zero());
  CHECK(inv(KO, 4) == AbInvariants{1, {}});   // y
  CHECK(inv(KO, 5).is_zero());
  CHECK(inv(KO, 8) == AbInvariants{1, {}});   // w
  CHECK(inv(KO, -8) == AbInvariants{1, {}});  // w^-1
  CHECK(inv(KO, 9) == AbInvariants{0, {2}});  // eta*w
}

TEST_CASE("KO normal forms") {
  auto KO = make_KO();
  Element y = KO->gen_element(1), w = KO->gen_element(2),
          eta = KO->gen_element(0);
  CHECK(KO->multiply(y, y) == KO->normal_form(KO->scale(4, w)));
  CHECK(KO->is_zero(KO->multiply(eta, y)));
  Element eta2 = KO->multiply(eta, eta);
  CHECK(!eta2.is_zero());
  CHECK(KO->is_zero(KO->scale(2, eta2)));
  // u * u^-1 = 1 over KU
  auto KU = make_KU();
  CHECK(KU->multiply(KU->gen_element(0, 3), KU->gen_element(0, -1)) ==
        KU->normal_form(KU->gen_element(0, 2)));
  CHECK(KU->multiply(KU->gen_element(0), KU->gen_element(0, -1)) == KU->one());
}

TEST_CASE("validation errors") {
  Ground Z = Ground::integers();
  CHECK_THROWS_AS(Ring::validate_strings(
                      Z,
                      {{"y", 4, false, GenKind::Poly},
                       {"w", 6, false, GenKind::Invertible}},
                      {"y^2 - 4*w"}, {}),
                  ValidationError);
  CHECK_THROWS_AS(
      Ring::validate_strings(Z, {{"x", 0, false, GenKind::Poly}}, {}, {}),
      ValidationError);
  CHECK_THROWS_AS(Ring::validate_strings(Z,
                                         {{"x", 2, false, GenKind::Poly},
                                          {"x", 4, false, GenKind::Poly}},
                                         {}, {}),
                  ValidationError);
  // two cap-free invertibles make degree bases infinite
  CHECK_THROWS_AS(Ring::validate_strings(Z,
                                         {{"u", 2, false, GenKind::Invertible},
                                          {"v", 2, false, GenKind::Invertible}},
                                         {}, {}),
                  ValidationError);
  // uncapped positive generator next to an invertible: u^-4*x^8 has degree 0
  CHECK_THROWS_AS(Ring::validate_strings(Z,
                                         {{"x", 2, false, GenKind::Poly},
                                          {"u", 8, false, GenKind::Invertible}},
                                         {}, {}),
                  ValidationError);
}

TEST_CASE("koszul signs") {
  Ground Z = Ground::integers();
  auto E = Ring::validate_strings(Z,
                                  {{"e1", 3, true, GenKind::Nilpotent, 2},
                                   {"e2", 5, true, GenKind::Nilpotent, 2}},
                                  {}, {});
  Element e1 = E->gen_element(0), e2 = E->gen_element(1);
  CHECK(E->multiply(e1, e2) ==
        E->normal_form(E->scale(-1, E->raw_multiply(e2, e1))));
  CHECK(E->is_zero(E->multiply(e1, e1)));

  // auto-relation: odd generator with irreducible square gets 2g^2 = 0
  auto P = Ring::validate_strings(Z, {{"g", 1, true, GenKind::Poly}}, {}, {});
  Element g2 = P->multiply(P->gen_element(0), P->gen_element(0));
  CHECK(!g2.is_zero());
  CHECK(P->is_zero(P->scale(2, g2)));
}

TEST_CASE("graded commutativity property on random homogeneous elements") {
  auto KO = make_KO();
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> deg(-8, 8), coeff(-3, 3);
  int tried = 0;
  for (int t = 0; t < 60 && tried < 40; ++t) {
    int da = deg(rng), db = deg(rng);
    auto ma = KO->degree_basis(da).monomials;
    auto mb = KO->degree_basis(db).monomials;
    if (ma.empty() || mb.empty()) continue;
    Element a, b;
    for (const auto& m : ma) a.terms.emplace(m, coeff(rng));
    for (const auto& m : mb) b.terms.emplace(m, coeff(rng));
    a = KO->normal_form(a);
    b = KO->normal_form(b);
    ++tried;
    int sign = (da * db) % 2 ? -1 : 1;
    CHECK(KO->multiply(a, b) ==
          KO->normal_form(KO->scale(sign, KO->raw_multiply(b, a))));
  }
  CHECK(tried >= 20);
}

TEST_CASE("quotient rings") {
  auto KU = make_KU();
  auto F5u = KU->quotient({KU->constant(5)});
  CHECK(inv(F5u, 0) == AbInvariants{0, {5}});
  CHECK(inv(F5u, 2) == AbInvariants{0, {5}});
  CHECK(inv(F5u, 3).is_zero());

  auto ku = make_ku();
  auto F2 = ku->quotient({ku->constant(2), ku->gen_element(0)});
  CHECK(inv(F2, 0) == AbInvariants{0, {2}});
  for (int d = 1; d <= 6; ++d) CHECK(inv(F2, d).is_zero());

  // R/(0) = R
  auto same = ku->quotient({});
  for (int d = 0; d <= 8; ++d) CHECK(inv(same, d) == inv(ku, d));
}

TEST_CASE("ground localization") {
  auto KO = make_KO();
  auto KO3 = KO->localize(Ground::localized_at(3));
  CHECK(inv(KO3, 1).is_zero());  // 2 is a unit, 2*eta = 0 kills eta
  CHECK(inv(KO3, 2).is_zero());
  CHECK(inv(KO3, 4).free_rank == 1);
  auto KO2 = KO->localize(Ground::localized_at(2));
  CHECK(inv(KO2, 1) == AbInvariants{0, {2}});
  auto KU5 = make_KU()->localize(Ground::localized_at(5));
  CHECK(inv(KU5, 2).free_rank == 1);
  CHECK(inv(KU5, 3).is_zero());
}

TEST_CASE("graded maximal ideals") {
  auto ku2 = make_ku(true);
  auto m1 = ku2->graded_max_ideal();
  REQUIRE(m1.size() == 2);
  CHECK(m1[0] == ku2->constant(2));
  CHECK(m1[1] == ku2->gen_element(0));

  auto KU5 = make_KU(5);
  auto m2 = KU5->graded_max_ideal();
  REQUIRE(m2.size() == 1);
  CHECK(m2[0] == KU5->constant(5));

  auto KO2 = make_KO({"2*eta", "eta^3", "eta*y", "y^2 - 4*w"},
                     Ground::localized_at(2), true);
  auto m3 = KO2->graded_max_ideal();
  REQUIRE(m3.size() == 3);
  CHECK(m3[0] == KO2->constant(2));
  CHECK(m3[1] == KO2->gen_element(0));  // eta
  CHECK(m3[2] == KO2->gen_element(1));  // y; w is invertible, excluded

  CHECK_THROWS_AS(make_ku(false)->graded_max_ideal(), ValidationError);
}

TEST_CASE("residue quotients are graded fields") {
  auto ku2 = make_ku(true);
  auto r1 = ku2->residue_quotient(-6, 6);
  CHECK(r1.graded_field);
  CHECK(inv(r1.ring, 0) == AbInvariants{0, {2}});
  for (int d = 1; d <= 6; ++d) CHECK(inv(r1.ring, d).is_zero());

  auto KU5 = make_KU(5);
  auto r2 = KU5->residue_quotient(-6, 6);
  CHECK(r2.graded_field);
  CHECK(inv(r2.ring, 2) == AbInvariants{0, {5}});
  CHECK(inv(r2.ring, -4) == AbInvariants{0, {5}});
  CHECK(inv(r2.ring, 3).is_zero());

  auto KO2 = make_KO({"2*eta", "eta^3", "eta*y", "y^2 - 4*w"},
                     Ground::localized_at(2), true);
  auto r3 = KO2->residue_quotient(-8, 8);
  CHECK(r3.graded_field);
  CHECK(inv(r3.ring, 0) == AbInvariants{0, {2}});
  CHECK(inv(r3.ring, 8) == AbInvariants{0, {2}});   // w survives
  for (int d = 1; d <= 7; ++d) CHECK(inv(r3.ring, d).is_zero());
}

TEST_CASE("eilenberg condition checker") {
  CHECK(make_ku(true)->eilenberg_check(-8, 8).pass);
  CHECK(make_trunc_sphere(true)->eilenberg_check(-8, 8).pass);
  auto ku_over_Z = make_ku(false);
  CHECK(!ku_over_Z->eilenberg_check(-8, 8).pass);  // Z is not local
  auto KU = make_KU(5);
  auto v = KU->eilenberg_check(-8, 8);
  CHECK(!v.pass);
  REQUIRE(!v.reasons.empty());
  CHECK(v.reasons[0].find("negative degree") != std::string::npos);
}

TEST_CASE("truncated sphere ring matches the low stable stems") {
  auto S = make_trunc_sphere();
  CHECK(inv(S, 0) == AbInvariants{1, {}});
  CHECK(inv(S, 1) == AbInvariants{0, {2}});
  CHECK(inv(S, 2) == AbInvariants{0, {2}});   // eta^2
  CHECK(inv(S, 3) == AbInvariants{0, {24}});  // nu
  CHECK(inv(S, 4).is_zero());
  CHECK(inv(S, 5).is_zero());
  Element eta3 = S->normal_form(S->gen_element(0, 3));
  CHECK(eta3 == S->normal_form(S->scale(12, S->gen_element(1))));
  CHECK(!eta3.is_zero());
}

TEST_CASE("expression parser") {
  auto KO = make_KO();
  Element e = parse_element(KO->gens(), KO->ground(), "y^2 - 4*w");
  CHECK(e.terms.size() == 2);
  CHECK(KO->is_zero(e));
  CHECK(element_to_string(KO->gens(), KO->sub(KO->gen_element(1),
                                              KO->scale(2, KO->one()))) ==
        "-2 + y");
  CHECK_THROWS_AS(parse_element(KO->gens(), KO->ground(), "z^2"), ParseError);
  CHECK_THROWS_AS(parse_element(KO->gens(), KO->ground(), "y^-1"), ParseError);
  CHECK_THROWS_AS(
      parse_element(KO->gens(), Ground::localized_at(2), "1/2*y"), ParseError);
  Element half = parse_element(KO->gens(), Ground::inverted(3), "1/3");
  (void)half;
  CHECK_THROWS_AS(parse_element(KO->gens(), Ground::integers(), "y +"),
                  ParseError);
  // anticommuting factors pick up the sign during parsing
  auto E = Ring::validate_strings(Ground::integers(),
                                  {{"e1", 3, true, GenKind::Nilpotent, 2},
                                   {"e2", 5, true, GenKind::Nilpotent, 2}},
                                  {}, {});
  Element lhs = parse_element(E->gens(), E->ground(), "e2*e1");
  Element rhs = parse_element(E->gens(), E->ground(), "e1*e2");
  CHECK(lhs == E->scale(-1, rhs));
}

TEST_CASE("degree data independent of relation order") {
  std::vector<std::string> rels = {"2*eta", "eta^3", "eta*y", "y^2 - 4*w"};
  auto base = make_KO(rels);
  std::vector<Element> base_nf;
  std::mt19937 rng(5);
  for (int t = 0; t < 6; ++t) {
    std::shuffle(rels.begin(), rels.end(), rng);
    auto R = make_KO(rels);
    for (int d = -8; d <= 10; ++d) {
      CHECK(R->degree_basis(d).monomials == base->degree_basis(d).monomials);
      CHECK(inv(R, d) == inv(base, d));
    }
    // canonical normal forms agree monomial-for-monomial
    for (int d = 0; d <= 10; ++d)
      for (const Monomial& m : base->degree_basis(d).monomials) {
        Element e;
        e.terms.emplace(m, 3);
        CHECK(R->normal_form(e) == base->normal_form(e));
      }
  }
}

TEST_CASE("window cap enforced") {
  auto ku = make_ku();
  CHECK_THROWS_AS(ku->degree_basis(100000), WindowError);
  CHECK_THROWS_AS(ku->monomials_of_degree(-100000), WindowError);
}
