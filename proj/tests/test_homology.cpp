#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <random>

#include "gradus/homology.hpp"

using namespace gradus;

namespace {

RingPtr triv_ring(Ground g = Ground::integers(), bool local = false,
                  std::string p = "2") {
  RingFlags f;
  if (local) {
    f.graded_local = true;
    f.max_ideal = {p};
  }
  return Ring::validate(g, {}, {}, f);
}

RingPtr ku2_ring() {
  RingFlags f;
  f.connective = true;
  f.graded_local = true;
  f.max_ideal = {"2"};
  return Ring::validate(Ground::localized_at(2),
                        {{"u", 2, false, GenKind::Poly}}, {}, f);
}

RingPtr KU5_ring() {
  RingFlags f;
  f.graded_local = true;
  f.max_ideal = {"5"};
  return Ring::validate(Ground::localized_at(5),
                        {{"u", 2, false, GenKind::Invertible}}, {}, f);
}

ModulePtr cyclic(const RingPtr& R, const std::vector<Element>& ideal) {
  std::vector<ModElement> rels;
  for (const Element& g : ideal) rels.push_back({g});
  return Module::make(R, {0}, rels);
}

}  // namespace

TEST_CASE("koszul complex shapes") {
  auto ku = ku2_ring();
  auto K1 = koszul_complex(ku, {ku->gen_element(0)});
  CHECK(K1.complex.length() == 1);
  CHECK(K1.complex.modules[0]->shifts() == std::vector<int>{0});
  CHECK(K1.complex.modules[1]->shifts() == std::vector<int>{2});

  auto K2 = koszul_complex(ku, {ku->constant(2), ku->gen_element(0)});
  CHECK(K2.complex.length() == 2);
  CHECK(K2.complex.modules[0]->shifts() == std::vector<int>{0});
  CHECK(K2.complex.modules[1]->shifts() == std::vector<int>{0, 2});
  CHECK(K2.complex.modules[2]->shifts() == std::vector<int>{2});
  // d(e1 e2) = 2 e2 - u e1
  const ModuleMap& d2 = K2.complex.differentials[1];
  CHECK(ku->is_zero(ku->sub(d2.matrix[0][1], ku->constant(2))));
  CHECK(ku->is_zero(ku->add(d2.matrix[0][0], ku->gen_element(0))));
  CHECK(is_zero_map(compose(K2.complex.differentials[0],
                            K2.complex.differentials[1])));
}

TEST_CASE("koszul homology detects regularity") {
  auto ku = ku2_ring();
  auto K = koszul_complex(ku, {ku->constant(2), ku->gen_element(0)});
  auto H = complex_homology(K.complex, 0, 12);
  REQUIRE(H.groups.size() == 3);
  CHECK(H.groups[0] == GradedInvariants{{0, AbInvariants{0, {2}}}});
  CHECK(H.groups[1].empty());
  CHECK(H.groups[2].empty());

  auto Kbad = koszul_complex(ku, {ku->gen_element(0), ku->gen_element(0)});
  auto Hbad = complex_homology(Kbad.complex, 0, 12);
  CHECK_FALSE(Hbad.groups[1].empty());
}

TEST_CASE("zero differentials give back the pieces") {
  auto Z = triv_ring();
  auto F0 = Module::free_module(Z, {0});
  auto F1 = Module::free_module(Z, {0, 0});
  FreeComplex C{F0, {F0, F1}, {zero_map(F1, F0, 0)},
                identity_map(F0)};
  auto H = complex_homology(C, 0, 0);
  CHECK(H.groups[0] == GradedInvariants{{0, AbInvariants{1, {}}}});
  CHECK(H.groups[1] == GradedInvariants{{0, AbInvariants{2, {}}}});
}

TEST_CASE("tor of coprime cyclic modules vanishes") {
  auto Z = triv_ring();
  auto A = cyclic(Z, {Z->constant(2)});
  auto B = cyclic(Z, {Z->constant(3)});
  auto t = tor(A, B, 3, -1, 1);
  CHECK(t.entries.empty());
  CHECK(t.complete);
}

TEST_CASE("tor of the residue with itself has the Koszul pattern") {
  auto ku2 = ku2_ring();
  auto kappa = cyclic(ku2, {ku2->constant(2), ku2->gen_element(0)});
  auto t = tor(kappa, kappa, 3, 0, 8);
  CHECK(t.complete);
  REQUIRE(t.entry(0, 0));
  CHECK(*t.entry(0, 0) == AbInvariants{0, {2}});
  REQUIRE(t.entry(1, 0));
  CHECK(*t.entry(1, 0) == AbInvariants{0, {2}});
  REQUIRE(t.entry(1, 2));
  CHECK(*t.entry(1, 2) == AbInvariants{0, {2}});
  REQUIRE(t.entry(2, 2));
  CHECK(*t.entry(2, 2) == AbInvariants{0, {2}});
  CHECK(t.entries.size() == 4);
}

TEST_CASE("tor with a free first argument is the module itself") {
  auto ku2 = ku2_ring();
  auto R = Module::free_module(ku2, {0});
  auto M = Module::make(ku2, {0, 2},
                        {{{ku2->gen_element(0), ku2->constant(2)}}});
  auto t = tor(R, M, 3, 0, 8);
  for (const auto& [pd, inv] : t.entries) CHECK(pd.first == 0);
  for (int d = 0; d <= 8; ++d) {
    const AbInvariants* e = t.entry(0, d);
    AbInvariants got = e ? *e : AbInvariants{};
    CHECK(got == M->degree_piece(d));
  }
}

TEST_CASE("tor balances on randomized pairs") {
  auto ku2 = ku2_ring();
  std::mt19937 rng(4242);
  std::uniform_int_distribution<int> nshift(1, 2), shiftv(0, 2), coeff(-3, 3),
      nrel(0, 2);
  auto rand_module = [&]() {
    std::vector<int> shifts(nshift(rng));
    for (int& s : shifts) s = 2 * shiftv(rng);
    std::vector<ModElement> rels;
    int nr = nrel(rng);
    for (int r = 0; r < nr; ++r) {
      int D = 2 * shiftv(rng) + 2;
      ModElement row(shifts.size());
      bool any = false;
      for (size_t i = 0; i < shifts.size(); ++i) {
        int e = D - shifts[i];
        if (e < 0 || e % 2) continue;
        int c = coeff(rng);
        if (!c) continue;
        row[i] = ku2->scale(c, ku2->gen_element(0, e / 2));
        any = true;
      }
      if (any) rels.push_back(row);
    }
    return Module::make(ku2, shifts, rels);
  };
  for (int t = 0; t < 10; ++t) {
    auto M = rand_module(), N = rand_module();
    auto ab = tor(M, N, 3, 0, 6);
    auto ba = tor(N, M, 3, 0, 6);
    CHECK(ab.entries == ba.entries);
  }
}

TEST_CASE("kunneth page of shifted frees is concentrated in column 0") {
  auto ku2 = ku2_ring();
  auto A = Module::free_module(ku2, {3});
  auto B = Module::free_module(ku2, {-3});
  auto page = kunneth_e2_page(ku2, A, B, 3, 0, 8);
  auto R = Module::free_module(ku2, {0});
  for (const auto& [pd, inv] : page.table.entries) CHECK(pd.first == 0);
  for (int d = 0; d <= 8; ++d) {
    const AbInvariants* e = page.table.entry(0, d);
    AbInvariants got = e ? *e : AbInvariants{};
    CHECK(got == R->degree_piece(d));
  }
}

TEST_CASE("minimal collapse check") {
  auto Z2 = triv_ring(Ground::localized_at(2), true);
  auto kappa = cyclic(Z2, {Z2->constant(2)});
  auto rep = minimal_resolution(kappa, 3, -2, 2);
  auto v = minimal_collapse_check(kappa, rep.complex, -2, 2);
  CHECK(v.pass);
  CHECK_FALSE(v.refused);

  // length-0 complex: vacuously collapsed
  auto F = Module::free_module(Z2, {0});
  FreeComplex C0{F, {F}, {}, identity_map(F)};
  CHECK(minimal_collapse_check(kappa, C0, -2, 2).pass);

  // padded complex refused, not failed
  auto F0 = Module::free_module(Z2, {0, 0});
  auto F1 = Module::free_module(Z2, {0, 0});
  auto aug = make_map(F0, kappa, 0, {{Z2->one()}, {Element{}}});
  auto d1 = make_map(F1, F0, 0,
                     {{Z2->constant(2), Element{}}, {Element{}, Z2->one()}});
  FreeComplex Cp{kappa, {F0, F1}, {d1}, aug};
  auto vp = minimal_collapse_check(kappa, Cp, -2, 2);
  CHECK_FALSE(vp.pass);
  CHECK(vp.refused);
  REQUIRE_FALSE(vp.reasons.empty());
  CHECK(vp.reasons[0].find("not minimal") != std::string::npos);
}

TEST_CASE("three column analysis cases") {
  E2Page page;
  page.table.lo = 0;
  page.table.hi = 0;
  page.table.pmax = 2;

  SUBCASE("collapse") {
    page.table.entries[{0, 0}] = AbInvariants{0, {2}};
    auto v = three_column_analysis(page, {{0, AbInvariants{0, {2}}}});
    CHECK(v.consistent);
    CHECK(v.kind == ThreeColumnCase::CollapseConsistent);
  }
  SUBCASE("(n,1,n) with n >= 2 cannot be a resolution") {
    page.table.entries[{0, 0}] = AbInvariants{0, {2, 2}};
    page.table.entries[{1, 0}] = AbInvariants{0, {2}};
    page.table.entries[{2, 0}] = AbInvariants{0, {2, 2}};
    auto v = three_column_analysis(page, {{0, AbInvariants{0, {2}}}});
    CHECK_FALSE(v.consistent);
    CHECK(v.kind == ThreeColumnCase::CannotBeResolution);
    CHECK(v.description.find("cannot be a resolution") != std::string::npos);
  }
  SUBCASE("(1,1,1) forces a kernel") {
    page.table.entries[{0, 0}] = AbInvariants{0, {2}};
    page.table.entries[{1, 2}] = AbInvariants{0, {2}};
    page.table.entries[{2, 4}] = AbInvariants{0, {2}};
    auto v = three_column_analysis(page, {{0, AbInvariants{0, {2}}}});
    CHECK_FALSE(v.consistent);
    CHECK(v.kind == ThreeColumnCase::NontrivialKernel);
    CHECK(v.description.find("nontrivial kernel") != std::string::npos);
  }
  SUBCASE("four columns rejected") {
    page.table.entries[{3, 0}] = AbInvariants{0, {2}};
    CHECK_THROWS_AS(three_column_analysis(page, {}), ValidationError);
  }
}

TEST_CASE("quotient tower over ku at 2") {
  auto ku2 = ku2_ring();
  auto rep = quotient_tower(ku2, {ku2->constant(2), ku2->gen_element(0)},
                            {2, 1}, 0, 10);
  REQUIRE(rep.stages.size() == 1);
  const TowerStage& st = rep.stages[0];
  CHECK(st.exact);
  CHECK(rep.all_exact);
  CHECK(st.sub->degree_piece(0) == AbInvariants{0, {2}});
  CHECK(st.mid->degree_piece(0) == AbInvariants{0, {4}});
  CHECK(st.quot->degree_piece(0) == AbInvariants{0, {2}});

  auto collapsed = quotient_tower(
      ku2, {ku2->constant(2), ku2->gen_element(0)}, {1, 1}, 0, 10);
  REQUIRE(collapsed.stages.size() == 1);
  CHECK(collapsed.stages[0].index == -1);
  CHECK(collapsed.all_exact);

  CHECK_THROWS_AS(quotient_tower(ku2, {ku2->constant(2)}, {0}, 0, 4),
                  ValidationError);
}

TEST_CASE("p-power tower over periodic K-theory at 5") {
  auto KU5 = KU5_ring();
  auto rep = quotient_tower(KU5, {KU5->constant(5)}, {3}, -4, 4);
  REQUIRE(rep.stages.size() == 2);
  CHECK(rep.all_exact);
  CHECK(rep.stages[0].mid->degree_piece(0) == AbInvariants{0, {25}});
  CHECK(rep.stages[1].mid->degree_piece(0) == AbInvariants{0, {125}});
  CHECK(rep.stages[1].mid->degree_piece(2) == AbInvariants{0, {125}});
}

TEST_CASE("cofinality table for ku at 2") {
  auto ku2 = ku2_ring();
  auto table = ideal_cofinality_check(ku2, 3, 8);
  CHECK(table.conclusive);
  CHECK(table.rows.size() == 9);
  for (const auto& row : table.rows) {
    int a = row.exponents[0], b = row.exponents[1];
    REQUIRE(row.l.has_value());
    CHECK(*row.l == a + b - 1);
    REQUIRE(row.lprime.has_value());
    CHECK(*row.lprime == std::min(a, b));
  }
}

TEST_CASE("cofinality table is diagonal in the principal case") {
  auto KU5 = KU5_ring();
  auto table = ideal_cofinality_check(KU5, 3, 8);
  CHECK(table.conclusive);
  for (const auto& row : table.rows) {
    CHECK(*row.l == row.exponents[0]);
    CHECK(*row.lprime == row.exponents[0]);
  }
}

TEST_CASE("tor table serialization is canonical") {
  auto ku2 = ku2_ring();
  auto kap1 = cyclic(ku2, {ku2->constant(2), ku2->gen_element(0)});
  auto kap2 = cyclic(ku2, {ku2->gen_element(0), ku2->constant(2)});
  auto t1 = tor(kap1, kap1, 3, 0, 8);
  auto t2 = tor(kap2, kap2, 3, 0, 8);
  CHECK(to_json(t1) == to_json(t2));
  auto j = nlohmann::json::parse(to_json(t1));
  CHECK(j["pmax"] == 3);
  CHECK(j["window"] == nlohmann::json({0, 8}));
  CHECK(j["entries"].size() == 4);
  CHECK(j["entries"][0]["p"] == 0);
  CHECK(j["entries"][0]["d"] == 0);
  CHECK(j["entries"][0]["rank"] == 0);
  CHECK(j["entries"][0]["torsion"] == nlohmann::json({"2"}));
  CHECK_FALSE(to_text(t1).empty());
}
