#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gradus/resolution.hpp"

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

ModulePtr cyclic(const RingPtr& R, const std::vector<Element>& ideal) {
  std::vector<ModElement> rels;
  for (const Element& g : ideal) rels.push_back({g});
  return Module::make(R, {0}, rels);
}

}  // namespace

TEST_CASE("free module resolves to itself") {
  auto Z = triv_ring();
  auto F = Module::free_module(Z, {0, 3});
  auto rep = free_resolution(F, 4, -1, 5);
  CHECK(rep.complete);
  CHECK(rep.complex.length() == 0);
  CHECK(rep.betti() == std::vector<int>{2});
  CHECK(rep.betti_shifts[0] == std::vector<int>{0, 3});
}

TEST_CASE("Z/2 over the 2-local integers") {
  auto Z2 = triv_ring(Ground::localized_at(2), true);
  auto F2 = cyclic(Z2, {Z2->constant(2)});
  auto rep = minimal_resolution(F2, 4, -2, 2);
  CHECK(rep.complete);
  CHECK(rep.minimal);
  CHECK(rep.betti() == std::vector<int>{1, 1});
  CHECK(rep.betti_shifts[0] == std::vector<int>{0});
  CHECK(rep.betti_shifts[1] == std::vector<int>{0});
  // the single differential entry is multiplication by (an associate of) 2
  const Element& e = rep.complex.differentials[0].matrix[0][0];
  REQUIRE(e.terms.size() == 1);
  Rat c = e.terms.begin()->second;
  CHECK(Z2->ground().associate(c) == 2);
  CHECK(is_minimal(rep.complex).pass);
}

TEST_CASE("residue field of ku at 2 has the Koszul shape") {
  auto ku2 = ku2_ring();
  auto kappa = cyclic(ku2, {ku2->constant(2), ku2->gen_element(0)});
  auto rep = minimal_resolution(kappa, 4, 0, 12);
  CHECK(rep.complete);
  CHECK(rep.minimal);
  CHECK(rep.betti() == std::vector<int>{1, 2, 1});
  CHECK(rep.betti_shifts[0] == std::vector<int>{0});
  CHECK(rep.betti_shifts[1] == std::vector<int>{0, 2});
  CHECK(rep.betti_shifts[2] == std::vector<int>{2});
  CHECK(is_minimal(rep.complex).pass);

  // permuting the presenting relations leaves the Betti data unchanged
  auto kappa2 = cyclic(ku2, {ku2->gen_element(0), ku2->constant(2)});
  auto rep2 = minimal_resolution(kappa2, 4, 0, 12);
  CHECK(rep2.betti() == rep.betti());
  CHECK(rep2.betti_shifts == rep.betti_shifts);
}

TEST_CASE("identity-padded complex is not minimal") {
  auto Z2 = triv_ring(Ground::localized_at(2), true);
  auto F2 = cyclic(Z2, {Z2->constant(2)});
  // F1' = R^2 -> F0' = R^2, diag(2, 1), augmentation kills the second summand
  auto F0 = Module::free_module(Z2, {0, 0});
  auto F1 = Module::free_module(Z2, {0, 0});
  auto aug = make_map(F0, F2, 0, {{Z2->one()}, {Element{}}});
  auto d1 = make_map(F1, F0, 0,
                     {{Z2->constant(2), Element{}}, {Element{}, Z2->one()}});
  FreeComplex C{F2, {F0, F1}, {d1}, aug};
  CHECK(is_zero_map(compose(aug, d1)));
  Verdict v = is_minimal(C);
  CHECK_FALSE(v.pass);
  REQUIRE_FALSE(v.reasons.empty());
  CHECK(v.reasons[0].find("not in the maximal ideal") != std::string::npos);
}

TEST_CASE("non-minimal resolution of the same module still resolves") {
  auto ku2 = ku2_ring();
  // redundant generator set: presented on two generators with a unit relation
  auto M = Module::make(
      ku2, {0, 0},
      {{{ku2->one(), ku2->one()}}, {{ku2->constant(2), Element{}}},
       {{ku2->gen_element(0), Element{}}}});
  auto rep = free_resolution(M, 4, 0, 10);
  CHECK(rep.betti()[0] == 2);
  // kappa-shaped module, so minimal Betti numbers are (1,2,1)
  auto mg = min_generators(M, 0, 10);
  CHECK(mg == std::map<int, int>{{0, 1}});
  auto repm = minimal_resolution(M, 4, 0, 12);
  CHECK(repm.betti() == std::vector<int>{1, 2, 1});
}

TEST_CASE("d squared vanishes on every emitted complex") {
  auto ku2 = ku2_ring();
  auto M = Module::make(ku2, {0, 2},
                        {{{ku2->gen_element(0), ku2->constant(2)}},
                         {{ku2->constant(4), Element{}}}});
  auto rep = minimal_resolution(M, 5, 0, 12);
  if (!rep.complex.differentials.empty())
    CHECK(is_zero_map(compose(rep.complex.augmentation,
                              rep.complex.differentials[0])));
  for (size_t n = 1; n < rep.complex.differentials.size(); ++n)
    CHECK(is_zero_map(compose(rep.complex.differentials[n - 1],
                              rep.complex.differentials[n])));
}

TEST_CASE("kernel piece invariants match the presented kernel") {
  auto Z = triv_ring();
  auto F = Module::free_module(Z, {0});
  auto T = cyclic(Z, {Z->constant(2)});
  auto q = make_map(F, T, 0, {{Z->one()}});
  CHECK(kernel_piece_invariants(q, 0) == AbInvariants{1, {}});
  auto two = make_map(F, F, 0, {{Z->constant(2)}});
  CHECK(kernel_piece_invariants(two, 0).is_zero());
}

TEST_CASE("Schanuel comparison on the classic example") {
  auto Z = triv_ring();
  auto T = cyclic(Z, {Z->constant(2)});
  // cover 1: Z -> Z/2, kernel 2Z; cover 2: Z^2 -> Z/2 via (1, 1)
  auto P = Module::free_module(Z, {0});
  auto F = Module::free_module(Z, {0, 0});
  auto p = make_map(P, T, 0, {{Z->one()}});
  auto f = make_map(F, T, 0, {{Z->one()}, {Z->one()}});
  auto v = schanuel_compare(p, f, -1, 1);
  CHECK(v.isomorphic);
  CHECK_FALSE(v.first_failure.has_value());
}

TEST_CASE("Schanuel detects covers of different modules") {
  auto Z = triv_ring();
  auto T2 = cyclic(Z, {Z->constant(2)});
  auto T4 = cyclic(Z, {Z->constant(4)});
  auto P = Module::free_module(Z, {0});
  auto p2 = make_map(P, T2, 0, {{Z->one()}});
  auto p4 = make_map(P, T4, 0, {{Z->one()}});
  CHECK_THROWS_AS(schanuel_compare(p2, p4, 0, 0), ValidationError);
}

TEST_CASE("randomized Schanuel pairs") {
  auto ku2 = ku2_ring();
  std::mt19937 rng(1234);
  std::uniform_int_distribution<int> nshift(1, 2), shiftv(0, 2), coeff(-3, 3),
      nrel(0, 2), extra(0, 2);
  for (int t = 0; t < 12; ++t) {
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
    auto M = Module::make(ku2, shifts, rels);

    // cover 1: the presenting generators
    auto P = Module::free_module(ku2, M->shifts());
    std::vector<ModElement> prow;
    for (size_t i = 0; i < M->shifts().size(); ++i)
      prow.push_back(M->generator(int(i)));
    auto p = make_map(P, M, 0, prow);

    // cover 2: same plus redundant generators u^k * g_i
    std::vector<int> fs = M->shifts();
    std::vector<ModElement> frow = prow;
    int ne = extra(rng);
    for (int e = 0; e < ne; ++e) {
      size_t i = size_t(rng() % M->shifts().size());
      int k = 1 + int(rng() % 2);
      fs.push_back(M->shifts()[i] + 2 * k);
      frow.push_back(M->scalar_multiply(ku2->gen_element(0, k),
                                        M->generator(int(i))));
    }
    auto F = Module::free_module(ku2, fs);
    auto f = make_map(F, M, 0, frow);

    auto v = schanuel_compare(p, f, 0, 8);
    CHECK(v.isomorphic);
  }
}
