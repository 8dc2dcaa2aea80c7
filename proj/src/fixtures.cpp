#include "gradus/fixtures.hpp"

#include <mutex>

#include "gradus/picard.hpp"

namespace gradus {

namespace {

RingFlags local_flags(const std::string& p, bool connective = false) {
  RingFlags f;
  f.connective = connective;
  f.graded_local = true;
  f.max_ideal = {p};
  return f;
}

RingFlags connective_flags() {
  RingFlags f;
  f.connective = true;
  return f;
}

std::vector<GeneratorDecl> ko_gens() {
  return {{"eta", 1, true, GenKind::Poly},
          {"y", 4, false, GenKind::Poly},
          {"w", 8, false, GenKind::Invertible}};
}

std::vector<std::string> ko_rels() {
  return {"2*eta", "eta^3", "eta*y", "y^2 - 4*w"};
}

std::vector<GeneratorDecl> strunc_gens() {
  return {{"eta", 1, true, GenKind::Poly},
          {"nu", 3, true, GenKind::Nilpotent, 2}};
}

std::vector<std::string> strunc_rels() {
  return {"2*eta", "24*nu", "eta^3 - 12*nu", "eta*nu"};
}

struct Registry {
  std::vector<Fixture> fixtures;
  std::map<std::string, RingPtr> rings;
  std::map<std::string, ModulePtr> modules;

  void add_ring(const std::string& name, RingPtr R,
                const std::string& provenance) {
    fixtures.push_back({name, "ring", "", serialize_ring(*R), provenance});
    rings.emplace(name, std::move(R));
  }

  void add_ring(const std::string& name, const Ground& g,
                std::vector<GeneratorDecl> gens,
                const std::vector<std::string>& rels, RingFlags flags,
                const std::string& provenance) {
    add_ring(name,
             Ring::validate_strings(g, std::move(gens), rels, std::move(flags)),
             provenance);
  }

  void add_module(const std::string& name, const std::string& ring_ref,
                  std::vector<int> shifts,
                  const std::vector<std::vector<std::string>>& rels,
                  const std::string& provenance) {
    RingPtr R = rings.at(ring_ref);
    std::vector<ModElement> rows;
    for (const auto& row : rels) {
      ModElement r;
      for (const std::string& s : row)
        r.push_back(parse_element(R->gens(), R->ground(), s));
      rows.push_back(std::move(r));
    }
    ModulePtr M = Module::make(R, std::move(shifts), std::move(rows));
    fixtures.push_back({name, "module", ring_ref,
                        serialize_module(*M, "fixture:" + ring_ref),
                        provenance});
    modules.emplace(name, std::move(M));
  }
};

Registry build_registry() {
  Registry reg;
  reg.add_ring("Z_triv", Ground::integers(), {}, {}, {},
               "trivially graded integers");
  reg.add_ring("Z2_triv", Ground::localized_at(2), {}, {}, local_flags("2"),
               "integers localized at 2, trivially graded, local at (2)");
  reg.add_ring("Z5_triv", Ground::localized_at(5), {}, {}, local_flags("5"),
               "integers localized at 5, trivially graded, local at (5)");
  reg.add_ring("ku", Ground::integers(), {{"u", 2, false, GenKind::Poly}}, {},
               connective_flags(),
               "quoted presentation: Z[u], |u| = 2, connective");
  reg.add_ring("ku_2", Ground::localized_at(2),
               {{"u", 2, false, GenKind::Poly}}, {}, local_flags("2", true),
               "quoted presentation: Z_(2)[u], |u| = 2, local at (2, u)");
  reg.add_ring("KU", Ground::integers(),
               {{"u", 2, false, GenKind::Invertible}}, {}, {},
               "quoted presentation: Z[u, u^-1], |u| = 2");
  reg.add_ring("KU_2", Ground::localized_at(2),
               {{"u", 2, false, GenKind::Invertible}}, {}, local_flags("2"),
               "KU localized at 2, local at (2)");
  reg.add_ring("KU_5", Ground::localized_at(5),
               {{"u", 2, false, GenKind::Invertible}}, {}, local_flags("5"),
               "KU localized at 5, local at (5)");
  reg.add_ring(
      "KO", Ground::integers(), ko_gens(), ko_rels(), connective_flags(),
      "quoted presentation: Z[eta,y,w,w^-1]/(2*eta, eta^3, eta*y, y^2-4*w)");
  reg.add_ring("ko_2", Ground::localized_at(2), ko_gens(), ko_rels(),
               local_flags("2", true), "KO localized at 2, local at (2, eta, y)");
  reg.add_ring("KO_half", Ground::inverted(2), ko_gens(), ko_rels(),
               connective_flags(), "KO with 2 inverted (eta dies: 2*eta = 0)");
  reg.add_ring("S_trunc5", Ground::integers(), strunc_gens(), strunc_rels(),
               connective_flags(),
               "externally sourced: standard stable-stem values pi_1 = Z/2, "
               "pi_3 = Z/24, eta^3 = 12*nu, eta*nu = 0, truncated above "
               "degree 5");
  reg.add_ring("S_trunc5_2", Ground::localized_at(2), strunc_gens(),
               strunc_rels(), local_flags("2", true),
               "externally sourced stable-stem values, localized at 2, local "
               "ring");
  reg.add_ring("ZS5", Ground::integers(),
               {{"s", 0, false, GenKind::Integral, 2}}, {"s^2 + 5"}, {},
               "quadratic order Z[s]/(s^2+5), trivially graded");
  reg.add_ring("Zhalf_C2",
               group_ring(Ring::validate(Ground::inverted(2), {}, {}, {}), {2}),
               "group ring Z[1/2][C_2]");
  reg.add_ring("Zthird_C3_omega", Ground::inverted(3),
               {{"omega", 0, false, GenKind::Integral, 2},
                {"g", 0, false, GenKind::Integral, 3}},
               {"omega^2 + omega + 1", "g^3 - 1"}, {},
               "group ring Z[1/3][omega][C_3] with omega^2 + omega + 1 = 0");
  reg.add_ring("KO_2_C2", group_ring(reg.rings.at("ko_2"), {2}),
               "group ring ko_2[C_2]");

  reg.add_module("ku_mod_2u", "ku_2", {0}, {{"2"}, {"u"}},
                 "residue quotient ku/(2, u)");
  reg.add_module("I25", "ZS5", {0, 0}, {{"1 + s", "-2"}, {"3", "-1 + s"}},
                 "the ideal (2, 1+s); syzygy rows derived by hand from the "
                 "lattice {x + y*s : x = y mod 2}");
  reg.add_module("I25bar", "ZS5", {0, 0}, {{"1 - s", "-2"}, {"3", "-1 - s"}},
                 "the conjugate ideal (2, 1-s)");
  reg.add_module("KUoverKO", "ko_2", {0, 2, 4, 6},
                 {{"eta", "0", "0", "0"},
                  {"0", "eta", "0", "0"},
                  {"0", "0", "eta", "0"},
                  {"0", "0", "0", "eta"},
                  {"y", "0", "-2", "0"},
                  {"0", "y", "0", "-2"},
                  {"-2*w", "0", "y", "0"},
                  {"0", "-2*w", "0", "y"}},
                 "reconstructed, not quoted: KU as a KO-module on generators "
                 "1, u, u^2, u^3 with eta acting by 0, y by 2u^2, w by u^4");
  return reg;
}

const Registry& registry() {
  static const Registry reg = build_registry();
  return reg;
}

}  // namespace

const std::vector<Fixture>& fixture_registry() { return registry().fixtures; }

const Fixture* find_fixture(const std::string& name) {
  for (const Fixture& f : fixture_registry())
    if (f.name == name) return &f;
  return nullptr;
}

RingPtr fixture_ring(const std::string& name) {
  auto it = registry().rings.find(name);
  if (it == registry().rings.end())
    throw ValidationError("unknown ring fixture '" + name + "'");
  return it->second;
}

ModulePtr fixture_module(const std::string& name) {
  auto it = registry().modules.find(name);
  if (it == registry().modules.end())
    throw ValidationError("unknown module fixture '" + name + "'");
  return it->second;
}

RingPtr resolve_fixture_ring_ref(const std::string& ref) {
  if (ref.rfind("fixture:", 0) == 0) return fixture_ring(ref.substr(8));
  return nullptr;
}

}  // namespace gradus
