#pragma once

#include "gradus/resolution.hpp"

namespace gradus {

// Nonzero degree pieces of one graded abelian group.
using GradedInvariants = std::map<int, AbInvariants>;

struct KoszulComplex {
  FreeComplex complex;            // augmented over R/(u_1..u_n)
  std::vector<Element> sequence;  // u_1..u_n
  // generator labels per homological degree: sorted index subsets
  std::vector<std::vector<std::vector<int>>> labels;
};

KoszulComplex koszul_complex(const RingPtr& ring,
                             const std::vector<Element>& sequence);

struct HomologyResult {
  std::vector<GradedInvariants> groups;  // H_0 .. H_length
  int lo = 0, hi = 0;
};

HomologyResult complex_homology(const FreeComplex& c, int lo, int hi);

struct TorTable {
  std::map<std::pair<int, int>, AbInvariants> entries;  // (p, internal degree)
  int lo = 0, hi = 0;
  int pmax = 0;
  bool complete = false;  // the resolution terminated inside pmax

  const AbInvariants* entry(int p, int d) const;
};

// Resolves the second argument.
TorTable tor(const ModulePtr& m, const ModulePtr& n, int pmax, int lo, int hi);

std::string to_json(const TorTable& t);
std::string to_text(const TorTable& t);

struct E2Page {
  TorTable table;
  std::string abutment_note;  // the abutment slot is data, never computed here
};

E2Page kunneth_e2_page(const RingPtr& ring, const ModulePtr& m,
                       const ModulePtr& n, int pmax, int lo, int hi);

struct CollapseVerdict {
  bool pass = false;
  bool refused = false;  // input complex was not minimal: distinct from failure
  std::vector<std::string> reasons;
};

// kappa = residue module of the ring; q = minimal free complex. Verifies the
// induced differentials on kappa (x) q vanish.
CollapseVerdict minimal_collapse_check(const ModulePtr& kappa,
                                       const FreeComplex& q, int lo, int hi);

enum class ThreeColumnCase {
  CollapseConsistent,
  CannotBeResolution,    // column pattern (n, 1, n), n >= 2
  NontrivialKernel,      // column pattern (1, 1, 1)
  Inconsistent,
};

struct ThreeColumnVerdict {
  ThreeColumnCase kind = ThreeColumnCase::Inconsistent;
  bool consistent = false;
  std::string description;
  std::vector<int> column_sizes;  // summand totals of columns 0, 1, 2
};

ThreeColumnVerdict three_column_analysis(const E2Page& page,
                                         const GradedInvariants& abutment);

struct TowerStage {
  int index = 0;     // which generator is raised
  int exponent = 0;  // its exponent at this stage (>= 2)
  ModulePtr sub, mid, quot;
  ModuleMap incl;  // multiplication by u_index, degree |u_index|
  bool exact = false;
  std::vector<std::string> notes;
};

struct TowerReport {
  std::vector<ModulePtr> modules;  // the quotient modules along the tower
  std::vector<TowerStage> stages;
  bool all_exact = true;
  int lo = 0, hi = 0;
};

TowerReport quotient_tower(const RingPtr& ring,
                           const std::vector<Element>& gens,
                           const std::vector<int>& exponents, int lo, int hi);

struct CofinalityRow {
  std::vector<int> exponents;
  std::optional<int> l;       // m^l inside the tower ideal
  std::optional<int> lprime;  // tower ideal inside m^lprime
};

struct CofinalityTable {
  std::vector<CofinalityRow> rows;
  bool conclusive = true;  // every row found its l within the bound
  int bound = 0, lmax = 0;
};

CofinalityTable ideal_cofinality_check(const RingPtr& ring, int bound,
                                       int lmax);

}  // namespace gradus
