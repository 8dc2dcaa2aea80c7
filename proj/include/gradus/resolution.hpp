#pragma once

#include "gradus/module.hpp"

namespace gradus {

// F_L -> ... -> F_0 -> M with free F_n; differentials[n-1] is d_n.
struct FreeComplex {
  ModulePtr target;
  std::vector<ModulePtr> modules;
  std::vector<ModuleMap> differentials;
  ModuleMap augmentation;

  int length() const { return int(modules.size()) - 1; }
};

struct ResolutionReport {
  FreeComplex complex;
  int lo = 0, hi = 0;        // window the stages were computed on
  int cert_lo = 0, cert_hi = 0;  // window exactness is certified on
  bool minimal = false;
  bool complete = false;     // kernel vanished before the length cap
  std::vector<std::vector<int>> betti_shifts;  // per homological degree

  std::vector<int> betti() const;
};

ResolutionReport free_resolution(const ModulePtr& m, int length, int lo,
                                 int hi);
ResolutionReport minimal_resolution(const ModulePtr& m, int length, int lo,
                                    int hi);

Verdict is_minimal(const FreeComplex& c);

// Nakayama cover: free module on a minimal homogeneous generating set with
// the surjection onto m (graded-local rings, within the window).
ModuleMap minimal_cover(const ModulePtr& m, int lo, int hi);

// Invariants of {x in (source)_d : f(x) = 0 in target} as an abelian group.
AbInvariants kernel_piece_invariants(const ModuleMap& f, int d);

struct SchanuelVerdict {
  bool isomorphic = false;
  std::optional<int> first_failure;
};

// Covers p: P -> M and f: F -> M (same target, both assumed surjective with
// P projective, F free): compares P + ker f with F + ker p degreewise.
SchanuelVerdict schanuel_compare(const ModuleMap& p, const ModuleMap& f,
                                 int lo, int hi);

bool is_zero_map(const ModuleMap& f);

}  // namespace gradus
