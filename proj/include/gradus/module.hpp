#pragma once

#include <map>
#include <memory>
#include <mutex>

#include "gradus/ring.hpp"

namespace gradus {

class Module;
using ModulePtr = std::shared_ptr<const Module>;

// Element of a presented module: one ring element per generator.
using ModElement = std::vector<Element>;

struct ModuleBasis {
  int degree = 0;
  std::vector<int> block_degree;          // ring degree of each generator block
  std::vector<int> offsets;               // size gens + 1
  std::vector<const DegreeBasis*> blocks;
  Mat relation_matrix;                    // ring-relation + module-relation instances
  Smith smith;
  AbInvariants invariants;

  int total() const { return offsets.empty() ? 0 : offsets.back(); }
};

class Module : public std::enable_shared_from_this<Module> {
 public:
  static ModulePtr make(RingPtr ring, std::vector<int> shifts,
                        std::vector<ModElement> relations);
  static ModulePtr free_module(RingPtr ring, std::vector<int> shifts);

  const RingPtr& ring() const { return ring_; }
  const std::vector<int>& shifts() const { return shifts_; }
  const std::vector<ModElement>& relations() const { return relations_; }
  const std::vector<int>& relation_degrees() const { return rel_degrees_; }
  bool is_free() const { return relations_.empty(); }

  const ModuleBasis& basis(int d) const;
  AbInvariants degree_piece(int d) const;

  std::vector<Rat> coords_of(const ModuleBasis& b, const ModElement& e) const;
  ModElement element_from_coords(const ModuleBasis& b,
                                 const std::vector<Rat>& x) const;
  std::vector<Rat> canon_coords(const ModuleBasis& b,
                                const std::vector<Rat>& x) const;

  ModElement zero_element() const { return ModElement(shifts_.size()); }
  ModElement generator(int i) const;
  std::optional<int> element_degree(const ModElement& e) const;
  ModElement normal_form(const ModElement& e) const;
  bool is_zero(const ModElement& e) const;
  ModElement add(const ModElement& a, const ModElement& b) const;
  ModElement scalar_multiply(const Element& r, const ModElement& e) const;

  ModulePtr shift(int k) const;

 private:
  Module() = default;
  std::shared_ptr<const ModuleBasis> build_basis(int d) const;

  RingPtr ring_;
  std::vector<int> shifts_;
  std::vector<ModElement> relations_;
  std::vector<int> rel_degrees_;

  mutable std::mutex cache_mutex_;
  mutable std::map<int, std::shared_ptr<const ModuleBasis>> basis_cache_;
};

ModulePtr direct_sum(const ModulePtr& a, const ModulePtr& b);
// Signs: an entry of the right factor's relation passing a left generator of
// odd shift picks up (-1) per odd monomial factor.
ModulePtr tensor(const ModulePtr& a, const ModulePtr& b);

// f(g_i) = sum_j matrix[i][j] * h_j, homogeneous of the stated degree.
struct ModuleMap {
  ModulePtr source, target;
  int degree = 0;
  std::vector<ModElement> matrix;  // rows = source generators
};

ModuleMap make_map(ModulePtr source, ModulePtr target, int degree,
                   std::vector<ModElement> matrix);
ModuleMap identity_map(const ModulePtr& m);
ModuleMap zero_map(ModulePtr source, ModulePtr target, int degree);
ModuleMap compose(const ModuleMap& g, const ModuleMap& f);  // g after f

// Ground matrix of f on degree-d coordinates (target degree d + f.degree).
Mat induced_matrix(const ModuleMap& f, int d);
ModElement apply_map(const ModuleMap& f, const ModElement& e);

struct KernelResult {
  ModulePtr kernel;
  ModuleMap inclusion;  // kernel -> source
  int lo = 0, hi = 0;   // window on which generation/relations are certified
  bool minimal_certified = true;
};

// Degreewise kernel, generators chosen in ascending degree. With minimal set
// (graded-local rings only) generators are kept out of the span of m*K, so a
// cover built from them is a Nakayama-minimal choice.
KernelResult map_kernel(const ModuleMap& f, int lo, int hi,
                        bool minimal = false);

ModulePtr map_cokernel(const ModuleMap& f);

// Residue ranks dim_kappa (M (x) R/m)_d per window degree (zero entries absent).
std::map<int, int> min_generators(const ModulePtr& m, int lo, int hi);

}  // namespace gradus
