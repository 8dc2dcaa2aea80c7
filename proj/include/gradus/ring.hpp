#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "gradus/ground.hpp"

namespace gradus {

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class WindowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, size_t pos)
      : std::runtime_error(msg), position(pos) {}
  size_t position;
};

enum class GenKind { Poly, Invertible, Nilpotent, Integral };

struct GeneratorDecl {
  std::string name;
  int degree = 0;
  bool odd = false;
  GenKind kind = GenKind::Poly;
  int bound = 0;  // k for Nilpotent(k) / Integral(k)
};

// Exponent vector over the ring's generators; negative exponents only on
// the invertible generator.
using Monomial = std::vector<int>;

// Formal ground-linear combination of monomials, coefficients nonzero.
struct Element {
  std::map<Monomial, Rat> terms;

  bool is_zero() const { return terms.empty(); }
  bool operator==(const Element& o) const { return terms == o.terms; }
};

struct RingFlags {
  bool connective = false;
  bool coherent = false;
  bool graded_local = false;
  std::optional<int> global_dimension_hint;
  std::vector<std::string> max_ideal;  // degree-0 generators of m_0
};

// g^cap rewrites to rhs (all rhs exponents of g below cap).
struct RewriteRule {
  int cap = 0;
  Element rhs;
};

struct DegreeBasis {
  int degree = 0;
  std::vector<Monomial> monomials;
  Mat relation_matrix;
  Smith smith;
  AbInvariants invariants;

  int index_of(const Monomial& m) const;
};

struct Verdict {
  bool pass = false;
  std::vector<std::string> reasons;
};

class Ring;
using RingPtr = std::shared_ptr<const Ring>;

class Ring : public std::enable_shared_from_this<Ring> {
 public:
  static RingPtr validate(Ground ground, std::vector<GeneratorDecl> gens,
                          std::vector<Element> relations, RingFlags flags);
  static RingPtr validate_strings(Ground ground,
                                  std::vector<GeneratorDecl> gens,
                                  const std::vector<std::string>& relations,
                                  RingFlags flags);

  const Ground& ground() const { return ground_; }
  const std::vector<GeneratorDecl>& gens() const { return gens_; }
  const std::vector<Element>& relations() const { return relations_; }
  const RingFlags& flags() const { return flags_; }
  int gen_index(const std::string& name) const;  // -1 if absent

  int mono_degree(const Monomial& m) const;
  int mono_parity(const Monomial& m) const;  // 0 or 1
  std::optional<int> degree_of(const Element& e) const;  // nullopt: 0 or mixed

  const DegreeBasis& degree_basis(int d) const;
  std::vector<Monomial> monomials_of_degree(int d) const;

  // Canonical representative of a coordinate vector in R_d.
  std::vector<Rat> canon_coords(const DegreeBasis& b,
                                const std::vector<Rat>& x) const;
  std::vector<Rat> coords_of(const DegreeBasis& b, const Element& e) const;
  Element element_from_coords(const DegreeBasis& b,
                              const std::vector<Rat>& x) const;

  Element normal_form(const Element& e) const;
  Element multiply(const Element& a, const Element& b) const;
  Element raw_multiply(const Element& a, const Element& b) const;
  Element add(const Element& a, const Element& b) const;
  Element sub(const Element& a, const Element& b) const;
  Element scale(const Rat& c, const Element& a) const;
  bool is_zero(const Element& e) const;

  Element gen_element(int i, int exp = 1) const;
  Element constant(const Rat& c) const;
  Element one() const { return constant(1); }

  // Koszul-signed monomial product (structural reduction applied).
  Element reduce_monomial(const Rat& coeff, const Monomial& raw) const;

  RingPtr quotient(const std::vector<Element>& ideal_gens,
                   std::optional<RingFlags> new_flags = std::nullopt) const;
  RingPtr localize(const Ground& new_ground,
                   std::optional<RingFlags> new_flags = std::nullopt) const;

  std::vector<Element> graded_max_ideal() const;

  struct Residue {
    RingPtr ring;            // quotient presentation R/m
    bool graded_field = false;
    bool inconclusive = false;
    std::string note;
  };
  Residue residue_quotient(int lo, int hi) const;

  Verdict eilenberg_check(int lo, int hi) const;

  std::string describe_element(const Element& e) const;

  static int max_window();  // GRADUS_MAX_WINDOW safety cap

 private:
  Ring() = default;
  void extract_rules();
  void check_bounds();
  std::vector<Monomial> enumerate(int d) const;
  std::shared_ptr<const DegreeBasis> build_basis(int d) const;

  Ground ground_ = Ground::integers();
  std::vector<GeneratorDecl> gens_;
  std::vector<Element> relations_;
  RingFlags flags_;
  std::vector<std::optional<RewriteRule>> rules_;
  int invertible_ = -1;  // index of the cap-free invertible generator

  mutable std::mutex cache_mutex_;
  mutable std::map<int, std::shared_ptr<const DegreeBasis>> basis_cache_;
};

// Parses the expression grammar:
//   expr := ['-'] term (('+'|'-') term)*
//   term := coeff ('*' factor)* | factor ('*' factor)*
//   factor := name ('^' int)?
//   coeff := int | int '/' int
Element parse_element(const std::vector<GeneratorDecl>& gens, const Ground& G,
                      const std::string& text);

std::string mono_to_string(const std::vector<GeneratorDecl>& gens,
                           const Monomial& m);
std::string element_to_string(const std::vector<GeneratorDecl>& gens,
                              const Element& e);

}  // namespace gradus
