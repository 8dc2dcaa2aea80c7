#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gradus {

using Rat = mpq_class;
using Int = mpz_class;

// Euclidean ground coefficients. Every element is stored as an exact
// rational; the ground decides membership, units, division with remainder
// and the canonical unit normalization.
enum class GroundKind {
  Integers,     // Z
  Rationals,    // Q
  PrimeField,   // F_p
  LocalizedAt,  // Z_(p)
  Inverted,     // Z[1/n]
};

class GroundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Ground {
 public:
  static Ground integers() { return Ground(GroundKind::Integers, 0); }
  static Ground rationals() { return Ground(GroundKind::Rationals, 0); }
  static Ground prime_field(long p);
  static Ground localized_at(long p);
  static Ground inverted(long n);

  GroundKind kind() const { return kind_; }
  long param() const { return param_; }
  bool is_field() const {
    return kind_ == GroundKind::Rationals || kind_ == GroundKind::PrimeField;
  }
  std::string name() const;
  static std::optional<Ground> parse(const std::string& s);

  bool operator==(const Ground& o) const {
    return kind_ == o.kind_ && param_ == o.param_;
  }

  // Canonical representative (reduces mod p for prime fields).
  Rat canon(const Rat& x) const;
  bool contains(const Rat& x) const;
  bool is_zero(const Rat& x) const { return canon(x) == 0; }
  bool is_unit(const Rat& x) const;

  Rat add(const Rat& a, const Rat& b) const { return canon(a + b); }
  Rat sub(const Rat& a, const Rat& b) const { return canon(a - b); }
  Rat mul(const Rat& a, const Rat& b) const { return canon(a * b); }
  Rat neg(const Rat& a) const { return canon(-a); }

  // x = unit_part(x) * associate(x), associate canonical (nonnegative for Z,
  // p-power for Z_(p), prime-to-n part for Z[1/n], 1 for fields).
  Rat associate(const Rat& x) const;
  Rat unit_part(const Rat& x) const;

  // a / b when the quotient lies in the ground.
  std::optional<Rat> exact_div(const Rat& a, const Rat& b) const;
  bool divides(const Rat& b, const Rat& a) const;

  // a = q*b + r with size(r) < size(b); b must be nonzero.
  std::pair<Rat, Rat> divmod(const Rat& a, const Rat& b) const;
  // Euclidean size used for pivoting; size(0) = 0.
  Int size(const Rat& x) const;

 private:
  Ground(GroundKind k, long p) : kind_(k), param_(p) {}
  GroundKind kind_;
  long param_;
};

struct Bezout {
  Rat g, x, y;  // x*a + y*b == g
};

// (0,0) -> (0,0,0) by convention; g is the canonical associate.
Bezout gcd_bezout(const Ground& G, const Rat& a, const Rat& b);

// Dense exact matrix.
class Mat {
 public:
  Mat() : rows_(0), cols_(0) {}
  Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols) {}
  static Mat identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Rat& operator()(int i, int j) { return a_[size_t(i) * cols_ + j]; }
  const Rat& operator()(int i, int j) const { return a_[size_t(i) * cols_ + j]; }

  bool operator==(const Mat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
  }

  std::vector<Rat> col(int j) const;
  std::vector<Rat> row(int i) const;
  void set_col(int j, const std::vector<Rat>& v);
  Mat transposed() const;

  void swap_rows(int i, int j);
  void swap_cols(int i, int j);

  static Mat from_cols(int rows, const std::vector<std::vector<Rat>>& cols);
  static Mat hcat(const Mat& a, const Mat& b);

 private:
  int rows_, cols_;
  std::vector<Rat> a_;
};

Mat mat_mul(const Ground& G, const Mat& a, const Mat& b);
std::vector<Rat> mat_apply(const Ground& G, const Mat& a,
                           const std::vector<Rat>& x);

// U*A*V = D with U, V unimodular; invariants form a divisibility chain,
// unit-normalized, zeros trailing.
struct Smith {
  Mat U, Uinv, V, Vinv, D;
  std::vector<Rat> invariants;  // diagonal of D, length min(rows, cols)
};

Smith smith_normal_form(const Ground& G, const Mat& A);

// Canonical coset representative of x modulo the column span of the
// decomposed matrix (reduce Smith coordinates by the invariant factors).
std::vector<Rat> smith_canon(const Ground& G, const Smith& s,
                             const std::vector<Rat>& x);

// Solution of A*x = b over the ground, if one exists.
std::optional<std::vector<Rat>> solve_linear(const Ground& G, const Mat& A,
                                             const std::vector<Rat>& b);

// Invariants of coker(A : G^cols -> G^rows).
struct AbInvariants {
  int free_rank = 0;
  std::vector<Rat> torsion;  // canonical, divisibility-chain order

  bool is_zero() const { return free_rank == 0 && torsion.empty(); }
  // kappa-dimension view: number of cyclic summands.
  int summand_count() const { return free_rank + int(torsion.size()); }
  bool operator==(const AbInvariants& o) const {
    return free_rank == o.free_rank && torsion == o.torsion;
  }
};

AbInvariants cokernel_invariants(const Ground& G, const Mat& A);

// Invariants of a direct sum from the summands' invariants.
AbInvariants direct_sum_invariants(const Ground& G, const AbInvariants& a,
                                   const AbInvariants& b);

// Columns spanning ker(A) over the ground (a saturated generating set).
std::vector<std::vector<Rat>> kernel_columns(const Ground& G, const Mat& A);

// Reduced, deterministically ordered basis of the column lattice.
std::vector<std::vector<Rat>> lattice_column_basis(
    const Ground& G, int rows, const std::vector<std::vector<Rat>>& cols);

// Invariants of lattice(num)/lattice(den); den must lie inside lattice(num).
AbInvariants subquotient_invariants(const Ground& G, int rows,
                                    std::vector<std::vector<Rat>> num,
                                    const std::vector<std::vector<Rat>>& den);

std::string to_string(const Rat& x);
std::string to_string(const AbInvariants& inv);

}  // namespace gradus
