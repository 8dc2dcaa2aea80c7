#include "gradus/ground.hpp"

#include <algorithm>
#include <sstream>

namespace gradus {
namespace {

bool is_prime(long p) {
  if (p < 2) return false;
  mpz_class z(p);
  return mpz_probab_prime_p(z.get_mpz_t(), 30) != 0;
}

// Removes every prime factor shared with n; returns the prime-to-n part.
Int strip_factors_of(Int m, long n) {
  if (m == 0) return 0;
  m = abs(m);
  Int nn(n);
  for (;;) {
    Int g = gcd(m, nn);
    if (g == 1) return m;
    while (m % g == 0) m /= g;
  }
}

long valuation(const Int& m, long p) {
  long v = 0;
  Int x = abs(m);
  while (x != 0 && x % p == 0) {
    x /= p;
    ++v;
  }
  return v;
}

Int pow_int(long p, long e) {
  Int r = 1;
  for (long i = 0; i < e; ++i) r *= p;
  return r;
}

Rat inv_mod(const Int& a, long p) {
  Int r;
  Int pp(p);
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), pp.get_mpz_t()) == 0)
    throw GroundError("element not invertible mod p");
  return Rat(r);
}

}  // namespace

Ground Ground::prime_field(long p) {
  if (!is_prime(p)) throw GroundError("prime-field requires a prime");
  return Ground(GroundKind::PrimeField, p);
}

Ground Ground::localized_at(long p) {
  if (!is_prime(p)) throw GroundError("localization requires a prime");
  return Ground(GroundKind::LocalizedAt, p);
}

Ground Ground::inverted(long n) {
  if (n < 2) throw GroundError("inverted(n) requires n >= 2");
  return Ground(GroundKind::Inverted, n);
}

std::string Ground::name() const {
  switch (kind_) {
    case GroundKind::Integers: return "Z";
    case GroundKind::Rationals: return "Q";
    case GroundKind::PrimeField: return "Fp:" + std::to_string(param_);
    case GroundKind::LocalizedAt: return "Zloc:" + std::to_string(param_);
    case GroundKind::Inverted: return "Zinv:" + std::to_string(param_);
  }
  return "?";
}

std::optional<Ground> Ground::parse(const std::string& s) {
  if (s == "Z") return integers();
  if (s == "Q") return rationals();
  auto num = [&](size_t off) -> std::optional<long> {
    try {
      size_t used = 0;
      long v = std::stol(s.substr(off), &used);
      if (off + used != s.size()) return std::nullopt;
      return v;
    } catch (...) {
      return std::nullopt;
    }
  };
  try {
    if (s.rfind("Fp:", 0) == 0) {
      if (auto p = num(3)) return prime_field(*p);
    } else if (s.rfind("Zloc:", 0) == 0) {
      if (auto p = num(5)) return localized_at(*p);
    } else if (s.rfind("Zinv:", 0) == 0) {
      if (auto n = num(5)) return inverted(*n);
    }
  } catch (const GroundError&) {
    return std::nullopt;
  }
  return std::nullopt;
}

Rat Ground::canon(const Rat& x) const {
  if (kind_ != GroundKind::PrimeField) return x;
  if (x == 0) return 0;
  Int den = x.get_den();
  if (gcd(den, Int(param_)) != 1)
    throw GroundError("denominator not invertible in F_" +
                      std::to_string(param_));
  Rat r = Rat(x.get_num()) * inv_mod(den, param_);
  Int m = r.get_num() % param_;
  if (m < 0) m += param_;
  return Rat(m);
}

bool Ground::contains(const Rat& x) const {
  Int den = x.get_den();
  switch (kind_) {
    case GroundKind::Integers: return den == 1;
    case GroundKind::Rationals: return true;
    case GroundKind::PrimeField: return gcd(den, Int(param_)) == 1;
    case GroundKind::LocalizedAt: return den % param_ != 0;
    case GroundKind::Inverted: return strip_factors_of(den, param_) == 1;
  }
  return false;
}

bool Ground::is_unit(const Rat& x) const {
  if (is_zero(x)) return false;
  switch (kind_) {
    case GroundKind::Integers: return x == 1 || x == -1;
    case GroundKind::Rationals:
    case GroundKind::PrimeField: return true;
    case GroundKind::LocalizedAt:
      return contains(x) && x.get_num() % param_ != 0;
    case GroundKind::Inverted:
      return contains(x) && strip_factors_of(x.get_num(), param_) == 1;
  }
  return false;
}

Rat Ground::associate(const Rat& x) const {
  if (is_zero(x)) return 0;
  switch (kind_) {
    case GroundKind::Integers: return abs(x);
    case GroundKind::Rationals:
    case GroundKind::PrimeField: return 1;
    case GroundKind::LocalizedAt:
      return Rat(pow_int(param_, valuation(x.get_num(), param_)));
    case GroundKind::Inverted:
      return Rat(strip_factors_of(x.get_num(), param_));
  }
  return x;
}

Rat Ground::unit_part(const Rat& x) const {
  if (is_zero(x)) return 0;
  return canon(x / associate(x));
}

std::optional<Rat> Ground::exact_div(const Rat& a, const Rat& b) const {
  if (is_zero(b)) return std::nullopt;
  Rat q = canon(a) / canon(b);
  if (!contains(q)) return std::nullopt;
  return canon(q);
}

bool Ground::divides(const Rat& b, const Rat& a) const {
  if (is_zero(a)) return true;
  return exact_div(a, b).has_value();
}

std::pair<Rat, Rat> Ground::divmod(const Rat& a, const Rat& b) const {
  if (is_zero(b)) throw GroundError("division by zero");
  if (is_zero(a)) return {0, 0};
  switch (kind_) {
    case GroundKind::Rationals:
    case GroundKind::PrimeField:
      return {canon(a / b), 0};
    case GroundKind::Integers: {
      Int q, r;
      mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), a.get_num().get_mpz_t(),
                  b.get_num().get_mpz_t());
      return {Rat(q), Rat(r)};
    }
    case GroundKind::LocalizedAt: {
      if (valuation(a.get_num(), param_) >= valuation(b.get_num(), param_))
        return {a / b, 0};
      return {0, a};
    }
    case GroundKind::Inverted: {
      Rat bh = associate(b);
      if (bh == 1) return {a / b, 0};
      Rat ah = associate(a);
      Rat u = a / ah;
      Int q, r;
      mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), ah.get_num().get_mpz_t(),
                  bh.get_num().get_mpz_t());
      return {u * Rat(q) / unit_part(b), u * Rat(r)};
    }
  }
  throw GroundError("unreachable");
}

Int Ground::size(const Rat& x) const {
  if (is_zero(x)) return 0;
  switch (kind_) {
    case GroundKind::Integers: return abs(x.get_num());
    case GroundKind::Rationals:
    case GroundKind::PrimeField: return 1;
    case GroundKind::LocalizedAt:
      return pow_int(param_, valuation(x.get_num(), param_));
    case GroundKind::Inverted: return strip_factors_of(x.get_num(), param_);
  }
  return 0;
}

Bezout gcd_bezout(const Ground& G, const Rat& a, const Rat& b) {
  Rat ca = G.canon(a), cb = G.canon(b);
  if (ca == 0 && cb == 0) return {0, 0, 0};
  Rat r0 = ca, r1 = cb;
  Rat x0 = 1, x1 = 0, y0 = 0, y1 = 1;
  while (!G.is_zero(r1)) {
    auto [q, r] = G.divmod(r0, r1);
    r0 = r1;
    r1 = G.canon(r);
    Rat nx = G.sub(x0, G.mul(q, x1)), ny = G.sub(y0, G.mul(q, y1));
    x0 = x1;
    x1 = nx;
    y0 = y1;
    y1 = ny;
  }
  Rat u = G.unit_part(r0);
  return {G.canon(r0 / u), G.canon(x0 / u), G.canon(y0 / u)};
}

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

std::vector<Rat> Mat::col(int j) const {
  std::vector<Rat> v(rows_);
  for (int i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

std::vector<Rat> Mat::row(int i) const {
  std::vector<Rat> v(cols_);
  for (int j = 0; j < cols_; ++j) v[j] = (*this)(i, j);
  return v;
}

void Mat::set_col(int j, const std::vector<Rat>& v) {
  for (int i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

Mat Mat::transposed() const {
  Mat t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

void Mat::swap_rows(int i, int j) {
  if (i == j) return;
  for (int k = 0; k < cols_; ++k)
    std::swap((*this)(i, k), (*this)(j, k));
}

void Mat::swap_cols(int i, int j) {
  if (i == j) return;
  for (int k = 0; k < rows_; ++k)
    std::swap((*this)(k, i), (*this)(k, j));
}

Mat Mat::from_cols(int rows, const std::vector<std::vector<Rat>>& cols) {
  Mat m(rows, int(cols.size()));
  for (int j = 0; j < int(cols.size()); ++j) m.set_col(j, cols[j]);
  return m;
}

Mat Mat::hcat(const Mat& a, const Mat& b) {
  Mat m(a.rows(), a.cols() + b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
    for (int j = 0; j < b.cols(); ++j) m(i, a.cols() + j) = b(i, j);
  }
  return m;
}

Mat mat_mul(const Ground& G, const Mat& a, const Mat& b) {
  Mat c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (int j = 0; j < b.cols(); ++j)
        if (b(k, j) != 0) c(i, j) = G.add(c(i, j), G.mul(a(i, k), b(k, j)));
    }
  return c;
}

std::vector<Rat> mat_apply(const Ground& G, const Mat& a,
                           const std::vector<Rat>& x) {
  std::vector<Rat> y(a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0 && x[j] != 0) y[i] = G.add(y[i], G.mul(a(i, j), x[j]));
  return y;
}

namespace {

struct SmithWork {
  const Ground& G;
  Smith& s;

  void row_swap(int i, int j) {
    s.D.swap_rows(i, j);
    s.U.swap_rows(i, j);
    s.Uinv.swap_cols(i, j);
  }
  void col_swap(int i, int j) {
    s.D.swap_cols(i, j);
    s.V.swap_cols(i, j);
    s.Vinv.swap_rows(i, j);
  }
  // row dst += c * row src
  void row_addmul(int dst, int src, const Rat& c) {
    for (int k = 0; k < s.D.cols(); ++k)
      s.D(dst, k) = G.add(s.D(dst, k), G.mul(c, s.D(src, k)));
    for (int k = 0; k < s.U.cols(); ++k)
      s.U(dst, k) = G.add(s.U(dst, k), G.mul(c, s.U(src, k)));
    for (int k = 0; k < s.Uinv.rows(); ++k)
      s.Uinv(k, src) = G.sub(s.Uinv(k, src), G.mul(c, s.Uinv(k, dst)));
  }
  // col dst += c * col src
  void col_addmul(int dst, int src, const Rat& c) {
    for (int k = 0; k < s.D.rows(); ++k)
      s.D(k, dst) = G.add(s.D(k, dst), G.mul(c, s.D(k, src)));
    for (int k = 0; k < s.V.rows(); ++k)
      s.V(k, dst) = G.add(s.V(k, dst), G.mul(c, s.V(k, src)));
    for (int k = 0; k < s.Vinv.cols(); ++k)
      s.Vinv(src, k) = G.sub(s.Vinv(src, k), G.mul(c, s.Vinv(dst, k)));
  }
  void row_scale(int i, const Rat& u) {
    Rat ui = *G.exact_div(1, u);
    for (int k = 0; k < s.D.cols(); ++k) s.D(i, k) = G.mul(u, s.D(i, k));
    for (int k = 0; k < s.U.cols(); ++k) s.U(i, k) = G.mul(u, s.U(i, k));
    for (int k = 0; k < s.Uinv.rows(); ++k)
      s.Uinv(k, i) = G.mul(ui, s.Uinv(k, i));
  }
};

}  // namespace

Smith smith_normal_form(const Ground& G, const Mat& A) {
  int m = A.rows(), n = A.cols();
  Smith s;
  s.U = Mat::identity(m);
  s.Uinv = Mat::identity(m);
  s.V = Mat::identity(n);
  s.Vinv = Mat::identity(n);
  s.D = A;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) s.D(i, j) = G.canon(s.D(i, j));
  SmithWork w{G, s};
  int rank_cap = std::min(m, n);
  for (int t = 0; t < rank_cap; ++t) {
    // pivot: nonzero entry of minimal Euclidean size, lexicographic tie-break
    int pi = -1, pj = -1;
    Int best;
    for (int i = t; i < m; ++i)
      for (int j = t; j < n; ++j) {
        if (G.is_zero(s.D(i, j))) continue;
        Int sz = G.size(s.D(i, j));
        if (pi < 0 || sz < best) {
          pi = i;
          pj = j;
          best = sz;
        }
      }
    if (pi < 0) break;
    w.row_swap(t, pi);
    w.col_swap(t, pj);
    for (;;) {
      bool restart = false;
      for (int i = t + 1; i < m && !restart; ++i) {
        if (G.is_zero(s.D(i, t))) continue;
        auto [q, r] = G.divmod(s.D(i, t), s.D(t, t));
        w.row_addmul(i, t, G.neg(q));
        if (!G.is_zero(s.D(i, t))) {
          w.row_swap(t, i);
          restart = true;
        }
      }
      if (restart) continue;
      for (int j = t + 1; j < n && !restart; ++j) {
        if (G.is_zero(s.D(t, j))) continue;
        auto [q, r] = G.divmod(s.D(t, j), s.D(t, t));
        w.col_addmul(j, t, G.neg(q));
        if (!G.is_zero(s.D(t, j))) {
          w.col_swap(t, j);
          restart = true;
        }
      }
      if (restart) continue;
      // divisibility chain: pivot must divide the remaining submatrix
      bool fixed = false;
      for (int i = t + 1; i < m && !fixed; ++i)
        for (int j = t + 1; j < n && !fixed; ++j)
          if (!G.divides(s.D(t, t), s.D(i, j))) {
            w.row_addmul(t, i, 1);
            fixed = true;
          }
      if (!fixed) break;
    }
    Rat u = G.unit_part(s.D(t, t));
    if (u != 1) w.row_scale(t, *G.exact_div(1, u));
  }
  s.invariants.resize(rank_cap);
  for (int t = 0; t < rank_cap; ++t) s.invariants[t] = s.D(t, t);
  return s;
}

std::optional<std::vector<Rat>> solve_linear(const Ground& G, const Mat& A,
                                             const std::vector<Rat>& b) {
  if (int(b.size()) != A.rows()) throw GroundError("shape mismatch in solve");
  Smith s = smith_normal_form(G, A);
  std::vector<Rat> ub = mat_apply(G, s.U, b);
  std::vector<Rat> z(A.cols());
  int rank_cap = std::min(A.rows(), A.cols());
  for (int i = 0; i < A.rows(); ++i) {
    Rat d = i < rank_cap ? s.invariants[i] : Rat(0);
    if (G.is_zero(d)) {
      if (!G.is_zero(ub[i])) return std::nullopt;
    } else {
      auto q = G.exact_div(ub[i], d);
      if (!q) return std::nullopt;
      z[i] = *q;
    }
  }
  return mat_apply(G, s.V, z);
}

AbInvariants cokernel_invariants(const Ground& G, const Mat& A) {
  Smith s = smith_normal_form(G, A);
  AbInvariants inv;
  int nonzero = 0;
  for (const Rat& d : s.invariants) {
    if (G.is_zero(d)) continue;
    ++nonzero;
    if (!G.is_unit(d)) inv.torsion.push_back(d);
  }
  inv.free_rank = A.rows() - nonzero;
  return inv;
}

AbInvariants direct_sum_invariants(const Ground& G, const AbInvariants& a,
                                   const AbInvariants& b) {
  int rows = a.summand_count() + b.summand_count();
  std::vector<std::vector<Rat>> cols;
  int r = 0;
  for (const Rat& t : a.torsion) {
    std::vector<Rat> c(rows);
    c[r++] = t;
    cols.push_back(c);
  }
  r += a.free_rank;
  for (const Rat& t : b.torsion) {
    std::vector<Rat> c(rows);
    c[r++] = t;
    cols.push_back(c);
  }
  return cokernel_invariants(G, Mat::from_cols(rows, cols));
}

std::vector<std::vector<Rat>> kernel_columns(const Ground& G, const Mat& A) {
  Smith s = smith_normal_form(G, A);
  std::vector<std::vector<Rat>> out;
  int rank_cap = std::min(A.rows(), A.cols());
  for (int j = 0; j < A.cols(); ++j)
    if (j >= rank_cap || G.is_zero(s.invariants[j])) out.push_back(s.V.col(j));
  return out;
}

std::string to_string(const Rat& x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

std::string to_string(const AbInvariants& inv) {
  std::ostringstream os;
  os << "(free " << inv.free_rank << ", torsion [";
  for (size_t i = 0; i < inv.torsion.size(); ++i) {
    if (i) os << ", ";
    os << inv.torsion[i];
  }
  os << "])";
  return os.str();
}

}  // namespace gradus

namespace gradus {

std::vector<Rat> smith_canon(const Ground& G, const Smith& s,
                             const std::vector<Rat>& x) {
  std::vector<Rat> y = mat_apply(G, s.U, x);
  size_t len = s.invariants.size();
  for (size_t i = 0; i < y.size() && i < len; ++i) {
    const Rat& di = s.invariants[i];
    if (di == 0) continue;
    if (G.is_unit(di))
      y[i] = 0;
    else
      y[i] = G.divmod(y[i], di).second;
  }
  return mat_apply(G, s.Uinv, y);
}

}  // namespace gradus

namespace gradus {

std::vector<std::vector<Rat>> lattice_column_basis(
    const Ground& G, int rows, const std::vector<std::vector<Rat>>& cols) {
  if (cols.empty()) return {};
  Mat A = Mat::from_cols(rows, cols);
  Smith s = smith_normal_form(G, A);
  std::vector<std::vector<Rat>> out;
  for (size_t i = 0; i < s.invariants.size(); ++i) {
    if (s.invariants[i] == 0) continue;
    std::vector<Rat> v = s.Uinv.col(int(i));
    for (Rat& x : v) x = G.mul(x, s.invariants[i]);
    out.push_back(std::move(v));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace gradus

namespace gradus {

AbInvariants subquotient_invariants(const Ground& G, int rows,
                                    std::vector<std::vector<Rat>> num,
                                    const std::vector<std::vector<Rat>>& den) {
  for (const auto& c : den) num.push_back(c);
  std::vector<std::vector<Rat>> basis = lattice_column_basis(G, rows, num);
  if (basis.empty()) return {};
  Mat B = Mat::from_cols(rows, basis);
  Mat C(int(basis.size()), int(den.size()));
  for (size_t j = 0; j < den.size(); ++j) {
    auto y = solve_linear(G, B, den[j]);
    if (!y) throw std::logic_error("denominator escapes numerator lattice");
    for (size_t i = 0; i < basis.size(); ++i) C(int(i), int(j)) = (*y)[i];
  }
  return cokernel_invariants(G, C);
}

}  // namespace gradus
