#include "gradus/ring.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <functional>
#include <sstream>

namespace gradus {

namespace {

// Koszul-signed product of sorted monomial words: each odd factor of b
// moves left past the odd factors of a that follow its slot.
std::pair<int, Monomial> koszul_mul(const std::vector<GeneratorDecl>& gens,
                                    const Monomial& a, const Monomial& b) {
  int n = int(gens.size());
  long swaps = 0;
  for (int i = 0; i < n; ++i) {
    if (!gens[i].odd || b[i] == 0) continue;
    for (int j = i + 1; j < n; ++j)
      if (gens[j].odd && a[j] != 0) swaps += long(b[i]) * a[j];
  }
  Monomial m(n);
  for (int k = 0; k < n; ++k) m[k] = a[k] + b[k];
  return {(swaps % 2) ? -1 : 1, m};
}

void accumulate(const Ground& G, Element& out, const Monomial& m,
                const Rat& c) {
  auto it = out.terms.find(m);
  if (it == out.terms.end()) {
    Rat v = G.canon(c);
    if (v != 0) out.terms.emplace(m, v);
  } else {
    it->second = G.add(it->second, c);
    if (it->second == 0) out.terms.erase(it);
  }
}

void accumulate(const Ground& G, Element& out, const Element& e) {
  for (const auto& [m, c] : e.terms) accumulate(G, out, m, c);
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha((unsigned char)s[0]) && s[0] != '_') return false;
  for (char ch : s)
    if (!std::isalnum((unsigned char)ch) && ch != '_') return false;
  return true;
}

AbInvariants invariants_from_smith(const Ground& G, int rank,
                                   const Smith& s) {
  AbInvariants out;
  int nonzero = 0;
  for (const Rat& d : s.invariants) {
    if (d == 0) continue;
    ++nonzero;
    if (!G.is_unit(d)) out.torsion.push_back(d);
  }
  out.free_rank = rank - nonzero;
  return out;
}

}  // namespace

int DegreeBasis::index_of(const Monomial& m) const {
  auto it = std::lower_bound(monomials.begin(), monomials.end(), m);
  if (it == monomials.end() || *it != m) return -1;
  return int(it - monomials.begin());
}

int Ring::max_window() {
  static const int cap = [] {
    if (const char* s = std::getenv("GRADUS_MAX_WINDOW")) {
      int v = std::atoi(s);
      if (v > 0) return v;
    }
    return 64;
  }();
  return cap;
}

int Ring::gen_index(const std::string& name) const {
  for (size_t i = 0; i < gens_.size(); ++i)
    if (gens_[i].name == name) return int(i);
  return -1;
}

int Ring::mono_degree(const Monomial& m) const {
  long d = 0;
  for (size_t i = 0; i < gens_.size(); ++i) d += long(m[i]) * gens_[i].degree;
  return int(d);
}

int Ring::mono_parity(const Monomial& m) const {
  long p = 0;
  for (size_t i = 0; i < gens_.size(); ++i)
    if (gens_[i].odd) p += m[i];
  return int(p & 1);
}

std::optional<int> Ring::degree_of(const Element& e) const {
  if (e.terms.empty()) return std::nullopt;
  int d = mono_degree(e.terms.begin()->first);
  for (const auto& [m, c] : e.terms)
    if (mono_degree(m) != d) return std::nullopt;
  return d;
}

Element Ring::constant(const Rat& c) const {
  Element e;
  Rat v = ground_.canon(c);
  if (v != 0) e.terms.emplace(Monomial(gens_.size(), 0), v);
  return e;
}

Element Ring::gen_element(int i, int exp) const {
  Element e;
  Monomial m(gens_.size(), 0);
  m[i] = exp;
  e.terms.emplace(m, 1);
  return e;
}

Element Ring::add(const Element& a, const Element& b) const {
  Element out = a;
  accumulate(ground_, out, b);
  return out;
}

Element Ring::sub(const Element& a, const Element& b) const {
  return add(a, scale(-1, b));
}

Element Ring::scale(const Rat& c, const Element& a) const {
  Element out;
  for (const auto& [m, v] : a.terms) accumulate(ground_, out, m, c * v);
  return out;
}

Element Ring::reduce_monomial(const Rat& coeff, const Monomial& raw) const {
  int n = int(gens_.size());
  Element out;
  std::vector<std::pair<Rat, Monomial>> work;
  work.emplace_back(ground_.canon(coeff), raw);
  while (!work.empty()) {
    auto [c, m] = work.back();
    work.pop_back();
    if (c == 0) continue;
    int hot = -1;
    for (int g = 0; g < n; ++g)
      if (rules_[g] && m[g] >= rules_[g]->cap) {
        hot = g;
        break;
      }
    if (hot < 0) {
      accumulate(ground_, out, m, c);
      continue;
    }
    const RewriteRule& rule = *rules_[hot];
    Monomial prefix = m, suffix(n, 0);
    for (int j = hot + 1; j < n; ++j) {
      suffix[j] = m[j];
      prefix[j] = 0;
    }
    prefix[hot] -= rule.cap;
    for (const auto& [rm, rc] : rule.rhs.terms) {
      auto [s1, t1] = koszul_mul(gens_, prefix, rm);
      auto [s2, t2] = koszul_mul(gens_, t1, suffix);
      work.emplace_back(ground_.mul(c * s1 * s2, rc), t2);
    }
  }
  return out;
}

Element Ring::raw_multiply(const Element& a, const Element& b) const {
  Element out;
  for (const auto& [ma, ca] : a.terms)
    for (const auto& [mb, cb] : b.terms) {
      auto [sign, m] = koszul_mul(gens_, ma, mb);
      accumulate(ground_, out, reduce_monomial(ca * cb * sign, m));
    }
  return out;
}

std::vector<Monomial> Ring::monomials_of_degree(int d) const {
  if (std::abs(d) > max_window())
    throw WindowError("degree " + std::to_string(d) +
                      " exceeds GRADUS_MAX_WINDOW (" +
                      std::to_string(max_window()) + ")");
  return enumerate(d);
}

std::vector<Monomial> Ring::enumerate(int d) const {
  int n = int(gens_.size());
  // Extra budget available from later negative-degree bounded generators.
  std::vector<long> slack(n + 1, 0);
  for (int j = n - 1; j >= 0; --j) {
    slack[j] = slack[j + 1];
    if (j != invertible_ && rules_[j] && gens_[j].degree < 0)
      slack[j] += long(rules_[j]->cap - 1) * -gens_[j].degree;
  }
  std::vector<Monomial> out;
  Monomial cur(n, 0);
  std::function<void(int, long)> rec = [&](int idx, long rem) {
    if (idx == n) {
      if (invertible_ >= 0) {
        int du = gens_[invertible_].degree;
        if (rem % du == 0) {
          cur[invertible_] = int(rem / du);
          out.push_back(cur);
          cur[invertible_] = 0;
        }
      } else if (rem == 0) {
        out.push_back(cur);
      }
      return;
    }
    if (idx == invertible_) {
      rec(idx + 1, rem);
      return;
    }
    int deg = gens_[idx].degree;
    long emax;
    if (rules_[idx]) {
      emax = rules_[idx]->cap - 1;
      if (invertible_ < 0 && deg > 0) {
        long budget = rem + slack[idx + 1];
        if (budget < 0) return;
        emax = std::min(emax, budget / deg);
      }
    } else {
      // validated: positive degree, no cap-free invertible around
      long budget = rem + slack[idx + 1];
      if (budget < 0) return;
      emax = budget / deg;
    }
    for (long e = 0; e <= emax; ++e) {
      cur[idx] = int(e);
      rec(idx + 1, rem - e * deg);
    }
    cur[idx] = 0;
  };
  rec(0, d);
  std::sort(out.begin(), out.end());
  return out;
}

std::shared_ptr<const DegreeBasis> Ring::build_basis(int d) const {
  auto b = std::make_shared<DegreeBasis>();
  b->degree = d;
  b->monomials = enumerate(d);
  int n = int(b->monomials.size());
  std::vector<std::vector<Rat>> cols;
  for (const Element& r : relations_) {
    int dr = *degree_of(r);
    for (const Monomial& m : enumerate(d - dr)) {
      Element shifted;
      shifted.terms.emplace(m, 1);
      Element inst = raw_multiply(shifted, r);
      if (inst.terms.empty()) continue;
      std::vector<Rat> col(n);
      for (const auto& [mm, c] : inst.terms) {
        int idx = b->index_of(mm);
        if (idx < 0) throw std::logic_error("relation instance escapes basis");
        col[idx] = ground_.add(col[idx], c);
      }
      bool zero = true;
      for (const Rat& c : col)
        if (c != 0) zero = false;
      if (!zero) cols.push_back(std::move(col));
    }
  }
  // canonical column order keeps the decomposition independent of how the
  // relation list happened to be written down
  std::sort(cols.begin(), cols.end());
  b->relation_matrix = Mat::from_cols(n, cols);
  b->smith = smith_normal_form(ground_, b->relation_matrix);
  b->invariants = invariants_from_smith(ground_, n, b->smith);
  return b;
}

const DegreeBasis& Ring::degree_basis(int d) const {
  if (std::abs(d) > max_window())
    throw WindowError("degree " + std::to_string(d) +
                      " exceeds GRADUS_MAX_WINDOW (" +
                      std::to_string(max_window()) + ")");
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto it = basis_cache_.find(d);
  if (it == basis_cache_.end())
    it = basis_cache_.emplace(d, build_basis(d)).first;
  return *it->second;
}

std::vector<Rat> Ring::canon_coords(const DegreeBasis& b,
                                    const std::vector<Rat>& x) const {
  return smith_canon(ground_, b.smith, x);
}

std::vector<Rat> Ring::coords_of(const DegreeBasis& b,
                                 const Element& e) const {
  std::vector<Rat> x(b.monomials.size());
  for (const auto& [m, c] : e.terms) {
    int i = b.index_of(m);
    if (i < 0) throw std::logic_error("monomial outside degree basis");
    x[i] = c;
  }
  return x;
}

Element Ring::element_from_coords(const DegreeBasis& b,
                                  const std::vector<Rat>& x) const {
  Element e;
  for (size_t i = 0; i < x.size(); ++i)
    accumulate(ground_, e, b.monomials[i], x[i]);
  return e;
}

Element Ring::normal_form(const Element& e) const {
  Element reduced;
  for (const auto& [m, c] : e.terms)
    accumulate(ground_, reduced, reduce_monomial(c, m));
  std::map<int, Element> parts;
  for (const auto& [m, c] : reduced.terms)
    parts[mono_degree(m)].terms.emplace(m, c);
  Element out;
  for (const auto& [d, part] : parts) {
    const DegreeBasis& b = degree_basis(d);
    accumulate(ground_, out,
               element_from_coords(b, canon_coords(b, coords_of(b, part))));
  }
  return out;
}

Element Ring::multiply(const Element& a, const Element& b) const {
  return normal_form(raw_multiply(a, b));
}

bool Ring::is_zero(const Element& e) const {
  return normal_form(e).terms.empty();
}

void Ring::extract_rules() {
  int n = int(gens_.size());
  rules_.assign(n, std::nullopt);
  for (int i = 0; i < n; ++i)
    if (gens_[i].kind == GenKind::Nilpotent)
      rules_[i] = RewriteRule{gens_[i].bound, Element{}};
  for (int i = 0; i < n; ++i) {
    if (rules_[i]) continue;
    // Monic power relation c*g^k + (terms with lower g-exponent) gives the
    // rewrite g^k -> -(rest)/c. Candidates are compared by (k, rhs) so the
    // chosen rule does not depend on the order the relations were listed in.
    std::optional<std::pair<int, Element>> best;
    for (const Element& r : relations_) {
      for (const auto& [m, c] : r.terms) {
        if (m[i] < 1 || !ground_.is_unit(c)) continue;
        bool pure = true;
        for (int j = 0; j < n; ++j)
          if (j != i && m[j] != 0) pure = false;
        if (!pure) continue;
        int k = m[i];
        bool dominant = true;
        for (const auto& [m2, c2] : r.terms)
          if (m2 != m && m2[i] >= k) dominant = false;
        if (!dominant) continue;
        Element rhs;
        for (const auto& [m2, c2] : r.terms)
          if (m2 != m) accumulate(ground_, rhs, m2, -c2 / c);
        // a rewrite may only feed generators at or after its own slot among
        // the bounded ones, otherwise reduction need not terminate
        bool oriented = true;
        for (const auto& [m2, c2] : rhs.terms)
          for (int j = 0; j < i; ++j)
            if (m2[j] != 0 && rules_[j]) oriented = false;
        if (!oriented) continue;
        if (!best || k < best->first ||
            (k == best->first && rhs.terms < best->second.terms))
          best = {k, std::move(rhs)};
      }
    }
    if (best) rules_[i] = RewriteRule{best->first, std::move(best->second)};
  }
  for (int i = 0; i < n; ++i)
    if (gens_[i].kind == GenKind::Integral && !rules_[i])
      throw ValidationError("integral generator '" + gens_[i].name +
                            "' lacks a monic power relation");
}

void Ring::check_bounds() {
  int n = int(gens_.size());
  invertible_ = -1;
  for (int i = 0; i < n; ++i) {
    if (gens_[i].kind != GenKind::Invertible || rules_[i]) continue;
    if (invertible_ >= 0)
      throw ValidationError(
          "unbounded degree basis: more than one cap-free invertible "
          "generator");
    invertible_ = i;
  }
  for (int i = 0; i < n; ++i) {
    if (i == invertible_ || rules_[i]) continue;
    if (invertible_ >= 0)
      throw ValidationError("unbounded degree basis: generator '" +
                            gens_[i].name +
                            "' needs a power relation alongside invertible '" +
                            gens_[invertible_].name + "'");
    if (gens_[i].degree <= 0)
      throw ValidationError("unbounded degree basis: generator '" +
                            gens_[i].name +
                            "' has non-positive degree and no bounding "
                            "relation");
  }
}

RingPtr Ring::validate(Ground ground, std::vector<GeneratorDecl> gens,
                       std::vector<Element> relations, RingFlags flags) {
  auto R = std::shared_ptr<Ring>(new Ring);
  R->ground_ = std::move(ground);
  R->gens_ = std::move(gens);
  R->flags_ = std::move(flags);
  const Ground& G = R->ground_;
  int n = int(R->gens_.size());

  for (int i = 0; i < n; ++i) {
    const GeneratorDecl& g = R->gens_[i];
    if (!valid_name(g.name))
      throw ValidationError("invalid generator name '" + g.name + "'");
    for (int j = 0; j < i; ++j)
      if (R->gens_[j].name == g.name)
        throw ValidationError("duplicate generator name '" + g.name + "'");
    switch (g.kind) {
      case GenKind::Poly:
        if (g.degree <= 0)
          throw ValidationError("polynomial generator '" + g.name +
                                "' must have strictly positive degree");
        break;
      case GenKind::Invertible:
        if (g.degree == 0)
          throw ValidationError("degree-0 invertible generator '" + g.name +
                                "' disallowed (use kind integral)");
        break;
      case GenKind::Nilpotent:
        if (g.bound < 2)
          throw ValidationError("nilpotent generator '" + g.name +
                                "' needs bound >= 2");
        break;
      case GenKind::Integral:
        if (g.bound < 2)
          throw ValidationError("integral generator '" + g.name +
                                "' needs exponent >= 2");
        if (g.degree != 0)
          throw ValidationError("integral generator '" + g.name +
                                "' must have degree 0");
        break;
    }
  }

  for (Element& r : relations) {
    Element canon;
    for (const auto& [m, c] : r.terms) {
      if (int(m.size()) != n)
        throw ValidationError("relation monomial arity mismatch");
      for (int j = 0; j < n; ++j)
        if (m[j] < 0 && R->gens_[j].kind != GenKind::Invertible)
          throw ValidationError("negative exponent on non-invertible '" +
                                R->gens_[j].name + "'");
      if (!G.contains(c))
        throw ValidationError("relation coefficient " + to_string(c) +
                              " outside ground " + G.name());
      accumulate(G, canon, m, c);
    }
    r = std::move(canon);
    if (!r.terms.empty() && !R->degree_of(r))
      throw ValidationError("inhomogeneous relation " +
                            element_to_string(R->gens_, r));
  }
  relations.erase(std::remove_if(relations.begin(), relations.end(),
                                 [](const Element& r) {
                                   return r.terms.empty();
                                 }),
                  relations.end());
  R->relations_ = std::move(relations);

  R->extract_rules();

  // graded commutativity for odd generators: unless 2g = 0 already holds or
  // g^2 reduces away, impose 2g^2 = 0
  bool added = false;
  for (int i = 0; i < n; ++i) {
    if (!R->gens_[i].odd) continue;
    if (G.is_zero(2)) continue;
    if (R->rules_[i] && R->rules_[i]->cap <= 2) continue;
    Monomial g1(n, 0), g2(n, 0);
    g1[i] = 1;
    g2[i] = 2;
    bool covered = false;
    for (const Element& r : R->relations_) {
      if (r.terms.size() != 1) continue;
      const auto& [m, c] = *r.terms.begin();
      if ((m == g1 || m == g2) && G.associate(c) == G.associate(2))
        covered = true;
    }
    if (covered) continue;
    Element auto_rel;
    auto_rel.terms.emplace(g2, G.canon(2));
    R->relations_.push_back(std::move(auto_rel));
    added = true;
  }
  if (added) R->extract_rules();

  R->check_bounds();

  if (R->flags_.graded_local) {
    for (const std::string& s : R->flags_.max_ideal) {
      Element e = parse_element(R->gens_, G, s);
      if (!e.terms.empty() && R->degree_of(e) != std::optional<int>(0) &&
          R->degree_of(e).has_value() == false)
        throw ValidationError("maximal-ideal generator '" + s +
                              "' is inhomogeneous");
      if (!e.terms.empty() && *R->degree_of(e) != 0)
        throw ValidationError("maximal-ideal generator '" + s +
                              "' must have degree 0");
    }
  }
  return R;
}

RingPtr Ring::validate_strings(Ground ground, std::vector<GeneratorDecl> gens,
                               const std::vector<std::string>& relations,
                               RingFlags flags) {
  std::vector<Element> rels;
  rels.reserve(relations.size());
  for (const std::string& s : relations)
    rels.push_back(parse_element(gens, ground, s));
  return validate(std::move(ground), std::move(gens), std::move(rels),
                  std::move(flags));
}

RingPtr Ring::quotient(const std::vector<Element>& ideal_gens,
                       std::optional<RingFlags> new_flags) const {
  std::vector<Element> rels = relations_;
  for (const Element& g : ideal_gens) {
    if (!g.terms.empty() && !degree_of(g))
      throw ValidationError("inhomogeneous ideal generator " +
                            element_to_string(gens_, g));
    rels.push_back(g);
  }
  RingFlags f = new_flags ? *new_flags : flags_;
  if (!new_flags) f.global_dimension_hint.reset();
  return validate(ground_, gens_, std::move(rels), std::move(f));
}

RingPtr Ring::localize(const Ground& new_ground,
                       std::optional<RingFlags> new_flags) const {
  for (const Element& r : relations_)
    for (const auto& [m, c] : r.terms)
      if (!new_ground.contains(c))
        throw ValidationError("relation coefficient " + to_string(c) +
                              " outside ground " + new_ground.name());
  return validate(new_ground, gens_, relations_,
                  new_flags ? *new_flags : flags_);
}

std::vector<Element> Ring::graded_max_ideal() const {
  if (!flags_.graded_local)
    throw ValidationError("ring not declared graded_local");
  std::vector<Element> out;
  for (const std::string& s : flags_.max_ideal)
    out.push_back(parse_element(gens_, ground_, s));
  for (size_t i = 0; i < gens_.size(); ++i)
    if (gens_[i].kind != GenKind::Invertible && gens_[i].degree != 0)
      out.push_back(gen_element(int(i)));
  return out;
}

namespace {

// Cyclic structure of one degree piece: index of the surviving Smith
// coordinate, its invariant (0 = free) and a representing element.
struct PieceShape {
  int cyclic_rank = 0;  // number of non-unit coordinates
  Rat invariant = 0;
  std::vector<Rat> gen_coords;
};

PieceShape piece_shape(const Ground& G, const DegreeBasis& b) {
  PieceShape out;
  int n = int(b.monomials.size());
  size_t len = b.smith.invariants.size();
  for (int i = 0; i < n; ++i) {
    Rat di = size_t(i) < len ? b.smith.invariants[i] : Rat(0);
    if (di != 0 && G.is_unit(di)) continue;
    ++out.cyclic_rank;
    if (out.cyclic_rank == 1) {
      out.invariant = di;
      out.gen_coords = b.smith.Uinv.col(i);
    }
  }
  return out;
}

bool is_prime_integer(const Rat& q) {
  if (q.get_den() != 1) return false;
  Int n = q.get_num();
  return mpz_probab_prime_p(n.get_mpz_t(), 30) > 0;
}

// z is a unit of R_0 iff multiplication by z hits 1 modulo the relations.
bool unit_in_degree_zero(const Ring& R, const Element& z) {
  const DegreeBasis& b0 = R.degree_basis(0);
  int n = int(b0.monomials.size());
  std::vector<std::vector<Rat>> cols;
  for (int j = 0; j < n; ++j) {
    Element mj;
    mj.terms.emplace(b0.monomials[j], 1);
    cols.push_back(R.coords_of(b0, R.multiply(z, mj)));
  }
  Mat M = Mat::hcat(Mat::from_cols(n, cols), b0.relation_matrix);
  return solve_linear(R.ground(), M, R.coords_of(b0, R.one())).has_value();
}

}  // namespace

Ring::Residue Ring::residue_quotient(int lo, int hi) const {
  std::vector<Element> m = graded_max_ideal();
  RingFlags f;
  f.graded_local = true;
  Residue res;
  res.ring = quotient(m, f);
  const Ring& K = *res.ring;
  const Ground& G = ground_;

  PieceShape zero_piece = piece_shape(G, K.degree_basis(0));
  if (zero_piece.cyclic_rank != 1) {
    res.note = "degree-0 residue is not cyclic";
    return res;
  }
  if (zero_piece.invariant == 0) {
    if (!G.is_field()) {
      res.note = "degree-0 residue is free over a non-field ground";
      return res;
    }
  } else if (!is_prime_integer(zero_piece.invariant)) {
    res.note = "degree-0 residue invariant " +
               to_string(zero_piece.invariant) + " is not prime";
    return res;
  }

  for (int d = lo; d <= hi; ++d) {
    if (d == 0) continue;
    PieceShape p = piece_shape(G, K.degree_basis(d));
    if (p.cyclic_rank == 0) continue;
    if (p.cyclic_rank > 1) {
      res.note = "degree " + std::to_string(d) + " residue piece not cyclic";
      return res;
    }
    if (-d < lo || -d > hi) {
      res.inconclusive = true;
      res.note = "window too small to test invertibility in degree " +
                 std::to_string(d);
      return res;
    }
    PieceShape q = piece_shape(G, K.degree_basis(-d));
    if (q.cyclic_rank != 1) {
      res.note = "degree " + std::to_string(d) +
                 " piece has no inverse candidate";
      return res;
    }
    Element gd = K.element_from_coords(K.degree_basis(d), p.gen_coords);
    Element gmd = K.element_from_coords(K.degree_basis(-d), q.gen_coords);
    if (!unit_in_degree_zero(K, K.multiply(gd, gmd))) {
      res.note = "degree " + std::to_string(d) + " generator not invertible";
      return res;
    }
  }
  res.graded_field = true;
  return res;
}

Verdict Ring::eilenberg_check(int lo, int hi) const {
  Verdict v;
  v.pass = true;
  for (int d = lo; d <= hi && d < 0; ++d) {
    if (!degree_basis(d).invariants.is_zero()) {
      v.pass = false;
      v.reasons.push_back("nonzero piece in negative degree " +
                          std::to_string(d));
      break;
    }
  }
  switch (ground_.kind()) {
    case GroundKind::LocalizedAt:
    case GroundKind::PrimeField:
    case GroundKind::Rationals:
      break;
    default:
      v.pass = false;
      v.reasons.push_back("ground " + ground_.name() +
                          " is not Noetherian local");
  }
  // each window piece finitely generated: basis enumeration already certifies
  for (int d = std::max(lo, 0); d <= hi; ++d) degree_basis(d);
  return v;
}

std::string Ring::describe_element(const Element& e) const {
  return element_to_string(gens_, e);
}

// ---------------------------------------------------------------------------
// expression parsing and printing

namespace {

struct Parser {
  const std::vector<GeneratorDecl>& gens;
  const Ground& G;
  const std::string& text;
  size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace((unsigned char)text[pos])) ++pos;
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }
  bool eat(char c) {
    if (peek() != c) return false;
    ++pos;
    return true;
  }

  Int integer() {
    skip_ws();
    bool neg = false;
    if (pos < text.size() && text[pos] == '-') {
      neg = true;
      ++pos;
    }
    size_t start = pos;
    while (pos < text.size() && std::isdigit((unsigned char)text[pos])) ++pos;
    if (pos == start) throw ParseError("expected integer", start);
    Int v(text.substr(start, pos - start));
    return neg ? Int(-v) : v;
  }

  std::string name() {
    skip_ws();
    size_t start = pos;
    while (pos < text.size() && (std::isalnum((unsigned char)text[pos]) ||
                                 text[pos] == '_'))
      ++pos;
    return text.substr(start, pos - start);
  }

  // factor := name ('^' int)?
  std::pair<int, int> factor() {
    size_t at = pos;
    std::string id = name();
    int i = -1;
    for (size_t k = 0; k < gens.size(); ++k)
      if (gens[k].name == id) i = int(k);
    if (i < 0) throw ParseError("unknown generator '" + id + "'", at);
    int exp = 1;
    if (eat('^')) {
      Int e = integer();
      if (!e.fits_sint_p()) throw ParseError("exponent overflow", pos);
      exp = int(e.get_si());
    }
    if (exp < 0 && gens[i].kind != GenKind::Invertible)
      throw ParseError("negative exponent on non-invertible '" + id + "'",
                       at);
    return {i, exp};
  }

  Element term(int sign) {
    Rat coeff = sign;
    Monomial mono(gens.size(), 0);
    int mono_sign = 1;
    char c = peek();
    bool saw_factor = false;
    if (std::isdigit((unsigned char)c)) {
      Int num = integer();
      if (eat('/')) {
        Int den = integer();
        if (den == 0) throw ParseError("zero denominator", pos);
        coeff *= Rat(num, den);
      } else {
        coeff *= num;
      }
      coeff.canonicalize();
    } else {
      auto [i, e] = factor();
      auto [s, m] = koszul_mul(gens, mono, pure_power(i, e));
      mono_sign *= s;
      mono = m;
      saw_factor = true;
    }
    while (eat('*')) {
      auto [i, e] = factor();
      auto [s, m] = koszul_mul(gens, mono, pure_power(i, e));
      mono_sign *= s;
      mono = m;
      saw_factor = true;
    }
    (void)saw_factor;
    Rat c2 = coeff * mono_sign;
    if (!G.contains(c2))
      throw ParseError("coefficient " + to_string(c2) + " outside ground " +
                           G.name(),
                       pos);
    Element out;
    Rat v = G.canon(c2);
    if (v != 0) out.terms.emplace(mono, v);
    return out;
  }

  Monomial pure_power(int i, int e) {
    Monomial m(gens.size(), 0);
    m[i] = e;
    return m;
  }

  Element expr() {
    Element out;
    int sign = 1;
    if (eat('-'))
      sign = -1;
    else
      eat('+');
    accumulate(G, out, term(sign));
    while (true) {
      char c = peek();
      if (c == '+') {
        ++pos;
        accumulate(G, out, term(1));
      } else if (c == '-') {
        ++pos;
        accumulate(G, out, term(-1));
      } else {
        break;
      }
    }
    if (peek() != '\0')
      throw ParseError(std::string("unexpected character '") + peek() + "'",
                       pos);
    return out;
  }
};

}  // namespace

Element parse_element(const std::vector<GeneratorDecl>& gens, const Ground& G,
                      const std::string& text) {
  Parser p{gens, G, text};
  return p.expr();
}

std::string mono_to_string(const std::vector<GeneratorDecl>& gens,
                           const Monomial& m) {
  std::string s;
  for (size_t i = 0; i < gens.size(); ++i) {
    if (m[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += gens[i].name;
    if (m[i] != 1) s += "^" + std::to_string(m[i]);
  }
  return s.empty() ? "1" : s;
}

std::string element_to_string(const std::vector<GeneratorDecl>& gens,
                              const Element& e) {
  if (e.terms.empty()) return "0";
  std::string s;
  for (const auto& [m, c] : e.terms) {
    bool neg = c < 0;
    Rat a = neg ? Rat(-c) : c;
    std::string body;
    std::string mono = mono_to_string(gens, m);
    if (mono == "1")
      body = to_string(a);
    else if (a == 1)
      body = mono;
    else
      body = to_string(a) + "*" + mono;
    if (s.empty())
      s = (neg ? "-" : "") + body;
    else
      s += (neg ? " - " : " + ") + body;
  }
  return s;
}

}  // namespace gradus
