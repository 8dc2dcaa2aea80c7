#include "gradus/homology.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace gradus {

namespace {

bool col_is_zero(const std::vector<Rat>& v) {
  for (const Rat& c : v)
    if (c != 0) return false;
  return true;
}

Element mono_element(const Monomial& m) {
  Element e;
  e.terms.emplace(m, 1);
  return e;
}

Element sign_scale(const Ring& R, const Element& e, int parity) {
  if (!(parity & 1)) return e;
  Element out;
  for (const auto& [m, c] : e.terms)
    out.terms.emplace(m, R.mono_parity(m) ? Rat(-c) : c);
  return out;
}

Element el_pow(const Ring& R, const Element& e, int k) {
  Element out = R.one();
  for (int i = 0; i < k; ++i) out = R.multiply(out, e);
  return out;
}

ModulePtr cyclic_quotient(const RingPtr& R, const std::vector<Element>& ideal) {
  std::vector<ModElement> rels;
  for (const Element& g : ideal) rels.push_back({g});
  return Module::make(R, {0}, rels);
}

// M (x) Q with the stage maps 1 (x) d (complex of presented modules; the
// target/augmentation slots are fillers, homology only reads modules/maps).
FreeComplex tensor_with(const ModulePtr& m, const FreeComplex& q) {
  const Ring& R = *m->ring();
  FreeComplex out;
  for (const ModulePtr& f : q.modules) out.modules.push_back(tensor(m, f));
  size_t nm = m->shifts().size();
  for (size_t p = 1; p < q.modules.size(); ++p) {
    const ModuleMap& d = q.differentials[p - 1];
    size_t nq = q.modules[p]->shifts().size();
    size_t nq1 = q.modules[p - 1]->shifts().size();
    std::vector<ModElement> mat(nm * nq, ModElement(nm * nq1));
    for (size_t i = 0; i < nm; ++i)
      for (size_t j = 0; j < nq; ++j)
        for (size_t l = 0; l < nq1; ++l)
          mat[i * nq + j][i * nq1 + l] =
              sign_scale(R, d.matrix[j][l], m->shifts()[i]);
    out.differentials.push_back(
        make_map(out.modules[p], out.modules[p - 1], 0, std::move(mat)));
  }
  out.target = out.modules.front();
  out.augmentation = identity_map(out.modules.front());
  return out;
}

std::vector<std::vector<int>> subsets_of_size(int n, int p) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int start) -> void {
    if (int(cur.size()) == p) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

}  // namespace

KoszulComplex koszul_complex(const RingPtr& ring,
                             const std::vector<Element>& sequence) {
  const Ring& R = *ring;
  int n = int(sequence.size());
  std::vector<int> deg(n);
  for (int i = 0; i < n; ++i) {
    Element u = R.normal_form(sequence[i]);
    auto d = R.degree_of(u);
    if (!d && !u.terms.empty())
      throw ValidationError("inhomogeneous sequence entry " +
                            R.describe_element(u));
    deg[i] = d ? *d : 0;
  }
  KoszulComplex K;
  K.sequence = sequence;
  K.complex.target = cyclic_quotient(ring, sequence);

  for (int p = 0; p <= n; ++p) {
    K.labels.push_back(subsets_of_size(n, p));
    std::vector<int> shifts;
    for (const auto& S : K.labels[p]) {
      int s = 0;
      for (int i : S) s += deg[i];
      shifts.push_back(s);
    }
    K.complex.modules.push_back(Module::free_module(ring, shifts));
  }
  K.complex.augmentation =
      make_map(K.complex.modules[0], K.complex.target, 0,
               {{K.complex.target->ring()->one()}});
  for (int p = 1; p <= n; ++p) {
    const auto& rows = K.labels[p];
    const auto& cols = K.labels[p - 1];
    std::vector<ModElement> mat(rows.size(), ModElement(cols.size()));
    for (size_t r = 0; r < rows.size(); ++r)
      for (size_t k = 0; k < rows[r].size(); ++k) {
        std::vector<int> rest = rows[r];
        int idx = rest[k];
        rest.erase(rest.begin() + int(k));
        auto it = std::find(cols.begin(), cols.end(), rest);
        if (it == cols.end()) throw std::logic_error("koszul face missing");
        Element u = sequence[idx];
        if (k & 1) u = R.scale(-1, u);
        mat[r][size_t(it - cols.begin())] = u;
      }
    K.complex.differentials.push_back(
        make_map(K.complex.modules[p], K.complex.modules[p - 1], 0,
                 std::move(mat)));
  }
  if (!K.complex.differentials.empty() &&
      !is_zero_map(compose(K.complex.augmentation, K.complex.differentials[0])))
    throw std::logic_error("koszul augmentation square nonzero");
  for (size_t p = 1; p < K.complex.differentials.size(); ++p)
    if (!is_zero_map(compose(K.complex.differentials[p - 1],
                             K.complex.differentials[p])))
      throw ValidationError(
          "sequence entries do not commute: differential fails d^2 = 0");
  return K;
}

HomologyResult complex_homology(const FreeComplex& c, int lo, int hi) {
  HomologyResult out;
  out.lo = lo;
  out.hi = hi;
  int len = c.length();
  out.groups.resize(len + 1);
  if (c.modules.empty()) return out;
  const Ground& G = c.modules[0]->ring()->ground();
  for (int p = 0; p <= len; ++p) {
    const Module& F = *c.modules[p];
    for (int d = lo; d <= hi; ++d) {
      const ModuleBasis& S = F.basis(d);
      int ns = S.total();
      if (ns == 0) continue;
      std::vector<std::vector<Rat>> num;
      if (p == 0) {
        for (int i = 0; i < ns; ++i) {
          std::vector<Rat> unit(ns);
          unit[i] = 1;
          num.push_back(std::move(unit));
        }
      } else {
        const ModuleMap& dp = c.differentials[p - 1];
        Mat Fm = induced_matrix(dp, d);
        const ModuleBasis& T = dp.target->basis(d);
        Mat A = Mat::hcat(Fm, T.relation_matrix);
        for (const auto& v : kernel_columns(G, A)) {
          std::vector<Rat> x(v.begin(), v.begin() + ns);
          if (!col_is_zero(x)) num.push_back(std::move(x));
        }
      }
      std::vector<std::vector<Rat>> den;
      for (int cc = 0; cc < S.relation_matrix.cols(); ++cc)
        den.push_back(S.relation_matrix.col(cc));
      if (p < len) {
        Mat B = induced_matrix(c.differentials[p], d);
        for (int cc = 0; cc < B.cols(); ++cc) {
          std::vector<Rat> col = B.col(cc);
          if (!col_is_zero(col)) den.push_back(std::move(col));
        }
      }
      AbInvariants h = subquotient_invariants(G, ns, std::move(num), den);
      if (!h.is_zero()) out.groups[p][d] = h;
    }
  }
  return out;
}

const AbInvariants* TorTable::entry(int p, int d) const {
  auto it = entries.find({p, d});
  return it == entries.end() ? nullptr : &it->second;
}

TorTable tor(const ModulePtr& m, const ModulePtr& n, int pmax, int lo,
             int hi) {
  if (m->ring() != n->ring())
    throw ValidationError("tor of modules over different rings");
  const Ring& R = *m->ring();
  // one stage beyond pmax: the top homology spot needs the next boundary
  ResolutionReport rep = R.flags().graded_local
                             ? minimal_resolution(n, pmax + 1, lo, hi)
                             : free_resolution(n, pmax + 1, lo, hi);
  FreeComplex T = tensor_with(m, rep.complex);
  HomologyResult H = complex_homology(T, lo, hi);
  TorTable out;
  out.lo = lo;
  out.hi = hi;
  out.pmax = pmax;
  out.complete = rep.complete;
  for (size_t p = 0; p < H.groups.size() && int(p) <= pmax; ++p)
    for (const auto& [d, inv] : H.groups[p]) out.entries[{int(p), d}] = inv;
  return out;
}

std::string to_json(const TorTable& t) {
  nlohmann::json j;
  j["entries"] = nlohmann::json::array();
  for (const auto& [pd, inv] : t.entries) {
    nlohmann::json e;
    e["p"] = pd.first;
    e["d"] = pd.second;
    e["rank"] = inv.free_rank;
    e["torsion"] = nlohmann::json::array();
    for (const Rat& c : inv.torsion) e["torsion"].push_back(to_string(c));
    j["entries"].push_back(e);
  }
  j["window"] = {t.lo, t.hi};
  j["pmax"] = t.pmax;
  j["complete"] = t.complete;
  return j.dump();
}

std::string to_text(const TorTable& t) {
  std::ostringstream os;
  os << "  p    d  group\n";
  for (const auto& [pd, inv] : t.entries) {
    os.width(3);
    os << pd.first;
    os << "  ";
    os.width(3);
    os << pd.second;
    os << "  " << to_string(inv) << "\n";
  }
  if (t.entries.empty()) os << "  (all entries zero)\n";
  return os.str();
}

E2Page kunneth_e2_page(const RingPtr& ring, const ModulePtr& m,
                       const ModulePtr& n, int pmax, int lo, int hi) {
  if (m->ring() != ring || n->ring() != ring)
    throw ValidationError("modules not over the stated ring");
  E2Page page;
  page.table = tor(m, n, pmax, lo, hi);
  page.abutment_note =
      "abutment recorded as data only; differentials beyond the page are not "
      "computed";
  return page;
}

CollapseVerdict minimal_collapse_check(const ModulePtr& kappa,
                                       const FreeComplex& q, int lo, int hi) {
  CollapseVerdict v;
  Verdict min = is_minimal(q);
  if (!min.pass) {
    v.refused = true;
    v.reasons.push_back("refused: complex is not minimal");
    for (const std::string& r : min.reasons) v.reasons.push_back(r);
    return v;
  }
  (void)lo;
  (void)hi;
  FreeComplex T = tensor_with(kappa, q);
  v.pass = true;
  for (size_t p = 0; p < T.differentials.size(); ++p)
    if (!is_zero_map(T.differentials[p])) {
      v.pass = false;
      v.reasons.push_back("induced differential d_" + std::to_string(p + 1) +
                          " is nonzero after tensoring with the residue");
    }
  return v;
}

ThreeColumnVerdict three_column_analysis(const E2Page& page,
                                         const GradedInvariants& abutment) {
  ThreeColumnVerdict out;
  std::vector<int> sizes(3, 0);
  for (const auto& [pd, inv] : page.table.entries) {
    if (pd.first >= 3 && !inv.is_zero())
      throw ValidationError("page has four or more nontrivial columns");
    if (pd.first < 3) sizes[size_t(pd.first)] += inv.summand_count();
  }
  out.column_sizes = sizes;
  int n0 = sizes[0], n1 = sizes[1], n2 = sizes[2];
  if (n1 == 0 && n2 == 0) {
    int ab = 0;
    for (const auto& [d, inv] : abutment) ab += inv.summand_count();
    bool match = true;
    for (const auto& [d, inv] : abutment) {
      const AbInvariants* e = page.table.entry(0, d);
      if (!e || !(*e == inv)) match = false;
    }
    if (match && n0 == ab) {
      out.kind = ThreeColumnCase::CollapseConsistent;
      out.consistent = true;
      out.description = "columns 1 and 2 vanish; column 0 matches the abutment";
    } else {
      out.kind = ThreeColumnCase::Inconsistent;
      out.description = "columns 1 and 2 vanish but column 0 does not match "
                        "the abutment";
    }
    return out;
  }
  if (n0 == 1 && n1 == 1 && n2 == 1) {
    out.kind = ThreeColumnCase::NontrivialKernel;
    out.description =
        "column pattern (1, 1, 1): the required multiplication maps have "
        "nontrivial kernel, contradiction";
    return out;
  }
  if (n1 == 1 && n0 == n2 && n0 >= 2) {
    out.kind = ThreeColumnCase::CannotBeResolution;
    out.description = "column pattern (" + std::to_string(n0) + ", 1, " +
                      std::to_string(n2) +
                      "): the middle column cannot be a resolution step, "
                      "contradiction";
    return out;
  }
  out.kind = ThreeColumnCase::Inconsistent;
  out.description = "nontrivial outer columns with no consistent collapse";
  return out;
}

TowerReport quotient_tower(const RingPtr& ring,
                           const std::vector<Element>& gens,
                           const std::vector<int>& exponents, int lo, int hi) {
  const Ring& R = *ring;
  if (gens.size() != exponents.size())
    throw ValidationError("one exponent per generator required");
  for (int e : exponents)
    if (e < 1) throw ValidationError("tower exponents must be >= 1");
  std::vector<int> deg(gens.size());
  for (size_t i = 0; i < gens.size(); ++i) {
    auto d = R.degree_of(gens[i]);
    if (!d && !gens[i].terms.empty())
      throw ValidationError("inhomogeneous tower generator");
    deg[i] = d ? *d : 0;
  }
  auto ideal_at = [&](const std::vector<int>& exps) {
    std::vector<Element> ideal;
    for (size_t i = 0; i < gens.size(); ++i)
      ideal.push_back(el_pow(R, gens[i], exps[i]));
    return cyclic_quotient(ring, ideal);
  };

  TowerReport rep;
  rep.lo = lo;
  rep.hi = hi;
  rep.modules.push_back(ideal_at(exponents));
  bool trivial = true;
  for (int e : exponents)
    if (e > 1) trivial = false;
  if (trivial) {
    TowerStage note;
    note.index = -1;
    note.exact = true;
    note.notes.push_back("all exponents are 1: the tower collapses to the "
                         "residue quotient, no nontrivial sequences");
    rep.stages.push_back(std::move(note));
    return rep;
  }
  for (size_t j = 0; j < gens.size(); ++j) {
    for (int e = 2; e <= exponents[j]; ++e) {
      TowerStage st;
      st.index = int(j);
      st.exponent = e;
      std::vector<int> exps = exponents;
      exps[j] = e;
      st.mid = ideal_at(exps);
      exps[j] = e - 1;
      st.sub = ideal_at(exps);
      exps[j] = 1;
      st.quot = ideal_at(exps);
      st.incl = make_map(st.sub, st.mid, deg[j], {{gens[j]}});
      st.exact = true;
      ModulePtr coker = map_cokernel(st.incl);
      for (int d = lo; d <= hi; ++d) {
        if (!kernel_piece_invariants(st.incl, d).is_zero()) {
          st.exact = false;
          st.notes.push_back("multiplication map has kernel in degree " +
                             std::to_string(d));
        }
        if (!(coker->degree_piece(d) == st.quot->degree_piece(d))) {
          st.exact = false;
          st.notes.push_back("cokernel differs from the unit-exponent "
                             "quotient in degree " + std::to_string(d));
        }
      }
      if (!st.exact) rep.all_exact = false;
      rep.stages.push_back(std::move(st));
    }
  }
  return rep;
}

CofinalityTable ideal_cofinality_check(const RingPtr& ring, int bound,
                                       int lmax) {
  const Ring& R = *ring;
  std::vector<Element> mg = R.graded_max_ideal();
  int n = int(mg.size());
  CofinalityTable table;
  table.bound = bound;
  table.lmax = lmax;

  // all products of exactly l maximal-ideal generators (with repetition)
  auto power_products = [&](int l) {
    std::vector<Element> out;
    std::vector<int> counts(n, 0);
    auto rec = [&](auto&& self, int at, int left) -> void {
      if (at == n - 1) {
        counts[at] = left;
        Element p = R.one();
        for (int i = 0; i < n; ++i)
          p = R.multiply(p, el_pow(R, mg[i], counts[i]));
        out.push_back(p);
        return;
      }
      for (int c = 0; c <= left; ++c) {
        counts[at] = c;
        self(self, at + 1, left - c);
      }
    };
    if (n == 0) return out;
    rec(rec, 0, l);
    return out;
  };

  std::vector<int> exps(n, 1);
  auto advance = [&]() {
    for (int i = 0; i < n; ++i) {
      if (exps[i] < bound) {
        ++exps[i];
        for (int j = 0; j < i; ++j) exps[j] = 1;
        return true;
      }
    }
    return false;
  };
  do {
    CofinalityRow row;
    row.exponents = exps;
    std::vector<Element> ideal;
    for (int i = 0; i < n; ++i) ideal.push_back(el_pow(R, mg[i], exps[i]));
    ModulePtr Q = cyclic_quotient(ring, ideal);
    for (int l = 1; l <= lmax && !row.l; ++l) {
      bool all = true;
      for (const Element& p : power_products(l))
        if (!Q->is_zero({p})) {
          all = false;
          break;
        }
      if (all) row.l = l;
    }
    if (!row.l) table.conclusive = false;
    for (int lp = lmax; lp >= 1 && !row.lprime; --lp) {
      ModulePtr P = cyclic_quotient(ring, power_products(lp));
      bool all = true;
      for (const Element& g : ideal)
        if (!P->is_zero({g})) {
          all = false;
          break;
        }
      if (all) row.lprime = lp;
    }
    table.rows.push_back(std::move(row));
  } while (advance());
  return table;
}

}  // namespace gradus
