#include "gradus/resolution.hpp"

#include <algorithm>

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

// Columns spanning (maximal ideal)_d in the degree-d coordinates of the ring.
std::vector<std::vector<Rat>> max_ideal_columns(const Ring& R, int d) {
  const Ground& G = R.ground();
  const DegreeBasis& b = R.degree_basis(d);
  std::vector<std::vector<Rat>> cols;
  for (int c = 0; c < b.relation_matrix.cols(); ++c)
    cols.push_back(b.relation_matrix.col(c));
  for (const Element& mu : R.graded_max_ideal()) {
    auto dm = R.degree_of(mu);
    int dd = d - (dm ? *dm : 0);
    for (const Monomial& m : R.monomials_of_degree(dd)) {
      Element prod = R.normal_form(R.raw_multiply(mono_element(m), mu));
      std::vector<Rat> col(b.monomials.size());
      bool nz = false;
      for (const auto& [mm, cc] : prod.terms) {
        int idx = b.index_of(mm);
        if (idx < 0) throw std::logic_error("ideal multiple escapes basis");
        col[idx] = G.add(col[idx], cc);
        nz = true;
      }
      if (nz) cols.push_back(std::move(col));
    }
  }
  return cols;
}

ResolutionReport resolve(const ModulePtr& m, int length, int lo, int hi,
                         bool minimal) {
  const Ring& R = *m->ring();
  if (minimal && !R.flags().graded_local)
    throw ValidationError(
        "minimal resolutions require a graded-local ring with a declared "
        "maximal ideal");
  if (length < 0) throw ValidationError("resolution length must be >= 0");

  ResolutionReport rep;
  rep.lo = lo;
  rep.hi = hi;
  rep.minimal = minimal;

  // generator search must reach down to where the module starts, even when
  // the reporting window does not
  int glo = lo;
  for (int s : m->shifts()) glo = std::min(glo, s);
  for (int rd : m->relation_degrees()) glo = std::min(glo, rd);

  ModuleMap aug;
  if (minimal) {
    aug = minimal_cover(m, glo, hi);
  } else {
    auto F0 = Module::free_module(m->ring(), m->shifts());
    std::vector<ModElement> rows;
    for (size_t i = 0; i < m->shifts().size(); ++i)
      rows.push_back(m->generator(int(i)));
    aug = make_map(F0, m, 0, std::move(rows));
  }
  rep.complex.target = m;
  rep.complex.augmentation = aug;
  rep.complex.modules.push_back(aug.source);

  ModuleMap prev = aug;
  for (int n = 1; n <= length; ++n) {
    KernelResult K = map_kernel(prev, glo, hi, minimal);
    if (minimal && !K.minimal_certified) rep.minimal = false;
    if (K.kernel->shifts().empty()) {
      rep.complete = true;
      break;
    }
    auto Fn = Module::free_module(m->ring(), K.kernel->shifts());
    ModuleMap dn =
        make_map(Fn, rep.complex.modules.back(), 0, K.inclusion.matrix);
    rep.complex.modules.push_back(Fn);
    rep.complex.differentials.push_back(dn);
    prev = dn;
  }

  // d^2 = 0, exactly, for every emitted square
  if (!rep.complex.differentials.empty()) {
    ModuleMap sq = compose(aug, rep.complex.differentials[0]);
    if (!is_zero_map(sq)) throw std::logic_error("augmentation square nonzero");
  }
  for (size_t n = 1; n < rep.complex.differentials.size(); ++n) {
    ModuleMap sq = compose(rep.complex.differentials[n - 1],
                           rep.complex.differentials[n]);
    if (!is_zero_map(sq)) throw std::logic_error("differential square nonzero");
  }

  for (const ModulePtr& F : rep.complex.modules) {
    std::vector<int> s = F->shifts();
    std::sort(s.begin(), s.end());
    rep.betti_shifts.push_back(std::move(s));
  }

  // each stage propagates relation degrees one step, shrinking certainty
  int buf = 0;
  for (const Element& r : R.relations()) {
    auto d = R.degree_of(r);
    if (d) buf = std::max(buf, *d);
  }
  int minshift = 0;
  for (int s : m->shifts()) minshift = std::min(minshift, s);
  for (int rd : m->relation_degrees()) buf = std::max(buf, rd - minshift);
  rep.cert_lo = lo;
  rep.cert_hi = hi - int(rep.complex.modules.size()) * buf;

  if (minimal && rep.minimal) {
    Verdict v = is_minimal(rep.complex);
    rep.minimal = v.pass;
  }
  return rep;
}

}  // namespace

std::vector<int> ResolutionReport::betti() const {
  std::vector<int> out;
  for (const auto& s : betti_shifts) out.push_back(int(s.size()));
  return out;
}

ModuleMap minimal_cover(const ModulePtr& m, int lo, int hi) {
  const Ring& R = *m->ring();
  const Ground& G = R.ground();
  if (!R.flags().graded_local)
    throw ValidationError("minimal covers require a graded-local ring");
  std::vector<Element> mg = R.graded_max_ideal();
  struct Gen {
    int degree;
    ModElement elem;
  };
  std::vector<Gen> gens;
  for (int d = lo; d <= hi; ++d) {
    const ModuleBasis& b = m->basis(d);
    int n = b.total();
    if (n == 0) continue;
    std::vector<std::vector<Rat>> cover;
    for (int c = 0; c < b.relation_matrix.cols(); ++c)
      cover.push_back(b.relation_matrix.col(c));
    for (const Gen& g : gens)
      for (const Monomial& mo : R.monomials_of_degree(d - g.degree)) {
        ModElement mult = m->scalar_multiply(mono_element(mo), g.elem);
        cover.push_back(m->coords_of(b, m->normal_form(mult)));
      }
    for (const Element& mu : mg) {
      auto dm = R.degree_of(mu);
      const ModuleBasis& b2 = m->basis(d - (dm ? *dm : 0));
      for (int idx = 0; idx < b2.total(); ++idx) {
        std::vector<Rat> unit(b2.total());
        unit[idx] = 1;
        ModElement mult =
            m->scalar_multiply(mu, m->element_from_coords(b2, unit));
        cover.push_back(m->coords_of(b, m->normal_form(mult)));
      }
    }
    for (int idx = 0; idx < n; ++idx) {
      std::vector<Rat> unit(n);
      unit[idx] = 1;
      if (solve_linear(G, Mat::from_cols(n, cover), unit)) continue;
      gens.push_back({d, m->element_from_coords(b, unit)});
      cover.push_back(unit);
    }
  }
  std::vector<int> shifts;
  std::vector<ModElement> rows;
  for (Gen& g : gens) {
    shifts.push_back(g.degree);
    rows.push_back(std::move(g.elem));
  }
  auto F = Module::free_module(m->ring(), std::move(shifts));
  return make_map(F, m, 0, std::move(rows));
}

ResolutionReport free_resolution(const ModulePtr& m, int length, int lo,
                                 int hi) {
  return resolve(m, length, lo, hi, false);
}

ResolutionReport minimal_resolution(const ModulePtr& m, int length, int lo,
                                    int hi) {
  return resolve(m, length, lo, hi, true);
}

Verdict is_minimal(const FreeComplex& c) {
  Verdict v;
  v.pass = true;
  if (c.modules.empty()) return v;
  const Ring& R = *c.modules.front()->ring();
  const Ground& G = R.ground();
  if (!R.flags().graded_local) {
    v.pass = false;
    v.reasons.push_back("ring is not graded local");
    return v;
  }
  for (size_t n = 0; n < c.differentials.size(); ++n) {
    const ModuleMap& dn = c.differentials[n];
    for (size_t i = 0; i < dn.matrix.size(); ++i)
      for (size_t j = 0; j < dn.matrix[i].size(); ++j) {
        const Element& e = dn.matrix[i][j];
        if (e.terms.empty()) continue;
        auto deg = R.degree_of(e);
        if (!deg) continue;
        const DegreeBasis& b = R.degree_basis(*deg);
        std::vector<Rat> x = R.coords_of(b, e);
        auto cols = max_ideal_columns(R, *deg);
        if (!solve_linear(G, Mat::from_cols(int(b.monomials.size()), cols),
                          x)) {
          v.pass = false;
          v.reasons.push_back(
              "differential d_" + std::to_string(n + 1) + " entry (" +
              std::to_string(i) + "," + std::to_string(j) + ") = " +
              R.describe_element(e) + " is not in the maximal ideal");
        }
      }
  }
  return v;
}

AbInvariants kernel_piece_invariants(const ModuleMap& f, int d) {
  const Module& M = *f.source;
  const Ground& G = M.ring()->ground();
  const ModuleBasis& S = M.basis(d);
  int ns = S.total();
  if (ns == 0) return {};
  Mat F = induced_matrix(f, d);
  const ModuleBasis& T = f.target->basis(d + f.degree);
  Mat A = Mat::hcat(F, T.relation_matrix);
  std::vector<std::vector<Rat>> num;
  for (const auto& v : kernel_columns(G, A)) {
    std::vector<Rat> x(v.begin(), v.begin() + ns);
    if (!col_is_zero(x)) num.push_back(std::move(x));
  }
  std::vector<std::vector<Rat>> den;
  for (int c = 0; c < S.relation_matrix.cols(); ++c)
    den.push_back(S.relation_matrix.col(c));
  return subquotient_invariants(G, ns, std::move(num), den);
}

SchanuelVerdict schanuel_compare(const ModuleMap& p, const ModuleMap& f,
                                 int lo, int hi) {
  if (p.target != f.target)
    throw ValidationError("covers must present the same module");
  if (p.degree != 0 || f.degree != 0)
    throw ValidationError("covers must have degree 0");
  const Ground& G = p.source->ring()->ground();
  SchanuelVerdict out;
  for (int d = lo; d <= hi; ++d) {
    AbInvariants lhs = direct_sum_invariants(G, p.source->degree_piece(d),
                                             kernel_piece_invariants(f, d));
    AbInvariants rhs = direct_sum_invariants(G, f.source->degree_piece(d),
                                             kernel_piece_invariants(p, d));
    if (!(lhs == rhs)) {
      out.isomorphic = false;
      out.first_failure = d;
      return out;
    }
  }
  out.isomorphic = true;
  return out;
}

bool is_zero_map(const ModuleMap& f) {
  for (const ModElement& row : f.matrix)
    if (!f.target->is_zero(row)) return false;
  return true;
}

}  // namespace gradus
