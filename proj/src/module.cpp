#include "gradus/module.hpp"

#include <algorithm>

namespace gradus {

namespace {

bool col_is_zero(const std::vector<Rat>& v) {
  for (const Rat& c : v)
    if (c != 0) return false;
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

Element mono_element(size_t ngens, const Monomial& m) {
  Element e;
  (void)ngens;
  e.terms.emplace(m, 1);
  return e;
}

// (-1)^(parity * parity(monomial)) on each term
Element sign_scale(const Ring& R, const Element& e, int parity) {
  if (!(parity & 1)) return e;
  Element out;
  for (const auto& [m, c] : e.terms)
    out.terms.emplace(m, R.mono_parity(m) ? Rat(-c) : c);
  return out;
}

}  // namespace

ModulePtr Module::make(RingPtr ring, std::vector<int> shifts,
                       std::vector<ModElement> relations) {
  auto M = std::shared_ptr<Module>(new Module);
  M->ring_ = std::move(ring);
  const Ring& R = *M->ring_;
  M->shifts_ = std::move(shifts);
  size_t n = M->shifts_.size();
  for (ModElement& row : relations) {
    if (row.size() != n)
      throw ValidationError("module relation arity mismatch");
    std::optional<int> deg;
    for (size_t i = 0; i < n; ++i) {
      row[i] = R.normal_form(row[i]);
      if (row[i].terms.empty()) continue;
      auto ed = R.degree_of(row[i]);
      if (!ed)
        throw ValidationError("inhomogeneous module relation entry " +
                              R.describe_element(row[i]));
      int total = *ed + M->shifts_[i];
      if (deg && *deg != total)
        throw ValidationError("module relation mixes degrees");
      deg = total;
    }
    if (!deg) continue;  // zero row dropped
    M->relations_.push_back(std::move(row));
    M->rel_degrees_.push_back(*deg);
  }
  return M;
}

ModulePtr Module::free_module(RingPtr ring, std::vector<int> shifts) {
  return make(std::move(ring), std::move(shifts), {});
}

ModElement Module::generator(int i) const {
  ModElement e(shifts_.size());
  e[i] = ring_->one();
  return e;
}

std::shared_ptr<const ModuleBasis> Module::build_basis(int d) const {
  auto b = std::make_shared<ModuleBasis>();
  const Ring& R = *ring_;
  b->degree = d;
  size_t n = shifts_.size();
  b->offsets.assign(n + 1, 0);
  for (size_t i = 0; i < n; ++i) {
    const DegreeBasis& rb = R.degree_basis(d - shifts_[i]);
    b->blocks.push_back(&rb);
    b->block_degree.push_back(d - shifts_[i]);
    b->offsets[i + 1] = b->offsets[i] + int(rb.monomials.size());
  }
  int total = b->offsets[n];
  std::vector<std::vector<Rat>> cols;
  // ring-relation instances inside each block
  for (size_t i = 0; i < n; ++i) {
    const Mat& rm = b->blocks[i]->relation_matrix;
    for (int c = 0; c < rm.cols(); ++c) {
      std::vector<Rat> col(total);
      for (int r = 0; r < rm.rows(); ++r) col[b->offsets[i] + r] = rm(r, c);
      cols.push_back(std::move(col));
    }
  }
  // module-relation instances
  for (size_t k = 0; k < relations_.size(); ++k) {
    for (const Monomial& m : R.monomials_of_degree(d - rel_degrees_[k])) {
      Element me = mono_element(n, m);
      std::vector<Rat> col(total);
      bool nonzero = false;
      for (size_t i = 0; i < n; ++i) {
        if (relations_[k][i].terms.empty()) continue;
        Element prod = R.raw_multiply(me, relations_[k][i]);
        for (const auto& [mm, cc] : prod.terms) {
          int idx = b->blocks[i]->index_of(mm);
          if (idx < 0) throw std::logic_error("relation instance escapes basis");
          int at = b->offsets[i] + idx;
          col[at] = R.ground().add(col[at], cc);
        }
      }
      for (const Rat& c : col)
        if (c != 0) nonzero = true;
      if (nonzero) cols.push_back(std::move(col));
    }
  }
  std::sort(cols.begin(), cols.end());
  b->relation_matrix = Mat::from_cols(total, cols);
  b->smith = smith_normal_form(R.ground(), b->relation_matrix);
  b->invariants = invariants_from_smith(R.ground(), total, b->smith);
  return b;
}

const ModuleBasis& Module::basis(int d) const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto it = basis_cache_.find(d);
  if (it == basis_cache_.end())
    it = basis_cache_.emplace(d, build_basis(d)).first;
  return *it->second;
}

AbInvariants Module::degree_piece(int d) const { return basis(d).invariants; }

std::vector<Rat> Module::coords_of(const ModuleBasis& b,
                                   const ModElement& e) const {
  std::vector<Rat> x(b.total());
  for (size_t i = 0; i < shifts_.size(); ++i)
    for (const auto& [m, c] : e[i].terms) {
      int idx = b.blocks[i]->index_of(m);
      if (idx < 0) throw std::logic_error("monomial outside module basis");
      x[b.offsets[i] + idx] = c;
    }
  return x;
}

ModElement Module::element_from_coords(const ModuleBasis& b,
                                       const std::vector<Rat>& x) const {
  ModElement e(shifts_.size());
  const Ground& G = ring_->ground();
  for (size_t i = 0; i < shifts_.size(); ++i)
    for (size_t a = 0; a < b.blocks[i]->monomials.size(); ++a) {
      Rat c = G.canon(x[b.offsets[i] + a]);
      if (c != 0) e[i].terms.emplace(b.blocks[i]->monomials[a], c);
    }
  return e;
}

std::vector<Rat> Module::canon_coords(const ModuleBasis& b,
                                      const std::vector<Rat>& x) const {
  return smith_canon(ring_->ground(), b.smith, x);
}

std::optional<int> Module::element_degree(const ModElement& e) const {
  std::optional<int> deg;
  for (size_t i = 0; i < shifts_.size(); ++i)
    for (const auto& [m, c] : e[i].terms) {
      int d = ring_->mono_degree(m) + shifts_[i];
      if (deg && *deg != d) return std::nullopt;
      deg = d;
    }
  return deg;
}

ModElement Module::normal_form(const ModElement& e) const {
  const Ring& R = *ring_;
  // structural reduction first so coordinates exist, then canon per degree
  std::map<int, ModElement> parts;
  for (size_t i = 0; i < shifts_.size(); ++i) {
    Element red = R.normal_form(e[i]);
    for (const auto& [m, c] : red.terms) {
      int d = R.mono_degree(m) + shifts_[i];
      auto& part = parts.try_emplace(d, shifts_.size()).first->second;
      part[i].terms.emplace(m, c);
    }
  }
  ModElement out(shifts_.size());
  const Ground& G = R.ground();
  for (const auto& [d, part] : parts) {
    const ModuleBasis& b = basis(d);
    ModElement canon = element_from_coords(b, canon_coords(b, coords_of(b, part)));
    for (size_t i = 0; i < shifts_.size(); ++i)
      for (const auto& [m, c] : canon[i].terms) {
        auto it = out[i].terms.find(m);
        if (it == out[i].terms.end())
          out[i].terms.emplace(m, c);
        else {
          it->second = G.add(it->second, c);
          if (it->second == 0) out[i].terms.erase(it);
        }
      }
  }
  return out;
}

bool Module::is_zero(const ModElement& e) const {
  for (const Element& c : normal_form(e))
    if (!c.terms.empty()) return false;
  return true;
}

ModElement Module::add(const ModElement& a, const ModElement& b) const {
  ModElement out(shifts_.size());
  for (size_t i = 0; i < shifts_.size(); ++i) out[i] = ring_->add(a[i], b[i]);
  return out;
}

ModElement Module::scalar_multiply(const Element& r,
                                   const ModElement& e) const {
  ModElement out(shifts_.size());
  for (size_t i = 0; i < shifts_.size(); ++i)
    out[i] = ring_->raw_multiply(r, e[i]);
  return out;
}

ModulePtr Module::shift(int k) const {
  std::vector<int> s = shifts_;
  for (int& x : s) x += k;
  return make(ring_, std::move(s), relations_);
}

ModulePtr direct_sum(const ModulePtr& a, const ModulePtr& b) {
  if (a->ring() != b->ring())
    throw ValidationError("direct sum of modules over different rings");
  std::vector<int> shifts = a->shifts();
  shifts.insert(shifts.end(), b->shifts().begin(), b->shifts().end());
  size_t na = a->shifts().size(), nb = b->shifts().size();
  std::vector<ModElement> rels;
  for (const ModElement& r : a->relations()) {
    ModElement row = r;
    row.resize(na + nb);
    rels.push_back(std::move(row));
  }
  for (const ModElement& r : b->relations()) {
    ModElement row(na + nb);
    for (size_t j = 0; j < nb; ++j) row[na + j] = r[j];
    rels.push_back(std::move(row));
  }
  return Module::make(a->ring(), std::move(shifts), std::move(rels));
}

ModulePtr tensor(const ModulePtr& a, const ModulePtr& b) {
  if (a->ring() != b->ring())
    throw ValidationError("tensor of modules over different rings");
  const Ring& R = *a->ring();
  size_t na = a->shifts().size(), nb = b->shifts().size();
  std::vector<int> shifts(na * nb);
  for (size_t i = 0; i < na; ++i)
    for (size_t j = 0; j < nb; ++j)
      shifts[i * nb + j] = a->shifts()[i] + b->shifts()[j];
  std::vector<ModElement> rels;
  for (const ModElement& r : a->relations())
    for (size_t j = 0; j < nb; ++j) {
      ModElement row(na * nb);
      for (size_t i = 0; i < na; ++i) row[i * nb + j] = r[i];
      rels.push_back(std::move(row));
    }
  for (const ModElement& r : b->relations())
    for (size_t i = 0; i < na; ++i) {
      int par = ((a->shifts()[i] % 2) + 2) % 2;
      ModElement row(na * nb);
      for (size_t j = 0; j < nb; ++j) row[i * nb + j] = sign_scale(R, r[j], par);
      rels.push_back(std::move(row));
    }
  return Module::make(a->ring(), std::move(shifts), std::move(rels));
}

ModuleMap make_map(ModulePtr source, ModulePtr target, int degree,
                   std::vector<ModElement> matrix) {
  if (source->ring() != target->ring())
    throw ValidationError("map between modules over different rings");
  const Ring& R = *source->ring();
  const Ground& G = R.ground();
  size_t ns = source->shifts().size(), nt = target->shifts().size();
  if (matrix.size() != ns) throw ValidationError("map matrix row count");
  for (size_t i = 0; i < ns; ++i) {
    if (matrix[i].size() != nt) throw ValidationError("map matrix column count");
    for (size_t j = 0; j < nt; ++j) {
      matrix[i][j] = R.normal_form(matrix[i][j]);
      if (matrix[i][j].terms.empty()) continue;
      auto d = R.degree_of(matrix[i][j]);
      if (!d || *d != source->shifts()[i] + degree - target->shifts()[j])
        throw ValidationError("map entry not homogeneous of the right degree");
    }
  }
  ModuleMap f{std::move(source), std::move(target), degree, std::move(matrix)};
  // relations must land in the target's zero lattice
  for (size_t k = 0; k < f.source->relations().size(); ++k) {
    const ModElement& r = f.source->relations()[k];
    ModElement img(nt);
    for (size_t j = 0; j < nt; ++j)
      for (size_t i = 0; i < ns; ++i)
        img[j] = R.add(img[j], R.raw_multiply(r[i], f.matrix[i][j]));
    int dd = f.source->relation_degrees()[k] + degree;
    const ModuleBasis& tb = f.target->basis(dd);
    std::vector<Rat> coords = f.target->coords_of(tb, img);
    if (!solve_linear(G, tb.relation_matrix, coords))
      throw ValidationError("map does not respect module relations");
  }
  return f;
}

ModuleMap identity_map(const ModulePtr& m) {
  std::vector<ModElement> mat(m->shifts().size());
  for (size_t i = 0; i < m->shifts().size(); ++i) mat[i] = m->generator(int(i));
  return make_map(m, m, 0, std::move(mat));
}

ModuleMap zero_map(ModulePtr source, ModulePtr target, int degree) {
  std::vector<ModElement> mat(source->shifts().size(),
                              ModElement(target->shifts().size()));
  return make_map(std::move(source), std::move(target), degree,
                  std::move(mat));
}

ModuleMap compose(const ModuleMap& g, const ModuleMap& f) {
  if (f.target != g.source) throw ValidationError("composition mismatch");
  const Ring& R = *f.source->ring();
  size_t ns = f.source->shifts().size(), nm = f.target->shifts().size(),
         nt = g.target->shifts().size();
  std::vector<ModElement> mat(ns, ModElement(nt));
  for (size_t i = 0; i < ns; ++i)
    for (size_t l = 0; l < nt; ++l)
      for (size_t j = 0; j < nm; ++j)
        mat[i][l] = R.add(mat[i][l],
                          R.raw_multiply(f.matrix[i][j], g.matrix[j][l]));
  return make_map(f.source, g.target, f.degree + g.degree, std::move(mat));
}

Mat induced_matrix(const ModuleMap& f, int d) {
  const Ring& R = *f.source->ring();
  const ModuleBasis& S = f.source->basis(d);
  const ModuleBasis& T = f.target->basis(d + f.degree);
  Mat out(T.total(), S.total());
  size_t ns = f.source->shifts().size(), nt = f.target->shifts().size();
  for (size_t i = 0; i < ns; ++i)
    for (size_t a = 0; a < S.blocks[i]->monomials.size(); ++a) {
      Element me = mono_element(ns, S.blocks[i]->monomials[a]);
      for (size_t j = 0; j < nt; ++j) {
        if (f.matrix[i][j].terms.empty()) continue;
        Element prod = R.raw_multiply(me, f.matrix[i][j]);
        for (const auto& [m, c] : prod.terms) {
          int idx = T.blocks[j]->index_of(m);
          if (idx < 0) throw std::logic_error("map image escapes basis");
          int row = T.offsets[j] + idx, col = S.offsets[i] + int(a);
          out(row, col) = R.ground().add(out(row, col), c);
        }
      }
    }
  return out;
}

ModElement apply_map(const ModuleMap& f, const ModElement& e) {
  const Ring& R = *f.source->ring();
  size_t nt = f.target->shifts().size();
  ModElement out(nt);
  for (size_t j = 0; j < nt; ++j)
    for (size_t i = 0; i < f.source->shifts().size(); ++i)
      out[j] = R.add(out[j], R.raw_multiply(e[i], f.matrix[i][j]));
  return f.target->normal_form(out);
}

KernelResult map_kernel(const ModuleMap& f, int lo, int hi, bool minimal) {
  const Module& M = *f.source;
  const Ring& R = *M.ring();
  const Ground& G = R.ground();
  KernelResult res;
  res.lo = lo;
  res.hi = hi;
  std::vector<Element> mg;
  std::vector<int> mg_deg;
  if (minimal) {
    mg = R.graded_max_ideal();
    for (const Element& mu : mg) {
      auto d = R.degree_of(mu);
      mg_deg.push_back(d ? *d : 0);
    }
  }
  struct Gen {
    int degree;
    ModElement elem;
  };
  struct Rel {
    int degree;
    std::vector<Element> entries;  // over the generators known at discovery
  };
  std::vector<Gen> gens;
  std::vector<Rel> rels;
  std::map<int, std::vector<ModElement>> kernel_lattice;

  for (int d = lo; d <= hi; ++d) {
    const ModuleBasis& S = M.basis(d);
    int ns = S.total();
    Mat F = induced_matrix(f, d);
    const ModuleBasis& T = f.target->basis(d + f.degree);
    Mat A = Mat::hcat(F, T.relation_matrix);
    std::vector<std::vector<Rat>> xraw;
    for (const auto& v : kernel_columns(G, A)) {
      std::vector<Rat> x(v.begin(), v.begin() + ns);
      if (!col_is_zero(x)) xraw.push_back(std::move(x));
    }
    std::vector<std::vector<Rat>> xcols = lattice_column_basis(G, ns, xraw);
    auto& lattice = kernel_lattice[d];
    for (const auto& x : xcols) lattice.push_back(M.element_from_coords(S, x));
    if (ns == 0) continue;

    std::vector<std::vector<Rat>> cover;
    for (int c = 0; c < S.relation_matrix.cols(); ++c)
      cover.push_back(S.relation_matrix.col(c));
    for (const Gen& g : gens)
      for (const Monomial& m : R.monomials_of_degree(d - g.degree)) {
        ModElement mult = M.scalar_multiply(mono_element(0, m), g.elem);
        cover.push_back(M.coords_of(S, M.normal_form(mult)));
      }
    if (minimal)
      for (size_t k = 0; k < mg.size(); ++k) {
        int dd = d - mg_deg[k];
        auto it = kernel_lattice.find(dd);
        if (it == kernel_lattice.end()) {
          if (dd < lo) {
            // kernel below the window is unknown; only harmless if the
            // source vanishes there
            try {
              if (M.basis(dd).total() > 0) res.minimal_certified = false;
            } catch (const WindowError&) {
              res.minimal_certified = false;
            }
          }
          continue;
        }
        for (const ModElement& v : it->second) {
          ModElement mult = M.scalar_multiply(mg[k], v);
          cover.push_back(M.coords_of(S, M.normal_form(mult)));
        }
      }
    for (const auto& x : xcols) {
      if (solve_linear(G, Mat::from_cols(ns, cover), x)) continue;
      gens.push_back({d, M.element_from_coords(S, x)});
      cover.push_back(x);
    }

    if (gens.empty()) continue;
    std::vector<int> kshifts;
    for (const Gen& g : gens) kshifts.push_back(g.degree);
    auto KF = Module::free_module(M.ring(), kshifts);
    const ModuleBasis& KB = KF->basis(d);
    int nk = KB.total();
    if (nk == 0) continue;
    Mat E(ns, nk);
    for (size_t t = 0; t < gens.size(); ++t)
      for (size_t a = 0; a < KB.blocks[t]->monomials.size(); ++a) {
        ModElement mult = M.scalar_multiply(
            mono_element(0, KB.blocks[t]->monomials[a]), gens[t].elem);
        std::vector<Rat> col = M.coords_of(S, M.normal_form(mult));
        for (int r = 0; r < ns; ++r) E(r, KB.offsets[t] + int(a)) = col[r];
      }
    Mat B = Mat::hcat(E, S.relation_matrix);
    std::vector<std::vector<Rat>> craw;
    for (const auto& v : kernel_columns(G, B)) {
      std::vector<Rat> c(v.begin(), v.begin() + nk);
      if (!col_is_zero(c)) craw.push_back(std::move(c));
    }
    std::vector<std::vector<Rat>> ccols = lattice_column_basis(G, nk, craw);
    std::vector<std::vector<Rat>> rcover;
    for (int c = 0; c < KB.relation_matrix.cols(); ++c)
      rcover.push_back(KB.relation_matrix.col(c));
    for (const Rel& r : rels)
      for (const Monomial& m : R.monomials_of_degree(d - r.degree)) {
        Element me = mono_element(0, m);
        std::vector<Rat> col(nk);
        for (size_t t = 0; t < r.entries.size(); ++t) {
          Element prod = R.raw_multiply(me, r.entries[t]);
          for (const auto& [mm, cc] : prod.terms) {
            int idx = KB.blocks[t]->index_of(mm);
            if (idx < 0) throw std::logic_error("relation escapes basis");
            int at = KB.offsets[t] + idx;
            col[at] = G.add(col[at], cc);
          }
        }
        rcover.push_back(std::move(col));
      }
    for (const auto& c : ccols) {
      if (solve_linear(G, Mat::from_cols(nk, rcover), c)) continue;
      Rel nr;
      nr.degree = d;
      nr.entries.assign(gens.size(), Element{});
      for (size_t t = 0; t < gens.size(); ++t)
        for (size_t a = 0; a < KB.blocks[t]->monomials.size(); ++a) {
          Rat cc = G.canon(c[KB.offsets[t] + a]);
          if (cc != 0)
            nr.entries[t].terms.emplace(KB.blocks[t]->monomials[a], cc);
        }
      rels.push_back(std::move(nr));
      rcover.push_back(c);
    }
  }

  std::vector<int> kshifts;
  std::vector<ModElement> kmatrix;
  for (const Gen& g : gens) {
    kshifts.push_back(g.degree);
    kmatrix.push_back(g.elem);
  }
  std::vector<ModElement> krels;
  for (const Rel& r : rels) {
    ModElement row = r.entries;
    row.resize(gens.size());
    krels.push_back(std::move(row));
  }
  res.kernel = Module::make(M.ring(), std::move(kshifts), std::move(krels));
  res.inclusion = make_map(res.kernel, f.source, 0, std::move(kmatrix));
  return res;
}

ModulePtr map_cokernel(const ModuleMap& f) {
  std::vector<ModElement> rels = f.target->relations();
  for (const ModElement& row : f.matrix) rels.push_back(row);
  return Module::make(f.target->ring(), f.target->shifts(), std::move(rels));
}

std::map<int, int> min_generators(const ModulePtr& m, int lo, int hi) {
  const Ring& R = *m->ring();
  const Ground& G = R.ground();
  std::vector<Element> mg = R.graded_max_ideal();
  std::map<int, int> out;
  for (int d = lo; d <= hi; ++d) {
    const ModuleBasis& b = m->basis(d);
    int n = b.total();
    if (n == 0) continue;
    std::vector<std::vector<Rat>> cols;
    for (int c = 0; c < b.relation_matrix.cols(); ++c)
      cols.push_back(b.relation_matrix.col(c));
    for (const Element& mu : mg) {
      auto dm = R.degree_of(mu);
      const ModuleBasis& b2 = m->basis(d - (dm ? *dm : 0));
      for (int idx = 0; idx < b2.total(); ++idx) {
        std::vector<Rat> unit(b2.total());
        unit[idx] = 1;
        ModElement mult =
            m->scalar_multiply(mu, m->element_from_coords(b2, unit));
        cols.push_back(m->coords_of(b, m->normal_form(mult)));
      }
    }
    AbInvariants inv = cokernel_invariants(G, Mat::from_cols(n, cols));
    if (inv.summand_count() > 0) out[d] = inv.summand_count();
  }
  return out;
}

}  // namespace gradus
