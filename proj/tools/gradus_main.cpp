#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gradus/fixtures.hpp"
#include "gradus/picard.hpp"

namespace {

using nlohmann::json;
using namespace gradus;

struct Outcome {
  json result;
  std::string verdict = "ok";
  int exit_code = 0;
};

json inv_json(const AbInvariants& inv) {
  json j;
  j["free"] = inv.free_rank;
  j["torsion"] = json::array();
  for (const Rat& t : inv.torsion) j["torsion"].push_back(t.get_str());
  return j;
}

json graded_json(const GradedInvariants& g) {
  json arr = json::array();
  for (const auto& [d, inv] : g) {
    json e = inv_json(inv);
    e["degree"] = d;
    arr.push_back(e);
  }
  return arr;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RingPtr load_ring(const std::string& ref) {
  if (RingPtr R = resolve_fixture_ring_ref(ref)) return R;
  return parse_ring_document(read_file(ref));
}

// With an override, module relation rows are re-read over the given ring
// (generator names must match); used by --ring and --at-primes.
ModulePtr load_module(const std::string& ref, const RingPtr& override_ring) {
  RingResolver resolve = [&](const std::string& rref) -> RingPtr {
    if (override_ring) return override_ring;
    if (RingPtr R = resolve_fixture_ring_ref(rref)) return R;
    return parse_ring_document(read_file(rref));
  };
  if (ref.rfind("fixture:", 0) == 0) {
    const Fixture* f = find_fixture(ref.substr(8));
    if (!f || f->kind != "module")
      throw ValidationError("unknown module fixture '" + ref.substr(8) + "'");
    return parse_module_document(f->document, resolve);
  }
  return parse_module_document(read_file(ref), resolve);
}

std::pair<int, int> parse_window(const std::string& s) {
  auto pos = s.find(':', 1);
  if (pos == std::string::npos)
    throw ValidationError("window must be 'a:b', got '" + s + "'");
  int lo = std::stoi(s.substr(0, pos));
  int hi = std::stoi(s.substr(pos + 1));
  if (hi < lo) throw ValidationError("window must satisfy a <= b");
  if (hi - lo > Ring::max_window())
    throw ValidationError("window wider than the GRADUS_MAX_WINDOW cap of " +
                          std::to_string(Ring::max_window()));
  return {lo, hi};
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  return out;
}

void print_table(const json& report, const std::string& text_block) {
  std::cout << "command: " << report["command"].get<std::string>() << "\n";
  if (report.contains("window"))
    std::cout << "window: [" << report["window"][0] << ", "
              << report["window"][1] << "]\n";
  if (!text_block.empty()) std::cout << text_block << "\n";
  std::cout << "verdict: " << report["verdict"].get<std::string>() << "\n";
}

struct App {
  std::string out_mode = "json";
  int seed = 0;

  // Per-command option storage.
  std::string ring_ref, module_ref, module2_ref, window, element, sequence,
      exponents, root, at_primes, certificate_path, group;
  int length = 4, bound = 3, lmax = 8;

  RingPtr ring_override;

  RingPtr need_ring() {
    if (ring_ref.empty()) throw ValidationError("--ring is required");
    return load_ring(ring_ref);
  }
  ModulePtr need_module(const std::string& ref) {
    if (ref.empty()) throw ValidationError("--module is required");
    if (!ring_ref.empty() && !ring_override) ring_override = load_ring(ring_ref);
    return load_module(ref, ring_override);
  }
};

Outcome cmd_fixtures(App&, std::string& table) {
  Outcome o;
  o.result = json::array();
  std::ostringstream ts;
  for (const Fixture& f : fixture_registry()) {
    json e;
    e["name"] = f.name;
    e["kind"] = f.kind;
    if (!f.ring_ref.empty()) e["ring"] = f.ring_ref;
    e["provenance"] = f.provenance;
    e["document"] = json::parse(f.document);
    o.result.push_back(e);
    ts << f.kind << " " << f.name << "  [" << f.provenance << "]\n  "
       << f.document << "\n";
  }
  table = ts.str();
  return o;
}

Outcome cmd_basis(App& a, std::string& table) {
  RingPtr R = a.need_ring();
  auto [lo, hi] = parse_window(a.window);
  Outcome o;
  o.result = json::array();
  std::ostringstream ts;
  for (int d = lo; d <= hi; ++d) {
    json e;
    e["degree"] = d;
    e["monomials"] = json::array();
    ts << "degree " << d << ":";
    for (const Monomial& m : R->monomials_of_degree(d)) {
      std::string s = mono_to_string(R->gens(), m);
      e["monomials"].push_back(s);
      ts << " " << s;
    }
    e["invariants"] = inv_json(R->degree_basis(d).invariants);
    o.result.push_back(e);
    ts << "\n";
  }
  table = ts.str();
  return o;
}

Outcome cmd_nf(App& a, std::string& table) {
  RingPtr R = a.need_ring();
  Element e = parse_element(R->gens(), R->ground(), a.element);
  std::string nf = element_to_string(R->gens(), R->normal_form(e));
  Outcome o;
  o.result = {{"input", a.element}, {"normal_form", nf}};
  table = a.element + "  ->  " + nf;
  return o;
}

json resolution_json(const ResolutionReport& rep) {
  json r;
  r["betti"] = rep.betti();
  r["betti_shifts"] = rep.betti_shifts;
  r["minimal"] = rep.minimal;
  r["complete"] = rep.complete;
  r["certified_window"] = {rep.cert_lo, rep.cert_hi};
  return r;
}

Outcome cmd_resolution(App& a, std::string& table, bool minimal) {
  ModulePtr M = a.need_module(a.module_ref);
  auto [lo, hi] = parse_window(a.window);
  ResolutionReport rep = minimal ? minimal_resolution(M, a.length, lo, hi)
                                 : free_resolution(M, a.length, lo, hi);
  Outcome o;
  o.result = resolution_json(rep);
  o.verdict = rep.complete ? "complete" : "truncated";
  o.exit_code = rep.complete ? 0 : 2;
  std::ostringstream ts;
  ts << "betti:";
  for (int b : rep.betti()) ts << " " << b;
  ts << "\nminimal: " << (rep.minimal ? "yes" : "no") << "  certified: ["
     << rep.cert_lo << ", " << rep.cert_hi << "]";
  table = ts.str();
  return o;
}

Outcome cmd_koszul(App& a, std::string& table) {
  RingPtr R = a.need_ring();
  auto [lo, hi] = parse_window(a.window);
  std::vector<Element> seq;
  for (const std::string& s : split_list(a.sequence))
    seq.push_back(parse_element(R->gens(), R->ground(), s));
  KoszulComplex kc = koszul_complex(R, seq);
  HomologyResult H = complex_homology(kc.complex, lo, hi);
  Outcome o;
  o.result["length"] = int(seq.size());
  o.result["homology"] = json::array();
  std::ostringstream ts;
  for (size_t p = 0; p < H.groups.size(); ++p) {
    o.result["homology"].push_back(graded_json(H.groups[p]));
    ts << "H_" << p << ": ";
    if (H.groups[p].empty()) ts << "0";
    for (const auto& [d, inv] : H.groups[p])
      ts << "[deg " << d << ": free " << inv.free_rank << ", "
         << inv.torsion.size() << " torsion] ";
    ts << "\n";
  }
  table = ts.str();
  return o;
}

Outcome tor_like(App& a, std::string& table, bool e2) {
  ModulePtr M = a.need_module(a.module_ref);
  if (a.module2_ref.empty()) throw ValidationError("--module2 is required");
  ModulePtr N = load_module(a.module2_ref, a.ring_override);
  auto [lo, hi] = parse_window(a.window);
  Outcome o;
  TorTable t;
  if (e2) {
    E2Page page = kunneth_e2_page(M->ring(), M, N, a.length, lo, hi);
    t = page.table;
    o.result["abutment_note"] = page.abutment_note;
  } else {
    t = tor(M, N, a.length, lo, hi);
  }
  o.result["table"] = json::parse(to_json(t));
  std::vector<int> cols(a.length + 1, 0);
  for (const auto& [pd, inv] : t.entries) cols[pd.first] += inv.summand_count();
  while (cols.size() > 1 && cols.back() == 0) cols.pop_back();
  o.result["column_ranks"] = cols;
  o.verdict = t.complete ? "complete" : "truncated";
  o.exit_code = t.complete ? 0 : 2;
  std::ostringstream ts;
  ts << to_text(t) << "residue ranks:";
  for (int c : cols) ts << " " << c;
  table = ts.str();
  return o;
}

Outcome cmd_tower(App& a, std::string& table) {
  RingPtr R = a.need_ring();
  auto [lo, hi] = parse_window(a.window);
  TowerReport rep =
      quotient_tower(R, R->graded_max_ideal(), parse_int_list(a.exponents), lo,
                     hi);
  Outcome o;
  o.result["stages"] = json::array();
  std::ostringstream ts;
  for (const TowerStage& s : rep.stages) {
    json e;
    e["index"] = s.index;
    e["exponent"] = s.exponent;
    e["exact"] = s.exact;
    e["notes"] = s.notes;
    o.result["stages"].push_back(e);
    ts << "stage gen " << s.index << " exp " << s.exponent << ": "
       << (s.exact ? "exact" : "INEXACT") << "\n";
  }
  o.result["all_exact"] = rep.all_exact;
  o.verdict = rep.all_exact ? "exact" : "inexact";
  table = ts.str();
  return o;
}

Outcome cmd_cofinal(App& a, std::string& table) {
  RingPtr R = a.need_ring();
  CofinalityTable t = ideal_cofinality_check(R, a.bound, a.lmax);
  Outcome o;
  o.result["rows"] = json::array();
  std::ostringstream ts;
  for (const CofinalityRow& r : t.rows) {
    json e;
    e["exponents"] = r.exponents;
    e["l"] = r.l ? json(*r.l) : json();
    e["lprime"] = r.lprime ? json(*r.lprime) : json();
    o.result["rows"].push_back(e);
    ts << "exponents (";
    for (int x : r.exponents) ts << x << " ";
    ts << "): l = " << (r.l ? std::to_string(*r.l) : "?")
       << ", l' = " << (r.lprime ? std::to_string(*r.lprime) : "?") << "\n";
  }
  o.result["conclusive"] = t.conclusive;
  o.verdict = t.conclusive ? "conclusive" : "inconclusive";
  o.exit_code = t.conclusive ? 0 : 2;
  table = ts.str();
  return o;
}

Outcome cmd_invertible(App& a, std::string& table) {
  ModulePtr M = a.need_module(a.module_ref);
  auto [lo, hi] = parse_window(a.window);
  InvertibilityVerdict v = local_invertibility(M, lo, hi);
  Outcome o;
  switch (v.status) {
    case InvertibilityVerdict::Status::FreeRankOne:
      o.verdict = "free-rank-one";
      o.result["shift"] = v.shift;
      break;
    case InvertibilityVerdict::Status::Refused:
      o.verdict = "refused";
      break;
    case InvertibilityVerdict::Status::Inconclusive:
      o.verdict = "inconclusive";
      o.exit_code = 2;
      break;
  }
  o.result["reason"] = v.reason;
  table = o.verdict + (v.reason.empty() ? "" : ": " + v.reason);
  return o;
}

json picpair_outcome_json(const PicardOutcome& out) {
  json j;
  switch (out.status) {
    case PicardOutcome::Status::Certified: j["status"] = "certificate"; break;
    case PicardOutcome::Status::Refused: j["status"] = "refused"; break;
    case PicardOutcome::Status::Inconclusive:
      j["status"] = "inconclusive";
      break;
  }
  if (out.certificate) j["certificate"] = json::parse(to_json(*out.certificate));
  if (!out.reason.empty()) j["reason"] = out.reason;
  return j;
}

Outcome cmd_picpair(App& a, std::string& table) {
  auto [lo, hi] = parse_window(a.window);
  Outcome o;
  std::ostringstream ts;
  if (a.at_primes.empty()) {
    ModulePtr M = a.need_module(a.module_ref);
    if (a.module2_ref.empty()) throw ValidationError("--module2 is required");
    ModulePtr N = load_module(a.module2_ref, a.ring_override);
    PicardOutcome out = check_picard_pair(M, N, a.length, lo, hi,
                                          {a.module_ref, a.module2_ref});
    o.result = picpair_outcome_json(out);
    o.verdict = o.result["status"].get<std::string>();
    o.exit_code = out.status == PicardOutcome::Status::Inconclusive ? 2 : 0;
    ts << o.verdict << (out.reason.empty() ? "" : ": " + out.reason);
  } else {
    o.result["at_primes"] = json::array();
    bool all_certified = true, any_inconclusive = false;
    for (int p : parse_int_list(a.at_primes)) {
      ModulePtr M0 = a.need_module(a.module_ref);
      RingPtr Rp = M0->ring()->localize(Ground::localized_at(p));
      ModulePtr M = load_module(a.module_ref, Rp);
      ModulePtr N = load_module(a.module2_ref, Rp);
      PicardOutcome out = check_picard_pair(M, N, a.length, lo, hi,
                                            {a.module_ref, a.module2_ref});
      json e = picpair_outcome_json(out);
      e["prime"] = p;
      o.result["at_primes"].push_back(e);
      if (out.status != PicardOutcome::Status::Certified) all_certified = false;
      if (out.status == PicardOutcome::Status::Inconclusive)
        any_inconclusive = true;
      ts << "p = " << p << ": " << e["status"].get<std::string>() << "\n";
    }
    o.verdict = all_certified   ? "certificate"
                : any_inconclusive ? "inconclusive"
                                   : "refused";
    o.exit_code = any_inconclusive ? 2 : 0;
  }
  table = ts.str();
  return o;
}

// Builds the group ring when the named generator is absent; a default root of
// -1 covers the C_2 case.
IdempotentSet idempotents_for(App& a, const RingPtr& base) {
  std::vector<int> factors = parse_int_list(a.group);
  if (factors.size() != 1)
    throw ValidationError("--group takes a single cyclic order");
  int n = factors[0];
  RingPtr Rg = base->gen_index("g") >= 0 ? base : group_ring(base, {n});
  std::string root_text = a.root.empty() ? (n == 2 ? "-1" : "") : a.root;
  if (root_text.empty())
    throw ValidationError("--root is required for cyclic order > 2");
  Element root = parse_element(Rg->gens(), Rg->ground(), root_text);
  return character_idempotents(Rg, root, n);
}

Outcome cmd_idempotents(App& a, std::string& table) {
  RingPtr R = a.need_ring();
  IdempotentSet e = idempotents_for(a, R);
  Outcome o;
  o.result["ring"] = json::parse(serialize_ring(*e.ring));
  o.result["idempotents"] = json::array();
  std::ostringstream ts;
  for (const Element& x : e.idempotents) {
    std::string s = element_to_string(e.ring->gens(), x);
    o.result["idempotents"].push_back(s);
    ts << "e = " << s << "\n";
  }
  o.result["verified"] = e.verified;
  o.result["transcript"] = e.transcript;
  o.verdict = e.verified ? "verified" : "unverified";
  o.exit_code = e.verified ? 0 : 1;
  for (const std::string& line : e.transcript) ts << line << "\n";
  table = ts.str();
  return o;
}

Outcome cmd_split(App& a, std::string& table) {
  ModulePtr M = a.need_module(a.module_ref);
  auto [lo, hi] = parse_window(a.window);
  IdempotentSet e = idempotents_for(a, M->ring());
  std::vector<ModulePtr> parts = split_by_idempotents(M, e, lo, hi);
  Outcome o;
  o.result["summands"] = json::array();
  std::ostringstream ts;
  for (size_t i = 0; i < parts.size(); ++i) {
    json s;
    s["generators"] = int(parts[i]->shifts().size());
    s["pieces"] = json::array();
    ts << "summand " << i << ":";
    for (int d = lo; d <= hi; ++d) {
      json p = inv_json(parts[i]->degree_piece(d));
      p["degree"] = d;
      s["pieces"].push_back(p);
      ts << " [" << d << ": " << parts[i]->degree_piece(d).summand_count()
         << "]";
    }
    o.result["summands"].push_back(s);
    ts << "\n";
  }
  table = ts.str();
  return o;
}

Outcome cmd_verify(App& a, std::string& table) {
  PicardCertificate c = certificate_from_json(read_file(a.certificate_path));
  ModulePtr M = a.need_module(a.module_ref);
  if (a.module2_ref.empty()) throw ValidationError("--module2 is required");
  ModulePtr N = load_module(a.module2_ref, a.ring_override);
  bool ok = replay_certificate(M, N, c);
  Outcome o;
  o.result["replayed"] = ok;
  o.verdict = ok ? "replayed" : "mismatch";
  o.exit_code = ok ? 0 : 1;
  table = o.verdict;
  return o;
}

int run(int argc, char** argv) {
  CLI::App cli{"gradus: graded commutative algebra engine"};
  cli.require_subcommand(1);
  App a;
  cli.add_option("--out", a.out_mode, "json|table")
      ->check(CLI::IsMember({"json", "table"}));
  cli.add_option("--seed", a.seed, "seed echoed into the report");

  std::map<std::string, std::function<Outcome(App&, std::string&)>> handlers;
  auto sub = [&](const std::string& name, const std::string& desc) {
    CLI::App* s = cli.add_subcommand(name, desc);
    s->fallthrough();
    s->add_option("--ring", a.ring_ref, "ring document file or fixture:NAME");
    s->add_option("--module", a.module_ref, "module document or fixture:NAME");
    s->add_option("--module2", a.module2_ref, "second module");
    s->add_option("--window", a.window, "degree window a:b");
    s->add_option("--length", a.length, "resolution length / pmax / L");
    s->add_option("--element", a.element, "ring element expression");
    s->add_option("--sequence", a.sequence, "comma-separated elements");
    s->add_option("--exponents", a.exponents, "comma-separated exponents");
    s->add_option("--bound", a.bound, "exponent bound");
    s->add_option("--lmax", a.lmax, "largest power of the maximal ideal");
    s->add_option("--group", a.group, "cyclic group order");
    s->add_option("--root", a.root, "root-of-unity expression");
    s->add_option("--at-primes", a.at_primes, "comma-separated primes");
    s->add_option("--certificate", a.certificate_path, "certificate file");
    return s;
  };

  handlers["fixtures"] = cmd_fixtures;
  sub("fixtures", "list the fixture registry with provenance");
  handlers["basis"] = cmd_basis;
  sub("basis", "degree bases of a ring over a window");
  handlers["nf"] = cmd_nf;
  sub("nf", "normal form of a ring element");
  handlers["minres"] = [](App& x, std::string& t) {
    return cmd_resolution(x, t, true);
  };
  sub("minres", "minimal free resolution");
  handlers["resolve"] = [](App& x, std::string& t) {
    return cmd_resolution(x, t, false);
  };
  sub("resolve", "free resolution");
  handlers["koszul"] = cmd_koszul;
  sub("koszul", "Koszul complex homology");
  handlers["tor"] = [](App& x, std::string& t) { return tor_like(x, t, false); };
  sub("tor", "Tor table");
  handlers["e2"] = [](App& x, std::string& t) { return tor_like(x, t, true); };
  sub("e2", "Kunneth-style E2 page");
  handlers["tower"] = cmd_tower;
  sub("tower", "quotient tower exactness");
  handlers["cofinal"] = cmd_cofinal;
  sub("cofinal", "ideal cofinality table");
  handlers["invertible"] = cmd_invertible;
  sub("invertible", "local invertibility verdict");
  handlers["picpair"] = cmd_picpair;
  sub("picpair", "inverse-pair certificate");
  handlers["idempotents"] = cmd_idempotents;
  sub("idempotents", "character idempotents of a group ring");
  handlers["split"] = cmd_split;
  sub("split", "split a module by character idempotents");
  handlers["verify"] = cmd_verify;
  sub("verify", "replay a certificate");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return cli.exit(e);
  }

  CLI::App* chosen = cli.get_subcommands().front();
  std::string name = chosen->get_name();
  std::string table;
  try {
    Outcome o = handlers.at(name)(a, table);
    json report;
    report["command"] = name;
    json inputs;
    for (const CLI::Option* opt : chosen->get_options())
      if (opt->count() && opt->get_name().rfind("--", 0) == 0)
        inputs[opt->get_name().substr(2)] = opt->results().front();
    if (a.seed) inputs["seed"] = a.seed;
    report["inputs"] = inputs;
    if (!a.window.empty()) {
      auto [lo, hi] = parse_window(a.window);
      report["window"] = {lo, hi};
    }
    report["result"] = o.result;
    report["verdict"] = o.verdict;
    if (a.out_mode == "json")
      std::cout << report.dump() << "\n";
    else
      print_table(report, table);
    return o.exit_code;
  } catch (const WindowError& e) {
    std::cerr << "inconclusive: " << e.what() << "\n";
    return 2;
  } catch (const DocumentSyntaxError& e) {
    std::cerr << "syntax error: " << e.what() << "\n";
    return 1;
  } catch (const DocumentSchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
