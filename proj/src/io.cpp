#include "gradus/io.hpp"

#include <json.hpp>

namespace gradus {

namespace {

using nlohmann::json;

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DocumentSyntaxError(e.what());
  }
}

const json& field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end())
    throw DocumentSchemaError(std::string("missing field '") + name + "'");
  return *it;
}

GeneratorDecl parse_generator(const json& g) {
  GeneratorDecl d;
  d.name = field(g, "name").get<std::string>();
  d.degree = field(g, "degree").get<int>();
  std::string parity = field(g, "parity").get<std::string>();
  if (parity == "odd")
    d.odd = true;
  else if (parity == "even")
    d.odd = false;
  else
    throw DocumentSchemaError("parity must be 'even' or 'odd'");
  const json& k = field(g, "kind");
  if (k.is_string()) {
    std::string s = k.get<std::string>();
    if (s == "poly")
      d.kind = GenKind::Poly;
    else if (s == "inv")
      d.kind = GenKind::Invertible;
    else
      throw DocumentSchemaError("unknown generator kind '" + s + "'");
  } else if (k.is_object() && k.contains("nilpotent")) {
    d.kind = GenKind::Nilpotent;
    d.bound = k["nilpotent"].get<int>();
  } else if (k.is_object() && k.contains("integral")) {
    d.kind = GenKind::Integral;
    d.bound = k["integral"].get<int>();
  } else {
    throw DocumentSchemaError("generator kind must be 'poly', 'inv', "
                              "{'nilpotent':k} or {'integral':k}");
  }
  return d;
}

json kind_to_json(const GeneratorDecl& d) {
  switch (d.kind) {
    case GenKind::Poly: return "poly";
    case GenKind::Invertible: return "inv";
    case GenKind::Nilpotent: return json{{"nilpotent", d.bound}};
    case GenKind::Integral: return json{{"integral", d.bound}};
  }
  return "poly";
}

RingFlags parse_flags(const json& f) {
  RingFlags flags;
  if (f.contains("connective")) flags.connective = f["connective"].get<bool>();
  if (f.contains("coherent")) flags.coherent = f["coherent"].get<bool>();
  if (f.contains("graded_local"))
    flags.graded_local = f["graded_local"].get<bool>();
  if (f.contains("global_dimension_hint"))
    flags.global_dimension_hint = f["global_dimension_hint"].get<int>();
  if (f.contains("max_ideal"))
    for (const auto& s : f["max_ideal"])
      flags.max_ideal.push_back(s.get<std::string>());
  return flags;
}

}  // namespace

RingPtr parse_ring_document(const std::string& text) {
  json j = parse_json(text);
  if (!j.is_object()) throw DocumentSchemaError("ring document must be an object");
  std::string gname = field(j, "ground").get<std::string>();
  auto ground = Ground::parse(gname);
  if (!ground) throw DocumentSchemaError("unknown ground '" + gname + "'");
  std::vector<GeneratorDecl> gens;
  for (const auto& g : field(j, "generators")) gens.push_back(parse_generator(g));
  std::vector<std::string> rels;
  for (const auto& r : field(j, "relations")) rels.push_back(r.get<std::string>());
  RingFlags flags = j.contains("flags") ? parse_flags(j["flags"]) : RingFlags{};
  return Ring::validate_strings(*ground, std::move(gens), rels, flags);
}

ModulePtr parse_module_document(const std::string& text,
                                const RingResolver& resolve_ring) {
  json j = parse_json(text);
  if (!j.is_object())
    throw DocumentSchemaError("module document must be an object");
  std::string ref = field(j, "ring").get<std::string>();
  RingPtr R = resolve_ring(ref);
  if (!R) throw DocumentSchemaError("unresolvable ring reference '" + ref + "'");
  std::vector<int> shifts;
  for (const auto& g : field(j, "generators"))
    shifts.push_back(field(g, "shift").get<int>());
  std::vector<ModElement> rels;
  for (const auto& row : field(j, "relations")) {
    if (row.size() != shifts.size())
      throw DocumentSchemaError("relation row arity mismatch");
    ModElement r;
    for (const auto& entry : row)
      r.push_back(parse_element(R->gens(), R->ground(),
                                entry.get<std::string>()));
    rels.push_back(std::move(r));
  }
  return Module::make(R, std::move(shifts), std::move(rels));
}

std::string serialize_ring(const Ring& r) {
  json j;
  j["ground"] = r.ground().name();
  j["generators"] = json::array();
  for (const GeneratorDecl& g : r.gens()) {
    json e;
    e["name"] = g.name;
    e["degree"] = g.degree;
    e["parity"] = g.odd ? "odd" : "even";
    e["kind"] = kind_to_json(g);
    j["generators"].push_back(e);
  }
  j["relations"] = json::array();
  for (const Element& rel : r.relations())
    j["relations"].push_back(element_to_string(r.gens(), rel));
  json f;
  f["connective"] = r.flags().connective;
  f["coherent"] = r.flags().coherent;
  f["graded_local"] = r.flags().graded_local;
  if (r.flags().global_dimension_hint)
    f["global_dimension_hint"] = *r.flags().global_dimension_hint;
  f["max_ideal"] = r.flags().max_ideal;
  j["flags"] = f;
  return j.dump();
}

std::string serialize_module(const Module& m, const std::string& ring_ref) {
  json j;
  j["ring"] = ring_ref;
  j["generators"] = json::array();
  for (size_t i = 0; i < m.shifts().size(); ++i) {
    json g;
    g["name"] = "g" + std::to_string(i);
    g["shift"] = m.shifts()[i];
    j["generators"].push_back(g);
  }
  j["relations"] = json::array();
  for (const ModElement& row : m.relations()) {
    json r = json::array();
    for (const Element& e : row)
      r.push_back(element_to_string(m.ring()->gens(), e));
    j["relations"].push_back(r);
  }
  return j.dump();
}

}  // namespace gradus
