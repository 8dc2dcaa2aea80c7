#pragma once

#include <functional>

#include "gradus/module.hpp"

namespace gradus {

// JSON document failures, distinct from presentation validation failures.
class DocumentSyntaxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DocumentSchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// {"ground": "Z"|"Q"|"Fp:<p>"|"Zloc:<p>"|"Zinv:<n>",
//  "generators": [{"name","degree","parity","kind":
//                  "poly"|"inv"|{"nilpotent":k}|{"integral":k}}...],
//  "relations": ["<expr>"...], "flags": {...}}
RingPtr parse_ring_document(const std::string& text);

// {"ring": "<ref>", "generators": [{"name","shift"}...],
//  "relations": [["<expr>", ...]...]}
using RingResolver = std::function<RingPtr(const std::string&)>;
ModulePtr parse_module_document(const std::string& text,
                                const RingResolver& resolve_ring);

// Canonical forms: sorted keys, no insignificant whitespace.
std::string serialize_ring(const Ring& r);
std::string serialize_module(const Module& m, const std::string& ring_ref);

}  // namespace gradus
