#pragma once

#include "gradus/io.hpp"

namespace gradus {

struct Fixture {
  std::string name;
  std::string kind;        // "ring" or "module"
  std::string ring_ref;    // for modules: the ring fixture name
  std::string document;    // canonical JSON document
  std::string provenance;  // quoted / reconstructed / externally sourced
};

const std::vector<Fixture>& fixture_registry();
const Fixture* find_fixture(const std::string& name);

RingPtr fixture_ring(const std::string& name);
ModulePtr fixture_module(const std::string& name);

// Resolves "fixture:NAME"; anything else is treated as a file path by the
// CLI, so this returns null for non-fixture refs.
RingPtr resolve_fixture_ring_ref(const std::string& ref);

}  // namespace gradus
