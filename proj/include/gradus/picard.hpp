#pragma once

#include "gradus/homology.hpp"

namespace gradus {

// Per-degree dimensions of M (x) R/m over the residue graded field.
std::map<int, int> residue_rank(const ModulePtr& m, int lo, int hi);

struct TensorIsoEvidence {
  int degree = 0;
  AbInvariants invariants;  // shared by (M (x) N)_d and R_d
  Mat mn_to_normal;         // unimodular normalizations exhibiting the match
  Mat r_to_normal;

  bool operator==(const TensorIsoEvidence& o) const {
    return degree == o.degree && invariants == o.invariants &&
           mn_to_normal == o.mn_to_normal && r_to_normal == o.r_to_normal;
  }
};

struct PicardCertificate {
  std::vector<std::string> pair;
  int lo = 0, hi = 0, L = 0;
  std::vector<TensorIsoEvidence> tensor_iso;
  bool tor_zero = false;
  std::string verdict;  // "certificate"
};

struct PicardOutcome {
  enum class Status { Certified, Refused, Inconclusive };
  Status status = Status::Refused;
  std::optional<PicardCertificate> certificate;
  std::string reason;  // names the first failing condition and location
};

PicardOutcome check_picard_pair(const ModulePtr& m, const ModulePtr& n, int L,
                                int lo, int hi,
                                std::vector<std::string> pair_names = {});

std::string to_json(const PicardCertificate& c);
PicardCertificate certificate_from_json(const std::string& text);

// Recomputes the evidence and compares it bit-exactly.
bool replay_certificate(const ModulePtr& m, const ModulePtr& n,
                        const PicardCertificate& c);

struct InvertibilityVerdict {
  enum class Status { FreeRankOne, Refused, Inconclusive };
  Status status = Status::Refused;
  int shift = 0;  // valid when FreeRankOne
  std::string reason;
};

InvertibilityVerdict local_invertibility(const ModulePtr& m, int lo, int hi);

struct CyclicSearchResult {
  std::optional<ModElement> generator;
  int degree = 0;
  bool exhausted = false;
  std::string note;  // exhaustion is not a proof of non-cyclicity
};

CyclicSearchResult cyclic_generator_search(const ModulePtr& m, int bound,
                                           int lo, int hi);

struct IdempotentImage {
  ModulePtr free_cover;
  ModuleMap epsilon;    // epsilon^2 = epsilon, exactly
  ModulePtr image;      // the presented module itself
};

struct ProjectiveOutcome {
  enum class Status { Split, Refused } status = Status::Refused;
  std::optional<IdempotentImage> image;
  std::string reason;
};

ProjectiveOutcome projective_as_idempotent_image(const ModulePtr& m, int lo,
                                                 int hi);

// Adds degree-0 integral generators g_i with g_i^{n_i} = 1; factors of 1 are
// dropped (the trivial group changes nothing).
RingPtr group_ring(const RingPtr& base, const std::vector<int>& factors);

struct IdempotentSet {
  RingPtr ring;
  std::vector<Element> idempotents;
  bool verified = false;
  std::vector<std::string> transcript;
};

IdempotentSet character_idempotents(const RingPtr& ring, const Element& root,
                                    int n, const std::string& gen_name = "g");

// Summands e_i M; their degree pieces are verified to sum to M's on [lo, hi].
std::vector<ModulePtr> split_by_idempotents(const ModulePtr& m,
                                            const IdempotentSet& e, int lo = 0,
                                            int hi = 0);

}  // namespace gradus
