#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "embias/corpus.hpp"
#include "embias/linalg.hpp"
#include "embias/retrieval.hpp"

namespace embias::synthfix {

// Placement of one chunk group in the synthetic retrieval geometry:
// coefficient along the planted (gender) axis, coefficient along the
// orthogonal topic axis, and how many chunks the group gets.
struct GroupPlacement {
  double along_v = 0.0;
  double orthogonal = 1.0;
  std::size_t count = 5;
};

struct FixtureSpec {
  std::size_t dim = 64;            // p >= 2
  std::uint64_t seed = 1;          // RNG seed (noise, base vectors)
  std::uint64_t direction_seed = 17;  // planted direction
  double noise_sigma = 0.0;        // concept: E|noise row| relative to |v|;
                                   // retrieval: coefficient jitter scale
  // Concept-fixture fields:
  std::size_t pair_count = 20;
  double base_scale = 0.1;         // scale of the X1 rows
  // Retrieval-fixture fields:
  std::map<std::string, GroupPlacement> groups;   // empty = default 4 groups
  std::map<std::string, double> query_leans;      // gender-axis coefficient
                                                  // per query scenario
};

// Widely separated content levels shared by the retrieval groups; entry i is
// the topic weight of a group's i-th chunk (cycled when count > 5).
const std::vector<double>& content_profile();

FixtureSpec default_retrieval_spec();

struct ConceptFixture {
  linalg::Matrix x1, x2;
  linalg::Vector direction;        // planted unit vector v
  corpus::ConceptPairSet pairs;    // synthetic terms w1_00.., w2_00..
  std::map<std::string, linalg::Vector> vectors;  // term -> embedding row
};

// X1 rows are small random base vectors; X2 = X1 + v + noise, where noise
// rows have expected norm noise_sigma * |v|. sigma = 0 gives a rank-1
// difference matrix and exact recovery.
ConceptFixture make_concept_fixture(const FixtureSpec& spec);

struct RetrievalFixture {
  std::vector<retrieval::Chunk> chunks;
  std::map<std::string, linalg::Vector> query_embeddings;  // by scenario name
  std::map<std::string, std::string> query_texts;          // by scenario name
};

// Chunks for the four groups placed on a topic axis t and a gender axis g,
// padded to a common norm with per-chunk private axes so cosine order equals
// dot-product order; queries lean on g per query_leans. The construction is
// self-checked: neutral query ranks same-content neutral chunks above
// gendered ones, gendered queries rank own-gender chunks first, every
// non-random chunk outranks every random chunk under every query, and
// opposite-gender chunks still outrank random ones under the gendered
// queries (the dynamic-retrieval premise). Specs that break any of these
// (e.g. zero group offsets) raise an infeasible-spec error.
RetrievalFixture make_retrieval_fixture(const FixtureSpec& spec);

// Vectors for the complete builtin audit grid (all concepts, all scenarios,
// pair terms, association-test terms, and rendered attribute prompts), with
// per-concept planted directions and label-driven attribute placement.
// Deterministic per seed; lets `audit all` run fully offline.
std::map<std::string, linalg::Vector> make_audit_vectors(std::uint64_t seed,
                                                         std::size_t dim = 48);

}  // namespace embias::synthfix
