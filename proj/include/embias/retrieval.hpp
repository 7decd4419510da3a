#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "embias/linalg.hpp"
#include "embias/provider.hpp"
#include "embias/scenario.hpp"

namespace embias::retrieval {

struct Chunk {
  std::size_t id = 0;
  std::string group;  // optional label, e.g. "female", "male", "neutral", "random"
  std::string text;
  linalg::Vector embedding;
  bool operator==(const Chunk&) const = default;
};

struct ScoredChunk {
  std::size_t id = 0;
  double similarity = 0.0;
  bool operator==(const ScoredChunk&) const = default;
};

struct RetrievalResult {
  std::vector<ScoredChunk> ranked;       // similarities nonincreasing,
                                         // ties broken by ascending id
  std::size_t m = 0;                     // |ranked|
  std::vector<std::string> query_used;   // query name(s) driving the ranking
  // Dynamic-retrieval details (empty for plain topk):
  std::vector<std::size_t> shortlist_ids;
  std::size_t threshold_id = 0;
  double threshold = 0.0;
  std::vector<std::string> warnings;
  bool operator==(const RetrievalResult&) const = default;
};

// Rows = queries, columns = chunks, entries = cosine similarity.
linalg::Matrix similarity_matrix(const std::vector<linalg::Vector>& queries,
                                 const std::vector<Chunk>& chunks);

// Plain top-k under one query.
RetrievalResult topk(const linalg::Vector& query,
                     const std::vector<Chunk>& chunks, std::size_t k,
                     const std::string& query_name = "query");

// Which query sets the dynamic cutoff. The default scores the shortlist
// under the opposite-side query and keeps everything at least as similar as
// the weakest shortlist member there, which is the reading that reproduces
// the worked walkthrough (threshold chunk at rank 15 -> m = 15).
// `positive_query` cuts under the same query that built the shortlist; it is
// a strictly different reading kept for sensitivity analysis only.
enum class ThresholdRule { negative_query, positive_query };

struct AssumptionGroups {
  std::string related_group = "male";
  std::string unrelated_group = "random";
};

// Debiased retrieval with a dynamic cutoff: shortlist the top-k chunks under
// the positive-side query q+, find the shortlist member scored lowest by the
// cutoff query (q- by default), and return every chunk the cutoff query
// scores at least that highly (ties at the cutoff included), sorted by that
// query. m = |result| >= k, and the shortlist is always contained in the
// result under the default rule.
//
// When chunk groups include `assumption.related_group` and
// `assumption.unrelated_group`, the algorithm's premise (opposite-side chunks
// still score above unrelated ones under q+) is checked; a violation attaches
// a warning.
RetrievalResult dynamic_debiased_retrieve(
    const std::vector<Chunk>& chunks, std::size_t k,
    const linalg::Vector& positive_query, const linalg::Vector& negative_query,
    ThresholdRule rule = ThresholdRule::negative_query,
    const AssumptionGroups& assumption = {},
    const std::vector<std::string>& query_names = {"positive", "negative"});

// Text-level wrapper: renders the concept's positive/negative retrieval
// queries (e.g. female/male) from the template set, embeds them along with
// any chunks that lack embeddings, and runs the dynamic retrieval.
RetrievalResult dynamic_debiased_retrieve_text(
    std::vector<Chunk> chunks, std::size_t k,
    const scenario::TemplateSet& templates, provider::Provider& prov,
    const std::string& positive_scenario = "female",
    const std::string& negative_scenario = "male",
    ThresholdRule rule = ThresholdRule::negative_query);

// Loads {"chunks": [{"id", "group"?, "text"?, "embedding"?}...]} from JSON.
std::vector<Chunk> load_chunks(const std::filesystem::path& path);

// The worked-example corpus: 20 chunks, 5 each of female/male/neutral/random,
// text only (embeddings come from a provider or a synthetic fixture).
std::vector<Chunk> builtin_chunks();

}  // namespace embias::retrieval
