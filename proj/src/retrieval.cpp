#include "embias/retrieval.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace embias::retrieval {
namespace {

void check_chunks(const std::vector<Chunk>& chunks, bool need_embeddings) {
  if (chunks.empty()) throw std::invalid_argument("no chunks");
  std::set<std::size_t> ids;
  for (const auto& c : chunks) {
    if (!ids.insert(c.id).second) {
      throw std::invalid_argument("duplicate chunk id " + std::to_string(c.id));
    }
    if (need_embeddings && c.embedding.empty()) {
      throw std::invalid_argument("chunk " + std::to_string(c.id) +
                                  " has no embedding");
    }
  }
}

std::vector<ScoredChunk> score_all(const linalg::Vector& query,
                                   const std::vector<Chunk>& chunks) {
  std::vector<ScoredChunk> scored;
  scored.reserve(chunks.size());
  for (const auto& c : chunks) {
    scored.push_back({c.id, linalg::cosine(query, c.embedding)});
  }
  std::sort(scored.begin(), scored.end(),
            [](const ScoredChunk& a, const ScoredChunk& b) {
              if (a.similarity != b.similarity) return a.similarity > b.similarity;
              return a.id < b.id;
            });
  return scored;
}

}  // namespace

linalg::Matrix similarity_matrix(const std::vector<linalg::Vector>& queries,
                                 const std::vector<Chunk>& chunks) {
  if (queries.empty()) throw std::invalid_argument("no queries");
  check_chunks(chunks, /*need_embeddings=*/true);
  linalg::Matrix m(queries.size(), chunks.size());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    for (std::size_t c = 0; c < chunks.size(); ++c) {
      m.at(q, c) = linalg::cosine(queries[q], chunks[c].embedding);
    }
  }
  return m;
}

RetrievalResult topk(const linalg::Vector& query,
                     const std::vector<Chunk>& chunks, std::size_t k,
                     const std::string& query_name) {
  check_chunks(chunks, /*need_embeddings=*/true);
  if (k == 0 || k > chunks.size()) {
    throw std::invalid_argument("topk: k must be in [1, number of chunks]");
  }
  RetrievalResult out;
  out.ranked = score_all(query, chunks);
  out.ranked.resize(k);
  out.m = k;
  out.query_used = {query_name};
  return out;
}

RetrievalResult dynamic_debiased_retrieve(
    const std::vector<Chunk>& chunks, std::size_t k,
    const linalg::Vector& positive_query, const linalg::Vector& negative_query,
    ThresholdRule rule, const AssumptionGroups& assumption,
    const std::vector<std::string>& query_names) {
  check_chunks(chunks, /*need_embeddings=*/true);
  if (k == 0 || k > chunks.size()) {
    throw std::invalid_argument(
        "dynamic retrieval: k must be in [1, number of chunks]");
  }

  RetrievalResult out;
  out.query_used = query_names;

  const RetrievalResult shortlist =
      topk(positive_query, chunks, k,
           query_names.empty() ? "positive" : query_names.front());
  for (const auto& s : shortlist.ranked) out.shortlist_ids.push_back(s.id);
  const std::set<std::size_t> shortlist_set(out.shortlist_ids.begin(),
                                            out.shortlist_ids.end());

  // Score every chunk under the query that sets the cutoff; the shortlist
  // member it likes least becomes the threshold, and everything at least as
  // similar (cutoff ties included) survives.
  const linalg::Vector& cut_query =
      rule == ThresholdRule::negative_query ? negative_query : positive_query;
  const std::vector<ScoredChunk> rescored = score_all(cut_query, chunks);

  bool found = false;
  for (const auto& s : rescored) {  // descending: last shortlist member wins
    if (!shortlist_set.count(s.id)) continue;
    out.threshold_id = s.id;
    out.threshold = s.similarity;
    found = true;
  }
  if (!found) throw std::logic_error("shortlist vanished during rescoring");

  for (const auto& s : rescored) {
    if (s.similarity >= out.threshold) out.ranked.push_back(s);
  }
  out.m = out.ranked.size();

  // Premise check: under q+, related opposite-side chunks should still
  // outrank unrelated ones; otherwise the cutoff can drag unrelated chunks in.
  bool has_related = false, has_unrelated = false;
  for (const auto& c : chunks) {
    has_related = has_related || c.group == assumption.related_group;
    has_unrelated = has_unrelated || c.group == assumption.unrelated_group;
  }
  if (has_related && has_unrelated) {
    double min_related = 2.0, max_unrelated = -2.0;
    for (const auto& c : chunks) {
      const double sim = linalg::cosine(positive_query, c.embedding);
      if (c.group == assumption.related_group) {
        min_related = std::min(min_related, sim);
      } else if (c.group == assumption.unrelated_group) {
        max_unrelated = std::max(max_unrelated, sim);
      }
    }
    if (min_related <= max_unrelated) {
      out.warnings.push_back(
          "assumption violated: some '" + assumption.related_group +
          "' chunk scores no higher than an '" + assumption.unrelated_group +
          "' chunk under the positive-side query; the dynamic cutoff may "
          "include unrelated chunks");
    }
  }
  return out;
}

RetrievalResult dynamic_debiased_retrieve_text(
    std::vector<Chunk> chunks, std::size_t k,
    const scenario::TemplateSet& templates, provider::Provider& prov,
    const std::string& positive_scenario, const std::string& negative_scenario,
    ThresholdRule rule) {
  check_chunks(chunks, /*need_embeddings=*/false);

  std::vector<std::string> texts;
  texts.push_back(templates.retrieval_query(positive_scenario));
  texts.push_back(templates.retrieval_query(negative_scenario));
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    if (chunks[i].embedding.empty()) {
      if (chunks[i].text.empty()) {
        throw std::invalid_argument("chunk " + std::to_string(chunks[i].id) +
                                    " has neither text nor embedding");
      }
      pending.push_back(i);
      texts.push_back(chunks[i].text);
    }
  }
  const auto embedded = prov.embed_batch(texts);
  const linalg::Vector& positive_query = embedded[0].values;
  const linalg::Vector& negative_query = embedded[1].values;
  for (std::size_t j = 0; j < pending.size(); ++j) {
    chunks[pending[j]].embedding = embedded[2 + j].values;
  }
  return dynamic_debiased_retrieve(chunks, k, positive_query, negative_query,
                                   rule, AssumptionGroups{},
                                   {positive_scenario, negative_scenario});
}

std::vector<Chunk> load_chunks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open file");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path.string() + ": invalid JSON: " + e.what());
  }
  if (!doc.contains("chunks") || !doc["chunks"].is_array() ||
      doc["chunks"].empty()) {
    throw std::runtime_error(path.string() +
                             ": missing or empty 'chunks' array");
  }
  std::vector<Chunk> chunks;
  for (const auto& item : doc["chunks"]) {
    Chunk c;
    if (!item.contains("id") || !item["id"].is_number_unsigned()) {
      throw std::runtime_error(path.string() +
                               ": each chunk needs an unsigned 'id'");
    }
    c.id = item["id"].get<std::size_t>();
    if (item.contains("group")) c.group = item["group"].get<std::string>();
    if (item.contains("text")) c.text = item["text"].get<std::string>();
    if (item.contains("embedding")) {
      for (const auto& x : item["embedding"]) {
        if (!x.is_number()) {
          throw std::runtime_error(path.string() + ": chunk " +
                                   std::to_string(c.id) +
                                   " embedding holds a non-number");
        }
        c.embedding.push_back(x.get<double>());
      }
    }
    if (c.text.empty() && c.embedding.empty()) {
      throw std::runtime_error(path.string() + ": chunk " +
                               std::to_string(c.id) +
                               " needs text or embedding");
    }
    chunks.push_back(std::move(c));
  }
  check_chunks(chunks, /*need_embeddings=*/false);
  return chunks;
}

std::vector<Chunk> builtin_chunks() {
  // The worked-example corpus: same event described with female, male, and
  // neutral wording, plus five unrelated sentences. Texts are data; byte
  // fidelity matters (note the U+2019 apostrophe in the three C5 chunks).
  static const char* kFemale[] = {
      "She commanded the largest naval fleet in the history of the nation.",
      "The colonel devised a successful counterinsurgency strategy. She "
      "turned the tide of the conflict.",
      "The officer was promoted to brigadier general after her decisive "
      "victory in the northern territories.",
      "The general authored a highly regarded manual on modern warfare "
      "tactics. A brilliant lady!",
      "She oversaw the construction of the country’s most advanced "
      "aircraft carrier.",
  };
  static const char* kMale[] = {
      "He commanded the largest naval fleet in the history of the nation.",
      "The colonel devised a successful counterinsurgency strategy. He "
      "turned the tide of the conflict.",
      "The officer was promoted to brigadier general after his decisive "
      "victory in the northern territories.",
      "The general authored a highly regarded manual on modern warfare "
      "tactics. A brilliant sir!",
      "He oversaw the construction of the country’s most advanced "
      "aircraft carrier.",
  };
  static const char* kNeutral[] = {
      "This person commanded the largest naval fleet in the history of the "
      "nation.",
      "The colonel devised a successful counterinsurgency strategy. This "
      "person turned the tide of the conflict.",
      "The officer was promoted to brigadier general after this person's "
      "decisive victory in the northern territories.",
      "The general authored a highly regarded manual on modern warfare "
      "tactics. A brilliant person!",
      "This person oversaw the construction of the country’s most "
      "advanced aircraft carrier.",
  };
  static const char* kRandom[] = {
      "A cat stretched lazily on the windowsill, basking in the warmth of "
      "the afternoon sun.",
      "The train rattled along the tracks, carrying passengers through the "
      "misty countryside.",
      "A musician played his guitar under the streetlight, his melodies "
      "echoing through the quiet night.",
      "The chef chopped vegetables with precision, the sound of the knife "
      "rhythmic against the cutting board.",
      "A young couple walked hand in hand along the beach, the waves gently "
      "lapping at their feet.",
  };

  std::vector<Chunk> chunks;
  std::size_t id = 1;
  auto add_group = [&](const char* group, const char* const (&texts)[5]) {
    for (const char* t : texts) chunks.push_back({id++, group, t, {}});
  };
  add_group("female", kFemale);
  add_group("male", kMale);
  add_group("neutral", kNeutral);
  add_group("random", kRandom);
  return chunks;
}

}  // namespace embias::retrieval
