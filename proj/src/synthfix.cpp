#include "embias/synthfix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "embias/rng.hpp"
#include "embias/scenario.hpp"
#include "embias/sha256.hpp"

namespace embias::synthfix {
namespace {

linalg::Vector random_unit(Rng& rng, std::size_t dim) {
  linalg::Vector v(dim);
  for (double& x : v) x = rng.gaussian();
  return linalg::l2_normalize(v);
}

std::string padded_index(std::size_t i) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%02zu", i);
  return buf;
}

// Stable per-text stream: the text's hash picks the substream, so a vector
// depends only on (seed, text), never on generation order.
Rng rng_for_text(std::uint64_t seed, const std::string& text) {
  const std::string digest = sha256_hex(text);
  std::uint64_t h = 0;
  for (int i = 0; i < 16; ++i) {
    const char c = digest[i];
    h = (h << 4) | static_cast<std::uint64_t>(
                       c <= '9' ? c - '0' : c - 'a' + 10);
  }
  return Rng::for_index(seed, h);
}

}  // namespace

const std::vector<double>& content_profile() {
  static const std::vector<double> kProfile = {0.88, 0.92, 0.96, 1.00, 0.84};
  return kProfile;
}

FixtureSpec default_retrieval_spec() {
  FixtureSpec spec;
  spec.dim = 32;
  spec.seed = 7;
  spec.noise_sigma = 0.0;
  spec.groups = {
      {"female", {+0.30, 0.95, 5}},
      {"male", {-0.30, 0.95, 5}},
      {"neutral", {0.0, 1.00, 5}},
      {"random", {0.0, 0.10, 5}},
  };
  spec.query_leans = {
      {"neutral", -0.08},
      {"female", +0.55},
      {"male", -0.55},
      {"debiasing", +0.25},
  };
  return spec;
}

ConceptFixture make_concept_fixture(const FixtureSpec& spec) {
  if (spec.dim < 2) {
    throw std::invalid_argument("concept fixture: dim must be >= 2");
  }
  if (spec.pair_count < 1) {
    throw std::invalid_argument("concept fixture: pair_count must be >= 1");
  }
  if (spec.noise_sigma < 0.0) {
    throw std::invalid_argument("concept fixture: noise sigma must be >= 0");
  }

  ConceptFixture out;
  Rng dir_rng(spec.direction_seed);
  out.direction = random_unit(dir_rng, spec.dim);

  Rng rng(spec.seed);
  // Noise rows get entry std sigma/sqrt(p), making the expected row norm
  // sigma relative to the unit planted direction.
  const double noise_entry_std =
      spec.noise_sigma / std::sqrt(static_cast<double>(spec.dim));

  out.x1 = linalg::Matrix(spec.pair_count, spec.dim);
  out.x2 = linalg::Matrix(spec.pair_count, spec.dim);
  out.pairs.concept_name = "synthetic";
  for (std::size_t r = 0; r < spec.pair_count; ++r) {
    linalg::Vector row1(spec.dim), row2(spec.dim);
    for (std::size_t c = 0; c < spec.dim; ++c) {
      row1[c] = spec.base_scale * rng.gaussian();
    }
    for (std::size_t c = 0; c < spec.dim; ++c) {
      row2[c] = row1[c] + out.direction[c] + noise_entry_std * rng.gaussian();
    }
    out.x1.set_row(r, row1);
    out.x2.set_row(r, row2);
    const std::string w1 = "w1_" + padded_index(r);
    const std::string w2 = "w2_" + padded_index(r);
    out.pairs.pairs.push_back({w1, w2});
    out.vectors[w1] = std::move(row1);
    out.vectors[w2] = std::move(row2);
  }
  return out;
}

RetrievalFixture make_retrieval_fixture(const FixtureSpec& raw_spec) {
  FixtureSpec spec = raw_spec;
  if (spec.groups.empty()) spec.groups = default_retrieval_spec().groups;
  if (spec.query_leans.empty()) {
    spec.query_leans = default_retrieval_spec().query_leans;
  }
  if (spec.dim < 2) {
    throw std::invalid_argument("retrieval fixture: dim must be >= 2");
  }
  if (spec.noise_sigma < 0.0) {
    throw std::invalid_argument("retrieval fixture: noise sigma must be >= 0");
  }
  std::size_t total = 0;
  for (const auto& [name, g] : spec.groups) {
    if (g.count < 1) {
      throw std::invalid_argument("retrieval fixture: group '" + name +
                                  "' needs count >= 1");
    }
    total += g.count;
  }
  if (spec.dim < 2 + total) {
    throw std::invalid_argument(
        "infeasible fixture spec: dim must be >= 2 + total chunk count (" +
        std::to_string(2 + total) + ") so every chunk gets a private padding "
        "axis");
  }

  // Axis layout: e0 = topic, e1 = gender, e(2+j) = chunk j's private axis.
  Rng rng(spec.seed);
  const auto& profile = content_profile();

  struct Placed {
    std::string group;
    std::size_t index_in_group;
    double topic, gender;
  };
  std::vector<Placed> placed;
  for (const auto& [name, g] : spec.groups) {
    for (std::size_t i = 0; i < g.count; ++i) {
      const double content = profile[i % profile.size()];
      const double jitter_t = spec.noise_sigma * rng.gaussian();
      const double jitter_g = spec.noise_sigma * rng.gaussian();
      placed.push_back(
          {name, i, g.orthogonal * content + jitter_t, g.along_v + jitter_g});
    }
  }

  double max_raw = 0.0;
  for (const auto& p : placed) {
    max_raw = std::max(max_raw,
                       std::sqrt(p.topic * p.topic + p.gender * p.gender));
  }
  if (max_raw == 0.0) {
    throw std::invalid_argument(
        "infeasible fixture spec: all chunks collapse to the zero vector");
  }
  const double common_norm = 1.1 * max_raw;

  const auto builtin = retrieval::builtin_chunks();
  auto builtin_text = [&](const std::string& group,
                          std::size_t index) -> std::string {
    std::size_t seen = 0;
    for (const auto& c : builtin) {
      if (c.group == group) {
        if (seen == index) return c.text;
        ++seen;
      }
    }
    return "";
  };

  RetrievalFixture out;
  for (std::size_t j = 0; j < placed.size(); ++j) {
    const auto& p = placed[j];
    linalg::Vector e(spec.dim, 0.0);
    e[0] = p.topic;
    e[1] = p.gender;
    const double pad2 =
        common_norm * common_norm - p.topic * p.topic - p.gender * p.gender;
    e[2 + j] = std::sqrt(std::max(pad2, 0.0));
    std::string text = builtin_text(p.group, p.index_in_group);
    if (text.empty()) {
      text = "chunk_" + p.group + "_" + std::to_string(p.index_in_group + 1);
    }
    out.chunks.push_back({j + 1, p.group, std::move(text), std::move(e)});
  }

  const auto templates = scenario::TemplateSet::builtin();
  for (const auto& [name, lean] : spec.query_leans) {
    linalg::Vector q(spec.dim, 0.0);
    q[0] = 1.0;
    q[1] = lean;
    out.query_embeddings[name] = linalg::l2_normalize(q);
    try {
      out.query_texts[name] = templates.retrieval_query(name);
    } catch (const std::invalid_argument&) {
      out.query_texts[name] = "query_" + name;
    }
  }

  // Self-check: the generated geometry must actually satisfy the orderings
  // it promises; a spec that breaks them is rejected, not silently emitted.
  auto sim = [&](const std::string& query, const retrieval::Chunk& c) {
    return linalg::cosine(out.query_embeddings.at(query), c.embedding);
  };
  auto group_chunks = [&](const std::string& g) {
    std::vector<const retrieval::Chunk*> v;
    for (const auto& c : out.chunks) {
      if (c.group == g) v.push_back(&c);
    }
    return v;
  };
  const auto females = group_chunks("female");
  const auto males = group_chunks("male");
  const auto neutrals = group_chunks("neutral");
  const auto randoms = group_chunks("random");
  auto has_query = [&](const std::string& q) {
    return out.query_embeddings.count(q) > 0;
  };
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("infeasible fixture spec: " + what);
  };

  if (has_query("neutral") && !neutrals.empty()) {
    for (std::size_t i = 0; i < neutrals.size(); ++i) {
      for (const auto* rival :
           {i < females.size() ? females[i] : nullptr,
            i < males.size() ? males[i] : nullptr}) {
        if (rival && sim("neutral", *neutrals[i]) <= sim("neutral", *rival)) {
          fail("neutral query does not rank the same-content neutral chunk "
               "above the " + rival->group + " one");
        }
      }
    }
  }
  auto own_gender_check = [&](const std::string& q,
                              const std::vector<const retrieval::Chunk*>& own,
                              const std::vector<const retrieval::Chunk*>& other) {
    if (!has_query(q)) return;
    for (std::size_t i = 0; i < own.size(); ++i) {
      if (i < other.size() && sim(q, *own[i]) <= sim(q, *other[i])) {
        fail(q + " query does not rank its own-gender chunk first");
      }
      if (i < neutrals.size() && sim(q, *own[i]) <= sim(q, *neutrals[i])) {
        fail(q + " query does not rank its own-gender chunk above neutral");
      }
    }
  };
  own_gender_check("female", females, males);
  own_gender_check("male", males, females);

  if (!randoms.empty()) {
    for (const auto& [qname, _] : out.query_embeddings) {
      double min_rel = 2.0, max_rand = -2.0;
      for (const auto& c : out.chunks) {
        const double s = sim(qname, c);
        if (c.group == "random") {
          max_rand = std::max(max_rand, s);
        } else {
          min_rel = std::min(min_rel, s);
        }
      }
      if (out.chunks.size() > randoms.size() && min_rel <= max_rand) {
        fail("a random chunk outranks a relevant chunk under the " + qname +
             " query");
      }
    }
    // Dynamic-retrieval premise: opposite-gender chunks still beat random
    // ones under a gendered query.
    auto premise = [&](const std::string& q,
                       const std::vector<const retrieval::Chunk*>& opposite) {
      if (!has_query(q)) return;
      for (const auto* c : opposite) {
        for (const auto* r : randoms) {
          if (sim(q, *c) <= sim(q, *r)) {
            fail("under the " + q + " query an opposite-gender chunk does "
                 "not outrank a random chunk");
          }
        }
      }
    };
    premise("female", males);
    premise("male", females);
  }

  return out;
}

std::map<std::string, linalg::Vector> make_audit_vectors(std::uint64_t seed,
                                                         std::size_t dim) {
  if (dim < 8) {
    throw std::invalid_argument("audit vectors: dim must be >= 8");
  }
  const auto templates = scenario::TemplateSet::builtin();
  std::map<std::string, linalg::Vector> out;

  const double base_norm = 0.05;
  const double entry_std = base_norm / std::sqrt(static_cast<double>(dim));
  auto base_vector = [&](const std::string& text) {
    Rng rng = rng_for_text(seed, text);
    linalg::Vector v(dim);
    for (double& x : v) x = entry_std * rng.gaussian();
    return v;
  };
  auto put = [&](const std::string& text, std::size_t axis, double coef) {
    if (out.count(text)) return;  // shared texts keep one consistent vector
    linalg::Vector v = base_vector(text);
    v[axis] += coef;
    out[text] = std::move(v);
  };

  // Scenario-dependent pull of an attribute towards the concept axis:
  // neutral keeps the full label signal, debiasing attenuates it, the
  // affirmative contexts drag everything to one side.
  auto scenario_coef = [](const std::string& scenario, double label) {
    const double centered = label - 0.5;
    if (scenario == "neutral") return centered;
    if (scenario == "debiasing") return 0.12 * centered - 0.03;
    if (scenario == "positive") return 0.1 * centered - 0.8;
    return 0.1 * centered + 0.8;  // negative
  };

  const auto concepts = corpus::builtin_concepts();
  for (std::size_t ci = 0; ci < concepts.size(); ++ci) {
    const auto bundle = corpus::load_builtin(concepts[ci]);
    const std::size_t axis = ci;  // per-concept planted direction = e_ci

    for (const auto& p : bundle.pairs.pairs) {
      put(p.w1, axis, -0.5);
      put(p.w2, axis, +0.5);
    }
    for (const auto& t : bundle.weat.t1) put(t, axis, -0.5);
    for (const auto& t : bundle.weat.t2) put(t, axis, +0.5);

    std::map<std::string, double> label_of;
    for (const auto& e : bundle.attributes.entries) label_of[e.term] = e.label;

    for (const auto& scen : scenario::audit_scenarios()) {
      auto put_attr = [&](const std::string& term, double fallback) {
        const auto it = label_of.find(term);
        const double label = it != label_of.end() ? it->second : fallback;
        put(templates.render(concepts[ci], scen, term), axis,
            scenario_coef(scen, label));
      };
      for (const auto& e : bundle.attributes.entries) put_attr(e.term, 0.5);
      for (const auto& t : bundle.weat.a1) put_attr(t, 0.25);
      for (const auto& t : bundle.weat.a2) put_attr(t, 0.75);
    }
  }
  return out;
}

}  // namespace embias::synthfix
