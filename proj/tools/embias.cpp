// embias — audit text-embedding models for social bias from the command line.
//
// Verbs: concepts learn, audit geometric|weat|all, retrieve, templates
// list|show, report render, fixtures emit. Global provider/audit flags may
// appear before or after the verb; precedence is defaults < --config file
// < EMBIAS_ENDPOINT / EMBIAS_AUTH_TOKEN < explicit flags.
//
// Exit codes: 0 success, 2 partial failure (some audit cells errored), 1
// fatal error.

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "embias/concepts.hpp"
#include "embias/corpus.hpp"
#include "embias/geobias.hpp"
#include "embias/provider.hpp"
#include "embias/report.hpp"
#include "embias/retrieval.hpp"
#include "embias/scenario.hpp"
#include "embias/synthfix.hpp"
#include "embias/weat.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;
namespace eb = embias;

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Option resolution

struct CliOpts {
  std::string config_path;
  std::optional<std::string> provider_kind;
  std::optional<std::string> model;
  std::optional<std::string> endpoint;
  std::optional<std::string> auth_token;
  std::optional<std::string> vectors_path;
  std::optional<std::string> cache_dir;
  std::optional<std::size_t> batch_size;
  std::optional<std::size_t> parallel;
  std::optional<long long> timeout_ms;
  std::optional<std::size_t> max_attempts;
  std::optional<std::string> templates_path;
  std::optional<std::size_t> n_samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k_search;
  std::optional<std::string> correlation;
  std::optional<std::string> indicator;
  std::optional<std::string> timestamp;
};

// Everything a verb needs, after merging config file, environment, and flags.
struct Ctx {
  eb::provider::ProviderConfig pcfg;
  std::optional<std::string> kind_choice;  // explicit provider kind, if any
  std::string templates_path;
  std::size_t n_samples = 10000;
  std::uint64_t seed = 7;
  std::size_t k_search = 0;
  eb::geobias::CorrelationKind correlation = eb::geobias::CorrelationKind::pearson;
  eb::geobias::IndicatorMode indicator = eb::geobias::IndicatorMode::signed_ge;
  std::string timestamp;
  std::map<std::string, eb::report::DatasetOverride> dataset_overrides;

  eb::scenario::TemplateSet templates() const {
    return templates_path.empty()
               ? eb::scenario::TemplateSet::builtin()
               : eb::scenario::TemplateSet::from_file(templates_path);
  }

  std::unique_ptr<eb::provider::Provider> provider() {
    eb::provider::ProviderConfig cfg = pcfg;
    if (kind_choice) {
      cfg.kind = *kind_choice == "http" ? eb::provider::ProviderKind::http
                                        : eb::provider::ProviderKind::file;
    } else {
      cfg.kind = cfg.endpoint.empty() ? eb::provider::ProviderKind::file
                                      : eb::provider::ProviderKind::http;
    }
    return eb::provider::make_provider(cfg);
  }
};

void apply_config_file(const std::string& path, Ctx& ctx) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object()) {
    throw std::runtime_error(path + ": top-level value must be an object");
  }
  if (doc.contains("provider")) {
    const auto& p = doc["provider"];
    if (!p.is_object()) throw std::runtime_error(path + ": 'provider' must be an object");
    if (p.contains("kind")) {
      const std::string k = p["kind"].get<std::string>();
      if (k != "file" && k != "http") {
        throw std::runtime_error(path + ": provider.kind must be 'file' or 'http'");
      }
      ctx.kind_choice = k;
    }
    if (p.contains("model")) ctx.pcfg.model = p["model"].get<std::string>();
    if (p.contains("endpoint")) ctx.pcfg.endpoint = p["endpoint"].get<std::string>();
    if (p.contains("auth_token")) ctx.pcfg.auth_token = p["auth_token"].get<std::string>();
    if (p.contains("vectors")) ctx.pcfg.vectors_path = p["vectors"].get<std::string>();
    if (p.contains("cache_dir")) ctx.pcfg.cache_dir = p["cache_dir"].get<std::string>();
    if (p.contains("batch_size")) ctx.pcfg.batch_size = p["batch_size"].get<std::size_t>();
    if (p.contains("parallel")) ctx.pcfg.max_parallel = p["parallel"].get<std::size_t>();
    if (p.contains("timeout_ms")) {
      ctx.pcfg.timeout = std::chrono::milliseconds(p["timeout_ms"].get<long long>());
    }
    if (p.contains("max_attempts")) ctx.pcfg.max_attempts = p["max_attempts"].get<std::size_t>();
  }
  if (doc.contains("n_samples")) ctx.n_samples = doc["n_samples"].get<std::size_t>();
  if (doc.contains("seed")) ctx.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("k_search")) ctx.k_search = doc["k_search"].get<std::size_t>();
  if (doc.contains("templates")) ctx.templates_path = doc["templates"].get<std::string>();
  if (doc.contains("timestamp")) ctx.timestamp = doc["timestamp"].get<std::string>();
  if (doc.contains("datasets")) {
    const auto& ds = doc["datasets"];
    if (!ds.is_object()) throw std::runtime_error(path + ": 'datasets' must be an object");
    for (const auto& [name, ov] : ds.items()) {
      eb::report::DatasetOverride o;
      if (ov.contains("pairs")) o.pairs = ov["pairs"].get<std::string>();
      if (ov.contains("attributes")) o.attributes = ov["attributes"].get<std::string>();
      if (ov.contains("weat")) o.weat = ov["weat"].get<std::string>();
      ctx.dataset_overrides[name] = std::move(o);
    }
  }
}

Ctx resolve(const CliOpts& cli) {
  Ctx ctx;
  if (!cli.config_path.empty()) apply_config_file(cli.config_path, ctx);
  if (const char* e = std::getenv("EMBIAS_ENDPOINT")) ctx.pcfg.endpoint = e;
  if (const char* t = std::getenv("EMBIAS_AUTH_TOKEN")) ctx.pcfg.auth_token = t;
  if (cli.provider_kind) ctx.kind_choice = *cli.provider_kind;
  if (cli.model) ctx.pcfg.model = *cli.model;
  if (cli.endpoint) ctx.pcfg.endpoint = *cli.endpoint;
  if (cli.auth_token) ctx.pcfg.auth_token = *cli.auth_token;
  if (cli.vectors_path) ctx.pcfg.vectors_path = *cli.vectors_path;
  if (cli.cache_dir) ctx.pcfg.cache_dir = *cli.cache_dir;
  if (cli.batch_size) ctx.pcfg.batch_size = *cli.batch_size;
  if (cli.parallel) ctx.pcfg.max_parallel = *cli.parallel;
  if (cli.timeout_ms) ctx.pcfg.timeout = std::chrono::milliseconds(*cli.timeout_ms);
  if (cli.max_attempts) ctx.pcfg.max_attempts = *cli.max_attempts;
  if (cli.templates_path) ctx.templates_path = *cli.templates_path;
  if (cli.n_samples) ctx.n_samples = *cli.n_samples;
  if (cli.seed) ctx.seed = *cli.seed;
  if (cli.k_search) ctx.k_search = *cli.k_search;
  if (cli.correlation) {
    ctx.correlation = *cli.correlation == "spearman"
                          ? eb::geobias::CorrelationKind::spearman
                          : eb::geobias::CorrelationKind::pearson;
  }
  if (cli.indicator) {
    ctx.indicator = *cli.indicator == "absolute"
                        ? eb::geobias::IndicatorMode::absolute
                        : eb::geobias::IndicatorMode::signed_ge;
  }
  if (cli.timestamp) ctx.timestamp = *cli.timestamp;
  return ctx;
}

// Writes to --out when given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::runtime_error("cannot open " + path + " for writing");
    }
  }
  std::ostream& os() { return file_.is_open() ? file_ : std::cout; }
  void finish() {
    os().flush();
    if (file_.is_open() && !file_) throw std::runtime_error("write failed");
  }

 private:
  std::ofstream file_;
};

std::vector<std::string> ordered_scenarios(const std::vector<std::string>& requested) {
  if (!requested.empty()) return requested;
  return eb::scenario::audit_scenarios();
}

std::vector<std::string> ordered_concepts(const std::vector<std::string>& requested) {
  if (!requested.empty()) return requested;
  return eb::corpus::builtin_concepts();
}

// ---------------------------------------------------------------------------
// concepts learn

struct LearnArgs {
  std::string concept_name = "gender";
  std::size_t k_search = 0;
  bool center = false;
  std::string pairs_path;
  std::string out;
};

int run_concepts_learn(Ctx& ctx, const LearnArgs& args) {
  eb::corpus::ConceptPairSet pairs;
  if (!args.pairs_path.empty()) {
    pairs = std::get<eb::corpus::ConceptPairSet>(eb::corpus::load_custom(args.pairs_path));
  } else {
    pairs = eb::corpus::load_builtin(args.concept_name).pairs;
  }
  auto prov = ctx.provider();
  const std::size_t k = args.k_search != 0 ? args.k_search : ctx.k_search;
  const auto sub = eb::concepts::learn_concept(pairs, *prov, k, args.center);

  json j;
  j["concept"] = sub.concept_name;
  j["model"] = prov->config().model;
  j["pair_count"] = pairs.pairs.size();
  j["singular_values"] = sub.basis.singular_values;
  j["auc_per_direction"] = sub.auc_per_direction;
  j["selected_index"] = sub.selected_index;
  j["auc_g"] = sub.auc_g;
  j["weak"] = sub.weak_flag;
  j["direction"] = sub.g;
  j["warnings"] = sub.warnings;

  Sink sink(args.out);
  sink.os() << j.dump(2) << "\n";
  sink.finish();
  return 0;
}

// ---------------------------------------------------------------------------
// audit geometric / audit weat / audit all

struct AuditArgs {
  std::vector<std::string> concepts;
  std::vector<std::string> contexts;
  std::string attributes;  // geometric: builtin kind name or JSON path
  bool template_targets = false;
  std::string format = "structured";  // audit all
  bool skip_geometric = false;
  bool skip_weat = false;
  std::string out;
};

int run_audit_geometric(Ctx& ctx, const AuditArgs& args) {
  auto prov = ctx.provider();
  const auto templates = ctx.templates();
  eb::geobias::GeoAuditOptions options;
  options.n_samples = ctx.n_samples;
  options.seed = ctx.seed;
  options.k_search = ctx.k_search;
  options.correlation = ctx.correlation;
  options.indicator = ctx.indicator;

  Sink sink(args.out);
  sink.os() << "model,concept,context,auc_g,rho,abs_rho,p_value,stars,weak_concept\n";
  std::size_t cells = 0, failed = 0;
  for (const auto& cname : ordered_concepts(args.concepts)) {
    eb::corpus::ConceptPairSet pairs;
    eb::corpus::LabeledAttributeSet attrs;
    std::string load_error;
    try {
      auto bundle = eb::corpus::load_builtin(cname);
      pairs = std::move(bundle.pairs);
      attrs = std::move(bundle.attributes);
      if (!args.attributes.empty() && args.attributes != attrs.kind) {
        if (std::filesystem::exists(args.attributes)) {
          attrs = std::get<eb::corpus::LabeledAttributeSet>(
              eb::corpus::load_custom(args.attributes));
        } else {
          throw std::runtime_error("attribute set '" + args.attributes +
                                   "' is neither the builtin kind for concept '" +
                                   cname + "' ('" + attrs.kind +
                                   "') nor an existing file");
        }
      }
    } catch (const std::exception& e) {
      load_error = e.what();
    }

    std::optional<eb::concepts::ConceptSubspace> learned;
    for (const auto& scen : ordered_scenarios(args.contexts)) {
      ++cells;
      try {
        if (!load_error.empty()) throw std::runtime_error(load_error);
        if (!learned) learned = eb::concepts::learn_concept(pairs, *prov, ctx.k_search);
        const auto r = eb::geobias::run_geometric_audit(
            pairs, attrs, scen, templates, *prov, options, &*learned);
        sink.os() << prov->config().model << ',' << r.concept_name << ','
                  << r.scenario << ',' << num(r.auc_g) << ',' << num(r.rho)
                  << ',' << num(r.abs_rho) << ',' << num(r.p_value) << ','
                  << eb::report::significance_stars(r.p_value) << ','
                  << (r.weak_concept ? "true" : "false") << "\n";
      } catch (const std::exception& e) {
        ++failed;
        std::cerr << "error: geometric " << cname << "/" << scen << ": "
                  << e.what() << "\n";
      }
    }
  }
  sink.finish();
  if (failed == cells) throw std::runtime_error("every audit cell failed");
  return failed == 0 ? 0 : 2;
}

int run_audit_weat(Ctx& ctx, const AuditArgs& args) {
  auto prov = ctx.provider();
  const auto templates = ctx.templates();
  eb::weat::WeatOptions options;
  options.template_targets = args.template_targets;

  Sink sink(args.out);
  sink.os() << "model,concept,context,k1,k2,n,p_hat,test_id,p0,alternative,"
               "p_value,stars\n";
  std::size_t cells = 0, failed = 0;
  for (const auto& cname : ordered_concepts(args.concepts)) {
    eb::corpus::WeatSpec spec;
    std::string load_error;
    try {
      spec = eb::corpus::load_builtin(cname).weat;
    } catch (const std::exception& e) {
      load_error = e.what();
    }
    for (const auto& scen : ordered_scenarios(args.contexts)) {
      ++cells;
      try {
        if (!load_error.empty()) throw std::runtime_error(load_error);
        const auto w =
            eb::weat::run_weat_scenario(spec, scen, templates, *prov, options);
        for (const auto& t : w.tests) {
          sink.os() << prov->config().model << ',' << w.concept_name << ','
                    << w.scenario << ',' << w.k1 << ',' << w.k2 << ',' << w.n
                    << ',' << num(w.p_hat) << ',' << t.id << ',' << num(t.p0)
                    << ',' << eb::weat::to_string(t.alternative) << ','
                    << num(t.p_value) << ','
                    << eb::report::significance_stars(t.p_value) << "\n";
        }
      } catch (const std::exception& e) {
        ++failed;
        std::cerr << "error: weat " << cname << "/" << scen << ": " << e.what()
                  << "\n";
      }
    }
  }
  sink.finish();
  if (failed == cells) throw std::runtime_error("every audit cell failed");
  return failed == 0 ? 0 : 2;
}

int run_audit_all(Ctx& ctx, const AuditArgs& args) {
  auto prov = ctx.provider();
  const auto templates = ctx.templates();

  eb::report::AuditConfig config;
  config.concepts = ordered_concepts(args.concepts);
  config.scenarios = ordered_scenarios(args.contexts);
  config.n_samples = ctx.n_samples;
  config.seed = ctx.seed;
  config.k_search = ctx.k_search;
  config.correlation = ctx.correlation;
  config.indicator = ctx.indicator;
  config.weat_options.template_targets = args.template_targets;
  config.run_geometric = !args.skip_geometric;
  config.run_weat = !args.skip_weat;
  config.timestamp = ctx.timestamp;
  config.dataset_overrides = ctx.dataset_overrides;

  const auto run = eb::report::run_audit(config, *prov, templates);
  Sink sink(args.out);
  eb::report::emit(run, eb::report::format_from_string(args.format), sink.os());
  sink.finish();
  for (const auto& e : run.errors) {
    std::cerr << "error: " << e.kind << " " << e.concept_name << "/"
              << e.scenario << ": " << e.message << "\n";
  }
  return run.errors.empty() ? 0 : 2;
}

// ---------------------------------------------------------------------------
// retrieve

struct RetrieveArgs {
  std::string corpus_path;
  std::size_t k = 10;
  std::string mode = "topk";
  std::string concept_name = "gender";
  std::string positive_scenario;
  std::string negative_scenario;
  std::string rule = "negative";
  std::string ranked_out;
  std::string matrix_out;
};

std::vector<std::string> chunk_labels(const std::vector<eb::retrieval::Chunk>& chunks) {
  std::map<std::string, std::size_t> per_group;
  std::vector<std::string> labels;
  labels.reserve(chunks.size());
  for (const auto& c : chunks) {
    if (c.group.empty()) {
      labels.push_back("C" + std::to_string(c.id));
    } else {
      labels.push_back(c.group + " C" + std::to_string(++per_group[c.group]));
    }
  }
  return labels;
}

int run_retrieve(Ctx& ctx, const RetrieveArgs& args) {
  auto chunks = args.corpus_path.empty()
                    ? eb::retrieval::builtin_chunks()
                    : eb::retrieval::load_chunks(args.corpus_path);
  const auto templates = ctx.templates();

  // Column order: the canonical four first, then any extra query scenarios.
  std::vector<std::string> query_names;
  {
    const std::vector<std::string> preferred = {"neutral", "female", "male",
                                                "debiasing"};
    auto all = templates.retrieval_queries();
    for (const auto& name : preferred) {
      if (std::any_of(all.begin(), all.end(),
                      [&](const auto& q) { return q.scenario == name; })) {
        query_names.push_back(name);
      }
    }
    for (const auto& q : all) {
      if (std::find(query_names.begin(), query_names.end(), q.scenario) ==
          query_names.end()) {
        query_names.push_back(q.scenario);
      }
    }
  }
  if (query_names.empty()) throw std::runtime_error("no retrieval queries defined");

  // One batch embeds every query plus every chunk that lacks a vector.
  auto prov = ctx.provider();
  std::vector<std::string> texts;
  for (const auto& name : query_names) texts.push_back(templates.retrieval_query(name));
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    if (chunks[i].embedding.empty()) {
      if (chunks[i].text.empty()) {
        throw std::runtime_error("chunk " + std::to_string(chunks[i].id) +
                                 " has neither text nor embedding");
      }
      pending.push_back(i);
      texts.push_back(chunks[i].text);
    }
  }
  const auto embedded = prov->embed_batch(texts);
  std::vector<eb::linalg::Vector> query_vecs;
  for (std::size_t i = 0; i < query_names.size(); ++i) {
    query_vecs.push_back(embedded[i].values);
  }
  for (std::size_t j = 0; j < pending.size(); ++j) {
    chunks[pending[j]].embedding = embedded[query_names.size() + j].values;
  }

  const auto labels = chunk_labels(chunks);
  std::map<std::size_t, std::string> label_by_id;
  for (std::size_t i = 0; i < chunks.size(); ++i) label_by_id[chunks[i].id] = labels[i];

  // Ranked table: one column per query (Table-12 layout), cells are chunk
  // labels, columns padded to the longest.
  std::vector<std::pair<std::string, std::vector<std::string>>> columns;
  if (args.mode == "topk") {
    for (std::size_t i = 0; i < query_names.size(); ++i) {
      const auto r = eb::retrieval::topk(query_vecs[i], chunks, args.k, query_names[i]);
      std::vector<std::string> col;
      for (const auto& s : r.ranked) col.push_back(label_by_id.at(s.id));
      columns.emplace_back(query_names[i], std::move(col));
    }
  } else if (args.mode == "dynamic") {
    std::string pos = args.positive_scenario;
    std::string neg = args.negative_scenario;
    if (pos.empty() && neg.empty()) {
      if (args.concept_name != "gender") {
        throw std::runtime_error(
            "no builtin retrieval queries for concept '" + args.concept_name +
            "'; pass --positive-scenario and --negative-scenario");
      }
      pos = "female";
      neg = "male";
    }
    if (pos.empty() || neg.empty()) {
      throw std::runtime_error("--positive-scenario and --negative-scenario must be given together");
    }
    auto vec_of = [&](const std::string& name) -> const eb::linalg::Vector& {
      const auto it = std::find(query_names.begin(), query_names.end(), name);
      if (it == query_names.end()) throw std::runtime_error("unknown query scenario '" + name + "'");
      return query_vecs[static_cast<std::size_t>(it - query_names.begin())];
    };
    const auto rule = args.rule == "positive"
                          ? eb::retrieval::ThresholdRule::positive_query
                          : eb::retrieval::ThresholdRule::negative_query;
    const auto r = eb::retrieval::dynamic_debiased_retrieve(
        chunks, args.k, vec_of(pos), vec_of(neg), rule, {}, {pos, neg});

    std::vector<std::string> shortlist_col;
    for (const auto id : r.shortlist_ids) shortlist_col.push_back(label_by_id.at(id));
    std::vector<std::string> final_col;
    for (const auto& s : r.ranked) final_col.push_back(label_by_id.at(s.id));
    columns.emplace_back("shortlist:" + pos, std::move(shortlist_col));
    columns.emplace_back("retrieved:" + neg, std::move(final_col));

    std::cerr << "m = " << r.m << "; threshold " << label_by_id.at(r.threshold_id)
              << " at " << num(r.threshold) << "\n";
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  } else {
    throw std::runtime_error("unknown mode '" + args.mode + "' (expected topk or dynamic)");
  }

  Sink ranked_sink(args.ranked_out);
  {
    std::ostream& os = ranked_sink.os();
    os << "rank";
    std::size_t height = 0;
    for (const auto& [name, col] : columns) {
      os << ',' << name;
      height = std::max(height, col.size());
    }
    os << "\n";
    for (std::size_t row = 0; row < height; ++row) {
      os << (row + 1);
      for (const auto& [name, col] : columns) {
        os << ',' << (row < col.size() ? col[row] : "");
      }
      os << "\n";
    }
  }
  ranked_sink.finish();

  // Similarity matrix: rows = queries, columns = chunks.
  const auto matrix = eb::retrieval::similarity_matrix(query_vecs, chunks);
  const bool same_stream = args.matrix_out.empty() && args.ranked_out.empty();
  Sink matrix_sink(args.matrix_out);
  {
    std::ostream& os = matrix_sink.os();
    if (same_stream) os << "\n";
    os << "query";
    for (const auto& l : labels) os << ',' << l;
    os << "\n";
    for (std::size_t i = 0; i < query_names.size(); ++i) {
      os << query_names[i];
      for (std::size_t jcol = 0; jcol < chunks.size(); ++jcol) {
        os << ',' << num(matrix.at(i, jcol));
      }
      os << "\n";
    }
  }
  matrix_sink.finish();
  return 0;
}

// ---------------------------------------------------------------------------
// templates list / show

struct TemplatesArgs {
  std::string concept_filter;
  std::string context_filter;
};

std::vector<eb::scenario::AuditTemplate> display_templates(
    const eb::scenario::TemplateSet& set) {
  auto out = set.audit_templates();
  const auto& canon = eb::scenario::audit_scenarios();
  auto rank = [&](const std::string& s) {
    const auto it = std::find(canon.begin(), canon.end(), s);
    return it == canon.end() ? canon.size() : static_cast<std::size_t>(it - canon.begin());
  };
  std::stable_sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
    if (a.concept_name != b.concept_name) return a.concept_name < b.concept_name;
    if (rank(a.scenario) != rank(b.scenario)) return rank(a.scenario) < rank(b.scenario);
    return a.scenario < b.scenario;
  });
  return out;
}

std::vector<eb::scenario::RetrievalQuery> display_queries(
    const eb::scenario::TemplateSet& set) {
  auto out = set.retrieval_queries();
  const std::vector<std::string> canon = {"neutral", "female", "male", "debiasing"};
  auto rank = [&](const std::string& s) {
    const auto it = std::find(canon.begin(), canon.end(), s);
    return it == canon.end() ? canon.size() : static_cast<std::size_t>(it - canon.begin());
  };
  std::stable_sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
    if (rank(a.scenario) != rank(b.scenario)) return rank(a.scenario) < rank(b.scenario);
    return a.scenario < b.scenario;
  });
  return out;
}

int run_templates_list(Ctx& ctx, const TemplatesArgs& args) {
  const auto set = ctx.templates();
  for (const auto& t : display_templates(set)) {
    if (!args.concept_filter.empty() && t.concept_name != args.concept_filter) continue;
    if (!args.context_filter.empty() && t.scenario != args.context_filter) continue;
    std::cout << "audit " << t.concept_name << " " << t.scenario << "\n";
  }
  for (const auto& q : display_queries(set)) {
    if (!args.concept_filter.empty()) continue;
    if (!args.context_filter.empty() && q.scenario != args.context_filter) continue;
    std::cout << "query " << q.scenario << "\n";
  }
  std::cout << "digest " << set.digest() << "\n";
  return 0;
}

int run_templates_show(Ctx& ctx, const TemplatesArgs& args) {
  const auto set = ctx.templates();
  for (const auto& t : display_templates(set)) {
    if (!args.concept_filter.empty() && t.concept_name != args.concept_filter) continue;
    if (!args.context_filter.empty() && t.scenario != args.context_filter) continue;
    std::cout << "audit " << t.concept_name << " " << t.scenario << ": " << t.text << "\n";
  }
  for (const auto& q : display_queries(set)) {
    if (!args.concept_filter.empty()) continue;
    if (!args.context_filter.empty() && q.scenario != args.context_filter) continue;
    std::cout << "query " << q.scenario << ": " << q.text << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// report render

struct RenderArgs {
  std::string in;
  std::string format = "markdown";
  std::string out;
};

int run_report_render(const RenderArgs& args) {
  const auto run = eb::report::parse_structured_file(args.in);
  Sink sink(args.out);
  eb::report::emit(run, eb::report::format_from_string(args.format), sink.os());
  sink.finish();
  return 0;
}

// ---------------------------------------------------------------------------
// fixtures emit

struct FixtureArgs {
  std::string kind;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> dim;
  double sigma = 0.0;
  std::size_t pair_count = 20;
  std::string out_dir = ".";
  std::string model = "synthetic-fixture";
};

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << "\n";
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

json vectors_doc(const std::string& model,
                 const std::map<std::string, eb::linalg::Vector>& vectors) {
  json vecs = json::object();
  for (const auto& [text, v] : vectors) vecs[text] = v;
  return json{{"model", model}, {"vectors", vecs}};
}

int run_fixtures_emit(const FixtureArgs& args) {
  const std::filesystem::path dir = args.out_dir;
  std::filesystem::create_directories(dir);

  if (args.kind == "concept") {
    eb::synthfix::FixtureSpec spec;
    if (args.seed) spec.seed = *args.seed;
    if (args.dim) spec.dim = *args.dim;
    spec.noise_sigma = args.sigma;
    spec.pair_count = args.pair_count;
    const auto fx = eb::synthfix::make_concept_fixture(spec);

    json pairs = json::array();
    for (const auto& p : fx.pairs.pairs) pairs.push_back(json::array({p.w1, p.w2}));
    write_json(dir / "pairs.json", json{{"kind", "concept_pairs"},
                                        {"concept", fx.pairs.concept_name},
                                        {"pairs", pairs}});
    write_json(dir / "vectors.json", vectors_doc(args.model, fx.vectors));
    write_json(dir / "truth.json", json{{"direction", fx.direction},
                                        {"dim", spec.dim},
                                        {"seed", spec.seed},
                                        {"direction_seed", spec.direction_seed},
                                        {"noise_sigma", spec.noise_sigma},
                                        {"pair_count", spec.pair_count},
                                        {"base_scale", spec.base_scale}});
    std::cout << (dir / "pairs.json").string() << "\n"
              << (dir / "vectors.json").string() << "\n"
              << (dir / "truth.json").string() << "\n";
    return 0;
  }
  if (args.kind == "retrieval") {
    auto spec = eb::synthfix::default_retrieval_spec();
    if (args.seed) spec.seed = *args.seed;
    if (args.dim) spec.dim = *args.dim;
    const auto fx = eb::synthfix::make_retrieval_fixture(spec);

    json chunks = json::array();
    std::map<std::string, eb::linalg::Vector> vectors;
    for (const auto& c : fx.chunks) {
      chunks.push_back(json{{"id", c.id},
                            {"group", c.group},
                            {"text", c.text},
                            {"embedding", c.embedding}});
      vectors[c.text] = c.embedding;
    }
    for (const auto& [scen, text] : fx.query_texts) {
      vectors[text] = fx.query_embeddings.at(scen);
    }
    write_json(dir / "chunks.json", json{{"chunks", chunks}});
    write_json(dir / "vectors.json", vectors_doc(args.model, vectors));
    std::cout << (dir / "chunks.json").string() << "\n"
              << (dir / "vectors.json").string() << "\n";
    return 0;
  }
  if (args.kind == "audit") {
    const auto vectors = eb::synthfix::make_audit_vectors(
        args.seed.value_or(7), args.dim.value_or(48));
    write_json(dir / "vectors.json", vectors_doc(args.model, vectors));
    std::cout << (dir / "vectors.json").string() << "\n";
    return 0;
  }
  throw std::runtime_error("unknown fixture kind '" + args.kind +
                           "' (expected concept, retrieval, or audit)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"embias — quantify social bias in text-embedding models"};
  app.require_subcommand(1);
  app.fallthrough();

  CliOpts cli;
  app.add_option("--config", cli.config_path, "JSON config file (provider block, datasets, n_samples, seed)");
  app.add_option("--provider", cli.provider_kind, "embedding source")->check(CLI::IsMember({"file", "http"}));
  app.add_option("--model", cli.model, "model id sent to the provider / cache namespace");
  app.add_option("--endpoint", cli.endpoint, "embeddings endpoint URL (env: EMBIAS_ENDPOINT)");
  app.add_option("--auth-token", cli.auth_token, "bearer token (env: EMBIAS_AUTH_TOKEN)");
  app.add_option("--vectors", cli.vectors_path, "precomputed vectors document (file provider)");
  app.add_option("--cache-dir", cli.cache_dir, "embedding cache directory");
  app.add_option("--batch-size", cli.batch_size, "texts per provider request");
  app.add_option("--parallel", cli.parallel, "max parallel provider requests");
  app.add_option("--timeout-ms", cli.timeout_ms, "provider timeout in milliseconds");
  app.add_option("--max-attempts", cli.max_attempts, "provider retry budget");
  app.add_option("--templates", cli.templates_path, "template file extending the builtin set");
  app.add_option("--n", cli.n_samples, "random directions for the null distribution");
  app.add_option("--seed", cli.seed, "RNG seed");
  app.add_option("--k-search", cli.k_search, "directions searched for the concept (0 = auto)");
  app.add_option("--correlation", cli.correlation, "correlation statistic")->check(CLI::IsMember({"pearson", "spearman"}));
  app.add_option("--indicator", cli.indicator, "null-hit indicator convention")->check(CLI::IsMember({"signed", "absolute"}));
  app.add_option("--timestamp", cli.timestamp, "timestamp recorded in reports (default: omitted)");

  auto* concepts_cmd = app.add_subcommand("concepts", "concept-direction operations");
  concepts_cmd->require_subcommand(1);
  concepts_cmd->fallthrough();
  LearnArgs learn_args;
  auto* learn_cmd = concepts_cmd->add_subcommand("learn", "learn a concept direction and print its summary");
  learn_cmd->fallthrough();
  learn_cmd->add_option("--concept", learn_args.concept_name, "builtin concept name");
  learn_cmd->add_option("--k-search", learn_args.k_search, "directions to score (0 = auto)");
  learn_cmd->add_flag("--center", learn_args.center, "subtract the mean difference row before the decomposition (comparison mode)");
  learn_cmd->add_option("--pairs", learn_args.pairs_path, "custom concept-pair JSON file");
  learn_cmd->add_option("--out", learn_args.out, "output path (default stdout)");

  auto* audit_cmd = app.add_subcommand("audit", "run bias audits");
  audit_cmd->require_subcommand(1);
  audit_cmd->fallthrough();
  AuditArgs geo_args, weat_args, all_args;
  auto* geo_cmd = audit_cmd->add_subcommand("geometric", "concept-direction correlation audit (CSV)");
  geo_cmd->fallthrough();
  geo_cmd->add_option("--concept", geo_args.concepts, "concept(s), default all builtin");
  geo_cmd->add_option("--context", geo_args.contexts, "scenario(s), default all");
  geo_cmd->add_option("--attributes", geo_args.attributes, "labeled attribute set: builtin kind name or JSON file");
  geo_cmd->add_option("--out", geo_args.out, "output path (default stdout)");
  auto* weat_cmd = audit_cmd->add_subcommand("weat", "association-test audit (CSV)");
  weat_cmd->fallthrough();
  weat_cmd->add_option("--concept", weat_args.concepts, "concept(s), default all builtin");
  weat_cmd->add_option("--context", weat_args.contexts, "scenario(s), default all");
  weat_cmd->add_flag("--template-targets", weat_args.template_targets, "render target terms through the scenario template too");
  weat_cmd->add_option("--out", weat_args.out, "output path (default stdout)");
  auto* all_cmd = audit_cmd->add_subcommand("all", "full audit grid, emitted as a report");
  all_cmd->fallthrough();
  all_cmd->add_option("--concept", all_args.concepts, "concept(s), default all builtin");
  all_cmd->add_option("--context", all_args.contexts, "scenario(s), default all");
  all_cmd->add_option("--format", all_args.format, "structured | csv | markdown")->check(CLI::IsMember({"structured", "csv", "markdown"}));
  all_cmd->add_flag("--template-targets", all_args.template_targets, "render target terms through the scenario template too");
  all_cmd->add_flag("--skip-geometric", all_args.skip_geometric, "skip the geometric audit");
  all_cmd->add_flag("--skip-weat", all_args.skip_weat, "skip the association tests");
  all_cmd->add_option("--out", all_args.out, "output path (default stdout)");

  RetrieveArgs retrieve_args;
  auto* retrieve_cmd = app.add_subcommand("retrieve", "rank a chunk corpus under the retrieval queries");
  retrieve_cmd->fallthrough();
  retrieve_cmd->add_option("--corpus", retrieve_args.corpus_path, "chunk corpus JSON (default: builtin worked example)");
  retrieve_cmd->add_option("--k", retrieve_args.k, "retrieval depth");
  retrieve_cmd->add_option("--mode", retrieve_args.mode, "topk | dynamic")->check(CLI::IsMember({"topk", "dynamic"}));
  retrieve_cmd->add_option("--concept", retrieve_args.concept_name, "concept whose gendered queries drive dynamic mode");
  retrieve_cmd->add_option("--positive-scenario", retrieve_args.positive_scenario, "query scenario building the shortlist (dynamic)");
  retrieve_cmd->add_option("--negative-scenario", retrieve_args.negative_scenario, "query scenario setting the cutoff (dynamic)");
  retrieve_cmd->add_option("--rule", retrieve_args.rule, "threshold rule: negative | positive")->check(CLI::IsMember({"negative", "positive"}));
  retrieve_cmd->add_option("--ranked-out", retrieve_args.ranked_out, "ranked-table CSV path (default stdout)");
  retrieve_cmd->add_option("--matrix-out", retrieve_args.matrix_out, "similarity-matrix CSV path (default stdout)");

  auto* templates_cmd = app.add_subcommand("templates", "inspect audit templates and retrieval queries");
  templates_cmd->require_subcommand(1);
  templates_cmd->fallthrough();
  TemplatesArgs tlist_args, tshow_args;
  auto* tlist_cmd = templates_cmd->add_subcommand("list", "list template and query names");
  tlist_cmd->fallthrough();
  tlist_cmd->add_option("--concept", tlist_args.concept_filter, "filter by concept");
  tlist_cmd->add_option("--context", tlist_args.context_filter, "filter by scenario");
  auto* tshow_cmd = templates_cmd->add_subcommand("show", "print template and query texts");
  tshow_cmd->fallthrough();
  tshow_cmd->add_option("--concept", tshow_args.concept_filter, "filter by concept");
  tshow_cmd->add_option("--context", tshow_args.context_filter, "filter by scenario");

  auto* report_cmd = app.add_subcommand("report", "work with saved reports");
  report_cmd->require_subcommand(1);
  report_cmd->fallthrough();
  RenderArgs render_args;
  auto* render_cmd = report_cmd->add_subcommand("render", "re-emit a structured report as csv/markdown/structured");
  render_cmd->fallthrough();
  render_cmd->add_option("--in", render_args.in, "structured report path")->required();
  render_cmd->add_option("--format", render_args.format, "structured | csv | markdown")->check(CLI::IsMember({"structured", "csv", "markdown"}));
  render_cmd->add_option("--out", render_args.out, "output path (default stdout)");

  auto* fixtures_cmd = app.add_subcommand("fixtures", "synthetic-embedding fixtures");
  fixtures_cmd->require_subcommand(1);
  fixtures_cmd->fallthrough();
  FixtureArgs fixture_args;
  auto* femit_cmd = fixtures_cmd->add_subcommand("emit", "write fixture corpora/vectors for offline runs");
  femit_cmd->fallthrough();
  femit_cmd->add_option("--kind", fixture_args.kind, "concept | retrieval | audit")->required()->check(CLI::IsMember({"concept", "retrieval", "audit"}));
  femit_cmd->add_option("--seed", fixture_args.seed, "fixture RNG seed (default: kind-specific)");
  femit_cmd->add_option("--dim", fixture_args.dim, "embedding dimension (default: kind-specific)");
  femit_cmd->add_option("--sigma", fixture_args.sigma, "noise level (concept fixtures)");
  femit_cmd->add_option("--pairs", fixture_args.pair_count, "pair count (concept fixtures)");
  femit_cmd->add_option("--out-dir", fixture_args.out_dir, "output directory");
  femit_cmd->add_option("--fixture-model", fixture_args.model, "model id stamped into the vectors document");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Normalize every parse failure to the documented fatal-error code; help
    // requests keep exiting 0.
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    Ctx ctx = resolve(cli);
    if (learn_cmd->parsed()) return run_concepts_learn(ctx, learn_args);
    if (geo_cmd->parsed()) return run_audit_geometric(ctx, geo_args);
    if (weat_cmd->parsed()) return run_audit_weat(ctx, weat_args);
    if (all_cmd->parsed()) return run_audit_all(ctx, all_args);
    if (retrieve_cmd->parsed()) return run_retrieve(ctx, retrieve_args);
    if (tlist_cmd->parsed()) return run_templates_list(ctx, tlist_args);
    if (tshow_cmd->parsed()) return run_templates_show(ctx, tshow_args);
    if (render_cmd->parsed()) return run_report_render(render_args);
    if (femit_cmd->parsed()) return run_fixtures_emit(fixture_args);
    std::cerr << "error: no verb selected\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
