#include "embias/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "embias/concepts.hpp"
#include "json.hpp"

namespace embias::report {
namespace {

using nlohmann::json;

// Shortest decimal form that round-trips; used for CSV so numeric columns
// are lossless without trailing noise.
std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string num(std::size_t v) { return std::to_string(v); }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += "\"";
  return out;
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string correlation_name(geobias::CorrelationKind k) {
  return k == geobias::CorrelationKind::pearson ? "pearson" : "spearman";
}
std::string indicator_name(geobias::IndicatorMode m) {
  return m == geobias::IndicatorMode::signed_ge ? "signed" : "absolute";
}

}  // namespace

std::string significance_stars(double p) {
  if (!(p >= 0.0) || !(p <= 1.0)) {
    throw std::invalid_argument("significance_stars: p must lie in [0, 1]");
  }
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.1) return "*";
  return "";
}

Format format_from_string(const std::string& name) {
  if (name == "structured" || name == "json") return Format::structured;
  if (name == "csv") return Format::csv;
  if (name == "markdown" || name == "md") return Format::markdown;
  throw std::invalid_argument("unknown report format '" + name +
                              "' (expected structured, csv, or markdown)");
}

AuditRun run_audit(const AuditConfig& config, provider::Provider& prov,
                   const scenario::TemplateSet& templates) {
  if (config.concepts.empty()) {
    throw std::invalid_argument("at least one concept required");
  }
  if (config.scenarios.empty()) {
    throw std::invalid_argument("at least one scenario required");
  }
  if (!config.run_geometric && !config.run_weat) {
    throw std::invalid_argument("nothing to run: both audits disabled");
  }

  AuditRun run;
  run.model = prov.config().model;
  run.provider_kind =
      prov.config().kind == provider::ProviderKind::http ? "http" : "file";
  run.endpoint = prov.config().endpoint;
  run.concepts = config.concepts;
  run.scenarios = config.scenarios;
  run.n_samples = config.n_samples;
  run.seed = config.seed;
  run.correlation = correlation_name(config.correlation);
  run.indicator = indicator_name(config.indicator);
  run.timestamp = config.timestamp;
  run.template_digest = templates.digest();

  geobias::GeoAuditOptions geo_options;
  geo_options.n_samples = config.n_samples;
  geo_options.seed = config.seed;
  geo_options.k_search = config.k_search;
  geo_options.correlation = config.correlation;
  geo_options.indicator = config.indicator;

  for (const auto& concept_name : config.concepts) {
    corpus::ConceptPairSet pairs;
    corpus::LabeledAttributeSet attributes;
    corpus::WeatSpec weat_spec;
    std::string load_error;
    try {
      auto bundle = corpus::load_builtin(concept_name);
      pairs = std::move(bundle.pairs);
      attributes = std::move(bundle.attributes);
      weat_spec = std::move(bundle.weat);
    } catch (const std::exception& e) {
      load_error = e.what();
    }
    const auto ov = config.dataset_overrides.find(concept_name);
    if (load_error.empty() && ov != config.dataset_overrides.end()) {
      try {
        if (ov->second.pairs) {
          pairs = std::get<corpus::ConceptPairSet>(
              corpus::load_custom(*ov->second.pairs));
        }
        if (ov->second.attributes) {
          attributes = std::get<corpus::LabeledAttributeSet>(
              corpus::load_custom(*ov->second.attributes));
        }
        if (ov->second.weat) {
          weat_spec = std::get<corpus::WeatSpec>(
              corpus::load_custom(*ov->second.weat));
        }
      } catch (const std::exception& e) {
        load_error = e.what();
      }
    }
    if (!load_error.empty()) {
      for (const auto& scen : config.scenarios) {
        if (config.run_geometric) {
          run.errors.push_back({concept_name, scen, "geometric", load_error});
        }
        if (config.run_weat) {
          run.errors.push_back({concept_name, scen, "weat", load_error});
        }
      }
      continue;
    }

    // The concept direction is scenario-independent: learn it once.
    concepts::ConceptSubspace learned;
    std::string learn_error;
    if (config.run_geometric) {
      try {
        learned = concepts::learn_concept(pairs, prov, config.k_search);
        for (const auto& w : learned.warnings) {
          run.warnings.push_back(concept_name + ": " + w);
        }
      } catch (const std::exception& e) {
        learn_error = e.what();
      }
    }

    for (const auto& scen : config.scenarios) {
      if (config.run_geometric) {
        if (!learn_error.empty()) {
          run.errors.push_back({concept_name, scen, "geometric", learn_error});
        } else {
          try {
            run.geometric.push_back(run_geometric_audit(
                pairs, attributes, scen, templates, prov, geo_options,
                &learned));
          } catch (const std::exception& e) {
            run.errors.push_back({concept_name, scen, "geometric", e.what()});
          }
        }
      }
      if (config.run_weat) {
        try {
          run.weat_outcomes.push_back(weat::run_weat_scenario(
              weat_spec, scen, templates, prov, config.weat_options));
        } catch (const std::exception& e) {
          run.errors.push_back({concept_name, scen, "weat", e.what()});
        }
      }
    }
  }
  return run;
}

namespace {

json geo_to_json(const geobias::GeoBiasResult& r) {
  return json{{"concept", r.concept_name},
              {"context", r.scenario},
              {"attribute_kind", r.attribute_kind},
              {"rho", r.rho},
              {"abs_rho", r.abs_rho},
              {"p_value", r.p_value},
              {"auc_g", r.auc_g},
              {"selected_index", r.selected_index},
              {"weak_concept", r.weak_concept},
              {"n_attributes", r.n_attributes},
              {"n_samples", r.n_samples},
              {"seed", r.seed}};
}

geobias::GeoBiasResult geo_from_json(const json& j) {
  geobias::GeoBiasResult r;
  r.concept_name = j.at("concept").get<std::string>();
  r.scenario = j.at("context").get<std::string>();
  r.attribute_kind = j.at("attribute_kind").get<std::string>();
  r.rho = j.at("rho").get<double>();
  r.abs_rho = j.at("abs_rho").get<double>();
  r.p_value = j.at("p_value").get<double>();
  r.auc_g = j.at("auc_g").get<double>();
  r.selected_index = j.at("selected_index").get<std::size_t>();
  r.weak_concept = j.at("weak_concept").get<bool>();
  r.n_attributes = j.at("n_attributes").get<std::size_t>();
  r.n_samples = j.at("n_samples").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  return r;
}

json weat_to_json(const weat::WeatOutcome& w) {
  json tests = json::array();
  for (const auto& t : w.tests) {
    tests.push_back(json{{"id", t.id},
                         {"k", t.k},
                         {"p0", t.p0},
                         {"alternative", weat::to_string(t.alternative)},
                         {"p_value", t.p_value}});
  }
  return json{{"concept", w.concept_name}, {"context", w.scenario},
              {"k1", w.k1},               {"k2", w.k2},
              {"n", w.n},                 {"p_hat", w.p_hat},
              {"tests", tests}};
}

weat::WeatOutcome weat_from_json(const json& j) {
  weat::WeatOutcome w;
  w.concept_name = j.at("concept").get<std::string>();
  w.scenario = j.at("context").get<std::string>();
  w.k1 = j.at("k1").get<std::size_t>();
  w.k2 = j.at("k2").get<std::size_t>();
  w.n = j.at("n").get<std::size_t>();
  w.p_hat = j.at("p_hat").get<double>();
  for (const auto& tj : j.at("tests")) {
    weat::WeatTest t;
    t.id = tj.at("id").get<std::string>();
    t.k = tj.at("k").get<std::size_t>();
    t.p0 = tj.at("p0").get<double>();
    t.alternative =
        weat::alternative_from_string(tj.at("alternative").get<std::string>());
    t.p_value = tj.at("p_value").get<double>();
    w.tests.push_back(std::move(t));
  }
  return w;
}

json run_to_json(const AuditRun& run) {
  json j;
  j["model"] = run.model;
  j["provider"] = json{{"kind", run.provider_kind}, {"endpoint", run.endpoint}};
  j["audit"] = json{{"concepts", run.concepts},
                    {"scenarios", run.scenarios},
                    {"n_samples", run.n_samples},
                    {"seed", run.seed},
                    {"correlation", run.correlation},
                    {"indicator", run.indicator},
                    {"timestamp", run.timestamp},
                    {"template_digest", run.template_digest}};
  json geo = json::array();
  for (const auto& g : run.geometric) geo.push_back(geo_to_json(g));
  json weat_arr = json::array();
  for (const auto& w : run.weat_outcomes) weat_arr.push_back(weat_to_json(w));
  j["results"] = json{{"geometric", geo}, {"weat", weat_arr}};
  json errs = json::array();
  for (const auto& e : run.errors) {
    errs.push_back(json{{"concept", e.concept_name},
                        {"context", e.scenario},
                        {"kind", e.kind},
                        {"message", e.message}});
  }
  j["errors"] = errs;
  j["warnings"] = run.warnings;
  return j;
}

void emit_structured(const AuditRun& run, std::ostream& out) {
  out << run_to_json(run).dump(2) << "\n";
}

// Tables display max(k1, k2) as the success share for debiasing; the star
// and test columns come from the test whose count is displayed so the cell
// stays self-consistent. On a tie the k1 test wins. Scenarios other than
// debiasing run a single test.
const weat::WeatTest* displayed_test(const weat::WeatOutcome& w) {
  if (w.tests.empty()) return nullptr;
  if (w.scenario != "debiasing") return &w.tests.front();
  const std::size_t shown = std::max(w.k1, w.k2);
  for (const auto& t : w.tests) {
    if (t.k == shown) return &t;
  }
  return &w.tests.front();
}

// One row per result (geometric or association outcome). An association row
// carries its headline test; the full battery lives in the structured format.
void emit_csv(const AuditRun& run, std::ostream& out) {
  out << "section,model,concept,context,auc_g,rho,abs_rho,p_value,stars,"
         "weak_concept,k1,k2,n,p_hat,test_id,p0,alternative\n";
  for (const auto& g : run.geometric) {
    out << "geometric," << csv_escape(run.model) << ','
        << csv_escape(g.concept_name) << ',' << csv_escape(g.scenario) << ','
        << num(g.auc_g) << ',' << num(g.rho) << ',' << num(g.abs_rho) << ','
        << num(g.p_value) << ',' << significance_stars(g.p_value) << ','
        << (g.weak_concept ? "true" : "false") << ",,,,,,,\n";
  }
  for (const auto& w : run.weat_outcomes) {
    const auto* t = displayed_test(w);
    out << "weat," << csv_escape(run.model) << ',' << csv_escape(w.concept_name)
        << ',' << csv_escape(w.scenario) << ",,,,";
    if (t) {
      out << num(t->p_value) << ',' << significance_stars(t->p_value);
    } else {
      out << ',';
    }
    out << ",," << num(w.k1) << ',' << num(w.k2) << ',' << num(w.n) << ','
        << num(w.p_hat) << ',';
    if (t) {
      out << t->id << ',' << num(t->p0) << ',' << weat::to_string(t->alternative);
    } else {
      out << ",,";
    }
    out << "\n";
  }
}

void emit_markdown(const AuditRun& run, std::ostream& out) {
  out << "# Embedding bias audit\n\n";
  out << "- model: `" << run.model << "`\n";
  out << "- provider: " << run.provider_kind;
  if (!run.endpoint.empty()) out << " (" << run.endpoint << ")";
  out << "\n";
  out << "- seed: " << run.seed << "; null samples: " << run.n_samples << "\n";
  out << "- correlation: " << run.correlation
      << "; null indicator: " << run.indicator << "\n";
  out << "- null directions are derived from (seed, sample index) only, so "
         "every context shares the same draws\n";
  if (!run.timestamp.empty()) out << "- timestamp: " << run.timestamp << "\n";
  out << "- template digest: `" << run.template_digest << "`\n";
  out << "- stars: `***` p<0.01, `**` p<0.05, `*` p<0.1 (strict cutoffs; "
         "boundary values take the weaker mark)\n\n";

  auto scenario_subset = [&](std::initializer_list<const char*> shape) {
    std::vector<std::string> cols;
    for (const char* s : shape) {
      if (std::find(run.scenarios.begin(), run.scenarios.end(), s) !=
          run.scenarios.end()) {
        cols.push_back(s);
      }
    }
    return cols;
  };

  auto table = [&](const std::string& title,
                   const std::vector<std::string>& cols,
                   auto&& cell_for) {
    out << "## " << title << "\n\n";
    if (cols.empty()) {
      out << "_none of this table's scenarios were requested_\n\n";
      return;
    }
    out << "| model |";
    for (const auto& c : run.concepts) {
      for (const auto& s : cols) out << " " << c << " " << s << " |";
    }
    out << "\n|---|";
    for (std::size_t i = 0; i < run.concepts.size() * cols.size(); ++i) {
      out << "---|";
    }
    out << "\n| `" << run.model << "` |";
    for (const auto& c : run.concepts) {
      for (const auto& s : cols) out << " " << cell_for(c, s) << " |";
    }
    out << "\n\n";
  };

  bool any_weak = false;
  table("Association test (success share, binomial)",
        scenario_subset({"neutral", "debiasing", "negative"}),
        [&](const std::string& c, const std::string& s) -> std::string {
          for (const auto& w : run.weat_outcomes) {
            if (w.concept_name == c && w.scenario == s) {
              const auto* t = displayed_test(w);
              return fixed2(w.p_hat) +
                     (t ? significance_stars(t->p_value) : "");
            }
          }
          return "err";
        });
  table("Concept-direction correlation (|rho|)",
        scenario_subset({"neutral", "debiasing", "positive"}),
        [&](const std::string& c, const std::string& s) -> std::string {
          for (const auto& g : run.geometric) {
            if (g.concept_name == c && g.scenario == s) {
              std::string cell = fixed2(g.abs_rho) +
                                 significance_stars(g.p_value);
              if (g.weak_concept) {
                any_weak = true;
                cell += "†";
              }
              return cell;
            }
          }
          return "err";
        });
  if (any_weak) {
    out << "† the learned concept direction separates its word pairs weakly "
           "(AUC < 0.8); treat the correlation with caution.\n\n";
  }

  if (!run.errors.empty()) {
    out << "## Errors\n\n";
    for (const auto& e : run.errors) {
      out << "- " << e.kind << " " << e.concept_name << "/" << e.scenario
          << ": " << e.message << "\n";
    }
    out << "\n";
  }
  if (!run.warnings.empty()) {
    out << "## Warnings\n\n";
    for (const auto& w : run.warnings) out << "- " << w << "\n";
    out << "\n";
  }
}

}  // namespace

void emit(const AuditRun& run, Format format, std::ostream& out) {
  switch (format) {
    case Format::structured:
      emit_structured(run, out);
      return;
    case Format::csv:
      emit_csv(run, out);
      return;
    case Format::markdown:
      emit_markdown(run, out);
      return;
  }
  throw std::invalid_argument("unknown report format");
}

void emit_file(const AuditRun& run, Format format,
               const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  emit(run, format, out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

AuditRun parse_structured(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("invalid structured report: ") +
                             e.what());
  }
  AuditRun run;
  run.model = j.at("model").get<std::string>();
  run.provider_kind = j.at("provider").at("kind").get<std::string>();
  run.endpoint = j.at("provider").at("endpoint").get<std::string>();
  const auto& a = j.at("audit");
  run.concepts = a.at("concepts").get<std::vector<std::string>>();
  run.scenarios = a.at("scenarios").get<std::vector<std::string>>();
  run.n_samples = a.at("n_samples").get<std::size_t>();
  run.seed = a.at("seed").get<std::uint64_t>();
  run.correlation = a.at("correlation").get<std::string>();
  run.indicator = a.at("indicator").get<std::string>();
  run.timestamp = a.at("timestamp").get<std::string>();
  run.template_digest = a.at("template_digest").get<std::string>();
  for (const auto& gj : j.at("results").at("geometric")) {
    run.geometric.push_back(geo_from_json(gj));
  }
  for (const auto& wj : j.at("results").at("weat")) {
    run.weat_outcomes.push_back(weat_from_json(wj));
  }
  for (const auto& ej : j.at("errors")) {
    run.errors.push_back({ej.at("concept").get<std::string>(),
                          ej.at("context").get<std::string>(),
                          ej.at("kind").get<std::string>(),
                          ej.at("message").get<std::string>()});
  }
  run.warnings = j.at("warnings").get<std::vector<std::string>>();
  return run;
}

AuditRun parse_structured_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_structured(in);
}

}  // namespace embias::report
