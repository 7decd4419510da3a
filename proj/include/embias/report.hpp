#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "embias/corpus.hpp"
#include "embias/geobias.hpp"
#include "embias/provider.hpp"
#include "embias/scenario.hpp"
#include "embias/weat.hpp"

namespace embias::report {

// "***" p < 0.01, "**" p < 0.05, "*" p < 0.1, "" otherwise. Strictly-less
// cutoffs: a boundary value takes the weaker star. Throws outside [0, 1].
std::string significance_stars(double p);

// Per-concept dataset replacement for a custom audit; any unset member keeps
// the builtin data.
struct DatasetOverride {
  std::optional<std::filesystem::path> pairs;
  std::optional<std::filesystem::path> attributes;
  std::optional<std::filesystem::path> weat;
};

struct AuditConfig {
  std::vector<std::string> concepts = {"gender", "age", "wealth"};
  std::vector<std::string> scenarios = {"neutral", "debiasing", "positive",
                                        "negative"};
  std::size_t n_samples = 10000;
  std::uint64_t seed = 7;
  std::size_t k_search = 0;
  geobias::CorrelationKind correlation = geobias::CorrelationKind::pearson;
  geobias::IndicatorMode indicator = geobias::IndicatorMode::signed_ge;
  weat::WeatOptions weat_options;
  bool run_geometric = true;
  bool run_weat = true;
  // Deliberately empty by default: reports carry no wall-clock state unless
  // the caller opts in, so identical runs stay byte-identical.
  std::string timestamp;
  std::map<std::string, DatasetOverride> dataset_overrides;
};

struct AuditError {
  std::string concept_name;
  std::string scenario;
  std::string kind;  // "geometric" | "weat"
  std::string message;
  bool operator==(const AuditError&) const = default;
};

struct AuditRun {
  std::string model;
  std::string provider_kind;  // "file" | "http"
  std::string endpoint;
  std::vector<std::string> concepts;
  std::vector<std::string> scenarios;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  std::string correlation;  // "pearson" | "spearman"
  std::string indicator;    // "signed" | "absolute"
  std::string timestamp;    // empty unless explicitly supplied
  std::string template_digest;
  std::vector<geobias::GeoBiasResult> geometric;
  std::vector<weat::WeatOutcome> weat_outcomes;
  std::vector<AuditError> errors;
  std::vector<std::string> warnings;
  bool operator==(const AuditRun&) const = default;
};

// Runs the full grid (every requested concept x scenario, geometric and
// association tests). Cell failures are recorded in `errors` and the run
// continues; each requested cell lands in results or errors exactly once.
AuditRun run_audit(const AuditConfig& config, provider::Provider& prov,
                   const scenario::TemplateSet& templates);

enum class Format { structured, csv, markdown };
Format format_from_string(const std::string& name);

void emit(const AuditRun& run, Format format, std::ostream& out);
void emit_file(const AuditRun& run, Format format,
               const std::filesystem::path& path);

// Inverse of emit(structured): parses a structured report back into an
// AuditRun equal to the original.
AuditRun parse_structured(std::istream& in);
AuditRun parse_structured_file(const std::filesystem::path& path);

}  // namespace embias::report
