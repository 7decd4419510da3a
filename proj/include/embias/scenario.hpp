#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace embias::scenario {

// Context scenarios applied to audit prompts, in canonical order.
inline const std::vector<std::string>& audit_scenarios() {
  static const std::vector<std::string> kOrder = {"neutral", "debiasing",
                                                  "positive", "negative"};
  return kOrder;
}

struct AuditTemplate {
  std::string concept_name;
  std::string scenario;
  std::string text;  // contains exactly one {attribute} placeholder
  bool operator==(const AuditTemplate&) const = default;
};

struct RetrievalQuery {
  std::string scenario;  // "neutral", "female", "male", "debiasing"
  std::string text;
  bool operator==(const RetrievalQuery&) const = default;
};

// Registry of audit prompt templates and retrieval queries. Starts from the
// builtin set; a JSON file can add concepts or override entries without
// rebuilding.
class TemplateSet {
 public:
  static TemplateSet builtin();

  // Builtin set extended/overridden by entries from `path`. File shape:
  // {"audit_templates": [{"concept","scenario","template"}...],
  //  "retrieval_queries": [{"scenario","query"}...]}
  static TemplateSet from_file(const std::filesystem::path& path);

  // Substitutes `attribute` for the {attribute} placeholder; no other
  // mutation. Throws on unknown (concept, scenario), empty attribute, or an
  // attribute containing braces.
  std::string render(const std::string& concept_name,
                     const std::string& scenario_name,
                     const std::string& attribute) const;

  const std::string& audit_template(const std::string& concept_name,
                                    const std::string& scenario_name) const;
  const std::string& retrieval_query(const std::string& scenario_name) const;

  std::vector<AuditTemplate> audit_templates() const;
  std::vector<RetrievalQuery> retrieval_queries() const;

  // SHA-256 over a canonical serialization of the whole set; stable across
  // insertion order. Recorded in report provenance.
  std::string digest() const;

 private:
  void put_audit(AuditTemplate t);
  void put_query(RetrievalQuery q);

  std::map<std::pair<std::string, std::string>, std::string> audit_;
  std::map<std::string, std::string> queries_;
};

}  // namespace embias::scenario
