#include "embias/corpus.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace embias::corpus {
namespace {

using nlohmann::json;

void find_duplicates(const std::vector<std::string>& terms,
                     const std::string& where,
                     std::vector<std::string>& findings) {
  std::set<std::string> seen;
  for (const auto& t : terms) {
    if (!seen.insert(t).second) {
      findings.push_back(where + ": duplicate term '" + t + "'");
    }
  }
}

}  // namespace

std::vector<std::string> validate(const ConceptPairSet& s) {
  std::vector<std::string> findings;
  if (s.concept_name.empty()) findings.push_back("concept name is empty");
  if (s.pairs.size() < 2) findings.push_back("pair count >= 2 required");
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < s.pairs.size(); ++i) {
    const auto& p = s.pairs[i];
    const std::string where = "pair " + std::to_string(i);
    if (p.w1.empty() || p.w2.empty()) findings.push_back(where + ": empty term");
    if (p.w1 == p.w2) findings.push_back(where + ": both sides are '" + p.w1 + "'");
    if (!seen.insert({p.w1, p.w2}).second) {
      findings.push_back(where + ": duplicate pair ('" + p.w1 + "', '" + p.w2 + "')");
    }
  }
  return findings;
}

std::vector<std::string> validate(const LabeledAttributeSet& s) {
  std::vector<std::string> findings;
  if (s.kind.empty()) findings.push_back("attribute kind is empty");
  if (s.entries.size() < 3) findings.push_back("entry count >= 3 required");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    const auto& e = s.entries[i];
    const std::string where = "entry " + std::to_string(i);
    if (e.term.empty()) findings.push_back(where + ": empty term");
    if (!std::isfinite(e.label)) {
      findings.push_back(where + " ('" + e.term + "'): non-finite label");
    } else if (e.label < 0.0 || e.label > 1.0) {
      findings.push_back(where + " ('" + e.term + "'): label out of [0,1]");
    }
    if (!e.term.empty() && !seen.insert(e.term).second) {
      findings.push_back(where + ": duplicate term '" + e.term + "'");
    }
  }
  return findings;
}

std::vector<std::string> validate(const WeatSpec& s) {
  std::vector<std::string> findings;
  if (s.concept_name.empty()) findings.push_back("concept name is empty");
  if (s.t1.empty()) findings.push_back("target list t1 is empty");
  if (s.t2.empty()) findings.push_back("target list t2 is empty");
  if (s.a1.empty()) findings.push_back("attribute list a1 is empty");
  if (s.a2.empty()) findings.push_back("attribute list a2 is empty");
  auto check_terms = [&](const std::vector<std::string>& list, const char* name) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (list[i].empty()) {
        findings.push_back(std::string(name) + " entry " + std::to_string(i) +
                           ": empty term");
      }
    }
  };
  check_terms(s.t1, "t1");
  check_terms(s.t2, "t2");
  check_terms(s.a1, "a1");
  check_terms(s.a2, "a2");
  // Target lists may repeat (repeats reweight the mean); attribute lists are
  // the units the test counts over, so duplicates there would double-count.
  find_duplicates(s.a1, "a1", findings);
  find_duplicates(s.a2, "a2", findings);
  return findings;
}

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& msg) {
  throw std::runtime_error(path.string() + ": " + msg);
}

std::string require_string(const json& j, const char* field,
                           const std::filesystem::path& path) {
  if (!j.contains(field) || !j[field].is_string()) {
    fail(path, std::string("missing or non-string field '") + field + "'");
  }
  return j[field].get<std::string>();
}

Dataset parse_dataset(const json& doc, const std::filesystem::path& path) {
  const std::string kind = require_string(doc, "kind", path);
  if (kind == "concept_pairs") {
    ConceptPairSet out;
    out.concept_name = require_string(doc, "concept", path);
    if (!doc.contains("pairs") || !doc["pairs"].is_array()) {
      fail(path, "missing or non-array field 'pairs'");
    }
    for (const auto& item : doc["pairs"]) {
      if (!item.is_array() || item.size() != 2 || !item[0].is_string() ||
          !item[1].is_string()) {
        fail(path, "each pair must be a two-element array of strings");
      }
      out.pairs.push_back({item[0].get<std::string>(), item[1].get<std::string>()});
    }
    return out;
  }
  if (kind == "labeled_attributes") {
    LabeledAttributeSet out;
    out.kind = require_string(doc, "attribute_kind", path);
    if (!doc.contains("entries") || !doc["entries"].is_array()) {
      fail(path, "missing or non-array field 'entries'");
    }
    for (const auto& item : doc["entries"]) {
      if (!item.is_object() || !item.contains("term") || !item["term"].is_string() ||
          !item.contains("label") || !item["label"].is_number()) {
        fail(path, "each entry must be {\"term\": string, \"label\": number}");
      }
      out.entries.push_back({item["term"].get<std::string>(), item["label"].get<double>()});
    }
    return out;
  }
  if (kind == "weat_spec") {
    WeatSpec out;
    out.concept_name = require_string(doc, "concept", path);
    auto read_list = [&](const char* field) {
      if (!doc.contains(field) || !doc[field].is_array()) {
        fail(path, std::string("missing or non-array field '") + field + "'");
      }
      std::vector<std::string> list;
      for (const auto& item : doc[field]) {
        if (!item.is_string()) {
          fail(path, std::string("field '") + field + "' must hold strings");
        }
        list.push_back(item.get<std::string>());
      }
      return list;
    };
    out.t1 = read_list("t1");
    out.t2 = read_list("t2");
    out.a1 = read_list("a1");
    out.a2 = read_list("a2");
    return out;
  }
  fail(path, "unknown dataset kind '" + kind +
                 "' (expected concept_pairs, labeled_attributes, or weat_spec)");
}

}  // namespace

Dataset load_custom(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(path, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(path, "top-level value must be an object");
  Dataset ds = parse_dataset(doc, path);
  const auto findings =
      std::visit([](const auto& d) { return validate(d); }, ds);
  if (!findings.empty()) {
    std::ostringstream msg;
    msg << "dataset failed validation:";
    for (const auto& f : findings) msg << "\n  - " << f;
    fail(path, msg.str());
  }
  return ds;
}

}  // namespace embias::corpus
