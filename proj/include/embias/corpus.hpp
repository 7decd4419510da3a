#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace embias::corpus {

// Ordered pair of contrasting terms. w1 is the side the audit treats as the
// discriminated group (she / old / poverty); w2 is the counterpart.
struct ConceptPair {
  std::string w1, w2;
  bool operator==(const ConceptPair&) const = default;
};

struct ConceptPairSet {
  std::string concept_name;
  std::vector<ConceptPair> pairs;
  bool operator==(const ConceptPairSet&) const = default;
};

// Attribute term with a human bias label in [0,1]; higher means the term is
// more associated with the w2 side of the paired concept.
struct LabeledEntry {
  std::string term;
  double label = 0.0;
  bool operator==(const LabeledEntry&) const = default;
};

struct LabeledAttributeSet {
  std::string kind;  // "occupations", "ethnicities", "character_traits"
  std::vector<LabeledEntry> entries;
  bool operator==(const LabeledAttributeSet&) const = default;
};

// Association-test specification: two target term lists and two attribute
// term lists. Target lists may repeat a term (repeats reweight the mean);
// attribute lists must be duplicate-free.
struct WeatSpec {
  std::string concept_name;
  std::vector<std::string> t1, t2, a1, a2;
  bool operator==(const WeatSpec&) const = default;
};

struct BuiltinBundle {
  ConceptPairSet pairs;
  LabeledAttributeSet attributes;
  WeatSpec weat;
};

// Builtin concepts: "gender", "age", "wealth". Throws on unknown name.
BuiltinBundle load_builtin(const std::string& concept_name);
std::vector<std::string> builtin_concepts();

// Each validator returns human-readable findings; empty means valid.
std::vector<std::string> validate(const ConceptPairSet& s);
std::vector<std::string> validate(const LabeledAttributeSet& s);
std::vector<std::string> validate(const WeatSpec& s);

using Dataset = std::variant<ConceptPairSet, LabeledAttributeSet, WeatSpec>;

// Loads a JSON dataset file. The document's "kind" field selects the shape:
// "concept_pairs", "labeled_attributes", or "weat_spec". Throws with a path-
// and
// field-specific message on malformed input; the parsed dataset is validated
// and findings are reported as an error.
Dataset load_custom(const std::filesystem::path& path);

}  // namespace embias::corpus
