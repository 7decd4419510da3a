#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>

#include "doctest.h"
#include "embias/corpus.hpp"

using namespace embias::corpus;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& body) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream out(p);
  out << body;
  return p;
}

bool has_finding(const std::vector<std::string>& findings,
                 const std::string& needle) {
  for (const auto& f : findings)
    if (f.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("builtin concept list and counts") {
  CHECK(builtin_concepts() ==
        std::vector<std::string>{"gender", "age", "wealth"});

  const BuiltinBundle gender = load_builtin("gender");
  CHECK(gender.pairs.pairs.size() == 20);
  CHECK(gender.attributes.entries.size() == 48);
  CHECK(gender.attributes.kind == "occupations");
  CHECK(gender.weat.a1.size() == 18);
  CHECK(gender.weat.a2.size() == 30);
  CHECK(gender.weat.a1.size() + gender.weat.a2.size() == 48);

  const BuiltinBundle age = load_builtin("age");
  CHECK(age.pairs.pairs.size() == 22);
  CHECK(age.attributes.entries.size() == 29);
  CHECK(age.attributes.kind == "character_traits");
  CHECK(age.weat.a1.size() + age.weat.a2.size() == 31);

  const BuiltinBundle wealth = load_builtin("wealth");
  CHECK(wealth.pairs.pairs.size() == 44);
  CHECK(wealth.attributes.entries.size() == 34);
  CHECK(wealth.attributes.kind == "ethnicities");
  CHECK(wealth.weat.a1.size() + wealth.weat.a2.size() == 34);

  CHECK_THROWS(load_builtin("politics"));
}

TEST_CASE("builtin spot checks: first/last items and known labels") {
  const BuiltinBundle gender = load_builtin("gender");
  CHECK(gender.pairs.pairs.front() == ConceptPair{"she", "he"});
  CHECK(gender.pairs.pairs.back() == ConceptPair{"mistress", "master"});

  const BuiltinBundle age = load_builtin("age");
  CHECK(age.pairs.pairs.front() == ConceptPair{"old", "young"});
  CHECK(age.pairs.pairs.back() == ConceptPair{"centenarian", "infant"});
  bool found_wise = false;
  for (const auto& e : age.attributes.entries) {
    if (e.term == "wise") {
      found_wise = true;
      CHECK(e.label == doctest::Approx(0.8).epsilon(1e-12));
    }
  }
  CHECK(found_wise);

  const BuiltinBundle wealth = load_builtin("wealth");
  CHECK(wealth.pairs.pairs.front() == ConceptPair{"poverty", "wealth"});
}

TEST_CASE("builtin datasets pass their own validators") {
  for (const auto& name : builtin_concepts()) {
    const BuiltinBundle b = load_builtin(name);
    CHECK(validate(b.pairs).empty());
    CHECK(validate(b.attributes).empty());
    CHECK(validate(b.weat).empty());
  }
}

TEST_CASE("pair-set validation") {
  ConceptPairSet ok{"custom", {{"left", "right"}, {"up", "down"}}};
  CHECK(validate(ok).empty());

  ConceptPairSet empty{"custom", {}};
  CHECK(has_finding(validate(empty), "pair count >= 2 required"));

  ConceptPairSet one{"custom", {{"a", "b"}}};
  CHECK(has_finding(validate(one), "pair count >= 2 required"));

  ConceptPairSet dup{"custom", {{"a", "b"}, {"a", "b"}}};
  CHECK(has_finding(validate(dup), "duplicate pair"));

  ConceptPairSet same{"custom", {{"a", "a"}, {"b", "c"}}};
  CHECK(has_finding(validate(same), "both sides"));

  ConceptPairSet blank{"custom", {{"", "b"}, {"c", "d"}}};
  CHECK(has_finding(validate(blank), "empty term"));
}

TEST_CASE("attribute-set validation") {
  LabeledAttributeSet ok{"traits", {{"a", 0.1}, {"b", 0.5}, {"c", 1.0}}};
  CHECK(validate(ok).empty());

  LabeledAttributeSet outside{"traits", {{"a", 1.5}, {"b", 0.5}, {"c", 0.2}}};
  CHECK(has_finding(validate(outside), "label out of [0,1]"));

  LabeledAttributeSet negative{"traits", {{"a", -0.1}, {"b", 0.5}, {"c", 0.2}}};
  CHECK(has_finding(validate(negative), "label out of [0,1]"));

  LabeledAttributeSet nan_label{
      "traits", {{"a", std::nan("")}, {"b", 0.5}, {"c", 0.2}}};
  CHECK(has_finding(validate(nan_label), "non-finite label"));
  CHECK(!has_finding(validate(nan_label), "label out of [0,1]"));

  LabeledAttributeSet few{"traits", {{"a", 0.1}, {"b", 0.5}}};
  CHECK(has_finding(validate(few), "entry count >= 3 required"));

  LabeledAttributeSet dup{"traits", {{"a", 0.1}, {"a", 0.5}, {"c", 0.2}}};
  CHECK(has_finding(validate(dup), "duplicate term"));
}

TEST_CASE("weat-spec validation") {
  WeatSpec ok{"custom", {"t"}, {"u"}, {"x"}, {"y"}};
  CHECK(validate(ok).empty());

  WeatSpec empty_list{"custom", {}, {"u"}, {"x"}, {"y"}};
  CHECK(has_finding(validate(empty_list), "t1 is empty"));

  // Repeated targets reweight the mean and are allowed; repeated attributes
  // would double-count trials and are not.
  WeatSpec dup_target{"custom", {"t", "t"}, {"u"}, {"x"}, {"y"}};
  CHECK(validate(dup_target).empty());
  WeatSpec dup_attr{"custom", {"t"}, {"u"}, {"x", "x"}, {"y"}};
  CHECK(has_finding(validate(dup_attr), "duplicate term"));
}

TEST_CASE("custom dataset files load") {
  const fs::path pairs = write_temp(
      "embias_pairs_ok.json",
      R"({"kind":"concept_pairs","concept":"tone","pairs":[["soft","hard"],["warm","cold"]]})");
  const Dataset ds = load_custom(pairs);
  const auto& ps = std::get<ConceptPairSet>(ds);
  CHECK(ps.concept_name == "tone");
  CHECK(ps.pairs.size() == 2);
  CHECK(ps.pairs[0] == ConceptPair{"soft", "hard"});

  const fs::path attrs = write_temp(
      "embias_attrs_ok.json",
      R"({"kind":"labeled_attributes","attribute_kind":"traits","entries":[)"
      R"({"term":"kind","label":0.9},{"term":"stern","label":0.2},{"term":"calm","label":0.55}]})");
  const Dataset attrs_ds = load_custom(attrs);
  const auto& as = std::get<LabeledAttributeSet>(attrs_ds);
  CHECK(as.kind == "traits");
  CHECK(as.entries.size() == 3);
  CHECK(as.entries[2].label == doctest::Approx(0.55));

  const fs::path weat = write_temp(
      "embias_weat_ok.json",
      R"({"kind":"weat_spec","concept":"tone","t1":["soft"],"t2":["hard"],"a1":["lullaby"],"a2":["anvil"]})");
  const Dataset weat_ds = load_custom(weat);
  const auto& ws = std::get<WeatSpec>(weat_ds);
  CHECK(ws.t1 == std::vector<std::string>{"soft"});
  CHECK(ws.a2 == std::vector<std::string>{"anvil"});
}

TEST_CASE("custom dataset files reject malformed input") {
  auto expect_error = [](const std::string& name, const std::string& body,
                         const std::string& needle) {
    const fs::path p = write_temp(name, body);
    try {
      load_custom(p);
      FAIL_CHECK("expected an error mentioning: " << needle);
    } catch (const std::exception& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
      // Errors must name the offending file.
      CHECK(std::string(e.what()).find(name) != std::string::npos);
    }
  };

  expect_error("embias_bad_kind.json",
               R"({"kind":"weat","concept":"x","t1":[],"t2":[],"a1":[],"a2":[]})",
               "unknown dataset kind");
  expect_error("embias_bad_json.json", "{not json", "invalid JSON");
  expect_error("embias_bad_label.json",
               R"({"kind":"labeled_attributes","attribute_kind":"t","entries":[)"
               R"({"term":"a","label":1.5},{"term":"b","label":0.5},{"term":"c","label":0.1}]})",
               "label out of [0,1]");
  expect_error("embias_bad_paircount.json",
               R"({"kind":"concept_pairs","concept":"x","pairs":[]})",
               "pair count >= 2 required");
  expect_error("embias_bad_pairshape.json",
               R"({"kind":"concept_pairs","concept":"x","pairs":[["only-one"]]})",
               "two-element array");
  expect_error("embias_bad_missing.json", R"({"concept":"x"})",
               "missing or non-string field 'kind'");

  CHECK_THROWS(load_custom(fs::temp_directory_path() / "embias_no_such.json"));
}
