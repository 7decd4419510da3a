#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "embias/corpus.hpp"
#include "embias/linalg.hpp"
#include "embias/provider.hpp"
#include "embias/scenario.hpp"

namespace embias::weat {

// Mean-cosine similarity sequences between attribute and target embeddings.
// s11[l]: attribute A1[l] vs targets T1; s21[l]: A1[l] vs T2;
// s22[l]: A2[l] vs T2; s12[l]: A2[l] vs T1.
struct SimilaritySequences {
  std::vector<double> s11, s21, s22, s12;
};
SimilaritySequences similarity_sequences(const linalg::Matrix& t1,
                                         const linalg::Matrix& t2,
                                         const linalg::Matrix& a1,
                                         const linalg::Matrix& a2);

// Success counts over n = |A1| + |A2| trials; strict inequalities, so a tie
// is a failure on both sides.
// k1: A1 terms closer to T1, plus A2 terms closer to T2 (bias-consistent).
// k2: A1 terms closer to T1, plus A2 terms closer to T1 (everything pulled
// towards the first target side).
struct SuccessCounts {
  std::size_t k1 = 0;
  std::size_t k2 = 0;
  std::size_t n = 0;
};
SuccessCounts successes(const SimilaritySequences& s);

enum class Alternative { greater, less, two_sided };

std::string to_string(Alternative alt);
Alternative alternative_from_string(const std::string& s);

// Exact binomial-test p-value for k successes in n trials at null rate p0.
// greater: P[K >= k]; less: P[K <= k]; two_sided: min(1, 2 min(both)).
// Tails are computed through the regularized incomplete beta function.
// Throws unless 0 < p0 < 1 and k <= n and n >= 1.
double binom_pvalue(std::size_t k, std::size_t n, double p0, Alternative alt);

struct WeatTest {
  std::string id;          // e.g. "neutral_k1_greater"
  std::size_t k = 0;       // which count was tested
  double p0 = 0.5;
  Alternative alternative = Alternative::greater;
  double p_value = 1.0;
  bool operator==(const WeatTest&) const = default;
};

struct WeatOutcome {
  std::string concept_name;
  std::string scenario;
  std::size_t k1 = 0;
  std::size_t k2 = 0;
  std::size_t n = 0;
  double p_hat = 0.0;  // displayed success rate for the scenario
  std::vector<WeatTest> tests;
  bool operator==(const WeatOutcome&) const = default;
};

struct WeatOptions {
  // When set, target terms are rendered through the scenario template too;
  // default embeds targets as bare terms and templates only attributes.
  bool template_targets = false;
};

// Runs the scenario's test battery:
//   neutral:   k1 vs p0=1/2, greater            (p_hat = k1/n)
//   debiasing: k1 vs p0=1/2, two-sided, and
//              k2 vs p0=|A1|/n, greater          (p_hat = max(k1,k2)/n)
//   positive:  k2 vs p0=|A1|/n, greater          (p_hat = k2/n)
//   negative:  k2 vs p0=|A1|/n, less             (p_hat = k2/n)
WeatOutcome run_weat_scenario(const corpus::WeatSpec& spec,
                              const std::string& scenario_name,
                              const scenario::TemplateSet& templates,
                              provider::Provider& prov,
                              const WeatOptions& options = {});

}  // namespace embias::weat
