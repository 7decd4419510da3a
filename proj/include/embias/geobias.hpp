#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "embias/concepts.hpp"
#include "embias/corpus.hpp"
#include "embias/linalg.hpp"
#include "embias/provider.hpp"
#include "embias/scenario.hpp"

namespace embias::geobias {

enum class CorrelationKind { pearson, spearman };

// Indicator convention for the Monte-Carlo p-value. `signed_ge` keeps the
// formula literal (corr >= |rho|, signed); `absolute` compares |corr| >= |rho|
// and is provided as an explicitly non-default variant.
enum class IndicatorMode { signed_ge, absolute };

double pearson_correlation(std::span<const double> a, std::span<const double> b);
double spearman_correlation(std::span<const double> a, std::span<const double> b);

// corr(y, A g) with the configured correlation kind.
double bias_correlation(std::span<const double> projections,
                        std::span<const double> labels,
                        CorrelationKind kind = CorrelationKind::pearson);

// Fraction of N random unit directions a_i (gaussian, normalized, direction i
// derived from (seed, i) so evaluation order is irrelevant) with
// corr(y, A a_i) >= |rho|. Throws on N < 1000, constant labels, or a matrix
// whose rows are all identical.
double permutation_pvalue(const linalg::Matrix& a, std::span<const double> labels,
                          double abs_rho, std::size_t n_samples,
                          std::uint64_t seed,
                          CorrelationKind kind = CorrelationKind::pearson,
                          IndicatorMode mode = IndicatorMode::signed_ge);

struct GeoBiasResult {
  std::string concept_name;
  std::string scenario;
  std::string attribute_kind;
  double rho = 0.0;
  double abs_rho = 0.0;
  double p_value = 1.0;
  double auc_g = 0.0;
  std::size_t selected_index = 0;
  bool weak_concept = false;
  std::size_t n_attributes = 0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  bool operator==(const GeoBiasResult&) const = default;
};

struct GeoAuditOptions {
  std::size_t n_samples = 10000;
  std::uint64_t seed = 7;
  std::size_t k_search = 0;  // 0 = min(pairs, 10)
  CorrelationKind correlation = CorrelationKind::pearson;
  IndicatorMode indicator = IndicatorMode::signed_ge;
};

// Full geometric audit of one (concept, scenario) cell: learn the concept
// direction from the pairs, embed the scenario-templated attributes, project
// them onto the direction, and score the projection/label correlation against
// the random-direction null. A pre-learned subspace can be supplied to avoid
// re-learning per scenario.
GeoBiasResult run_geometric_audit(const corpus::ConceptPairSet& pairs,
                                  const corpus::LabeledAttributeSet& attributes,
                                  const std::string& scenario_name,
                                  const scenario::TemplateSet& templates,
                                  provider::Provider& prov,
                                  const GeoAuditOptions& options = {},
                                  const concepts::ConceptSubspace* learned = nullptr);

}  // namespace embias::geobias
