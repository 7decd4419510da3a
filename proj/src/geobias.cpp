#include "embias/geobias.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "embias/rng.hpp"

namespace embias::geobias {
namespace {

void check_corr_inputs(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("correlation: length mismatch");
  }
  if (a.size() < 3) {
    throw std::invalid_argument("correlation: need at least 3 samples");
  }
  for (double x : a) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument("correlation: non-finite input");
    }
  }
  for (double x : b) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument("correlation: non-finite input");
    }
  }
}

std::vector<double> midranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && v[order[j]] == v[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = midrank;
    i = j;
  }
  return ranks;
}

}  // namespace

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
  check_corr_inputs(a, b);
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    cov += da * db;
    va += da * da;
    vb += db * db;
  }
  if (va == 0.0 || vb == 0.0) {
    throw std::invalid_argument(
        "correlation: constant input has no correlation");
  }
  return cov / std::sqrt(va * vb);
}

double spearman_correlation(std::span<const double> a, std::span<const double> b) {
  check_corr_inputs(a, b);
  const std::vector<double> ra = midranks(a);
  const std::vector<double> rb = midranks(b);
  return pearson_correlation(ra, rb);
}

double bias_correlation(std::span<const double> projections,
                        std::span<const double> labels, CorrelationKind kind) {
  return kind == CorrelationKind::pearson
             ? pearson_correlation(projections, labels)
             : spearman_correlation(projections, labels);
}

double permutation_pvalue(const linalg::Matrix& a, std::span<const double> labels,
                          double abs_rho, std::size_t n_samples,
                          std::uint64_t seed, CorrelationKind kind,
                          IndicatorMode mode) {
  if (n_samples < 1000) {
    throw std::invalid_argument(
        "permutation_pvalue: at least 1000 samples required");
  }
  if (!std::isfinite(abs_rho) || abs_rho < 0.0) {
    throw std::invalid_argument("permutation_pvalue: abs_rho must be >= 0");
  }
  if (a.rows() != labels.size()) {
    throw std::invalid_argument("permutation_pvalue: one label per matrix row");
  }
  a.check_finite("permutation_pvalue matrix");

  // Degenerate inputs make every sample correlation undefined; reject them
  // up front rather than failing N times.
  {
    bool label_varies = false;
    for (std::size_t i = 1; i < labels.size(); ++i) {
      if (labels[i] != labels[0]) {
        label_varies = true;
        break;
      }
    }
    if (labels.size() < 3 || !label_varies) {
      throw std::invalid_argument(
          "permutation_pvalue: labels are constant or too few");
    }
    bool row_varies = false;
    for (std::size_t r = 1; r < a.rows() && !row_varies; ++r) {
      for (std::size_t c = 0; c < a.cols(); ++c) {
        if (a.at(r, c) != a.at(0, c)) {
          row_varies = true;
          break;
        }
      }
    }
    if (!row_varies) {
      throw std::invalid_argument(
          "permutation_pvalue: all matrix rows are identical");
    }
  }

  const std::size_t p = a.cols();
  std::size_t hits = 0;
  linalg::Vector direction(p);
  for (std::size_t i = 0; i < n_samples; ++i) {
    Rng rng = Rng::for_index(seed, i);
    for (std::size_t c = 0; c < p; ++c) direction[c] = rng.gaussian();
    double nrm = linalg::norm(direction);
    while (nrm == 0.0) {  // astronomically unlikely; redraw deterministically
      for (std::size_t c = 0; c < p; ++c) direction[c] = rng.gaussian();
      nrm = linalg::norm(direction);
    }
    for (std::size_t c = 0; c < p; ++c) direction[c] /= nrm;

    const linalg::Vector proj = linalg::project(a, direction);
    double corr;
    try {
      corr = bias_correlation(proj, labels, kind);
    } catch (const std::invalid_argument&) {
      continue;  // constant projection: correlation undefined, not a hit
    }
    const double statistic = mode == IndicatorMode::absolute ? std::abs(corr) : corr;
    if (statistic >= abs_rho) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n_samples);
}

GeoBiasResult run_geometric_audit(const corpus::ConceptPairSet& pairs,
                                  const corpus::LabeledAttributeSet& attributes,
                                  const std::string& scenario_name,
                                  const scenario::TemplateSet& templates,
                                  provider::Provider& prov,
                                  const GeoAuditOptions& options,
                                  const concepts::ConceptSubspace* learned) {
  const auto attr_findings = corpus::validate(attributes);
  if (!attr_findings.empty()) {
    throw std::invalid_argument("run_geometric_audit: invalid attribute set: " +
                                attr_findings.front());
  }

  concepts::ConceptSubspace local;
  if (learned == nullptr) {
    local = concepts::learn_concept(pairs, prov, options.k_search);
    learned = &local;
  }

  std::vector<std::string> prompts;
  linalg::Vector labels;
  prompts.reserve(attributes.entries.size());
  labels.reserve(attributes.entries.size());
  for (const auto& e : attributes.entries) {
    prompts.push_back(
        templates.render(pairs.concept_name, scenario_name, e.term));
    labels.push_back(e.label);
  }

  const linalg::Matrix a = provider::to_matrix(prov.embed_batch(prompts));
  if (a.cols() != learned->g.size()) {
    throw std::runtime_error(
        "run_geometric_audit: attribute embeddings and concept direction "
        "have different dimensions");
  }

  const linalg::Vector projections = linalg::project(a, learned->g);
  const double rho =
      bias_correlation(projections, labels, options.correlation);

  GeoBiasResult out;
  out.concept_name = pairs.concept_name;
  out.scenario = scenario_name;
  out.attribute_kind = attributes.kind;
  out.rho = rho;
  out.abs_rho = std::abs(rho);
  out.p_value =
      permutation_pvalue(a, labels, out.abs_rho, options.n_samples,
                         options.seed, options.correlation, options.indicator);
  out.auc_g = learned->auc_g;
  out.selected_index = learned->selected_index;
  out.weak_concept = learned->weak_flag;
  out.n_attributes = attributes.entries.size();
  out.n_samples = options.n_samples;
  out.seed = options.seed;
  return out;
}

}  // namespace embias::geobias
