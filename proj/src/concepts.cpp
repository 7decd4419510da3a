#include "embias/concepts.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace embias::concepts {

linalg::Matrix delta_matrix(const linalg::Matrix& x1, const linalg::Matrix& x2) {
  if (x1.rows() != x2.rows() || x1.cols() != x2.cols()) {
    throw std::invalid_argument("delta_matrix: shapes differ");
  }
  if (x1.empty()) throw std::invalid_argument("delta_matrix: empty input");
  x1.check_finite("delta_matrix x1");
  x2.check_finite("delta_matrix x2");
  linalg::Matrix d(x1.rows(), x1.cols());
  for (std::size_t r = 0; r < x1.rows(); ++r) {
    for (std::size_t c = 0; c < x1.cols(); ++c) {
      d.at(r, c) = x2.at(r, c) - x1.at(r, c);
    }
  }
  return d;
}

AucResult auc_of_direction(std::span<const double> b, const linalg::Matrix& x1,
                           const linalg::Matrix& x2) {
  if (x1.empty() || x2.empty()) {
    throw std::invalid_argument("auc_of_direction: empty sample");
  }
  if (x1.cols() != x2.cols() || b.size() != x1.cols()) {
    throw std::invalid_argument("auc_of_direction: dimension mismatch");
  }
  const linalg::Vector s1 = linalg::project(x1, b);
  const linalg::Vector s2 = linalg::project(x2, b);

  // Rank statistic via midranks over the pooled scores: U counts the
  // cross-pairs where the x2 score is higher, ties worth 1/2.
  struct Obs {
    double score;
    int cls;  // 0 = x1, 1 = x2
  };
  std::vector<Obs> pooled;
  pooled.reserve(s1.size() + s2.size());
  for (double s : s1) pooled.push_back({s, 0});
  for (double s : s2) pooled.push_back({s, 1});
  std::sort(pooled.begin(), pooled.end(),
            [](const Obs& a, const Obs& b2) { return a.score < b2.score; });

  double rank_sum2 = 0.0;
  std::size_t i = 0;
  while (i < pooled.size()) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j].score == pooled[i].score) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
    for (std::size_t t = i; t < j; ++t) {
      if (pooled[t].cls == 1) rank_sum2 += midrank;
    }
    i = j;
  }
  const double n1 = static_cast<double>(s1.size());
  const double n2 = static_cast<double>(s2.size());
  const double u2 = rank_sum2 - n2 * (n2 + 1.0) / 2.0;
  const double raw = u2 / (n1 * n2);

  AucResult out;
  if (raw >= 0.5) {
    out.value = raw;
    out.orientation = +1;
  } else {
    out.value = 1.0 - raw;
    out.orientation = -1;
  }
  return out;
}

ConceptSubspace learn_concept_from_embeddings(const std::string& concept_name,
                                              const linalg::Matrix& x1,
                                              const linalg::Matrix& x2,
                                              std::size_t k_search,
                                              bool center_rows) {
  if (x1.rows() < 2) {
    throw std::invalid_argument(
        "learn_concept: at least 2 pairs are required to score directions");
  }
  ConceptSubspace out;
  out.concept_name = concept_name;

  linalg::Matrix delta = delta_matrix(x1, x2);
  if (center_rows) {
    // Optional comparison mode: remove the mean difference so the
    // decomposition sees deviations between pairs, not the shared offset.
    linalg::Vector mean(delta.cols(), 0.0);
    for (std::size_t r = 0; r < delta.rows(); ++r) {
      for (std::size_t c = 0; c < delta.cols(); ++c) mean[c] += delta.at(r, c);
    }
    for (double& m : mean) m /= static_cast<double>(delta.rows());
    for (std::size_t r = 0; r < delta.rows(); ++r) {
      for (std::size_t c = 0; c < delta.cols(); ++c) delta.at(r, c) -= mean[c];
    }
  }
  const std::size_t max_k = std::min(delta.rows(), delta.cols());
  std::size_t k = (k_search == 0) ? std::min<std::size_t>(max_k, 10) : k_search;
  if (k > max_k) {
    out.warnings.push_back("k_search " + std::to_string(k_search) +
                           " clipped to " + std::to_string(max_k) +
                           " (difference-matrix rank bound)");
    k = max_k;
  }

  out.basis = linalg::top_singular_directions(delta, k);
  if (out.basis.directions.empty()) {
    throw std::runtime_error(
        "learn_concept: difference matrix has no usable direction");
  }
  if (out.basis.directions.size() < k) {
    out.warnings.push_back(
        "numerical rank " + std::to_string(out.basis.directions.size()) +
        " is below the requested " + std::to_string(k) + " directions");
  }

  // Pick the direction that best separates the two pair sides.
  std::vector<AucResult> scores;
  scores.reserve(out.basis.directions.size());
  for (const auto& dir : out.basis.directions) {
    scores.push_back(auc_of_direction(dir, x1, x2));
    out.auc_per_direction.push_back(scores.back().value);
  }
  out.selected_index = static_cast<std::size_t>(std::distance(
      out.auc_per_direction.begin(),
      std::max_element(out.auc_per_direction.begin(),
                       out.auc_per_direction.end())));

  out.g = out.basis.directions[out.selected_index];
  if (scores[out.selected_index].orientation < 0) {
    for (double& x : out.g) x = -x;
  }
  out.auc_g = out.auc_per_direction[out.selected_index];
  out.weak_flag = out.auc_g < kWeakAucThreshold;
  if (out.weak_flag) {
    out.warnings.push_back("selected direction separates pairs weakly (AUC " +
                           std::to_string(out.auc_g) + " < 0.8)");
  }
  return out;
}

ConceptSubspace learn_concept(const corpus::ConceptPairSet& pairs,
                              provider::Provider& prov, std::size_t k_search,
                              bool center_rows) {
  const auto findings = corpus::validate(pairs);
  if (!findings.empty()) {
    throw std::invalid_argument("learn_concept: invalid pair set: " +
                                findings.front());
  }
  std::vector<std::string> texts;
  texts.reserve(pairs.pairs.size() * 2);
  for (const auto& p : pairs.pairs) texts.push_back(p.w1);
  for (const auto& p : pairs.pairs) texts.push_back(p.w2);
  const auto embedded = prov.embed_batch(texts);

  const std::size_t n = pairs.pairs.size();
  std::vector<linalg::Vector> rows1, rows2;
  rows1.reserve(n);
  rows2.reserve(n);
  for (std::size_t i = 0; i < n; ++i) rows1.push_back(embedded[i].values);
  for (std::size_t i = 0; i < n; ++i) rows2.push_back(embedded[n + i].values);
  return learn_concept_from_embeddings(pairs.concept_name,
                                       linalg::Matrix::from_rows(rows1),
                                       linalg::Matrix::from_rows(rows2),
                                       k_search, center_rows);
}

}  // namespace embias::concepts
