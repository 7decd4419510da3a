#include "embias/weat.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace embias::weat {
namespace {

// Continued-fraction evaluation (modified Lentz) for the regularized
// incomplete beta function; converges quickly for the x range it is called
// with after the symmetry switch below.
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

// I_x(a, b) for a, b > 0, 0 <= x <= 1.
double reg_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

// P[K >= k] for K ~ Binomial(n, p): survival through the beta identity.
double binom_upper_tail(std::size_t k, std::size_t n, double p) {
  if (k == 0) return 1.0;
  if (k > n) return 0.0;
  return reg_incomplete_beta(static_cast<double>(k),
                             static_cast<double>(n - k + 1), p);
}

// P[K <= k].
double binom_lower_tail(std::size_t k, std::size_t n, double p) {
  if (k >= n) return 1.0;
  return 1.0 - binom_upper_tail(k + 1, n, p);
}

}  // namespace

SimilaritySequences similarity_sequences(const linalg::Matrix& t1,
                                         const linalg::Matrix& t2,
                                         const linalg::Matrix& a1,
                                         const linalg::Matrix& a2) {
  if (t1.empty() || t2.empty() || a1.empty() || a2.empty()) {
    throw std::invalid_argument("similarity_sequences: empty embedding set");
  }
  const std::size_t p = t1.cols();
  if (t2.cols() != p || a1.cols() != p || a2.cols() != p) {
    throw std::invalid_argument("similarity_sequences: dimension mismatch");
  }

  auto mean_sim = [](const linalg::Matrix& attrs, const linalg::Matrix& targets) {
    std::vector<double> out(attrs.rows());
    for (std::size_t l = 0; l < attrs.rows(); ++l) {
      double sum = 0.0;
      for (std::size_t t = 0; t < targets.rows(); ++t) {
        sum += linalg::cosine(attrs.row(l), targets.row(t));
      }
      out[l] = sum / static_cast<double>(targets.rows());
    }
    return out;
  };

  SimilaritySequences s;
  s.s11 = mean_sim(a1, t1);
  s.s21 = mean_sim(a1, t2);
  s.s22 = mean_sim(a2, t2);
  s.s12 = mean_sim(a2, t1);
  return s;
}

SuccessCounts successes(const SimilaritySequences& s) {
  if (s.s11.size() != s.s21.size() || s.s22.size() != s.s12.size()) {
    throw std::invalid_argument("successes: sequence lengths inconsistent");
  }
  SuccessCounts out;
  out.n = s.s11.size() + s.s22.size();
  for (std::size_t i = 0; i < s.s11.size(); ++i) {
    if (s.s11[i] > s.s21[i]) {
      ++out.k1;
      ++out.k2;
    }
  }
  for (std::size_t i = 0; i < s.s22.size(); ++i) {
    if (s.s22[i] > s.s12[i]) ++out.k1;
    if (s.s12[i] > s.s22[i]) ++out.k2;
  }
  return out;
}

std::string to_string(Alternative alt) {
  switch (alt) {
    case Alternative::greater:
      return "greater";
    case Alternative::less:
      return "less";
    case Alternative::two_sided:
      return "two_sided";
  }
  return "?";
}

Alternative alternative_from_string(const std::string& s) {
  if (s == "greater") return Alternative::greater;
  if (s == "less") return Alternative::less;
  if (s == "two_sided") return Alternative::two_sided;
  throw std::invalid_argument("unknown alternative '" + s + "'");
}

double binom_pvalue(std::size_t k, std::size_t n, double p0, Alternative alt) {
  if (n == 0) throw std::invalid_argument("binom_pvalue: n must be positive");
  if (k > n) throw std::invalid_argument("binom_pvalue: k exceeds n");
  if (!(p0 > 0.0) || !(p0 < 1.0)) {
    throw std::invalid_argument("binom_pvalue: p0 must lie strictly in (0, 1)");
  }
  switch (alt) {
    case Alternative::greater:
      return binom_upper_tail(k, n, p0);
    case Alternative::less:
      return binom_lower_tail(k, n, p0);
    case Alternative::two_sided: {
      const double lo = binom_lower_tail(k, n, p0);
      const double hi = binom_upper_tail(k, n, p0);
      return std::min(1.0, 2.0 * std::min(lo, hi));
    }
  }
  throw std::invalid_argument("binom_pvalue: unknown alternative");
}

WeatOutcome run_weat_scenario(const corpus::WeatSpec& spec,
                              const std::string& scenario_name,
                              const scenario::TemplateSet& templates,
                              provider::Provider& prov,
                              const WeatOptions& options) {
  const auto findings = corpus::validate(spec);
  if (!findings.empty()) {
    throw std::invalid_argument("run_weat_scenario: invalid spec: " +
                                findings.front());
  }

  auto embed_terms = [&](const std::vector<std::string>& terms, bool is_target) {
    std::vector<std::string> texts;
    texts.reserve(terms.size());
    for (const auto& term : terms) {
      const bool templated = is_target ? options.template_targets : true;
      texts.push_back(templated ? templates.render(spec.concept_name,
                                                   scenario_name, term)
                                : term);
    }
    return provider::to_matrix(prov.embed_batch(texts));
  };

  const linalg::Matrix t1 = embed_terms(spec.t1, true);
  const linalg::Matrix t2 = embed_terms(spec.t2, true);
  const linalg::Matrix a1 = embed_terms(spec.a1, false);
  const linalg::Matrix a2 = embed_terms(spec.a2, false);

  const SimilaritySequences seqs = similarity_sequences(t1, t2, a1, a2);
  const SuccessCounts counts = successes(seqs);

  WeatOutcome out;
  out.concept_name = spec.concept_name;
  out.scenario = scenario_name;
  out.k1 = counts.k1;
  out.k2 = counts.k2;
  out.n = counts.n;

  const double nd = static_cast<double>(counts.n);
  const double p0_balanced = 0.5;
  const double p0_a1_share = static_cast<double>(spec.a1.size()) / nd;

  if (scenario_name == "neutral") {
    out.p_hat = static_cast<double>(counts.k1) / nd;
    out.tests.push_back({"neutral_k1_greater", counts.k1, p0_balanced,
                         Alternative::greater,
                         binom_pvalue(counts.k1, counts.n, p0_balanced,
                                      Alternative::greater)});
  } else if (scenario_name == "debiasing") {
    out.p_hat = static_cast<double>(std::max(counts.k1, counts.k2)) / nd;
    out.tests.push_back({"debiasing_k1_two_sided", counts.k1, p0_balanced,
                         Alternative::two_sided,
                         binom_pvalue(counts.k1, counts.n, p0_balanced,
                                      Alternative::two_sided)});
    out.tests.push_back({"debiasing_k2_greater", counts.k2, p0_a1_share,
                         Alternative::greater,
                         binom_pvalue(counts.k2, counts.n, p0_a1_share,
                                      Alternative::greater)});
  } else if (scenario_name == "positive") {
    out.p_hat = static_cast<double>(counts.k2) / nd;
    out.tests.push_back({"positive_k2_greater", counts.k2, p0_a1_share,
                         Alternative::greater,
                         binom_pvalue(counts.k2, counts.n, p0_a1_share,
                                      Alternative::greater)});
  } else if (scenario_name == "negative") {
    out.p_hat = static_cast<double>(counts.k2) / nd;
    out.tests.push_back({"negative_k2_less", counts.k2, p0_a1_share,
                         Alternative::less,
                         binom_pvalue(counts.k2, counts.n, p0_a1_share,
                                      Alternative::less)});
  } else {
    throw std::invalid_argument("run_weat_scenario: unknown scenario '" +
                                scenario_name + "'");
  }
  return out;
}

}  // namespace embias::weat
