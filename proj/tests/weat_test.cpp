#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "embias/corpus.hpp"
#include "embias/synthfix.hpp"
#include "embias/weat.hpp"
#include "oracles.hpp"

using namespace embias;
using namespace embias::weat;
using linalg::Matrix;
using linalg::Vector;

namespace {

Matrix rows(const std::vector<Vector>& r) { return Matrix::from_rows(r); }

oracles::Tail to_oracle(Alternative alt) {
  switch (alt) {
    case Alternative::greater: return oracles::Tail::greater;
    case Alternative::less: return oracles::Tail::less;
    case Alternative::two_sided: return oracles::Tail::two_sided;
  }
  return oracles::Tail::greater;
}

struct RandomInstance {
  Matrix t1, t2, a1, a2;
};

RandomInstance random_instance(std::mt19937_64& gen) {
  std::normal_distribution<double> dist;
  const std::size_t dim = 3 + gen() % 12;
  auto mat = [&](std::size_t n) {
    Matrix m(n, dim);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < dim; ++c) m.at(r, c) = dist(gen);
    return m;
  };
  return {mat(1 + gen() % 5), mat(1 + gen() % 5), mat(1 + gen() % 10),
          mat(1 + gen() % 10)};
}

bool tie_free(const SimilaritySequences& s) {
  for (std::size_t l = 0; l < s.s11.size(); ++l)
    if (s.s11[l] == s.s21[l]) return false;
  for (std::size_t l = 0; l < s.s22.size(); ++l)
    if (s.s22[l] == s.s12[l]) return false;
  return true;
}

}  // namespace

TEST_CASE("similarity sequences: hand-computed 2-d example") {
  const auto s = similarity_sequences(rows({{1, 0}}), rows({{0, 1}}),
                                      rows({{2, 0}}), rows({{0, 3}}));
  REQUIRE(s.s11.size() == 1);
  REQUIRE(s.s22.size() == 1);
  CHECK(s.s11[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.s21[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(s.s22[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.s12[0] == doctest::Approx(0.0).epsilon(1e-15));

  const auto counts = successes(s);
  CHECK(counts.k1 == 2);
  CHECK(counts.k2 == 1);
  CHECK(counts.n == 2);
}

TEST_CASE("similarity sequences: identical and orthogonal degenerate cases") {
  // Attributes identical to every target: all entries 1.
  const Vector w = {0.3, 0.4};
  const auto same = similarity_sequences(rows({w, w}), rows({w}), rows({w}),
                                         rows({w, w}));
  for (double v : same.s11) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
  for (double v : same.s21) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
  for (double v : same.s22) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
  for (double v : same.s12) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));

  // An attribute orthogonal to every target scores 0 everywhere.
  const auto ortho = similarity_sequences(
      rows({{1, 0, 0}}), rows({{0, 1, 0}}), rows({{0, 0, 5}}), rows({{1, 1, 0}}));
  CHECK(ortho.s11[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(ortho.s21[0] == doctest::Approx(0.0).epsilon(1e-15));

  // Mean over targets: attribute (1,1) against T1 = {e0, e1}.
  const auto mean = similarity_sequences(rows({{1, 0}, {0, 1}}), rows({{1, 1}}),
                                         rows({{1, 1}}), rows({{1, 0}}));
  CHECK(mean.s11[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("similarity sequences input guards") {
  CHECK_THROWS(similarity_sequences(rows({{0, 0}}), rows({{0, 1}}),
                                    rows({{1, 0}}), rows({{1, 1}})));
  CHECK_THROWS(similarity_sequences(rows({{1, 0}}), rows({{0, 1}}),
                                    rows({{1, 0, 0}}), rows({{1, 1}})));
}

TEST_CASE("successes counts strict inequalities only") {
  // Identical sequences on both sides: every comparison ties, k1 = k2 = 0.
  const Vector t = {1, 1};
  const auto s = similarity_sequences(rows({t}), rows({t}), rows({{2, 2}}),
                                      rows({{3, 3}}));
  const auto counts = successes(s);
  CHECK(counts.k1 == 0);
  CHECK(counts.k2 == 0);
  CHECK(counts.n == 2);
}

TEST_CASE("weat structural invariants on random instances") {
  std::mt19937_64 gen(53);
  std::uniform_real_distribution<double> scale(0.01, 30.0);
  int tie_free_seen = 0;
  for (int t = 0; t < 100; ++t) {
    RandomInstance inst = random_instance(gen);
    const auto seqs = similarity_sequences(inst.t1, inst.t2, inst.a1, inst.a2);
    const auto counts = successes(seqs);
    CHECK(counts.n == inst.a1.rows() + inst.a2.rows());
    CHECK(counts.k1 <= counts.n);
    CHECK(counts.k2 <= counts.n);

    // Rescaling any single embedding by c > 0 never moves a cosine.
    RandomInstance scaled = inst;
    Matrix* mats[4] = {&scaled.t1, &scaled.t2, &scaled.a1, &scaled.a2};
    Matrix& m = *mats[gen() % 4];
    const std::size_t row = gen() % m.rows();
    const double c = scale(gen);
    for (std::size_t col = 0; col < m.cols(); ++col) m.at(row, col) *= c;
    const auto scaled_counts =
        successes(similarity_sequences(scaled.t1, scaled.t2, scaled.a1, scaled.a2));
    CHECK(scaled_counts.k1 == counts.k1);
    CHECK(scaled_counts.k2 == counts.k2);

    // k1 and k2 share the A1 summand: their gap is decided by A2 alone.
    long a2_forward = 0, a2_backward = 0;
    for (std::size_t l = 0; l < seqs.s22.size(); ++l) {
      if (seqs.s22[l] > seqs.s12[l]) ++a2_forward;
      if (seqs.s12[l] > seqs.s22[l]) ++a2_backward;
    }
    CHECK(long(counts.k1) - long(counts.k2) == a2_forward - a2_backward);

    if (tie_free(seqs)) {
      ++tie_free_seen;
      // Swapping (T1<->T2, A1<->A2) relabels the same comparisons: k1 is
      // preserved on tie-free instances.
      const auto swapped =
          successes(similarity_sequences(inst.t2, inst.t1, inst.a2, inst.a1));
      CHECK(swapped.k1 == counts.k1);
      // Tie-free complementarity on the A1 block.
      std::size_t fwd = 0, bwd = 0;
      for (std::size_t l = 0; l < seqs.s11.size(); ++l) {
        if (seqs.s11[l] > seqs.s21[l]) ++fwd;
        if (seqs.s21[l] > seqs.s11[l]) ++bwd;
      }
      CHECK(fwd + bwd == seqs.s11.size());
    }
  }
  CHECK(tie_free_seen >= 95);  // gaussian instances essentially never tie
}

TEST_CASE("binomial p-value worked examples") {
  CHECK(binom_pvalue(10, 10, 0.5, Alternative::greater) ==
        doctest::Approx(9.765625e-4).epsilon(1e-12));
  CHECK(binom_pvalue(8, 10, 0.5, Alternative::greater) ==
        doctest::Approx(56.0 / 1024.0).epsilon(1e-12));
  CHECK(binom_pvalue(5, 10, 0.5, Alternative::two_sided) == 1.0);
  CHECK(binom_pvalue(0, 10, 0.5, Alternative::less) ==
        doctest::Approx(std::pow(0.5, 10)).epsilon(1e-12));
  CHECK(binom_pvalue(0, 10, 0.5, Alternative::greater) == 1.0);
  CHECK(binom_pvalue(10, 10, 0.5, Alternative::less) == 1.0);
}

TEST_CASE("binomial p-value guards") {
  CHECK_THROWS_AS(binom_pvalue(5, 10, 0.0, Alternative::greater),
                  std::invalid_argument);
  CHECK_THROWS_AS(binom_pvalue(5, 10, 1.0, Alternative::greater),
                  std::invalid_argument);
  CHECK_THROWS_AS(binom_pvalue(5, 10, -0.2, Alternative::greater),
                  std::invalid_argument);
  CHECK_THROWS_AS(binom_pvalue(5, 10, 1.5, Alternative::greater),
                  std::invalid_argument);
  CHECK_THROWS_AS(binom_pvalue(11, 10, 0.5, Alternative::greater),
                  std::invalid_argument);
  CHECK_THROWS_AS(binom_pvalue(0, 0, 0.5, Alternative::greater),
                  std::invalid_argument);
}

TEST_CASE("binomial p-value matches exhaustive enumeration (spot sweep)") {
  // The acceptance suite sweeps n <= 60; this is the fast inner loop.
  const double p0s[] = {0.5, 18.0 / 48.0, 19.0 / 34.0, 17.0 / 31.0};
  for (std::size_t n = 1; n <= 25; ++n) {
    for (double p0 : p0s) {
      for (std::size_t k = 0; k <= n; ++k) {
        for (Alternative alt : {Alternative::greater, Alternative::less,
                                Alternative::two_sided}) {
          const double got = binom_pvalue(k, n, p0, alt);
          const double want = oracles::binom_tail(k, n, p0, to_oracle(alt));
          CHECK(std::abs(got - want) <= 1e-12);
          CHECK(got >= 0.0);
          CHECK(got <= 1.0);
        }
        // P(K>=k) + P(K<=k) = 1 + P(K=k).
        const double up = binom_pvalue(k, n, p0, Alternative::greater);
        const double lo = binom_pvalue(k, n, p0, Alternative::less);
        const auto pmf = oracles::binom_pmf(n, p0);
        CHECK(std::abs(up + lo - 1.0 - double(pmf[k])) <= 1e-12);
      }
    }
  }
}

TEST_CASE("alternative names round-trip") {
  for (Alternative alt : {Alternative::greater, Alternative::less,
                          Alternative::two_sided}) {
    CHECK(alternative_from_string(to_string(alt)) == alt);
  }
  CHECK(to_string(Alternative::two_sided) == "two_sided");
  CHECK_THROWS(alternative_from_string("sideways"));
}

namespace {

// Synthetic WEAT world: bare targets plus rendered attribute prompts, with
// every attribute pulled towards a chosen target side.
provider::MapProvider make_weat_provider(const corpus::WeatSpec& spec,
                                         const std::string& scenario_name,
                                         double a1_lean, double a2_lean) {
  const auto templates = scenario::TemplateSet::builtin();
  std::map<std::string, Vector> vecs;
  vecs[spec.t1.front()] = {1.0, 0.0};
  vecs[spec.t2.front()] = {0.0, 1.0};
  int i = 0;
  auto place = [&](const std::vector<std::string>& terms, double lean) {
    for (const auto& term : terms) {
      ++i;
      // lean > 0 pulls towards t1, lean < 0 towards t2.
      const double towards_t1 = 0.5 + lean + 0.01 * i;
      const double towards_t2 = 0.5 - lean;
      vecs[templates.render(spec.concept_name, scenario_name, term)] = {
          towards_t1, towards_t2};
    }
  };
  place(spec.a1, a1_lean);
  place(spec.a2, a2_lean);
  provider::ProviderConfig cfg;
  cfg.model = "weat-world";
  return provider::MapProvider(vecs, cfg);
}

const corpus::WeatSpec kToySpec{
    "gender", {"she"}, {"he"}, {"nurse", "teacher"},
    {"engineer", "pilot", "magician"}};

}  // namespace

TEST_CASE("scenario battery: neutral tests k1 against one half") {
  auto prov = make_weat_provider(kToySpec, "neutral", 0.3, -0.3);
  const WeatOutcome out =
      run_weat_scenario(kToySpec, "neutral", scenario::TemplateSet::builtin(), prov);
  CHECK(out.concept_name == "gender");
  CHECK(out.scenario == "neutral");
  CHECK(out.n == 5);
  CHECK(out.k1 == 5);  // A1 towards T1, A2 towards T2: fully bias-consistent
  REQUIRE(out.tests.size() == 1);
  CHECK(out.tests[0].id == "neutral_k1_greater");
  CHECK(out.tests[0].k == out.k1);
  CHECK(out.tests[0].p0 == 0.5);
  CHECK(out.tests[0].alternative == Alternative::greater);
  CHECK(out.tests[0].p_value ==
        doctest::Approx(std::pow(0.5, 5)).epsilon(1e-12));
  CHECK(out.p_hat == 1.0);
}

TEST_CASE("scenario battery: debiasing runs both tests, p_hat = max/n") {
  auto prov = make_weat_provider(kToySpec, "debiasing", 0.3, 0.3);
  const WeatOutcome out = run_weat_scenario(kToySpec, "debiasing",
                                            scenario::TemplateSet::builtin(), prov);
  // Everything leans to T1: A1 part of k1 = 2, A2 part = 0 -> k1 = 2; k2 = 5.
  CHECK(out.k1 == 2);
  CHECK(out.k2 == 5);
  REQUIRE(out.tests.size() == 2);
  CHECK(out.tests[0].id == "debiasing_k1_two_sided");
  CHECK(out.tests[0].k == out.k1);
  CHECK(out.tests[0].p0 == 0.5);
  CHECK(out.tests[0].alternative == Alternative::two_sided);
  CHECK(out.tests[1].id == "debiasing_k2_greater");
  CHECK(out.tests[1].k == out.k2);
  CHECK(out.tests[1].p0 == doctest::Approx(2.0 / 5.0).epsilon(1e-15));
  CHECK(out.tests[1].alternative == Alternative::greater);
  CHECK(out.p_hat == 1.0);  // max(2, 5) / 5
}

TEST_CASE("scenario battery: positive fixture reaches p_hat 1.0") {
  auto prov = make_weat_provider(kToySpec, "positive", 0.3, 0.3);
  const WeatOutcome out = run_weat_scenario(kToySpec, "positive",
                                            scenario::TemplateSet::builtin(), prov);
  CHECK(out.k2 == out.n);
  CHECK(out.p_hat == 1.0);
  REQUIRE(out.tests.size() == 1);
  CHECK(out.tests[0].id == "positive_k2_greater");
  CHECK(out.tests[0].p0 == doctest::Approx(2.0 / 5.0).epsilon(1e-15));
}

TEST_CASE("scenario battery: negative fixture reaches p_hat 0.0") {
  auto prov = make_weat_provider(kToySpec, "negative", -0.3, -0.3);
  const WeatOutcome out = run_weat_scenario(kToySpec, "negative",
                                            scenario::TemplateSet::builtin(), prov);
  CHECK(out.k2 == 0);
  CHECK(out.p_hat == 0.0);
  REQUIRE(out.tests.size() == 1);
  CHECK(out.tests[0].id == "negative_k2_less");
  CHECK(out.tests[0].alternative == Alternative::less);
  // Less-tail at k = 0 is exactly (1 - p0)^n.
  CHECK(out.tests[0].p_value ==
        doctest::Approx(std::pow(1.0 - 2.0 / 5.0, 5)).epsilon(1e-12));
}

TEST_CASE("unknown scenario and invalid specs are rejected") {
  auto prov = make_weat_provider(kToySpec, "neutral", 0.3, -0.3);
  CHECK_THROWS(run_weat_scenario(kToySpec, "diagonal",
                                 scenario::TemplateSet::builtin(), prov));
  corpus::WeatSpec bad = kToySpec;
  bad.a1.clear();
  CHECK_THROWS(run_weat_scenario(bad, "neutral",
                                 scenario::TemplateSet::builtin(), prov));
}

TEST_CASE("builtin gender spec runs 48 trials on the synthetic fixture") {
  const auto bundle = corpus::load_builtin("gender");
  provider::ProviderConfig cfg;
  cfg.model = "synthetic-fixture";
  provider::MapProvider prov(synthfix::make_audit_vectors(1), cfg);
  const WeatOutcome out = run_weat_scenario(
      bundle.weat, "neutral", scenario::TemplateSet::builtin(), prov);
  CHECK(out.n == 48);
  CHECK(out.tests[0].p0 == 0.5);
  // The fixture plants a strong stereotype-consistent geometry.
  CHECK(out.k1 == 48);
}
