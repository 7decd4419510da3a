#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "embias/geobias.hpp"
#include "embias/synthfix.hpp"
#include "oracles.hpp"

using namespace embias;
using namespace embias::geobias;
using linalg::Matrix;
using linalg::Vector;

namespace {

Matrix random_matrix(std::mt19937_64& gen, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> dist;
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m.at(r, c) = dist(gen);
  return m;
}

}  // namespace

TEST_CASE("pearson correlation worked examples") {
  const std::vector<double> y = {0, 1, 2};
  CHECK(bias_correlation(y, y) == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<double> flipped = {5, 3, 1};  // affine flip of y
  CHECK(bias_correlation(flipped, y) == doctest::Approx(-1.0).epsilon(1e-12));

  const std::vector<double> a_g = {1, 2, 4};
  CHECK(bias_correlation(a_g, y) == doctest::Approx(0.98198).epsilon(1e-5));
  CHECK(bias_correlation(a_g, y) ==
        doctest::Approx(oracles::pearson(a_g, y)).epsilon(1e-12));
}

TEST_CASE("pearson matches the brute-force oracle on random data") {
  std::mt19937_64 gen(31);
  std::normal_distribution<double> dist;
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 3 + gen() % 40;
    std::vector<double> a(n), b(n);
    for (auto& x : a) x = dist(gen);
    for (auto& x : b) x = dist(gen);
    CHECK(pearson_correlation(a, b) ==
          doctest::Approx(oracles::pearson(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("pearson is invariant under positive affine maps") {
  std::mt19937_64 gen(32);
  std::normal_distribution<double> dist;
  std::uniform_real_distribution<double> c_dist(0.01, 50.0);
  std::uniform_real_distribution<double> d_dist(-20.0, 20.0);
  for (int t = 0; t < 40; ++t) {
    std::vector<double> a(12), y(12);
    for (auto& x : a) x = dist(gen);
    for (auto& x : y) x = dist(gen);
    const double base = bias_correlation(a, y);
    const double c = c_dist(gen), d = d_dist(gen);
    std::vector<double> mapped(a);
    for (auto& x : mapped) x = c * x + d;
    CHECK(std::abs(bias_correlation(mapped, y) - base) <= 1e-12);
  }
}

TEST_CASE("correlation guards") {
  CHECK_THROWS_AS(bias_correlation(std::vector<double>{1, 2},
                                   std::vector<double>{1, 2}),
                  std::invalid_argument);  // too short
  CHECK_THROWS_AS(bias_correlation(std::vector<double>{1, 1, 1},
                                   std::vector<double>{1, 2, 3}),
                  std::invalid_argument);  // constant input
  CHECK_THROWS_AS(bias_correlation(std::vector<double>{1, 2, 3},
                                   std::vector<double>{1, 2}),
                  std::invalid_argument);  // length mismatch
}

TEST_CASE("spearman depends only on ranks") {
  const std::vector<double> y = {1, 2, 3, 5};
  const std::vector<double> blown = {2, 4, 9, 1000};  // monotone in y
  CHECK(spearman_correlation(blown, y) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pearson_correlation(blown, y) < 0.99);
  CHECK(bias_correlation(blown, y, CorrelationKind::spearman) ==
        doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<double> reversed = {9, 7, 5, 1};
  CHECK(spearman_correlation(reversed, y) ==
        doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("permutation p-value: sample-count floor and input guards") {
  std::mt19937_64 gen(33);
  const Matrix a = random_matrix(gen, 12, 6);
  std::vector<double> y(12);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = double(i % 5);

  CHECK_THROWS_AS(permutation_pvalue(a, y, 0.5, 999, 7),
                  std::invalid_argument);
  CHECK_NOTHROW(permutation_pvalue(a, y, 0.5, 1000, 7));
  CHECK_THROWS_AS(permutation_pvalue(a, y, -0.1, 1000, 7),
                  std::invalid_argument);
  CHECK_THROWS_AS(permutation_pvalue(a, y, std::nan(""), 1000, 7),
                  std::invalid_argument);

  std::vector<double> constant(12, 1.0);
  CHECK_THROWS_AS(permutation_pvalue(a, constant, 0.5, 1000, 7),
                  std::invalid_argument);

  Matrix same_rows(5, 3);
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 3; ++c) same_rows.at(r, c) = double(c);
  std::vector<double> y5 = {0, 1, 2, 3, 4};
  CHECK_THROWS_AS(permutation_pvalue(same_rows, y5, 0.5, 1000, 7),
                  std::invalid_argument);
}

TEST_CASE("permutation p-value: a supra-maximal threshold hits nothing") {
  std::mt19937_64 gen(34);
  const Matrix a = random_matrix(gen, 10, 8);
  std::vector<double> y(10);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = double(i);
  CHECK(permutation_pvalue(a, y, 1.0001, 2000, 7) == 0.0);
}

TEST_CASE("permutation p-value: zero threshold sits near one half") {
  std::mt19937_64 gen(35);
  const Matrix a = random_matrix(gen, 40, 24);
  std::vector<double> y(40);
  std::normal_distribution<double> dist;
  for (auto& v : y) v = dist(gen);
  const double p = permutation_pvalue(a, y, 0.0, 10000, 7);
  CHECK(p >= 0.48);
  CHECK(p <= 0.52);
}

TEST_CASE("permutation p-value: nonincreasing in the threshold, reproducible") {
  std::mt19937_64 gen(36);
  const Matrix a = random_matrix(gen, 20, 10);
  std::vector<double> y(20);
  std::normal_distribution<double> dist;
  for (auto& v : y) v = dist(gen);

  double prev = 1.1;
  for (double rho = 0.0; rho <= 1.01; rho += 0.1) {
    const double p = permutation_pvalue(a, y, rho, 2000, 11);
    CHECK(p <= prev);
    prev = p;
  }

  const double p1 = permutation_pvalue(a, y, 0.3, 2000, 11);
  const double p2 = permutation_pvalue(a, y, 0.3, 2000, 11);
  CHECK(p1 == p2);  // bit-identical
  const double other_seed = permutation_pvalue(a, y, 0.3, 2000, 12);
  CHECK(p1 != other_seed);  // seed matters (almost surely)
}

TEST_CASE("absolute indicator mode dominates the signed one") {
  std::mt19937_64 gen(37);
  const Matrix a = random_matrix(gen, 15, 8);
  std::vector<double> y(15);
  std::normal_distribution<double> dist;
  for (auto& v : y) v = dist(gen);
  for (double rho : {0.1, 0.3, 0.6}) {
    const double signed_p = permutation_pvalue(a, y, rho, 2000, 5,
                                               CorrelationKind::pearson,
                                               IndicatorMode::signed_ge);
    const double abs_p = permutation_pvalue(a, y, rho, 2000, 5,
                                            CorrelationKind::pearson,
                                            IndicatorMode::absolute);
    CHECK(abs_p >= signed_p);
  }
}

namespace {

// A (pairs + attributes) world with a planted concept axis e0: pair terms
// differ by v, attribute embeddings sit at label*v plus off-axis noise.
struct PlantedWorld {
  corpus::ConceptPairSet pairs;
  corpus::LabeledAttributeSet attributes;
  std::map<std::string, Vector> vectors;
};

PlantedWorld make_planted_world(double on_axis_gain, double off_axis_noise,
                                std::uint64_t seed, bool label_linked = true) {
  PlantedWorld w;
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist;
  const std::size_t p = 12;

  w.pairs.concept_name = "gender";
  for (int i = 0; i < 6; ++i) {
    const std::string w1 = "pair" + std::to_string(i) + "a";
    const std::string w2 = "pair" + std::to_string(i) + "b";
    Vector base(p);
    for (auto& x : base) x = 0.1 * dist(gen);
    Vector shifted(base);
    shifted[0] += 1.0;
    w.vectors[w1] = base;
    w.vectors[w2] = shifted;
    w.pairs.pairs.push_back({w1, w2});
  }

  w.attributes.kind = "occupations";
  const scenario::TemplateSet templates = scenario::TemplateSet::builtin();
  for (int i = 0; i < 16; ++i) {
    const std::string term = "job" + std::to_string(i);
    const double label = double(i) / 15.0;
    Vector emb(p, 0.0);
    emb[0] = on_axis_gain * (label_linked ? label : dist(gen));
    for (std::size_t c = 1; c < p; ++c) emb[c] = off_axis_noise * dist(gen);
    w.attributes.entries.push_back({term, label});
    w.vectors[templates.render("gender", "neutral", term)] = emb;
  }
  return w;
}

}  // namespace

TEST_CASE("geometric audit on a planted fixture: near-perfect correlation") {
  PlantedWorld w = make_planted_world(1.0, 0.01, 41);
  provider::ProviderConfig cfg;
  cfg.model = "planted";
  provider::MapProvider prov(w.vectors, cfg);
  GeoAuditOptions opts;
  opts.n_samples = 2000;

  const GeoBiasResult r =
      run_geometric_audit(w.pairs, w.attributes, "neutral",
                          scenario::TemplateSet::builtin(), prov, opts);
  CHECK(r.concept_name == "gender");
  CHECK(r.scenario == "neutral");
  CHECK(r.attribute_kind == "occupations");
  CHECK(r.n_attributes == 16);
  CHECK(r.n_samples == 2000);
  CHECK(r.seed == 7);
  CHECK(r.rho >= 0.99);
  CHECK(r.abs_rho == std::abs(r.rho));
  CHECK(r.p_value <= 0.001);
  CHECK(r.auc_g == 1.0);
  CHECK(!r.weak_concept);
}

TEST_CASE("geometric audit with label-free attributes: weak correlation") {
  // On-axis components drawn independently of the labels -> projections onto
  // the learned direction carry no label signal.
  PlantedWorld w = make_planted_world(1.0, 1.0, 42, /*label_linked=*/false);
  provider::ProviderConfig cfg;
  cfg.model = "planted";
  provider::MapProvider prov(w.vectors, cfg);
  GeoAuditOptions opts;
  opts.n_samples = 2000;

  const GeoBiasResult r =
      run_geometric_audit(w.pairs, w.attributes, "neutral",
                          scenario::TemplateSet::builtin(), prov, opts);
  CHECK(r.abs_rho < 0.6);
  CHECK(r.p_value >= 0.05);
  CHECK(r.p_value <= 0.95);
}

TEST_CASE("geometric audit reuses a pre-learned subspace identically") {
  PlantedWorld w = make_planted_world(1.0, 0.05, 43);
  provider::ProviderConfig cfg;
  cfg.model = "planted";
  provider::MapProvider prov(w.vectors, cfg);
  GeoAuditOptions opts;
  opts.n_samples = 1000;

  const auto templates = scenario::TemplateSet::builtin();
  const auto learned = concepts::learn_concept(w.pairs, prov, opts.k_search);
  const GeoBiasResult with_learned = run_geometric_audit(
      w.pairs, w.attributes, "neutral", templates, prov, opts, &learned);
  const GeoBiasResult from_scratch = run_geometric_audit(
      w.pairs, w.attributes, "neutral", templates, prov, opts);
  CHECK(with_learned == from_scratch);
}

TEST_CASE("weak concepts are carried through to the audit result") {
  PlantedWorld w = make_planted_world(1.0, 0.05, 44);
  // Destroy the pair structure so the learned direction separates nothing:
  // both sides of every pair get the same embedding plus tiny noise.
  std::mt19937_64 gen(45);
  std::normal_distribution<double> dist;
  for (auto& pr : w.pairs.pairs) {
    Vector v = w.vectors[pr.w1];
    for (auto& x : v) x += 1e-4 * dist(gen);
    w.vectors[pr.w2] = v;
  }
  provider::ProviderConfig cfg;
  cfg.model = "planted";
  provider::MapProvider prov(w.vectors, cfg);
  GeoAuditOptions opts;
  opts.n_samples = 1000;
  const GeoBiasResult r =
      run_geometric_audit(w.pairs, w.attributes, "neutral",
                          scenario::TemplateSet::builtin(), prov, opts);
  CHECK(r.weak_concept);
}

TEST_CASE("audit fails cleanly on an unknown scenario") {
  PlantedWorld w = make_planted_world(1.0, 0.05, 46);
  provider::ProviderConfig cfg;
  cfg.model = "planted";
  provider::MapProvider prov(w.vectors, cfg);
  CHECK_THROWS(run_geometric_audit(w.pairs, w.attributes, "sideways",
                                   scenario::TemplateSet::builtin(), prov));
}
