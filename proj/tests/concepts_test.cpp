#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "embias/concepts.hpp"
#include "embias/provider.hpp"
#include "oracles.hpp"

using namespace embias;
using namespace embias::concepts;
using linalg::Matrix;
using linalg::Vector;

namespace {

Matrix column(const std::vector<double>& values) {
  Matrix m(values.size(), 1);
  for (std::size_t i = 0; i < values.size(); ++i) m.at(i, 0) = values[i];
  return m;
}

double cos_to(const Vector& g, const Vector& v) {
  return linalg::dot(g, v) / (linalg::norm(g) * linalg::norm(v));
}

}  // namespace

TEST_CASE("delta_matrix") {
  Matrix x1(2, 2), x2(2, 2);
  x1.at(0, 0) = 1;
  x1.at(1, 1) = 2;
  CHECK(delta_matrix(x1, x1) == Matrix(2, 2));  // zero matrix

  x2 = x1;
  x2.at(0, 0) = 2;
  x2.at(0, 1) = -1;
  const Matrix d = delta_matrix(x1, x2);
  CHECK(d.at(0, 0) == 1.0);
  CHECK(d.at(0, 1) == -1.0);
  CHECK(d.at(1, 1) == 0.0);

  Matrix narrow(2, 1);
  CHECK_THROWS_AS(delta_matrix(x1, narrow), std::invalid_argument);
}

TEST_CASE("auc_of_direction worked examples") {
  const Vector b = {1.0};

  // Perfect separation.
  auto perfect = auc_of_direction(b, column({-1, -2}), column({1, 2}));
  CHECK(perfect.value == 1.0);
  CHECK(perfect.orientation == +1);

  // 3 of 4 cross-pairs correctly ordered.
  auto mixed = auc_of_direction(b, column({0.1, 0.4}), column({0.35, 0.8}));
  CHECK(mixed.value == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(mixed.orientation == +1);

  // Identical samples: all ties, AUC 1/2.
  auto ties = auc_of_direction(b, column({0.3, 0.7}), column({0.3, 0.7}));
  CHECK(ties.value == 0.5);

  // Anti-separation folds and flips the orientation.
  auto flipped = auc_of_direction(b, column({1, 2}), column({-1, -2}));
  CHECK(flipped.value == 1.0);
  CHECK(flipped.orientation == -1);
}

TEST_CASE("auc_of_direction: every score identical gives 0.5") {
  Matrix x1(3, 2), x2(2, 2);
  for (std::size_t r = 0; r < 3; ++r) x1.at(r, 0) = double(r);
  for (std::size_t r = 0; r < 2; ++r) x2.at(r, 0) = double(r) + 9;
  const Vector b = {0.0, 1.0};  // orthogonal to all rows
  CHECK(auc_of_direction(b, x1, x2).value == 0.5);
}

TEST_CASE("auc_of_direction matches the all-pairs oracle with ties") {
  std::mt19937_64 gen(17);
  std::uniform_int_distribution<int> size(1, 30);
  std::uniform_int_distribution<int> grid(-4, 4);  // coarse -> frequent ties
  const Vector b = {1.0};
  for (int t = 0; t < 60; ++t) {
    std::vector<double> s1(size(gen)), s2(size(gen));
    for (auto& x : s1) x = grid(gen) * 0.25;
    for (auto& x : s2) x = grid(gen) * 0.25;
    const double raw = oracles::auc_all_pairs(s1, s2);
    const double folded = std::max(raw, 1.0 - raw);
    const auto got = auc_of_direction(b, column(s1), column(s2));
    CHECK(got.value == doctest::Approx(folded).epsilon(1e-12));
    if (raw != 0.5) CHECK(got.orientation == (raw > 0.5 ? +1 : -1));
  }
}

TEST_CASE("learn recovers a planted direction exactly at zero noise") {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> dist;
  const std::size_t pairs = 12, p = 16;
  Vector v(p, 0.0);
  for (auto& x : v) x = dist(gen);

  Matrix x1(pairs, p), x2(pairs, p);
  for (std::size_t r = 0; r < pairs; ++r) {
    for (std::size_t c = 0; c < p; ++c) {
      x1.at(r, c) = 0.1 * dist(gen);
      x2.at(r, c) = x1.at(r, c) + v[c];
    }
  }

  const ConceptSubspace s = learn_concept_from_embeddings("planted", x1, x2);
  CHECK(s.concept_name == "planted");
  REQUIRE(!s.basis.directions.empty());
  CHECK(std::abs(cos_to(s.g, v)) >= 1.0 - 1e-9);
  CHECK(cos_to(s.g, v) > 0.0);  // oriented towards the x2 side
  CHECK(s.auc_g == 1.0);
  CHECK(!s.weak_flag);
  CHECK(s.auc_per_direction[s.selected_index] == s.auc_g);
  CHECK(linalg::norm(s.g) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("k_search defaults to min(pairs, 10) and is clipped with a warning") {
  std::mt19937_64 gen(6);
  std::normal_distribution<double> dist;
  auto random_pair = [&](std::size_t pairs, std::size_t p) {
    Matrix x1(pairs, p), x2(pairs, p);
    for (std::size_t r = 0; r < pairs; ++r)
      for (std::size_t c = 0; c < p; ++c) {
        x1.at(r, c) = dist(gen);
        x2.at(r, c) = dist(gen);
      }
    return std::pair{x1, x2};
  };

  {
    auto [x1, x2] = random_pair(20, 24);
    const auto s = learn_concept_from_embeddings("wide", x1, x2);
    CHECK(s.auc_per_direction.size() == 10);  // min(20, 10)
  }
  {
    auto [x1, x2] = random_pair(4, 24);
    const auto s = learn_concept_from_embeddings("narrow", x1, x2);
    CHECK(s.auc_per_direction.size() == 4);  // min(4, 10)
  }
  {
    auto [x1, x2] = random_pair(5, 24);
    const auto s = learn_concept_from_embeddings("clipped", x1, x2, 50);
    CHECK(s.auc_per_direction.size() <= 5);
    bool warned = false;
    for (const auto& w : s.warnings) warned = warned || w.find("clipped") != std::string::npos;
    CHECK(warned);
  }
}

TEST_CASE("selected direction is the AUC argmax") {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> dist;
  Matrix x1(10, 8), x2(10, 8);
  for (std::size_t r = 0; r < 10; ++r)
    for (std::size_t c = 0; c < 8; ++c) {
      x1.at(r, c) = dist(gen);
      x2.at(r, c) = dist(gen) + (c == 3 ? 2.0 : 0.0);
    }
  const auto s = learn_concept_from_embeddings("argmax", x1, x2, 5);
  for (double a : s.auc_per_direction) CHECK(s.auc_g >= a);
  CHECK(s.auc_g >= 0.5);
  CHECK(s.auc_g <= 1.0);
}

TEST_CASE("a direction that barely separates is flagged weak") {
  std::mt19937_64 gen(8);
  std::normal_distribution<double> dist;
  const std::size_t pairs = 16, p = 6;
  Matrix x1(pairs, p), x2(pairs, p);
  for (std::size_t r = 0; r < pairs; ++r)
    for (std::size_t c = 0; c < p; ++c) {
      x1.at(r, c) = dist(gen);
      x2.at(r, c) = x1.at(r, c) + 1e-3 * dist(gen);  // delta is pure noise
    }
  const auto s = learn_concept_from_embeddings("mush", x1, x2);
  CHECK(s.weak_flag);
  CHECK(s.auc_g < kWeakAucThreshold);
  bool warned = false;
  for (const auto& w : s.warnings)
    warned = warned || w.find("weakly") != std::string::npos;
  CHECK(warned);
}

TEST_CASE("row centering removes a shared offset from the decomposition") {
  // Deltas = 5*e1 (shared) + alternating +-0.5*e2 (varying). The raw
  // decomposition is dominated by the offset; the centered one sees only the
  // variation.
  const std::size_t pairs = 8, p = 4;
  Matrix x1(pairs, p), x2(pairs, p);
  for (std::size_t r = 0; r < pairs; ++r) {
    x2.at(r, 0) = 5.0;
    x2.at(r, 1) = (r % 2 == 0 ? 0.5 : -0.5);
  }
  const auto raw = learn_concept_from_embeddings("offset", x1, x2, 1);
  CHECK(std::abs(raw.basis.directions[0][0]) > 0.99);

  const auto centered =
      learn_concept_from_embeddings("offset", x1, x2, 1, /*center_rows=*/true);
  CHECK(std::abs(centered.basis.directions[0][1]) > 0.99);
  CHECK(std::abs(centered.basis.directions[0][0]) < 0.01);
}

TEST_CASE("learning needs at least two pairs") {
  Matrix x1(1, 3), x2(1, 3);
  x2.at(0, 0) = 1.0;
  CHECK_THROWS_AS(learn_concept_from_embeddings("tiny", x1, x2),
                  std::invalid_argument);
}

TEST_CASE("learn_concept embeds pair terms through the provider") {
  const Vector v = {0.0, 0.0, 3.0};
  std::map<std::string, Vector> vecs = {
      {"left", {1.0, 0.2, 0.0}},  {"right", {1.0, 0.2, 3.0}},
      {"cold", {-0.5, 1.0, 0.1}}, {"hot", {-0.5, 1.0, 3.1}},
      {"dim", {0.3, -0.2, -0.1}}, {"bright", {0.3, -0.2, 2.9}},
  };
  provider::ProviderConfig cfg;
  cfg.model = "toy";
  provider::MapProvider prov(vecs, cfg);

  corpus::ConceptPairSet pairs{
      "trial", {{"left", "right"}, {"cold", "hot"}, {"dim", "bright"}}};
  const auto s = learn_concept(pairs, prov);
  CHECK(std::abs(cos_to(s.g, v)) > 0.99);
  CHECK(cos_to(s.g, v) > 0.0);
  CHECK(s.auc_g == 1.0);

  corpus::ConceptPairSet bad{"trial", {{"a", "a"}, {"b", "c"}}};
  CHECK_THROWS(learn_concept(bad, prov));
}
