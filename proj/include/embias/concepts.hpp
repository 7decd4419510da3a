#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "embias/corpus.hpp"
#include "embias/linalg.hpp"
#include "embias/provider.hpp"

namespace embias::concepts {

// Default AUC threshold below which a learned direction is flagged weak.
inline constexpr double kWeakAucThreshold = 0.8;

// Row-wise differences x2 - x1 of two equal-shaped matrices (one row per
// contrast pair).
linalg::Matrix delta_matrix(const linalg::Matrix& x1, const linalg::Matrix& x2);

// Separation quality of direction b for the two projected samples: the
// probability that a random row of x2 projects higher than a random row of
// x1 (ties count half), folded to max(raw, 1 - raw). `orientation` is +1
// when b already points towards x2, -1 when the fold flipped it.
struct AucResult {
  double value = 0.0;    // in [0.5, 1]
  int orientation = +1;  // +1: higher projection = x2 side; -1: flipped
};
AucResult auc_of_direction(std::span<const double> b, const linalg::Matrix& x1,
                           const linalg::Matrix& x2);

struct ConceptSubspace {
  std::string concept_name;
  linalg::OrthonormalBasis basis;        // difference-space directions
  std::vector<double> auc_per_direction; // folded AUC per basis direction
  std::size_t selected_index = 0;        // argmax AUC within the basis
  linalg::Vector g;                      // selected direction, oriented so
                                         // higher projections = w2 side
  double auc_g = 0.0;
  bool weak_flag = false;                // auc_g < kWeakAucThreshold
  std::vector<std::string> warnings;
};

// Learns the concept direction from paired embeddings: singular directions
// of (x2 - x1), scored by AUC on the pair projections, best one kept and
// oriented. k_search = 0 means min(pairs, 10). Requires at least 2 pairs.
// center_rows subtracts the mean difference row before the decomposition —
// a comparison mode only, off by default.
ConceptSubspace learn_concept_from_embeddings(const std::string& concept_name,
                                              const linalg::Matrix& x1,
                                              const linalg::Matrix& x2,
                                              std::size_t k_search = 0,
                                              bool center_rows = false);

// Embeds the pair terms (w1 rows, w2 rows) with `prov` and learns from those.
ConceptSubspace learn_concept(const corpus::ConceptPairSet& pairs,
                              provider::Provider& prov,
                              std::size_t k_search = 0,
                              bool center_rows = false);

}  // namespace embias::concepts
