#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "crosshyp/sparse_embeddings.hpp"

namespace crosshyp {

struct RankedFeature {
  int id = 0;
  double weight = 0.0;
  bool operator==(const RankedFeature&) const = default;
};

// A word's nonzero features sorted by weight descending, ties broken by
// feature id ascending. Weights are strictly positive; ids are unique.
class RankedFeatureList {
 public:
  RankedFeatureList() = default;
  // Sorts and validates; entries with weight <= 0 are rejected.
  static RankedFeatureList from_features(std::vector<RankedFeature> features);
  static RankedFeatureList from_dense(const Eigen::VectorXd& v);
  static RankedFeatureList from_sparse_row(const std::vector<std::pair<int, double>>& row);

  RankedFeatureList truncated(std::size_t max_features) const;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<RankedFeature>& entries() const { return entries_; }
  // 1-based rank of a feature, 0 when absent.
  std::size_t rank_of(int feature_id) const;
  double weight_sum() const;

 private:
  std::vector<RankedFeature> entries_;
};

// Symmetric similarity: shared weight mass over total weight mass.
double lin_score(const RankedFeatureList& u, const RankedFeatureList& v);

// Average-precision-style inclusion of u's features in v's ranking.
double apinc_score(const RankedFeatureList& u, const RankedFeatureList& v);

// Geometric mean of the two. Inputs are expected to be pre-truncated.
double balapinc_score(const RankedFeatureList& u, const RankedFeatureList& v);

// Per-dimension entropies of the column distributions of a non-negative
// embedding matrix: H(c) = -sum_w p(w|c) ln p(w|c), with p the column
// normalized to sum 1. Columns with no mass have no defined entropy.
class ColumnEntropies {
 public:
  static ColumnEntropies from_dense(const Eigen::MatrixXd& a);
  static ColumnEntropies from_sparse_rows(const std::vector<std::vector<std::pair<int, double>>>& rows,
                                          int dim);

  double entropy(int dim) const { return values_[static_cast<std::size_t>(dim)]; }
  int dims() const { return static_cast<int>(values_.size()); }

 private:
  std::vector<double> values_;
};

// Median entropy of the word's top-N dimensions by weight (ties to the
// lower dimension id); uses all m nonzero dimensions when m < N. Throws
// for an all-zero word vector.
double word_informativeness(const RankedFeatureList& word_features, const ColumnEntropies& entropies,
                            int top_n);
double word_informativeness(const Eigen::VectorXd& word_vector, const Eigen::MatrixXd& a, int top_n);

// Formula-level score 1 - E_u/E_v; throws when E_v = 0.
double slqs_from_entropies(double e_u, double e_v);
double slqs_score(const RankedFeatureList& u, const RankedFeatureList& v,
                  const ColumnEntropies& entropies, int top_n);

// Decision rule shared by every scorer: strictly above the threshold.
bool classify_score(double score, double threshold);

}  // namespace crosshyp
