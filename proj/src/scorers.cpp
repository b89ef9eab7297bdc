#include "crosshyp/scorers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace crosshyp {

RankedFeatureList RankedFeatureList::from_features(std::vector<RankedFeature> features) {
  std::unordered_set<int> seen;
  for (const RankedFeature& f : features) {
    if (!(f.weight > 0.0)) throw std::invalid_argument("feature weights must be > 0");
    if (!seen.insert(f.id).second) throw std::invalid_argument("duplicate feature id");
  }
  std::sort(features.begin(), features.end(), [](const RankedFeature& a, const RankedFeature& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.id < b.id;
  });
  RankedFeatureList list;
  list.entries_ = std::move(features);
  return list;
}

RankedFeatureList RankedFeatureList::from_dense(const Eigen::VectorXd& v) {
  std::vector<RankedFeature> features;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v(i) > 0.0) features.push_back({static_cast<int>(i), v(i)});
  return from_features(std::move(features));
}

RankedFeatureList RankedFeatureList::from_sparse_row(
    const std::vector<std::pair<int, double>>& row) {
  std::vector<RankedFeature> features;
  features.reserve(row.size());
  for (const auto& [id, w] : row)
    if (w > 0.0) features.push_back({id, w});
  return from_features(std::move(features));
}

RankedFeatureList RankedFeatureList::truncated(std::size_t max_features) const {
  RankedFeatureList out;
  out.entries_.assign(entries_.begin(),
                      entries_.begin() + std::min(max_features, entries_.size()));
  return out;
}

std::size_t RankedFeatureList::rank_of(int feature_id) const {
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (entries_[i].id == feature_id) return i + 1;
  return 0;
}

double RankedFeatureList::weight_sum() const {
  double s = 0.0;
  for (const RankedFeature& f : entries_) s += f.weight;
  return s;
}

double lin_score(const RankedFeatureList& u, const RankedFeatureList& v) {
  double denom = u.weight_sum() + v.weight_sum();
  if (denom <= 0.0) return 0.0;
  std::unordered_map<int, double> v_weights;
  v_weights.reserve(v.size());
  for (const RankedFeature& f : v.entries()) v_weights.emplace(f.id, f.weight);
  // Accumulate shared mass in feature-id order so the result is exactly
  // symmetric in (u, v).
  std::vector<std::pair<int, double>> shared_terms;
  for (const RankedFeature& f : u.entries()) {
    auto it = v_weights.find(f.id);
    if (it != v_weights.end()) shared_terms.emplace_back(f.id, f.weight + it->second);
  }
  std::sort(shared_terms.begin(), shared_terms.end());
  double shared = 0.0;
  for (const auto& [id, w] : shared_terms) shared += w;
  return std::clamp(shared / denom, 0.0, 1.0);
}

double apinc_score(const RankedFeatureList& u, const RankedFeatureList& v) {
  if (u.empty()) return 0.0;
  std::unordered_map<int, std::size_t> v_rank;
  v_rank.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) v_rank.emplace(v.entries()[i].id, i + 1);

  const double v_size = static_cast<double>(v.size());
  double sum = 0.0;
  std::size_t hits = 0;  // features of v within u's top r
  for (std::size_t r = 1; r <= u.size(); ++r) {
    const RankedFeature& f = u.entries()[r - 1];
    auto it = v_rank.find(f.id);
    double rel = 0.0;
    if (it != v_rank.end()) {
      ++hits;
      rel = 1.0 - static_cast<double>(it->second) / (v_size + 1.0);
    }
    double precision = static_cast<double>(hits) / static_cast<double>(r);
    sum += precision * rel;
  }
  return sum / static_cast<double>(u.size());
}

double balapinc_score(const RankedFeatureList& u, const RankedFeatureList& v) {
  return std::sqrt(lin_score(u, v) * apinc_score(u, v));
}

ColumnEntropies ColumnEntropies::from_dense(const Eigen::MatrixXd& a) {
  std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (a(i, j) != 0.0) rows[static_cast<std::size_t>(i)].emplace_back(static_cast<int>(j), a(i, j));
  return from_sparse_rows(rows, static_cast<int>(a.cols()));
}

ColumnEntropies ColumnEntropies::from_sparse_rows(
    const std::vector<std::vector<std::pair<int, double>>>& rows, int dim) {
  std::vector<double> col_sum(static_cast<std::size_t>(dim), 0.0);
  for (const auto& row : rows)
    for (const auto& [j, v] : row) {
      if (v < 0.0) throw std::invalid_argument("column entropies need non-negative weights");
      col_sum[static_cast<std::size_t>(j)] += v;
    }
  ColumnEntropies out;
  out.values_.assign(static_cast<std::size_t>(dim), 0.0);
  for (const auto& row : rows)
    for (const auto& [j, v] : row) {
      double s = col_sum[static_cast<std::size_t>(j)];
      if (v > 0.0 && s > 0.0) {
        double p = v / s;
        out.values_[static_cast<std::size_t>(j)] -= p * std::log(p);
      }
    }
  return out;
}

double word_informativeness(const RankedFeatureList& word_features,
                            const ColumnEntropies& entropies, int top_n) {
  if (top_n < 1) throw std::invalid_argument("top_n must be >= 1");
  if (word_features.empty())
    throw std::invalid_argument("informativeness is undefined for an all-zero word vector");
  std::size_t take = std::min(static_cast<std::size_t>(top_n), word_features.size());
  std::vector<double> hs;
  hs.reserve(take);
  for (std::size_t i = 0; i < take; ++i)
    hs.push_back(entropies.entropy(word_features.entries()[i].id));
  std::sort(hs.begin(), hs.end());
  std::size_t mid = hs.size() / 2;
  if (hs.size() % 2 == 1) return hs[mid];
  return 0.5 * (hs[mid - 1] + hs[mid]);
}

double word_informativeness(const Eigen::VectorXd& word_vector, const Eigen::MatrixXd& a,
                            int top_n) {
  return word_informativeness(RankedFeatureList::from_dense(word_vector),
                              ColumnEntropies::from_dense(a), top_n);
}

double slqs_from_entropies(double e_u, double e_v) {
  if (e_v == 0.0) throw std::domain_error("SLQS is undefined when the entailed word's entropy is 0");
  return 1.0 - e_u / e_v;
}

double slqs_score(const RankedFeatureList& u, const RankedFeatureList& v,
                  const ColumnEntropies& entropies, int top_n) {
  double e_u = word_informativeness(u, entropies, top_n);
  double e_v = word_informativeness(v, entropies, top_n);
  return slqs_from_entropies(e_u, e_v);
}

bool classify_score(double score, double threshold) { return score > threshold; }

}  // namespace crosshyp
