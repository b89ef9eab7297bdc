#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "crosshyp/scorers.hpp"
#include "crosshyp/translation.hpp"

namespace crosshyp {

enum class Relation { hyper, hypo, cohypo, none };

std::optional<Relation> relation_from_name(std::string_view name);
std::string_view relation_name(Relation r);

struct LabeledPair {
  std::string f_word;  // non-English side
  std::string e_word;  // English side
  Relation relation = Relation::none;
  bool positive() const { return relation == Relation::hyper; }
};

struct RowError {
  std::size_t line_no = 0;
  std::string message;
};

struct PairLoadResult {
  std::vector<LabeledPair> pairs;
  std::vector<RowError> errors;  // unknown relations, bad rows, duplicates
};

// TSV `f_word<TAB>e_word<TAB>relation`, relation in hyper|hypo|cohypo|none.
PairLoadResult load_pairs(std::istream& in);
PairLoadResult load_pairs_file(const std::filesystem::path& path);

// Seeded stratified 1:2 dev/test split. Per-label quotas are assigned by
// largest remainder so the dev size is floor(n/3) exactly.
struct EvalDataset {
  std::vector<LabeledPair> pairs;
  std::vector<int> dev_indices;
  std::vector<int> test_indices;
  std::uint64_t seed = 0;

  std::vector<LabeledPair> dev() const;
  std::vector<LabeledPair> test() const;
};

EvalDataset split_dataset(std::vector<LabeledPair> pairs, std::uint64_t seed);

struct ScorerParams {
  double threshold = 0.0;
  int top_k = 100;   // feature-list truncation (BalAPinc)
  int slqs_n = 50;   // top dimensions for informativeness (SLQS)
};

// Directional pair scorer over some embedding space. Returns nullopt for
// unclassifiable pairs (out-of-vocabulary member or an undefined score).
class PairScorer {
 public:
  virtual ~PairScorer() = default;
  virtual std::optional<double> score(const LabeledPair& pair, const ScorerParams& params) const = 0;
};

// BalAPinc over a bilingual pair of sparse embedding tables.
class BalapincScorer : public PairScorer {
 public:
  BalapincScorer(const SparseEmbeddings& f_side, const SparseEmbeddings& e_side);
  std::optional<double> score(const LabeledPair& pair, const ScorerParams& params) const override;

 private:
  const SparseEmbeddings& f_side_;
  const SparseEmbeddings& e_side_;
};

// SLQS over the shared space: column entropies are computed over the
// stacked rows of both sides.
class SlqsScorer : public PairScorer {
 public:
  SlqsScorer(const SparseEmbeddings& f_side, const SparseEmbeddings& e_side);
  std::optional<double> score(const LabeledPair& pair, const ScorerParams& params) const override;

 private:
  const SparseEmbeddings& f_side_;
  const SparseEmbeddings& e_side_;
  ColumnEntropies entropies_;
};

// Translation baseline: map the f word to its most common translation
// via a one-hot f->e matrix, then score (translation, e_word) with
// English-only embeddings.
class MonoDepScorer : public PairScorer {
 public:
  MonoDepScorer(const SparseEmbeddings& english, const TranslationMatrix& f_to_e,
                const Vocabulary& f_vocab, const Vocabulary& e_vocab);
  std::optional<double> score(const LabeledPair& pair, const ScorerParams& params) const override;
  std::optional<std::string> translate(std::string_view f_word) const;

 private:
  const SparseEmbeddings& english_;
  const TranslationMatrix& f_to_e_;
  const Vocabulary& f_vocab_;
  const Vocabulary& e_vocab_;
};

struct TuneResult {
  ScorerParams params;
  double dev_accuracy = 0.0;
  int n_classifiable = 0;
};

// Grid search over the list-size parameter (capped at `param_cap`, the
// sparse dimension count) and score-midpoint thresholds, maximizing dev
// accuracy; ties prefer the smaller size then the smaller threshold.
// The boundary candidates (all-positive / all-negative) keep the result
// at or above the majority-class baseline.
TuneResult tune_params(const PairScorer& scorer, const std::vector<LabeledPair>& dev,
                       int param_cap, bool tune_slqs_n = false);

struct PairPrediction {
  std::string f_word;
  std::string e_word;
  bool gold = false;
  bool predicted = false;
  double score = 0.0;
};

struct EvalResult {
  double accuracy = 0.0;
  double coverage = 0.0;
  int n_total = 0;
  int n_classifiable = 0;
  int n_correct = 0;
  std::vector<PairPrediction> predictions;  // classifiable pairs only
};

EvalResult evaluate_accuracy(const PairScorer& scorer, const ScorerParams& params,
                             const std::vector<LabeledPair>& test);

struct McNemarResult {
  long long b = 0;  // a correct, b wrong
  long long c = 0;  // a wrong, b correct
  double statistic = 0.0;
  double p_value = 1.0;
};

// Continuity-corrected McNemar statistic max(|b-c|-1, 0)^2/(b+c) with a
// chi-squared (1 dof) p-value; b + c = 0 gives statistic 0, p 1.
McNemarResult mcnemar_test(const std::vector<bool>& preds_a, const std::vector<bool>& preds_b,
                           const std::vector<bool>& gold);

// Exact two-sided binomial variant for small disagreement counts.
double mcnemar_exact_p(long long b, long long c);

// Regularized upper incomplete gamma Q(a, x), used for the chi-squared
// tail probability: p = Q(dof/2, statistic/2).
double regularized_gamma_q(double a, double x);
double chi_squared_tail(double statistic, int dof);

// Prediction dump `f_word<TAB>e_word<TAB>gold<TAB>pred<TAB>score`.
void write_predictions(std::ostream& out, const std::vector<PairPrediction>& preds);
std::vector<PairPrediction> read_predictions(std::istream& in);

}  // namespace crosshyp
