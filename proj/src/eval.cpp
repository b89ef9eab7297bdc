#include "crosshyp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

#include "crosshyp/io_util.hpp"

namespace crosshyp {

std::optional<Relation> relation_from_name(std::string_view name) {
  if (name == "hyper") return Relation::hyper;
  if (name == "hypo") return Relation::hypo;
  if (name == "cohypo") return Relation::cohypo;
  if (name == "none") return Relation::none;
  return std::nullopt;
}

std::string_view relation_name(Relation r) {
  switch (r) {
    case Relation::hyper: return "hyper";
    case Relation::hypo: return "hypo";
    case Relation::cohypo: return "cohypo";
    case Relation::none: return "none";
  }
  return "?";
}

PairLoadResult load_pairs(std::istream& in) {
  PairLoadResult result;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto cols = split_view(line, '\t');
    if (cols.size() != 3) {
      result.errors.push_back({line_no, "expected 3 tab-separated columns"});
      continue;
    }
    auto rel = relation_from_name(cols[2]);
    if (!rel) {
      result.errors.push_back({line_no, "unknown relation tag: " + std::string(cols[2])});
      continue;
    }
    if (cols[0].empty() || cols[1].empty()) {
      result.errors.push_back({line_no, "empty word field"});
      continue;
    }
    if (!seen.emplace(std::string(cols[0]), std::string(cols[1])).second) {
      result.errors.push_back({line_no, "duplicate pair: " + std::string(cols[0]) + "/" +
                                            std::string(cols[1])});
      continue;
    }
    result.pairs.push_back({std::string(cols[0]), std::string(cols[1]), *rel});
  }
  return result;
}

PairLoadResult load_pairs_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open pair dataset: " + path.string());
  return load_pairs(in);
}

std::vector<LabeledPair> EvalDataset::dev() const {
  std::vector<LabeledPair> out;
  out.reserve(dev_indices.size());
  for (int i : dev_indices) out.push_back(pairs[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<LabeledPair> EvalDataset::test() const {
  std::vector<LabeledPair> out;
  out.reserve(test_indices.size());
  for (int i : test_indices) out.push_back(pairs[static_cast<std::size_t>(i)]);
  return out;
}

EvalDataset split_dataset(std::vector<LabeledPair> pairs, std::uint64_t seed) {
  if (pairs.size() < 3) throw std::invalid_argument("need at least 3 pairs to split");
  const std::size_t n = pairs.size();
  const std::size_t dev_total = n / 3;

  std::vector<int> groups[2];  // 0 = positive, 1 = negative
  for (std::size_t i = 0; i < n; ++i)
    groups[pairs[i].positive() ? 0 : 1].push_back(static_cast<int>(i));

  Rng rng(derive_seed(seed, 0x59717));
  for (auto& g : groups)
    for (std::size_t i = g.size(); i > 1; --i)
      std::swap(g[i - 1], g[rng.uniform_int(i)]);

  // Largest-remainder quotas keep the split stratified while the dev
  // size stays exactly floor(n/3).
  std::size_t quota[2];
  double remainder[2];
  std::size_t assigned = 0;
  for (int g = 0; g < 2; ++g) {
    double exact = static_cast<double>(groups[g].size()) * static_cast<double>(dev_total) /
                   static_cast<double>(n);
    quota[g] = static_cast<std::size_t>(exact);
    remainder[g] = exact - static_cast<double>(quota[g]);
    assigned += quota[g];
  }
  while (assigned < dev_total) {
    int pick = (remainder[0] >= remainder[1]) ? 0 : 1;
    if (quota[pick] >= groups[pick].size()) pick = 1 - pick;
    ++quota[pick];
    remainder[pick] = -1.0;
    ++assigned;
  }

  EvalDataset ds;
  ds.seed = seed;
  for (int g = 0; g < 2; ++g) {
    for (std::size_t i = 0; i < groups[g].size(); ++i) {
      if (i < quota[g])
        ds.dev_indices.push_back(groups[g][i]);
      else
        ds.test_indices.push_back(groups[g][i]);
    }
  }
  std::sort(ds.dev_indices.begin(), ds.dev_indices.end());
  std::sort(ds.test_indices.begin(), ds.test_indices.end());
  ds.pairs = std::move(pairs);
  return ds;
}

BalapincScorer::BalapincScorer(const SparseEmbeddings& f_side, const SparseEmbeddings& e_side)
    : f_side_(f_side), e_side_(e_side) {}

std::optional<double> BalapincScorer::score(const LabeledPair& pair,
                                            const ScorerParams& params) const {
  int fi = f_side_.row_id(pair.f_word);
  int ei = e_side_.row_id(pair.e_word);
  if (fi < 0 || ei < 0) return std::nullopt;
  auto u = RankedFeatureList::from_sparse_row(f_side_.rows[static_cast<std::size_t>(fi)])
               .truncated(static_cast<std::size_t>(params.top_k));
  auto v = RankedFeatureList::from_sparse_row(e_side_.rows[static_cast<std::size_t>(ei)])
               .truncated(static_cast<std::size_t>(params.top_k));
  return balapinc_score(u, v);
}

SlqsScorer::SlqsScorer(const SparseEmbeddings& f_side, const SparseEmbeddings& e_side)
    : f_side_(f_side), e_side_(e_side) {
  // Shared-space informativeness: entropies over both languages' rows.
  std::vector<std::vector<std::pair<int, double>>> stacked;
  stacked.reserve(f_side.rows.size() + e_side.rows.size());
  stacked.insert(stacked.end(), f_side.rows.begin(), f_side.rows.end());
  stacked.insert(stacked.end(), e_side.rows.begin(), e_side.rows.end());
  entropies_ = ColumnEntropies::from_sparse_rows(stacked, std::max(f_side.dim, e_side.dim));
}

std::optional<double> SlqsScorer::score(const LabeledPair& pair,
                                        const ScorerParams& params) const {
  int fi = f_side_.row_id(pair.f_word);
  int ei = e_side_.row_id(pair.e_word);
  if (fi < 0 || ei < 0) return std::nullopt;
  auto u = RankedFeatureList::from_sparse_row(f_side_.rows[static_cast<std::size_t>(fi)]);
  auto v = RankedFeatureList::from_sparse_row(e_side_.rows[static_cast<std::size_t>(ei)]);
  // All-zero vectors and zero-entropy entailed words have no defined
  // score; such pairs are reported as unclassifiable coverage loss.
  if (u.empty() || v.empty()) return std::nullopt;
  double e_v = word_informativeness(v, entropies_, params.slqs_n);
  if (e_v == 0.0) return std::nullopt;
  double e_u = word_informativeness(u, entropies_, params.slqs_n);
  return slqs_from_entropies(e_u, e_v);
}

MonoDepScorer::MonoDepScorer(const SparseEmbeddings& english, const TranslationMatrix& f_to_e,
                             const Vocabulary& f_vocab, const Vocabulary& e_vocab)
    : english_(english), f_to_e_(f_to_e), f_vocab_(f_vocab), e_vocab_(e_vocab) {
  if (f_to_e.mode != TranslationMatrix::Mode::one_hot)
    throw std::invalid_argument("the translation baseline needs a one-hot matrix");
}

std::optional<std::string> MonoDepScorer::translate(std::string_view f_word) const {
  int row = f_vocab_.id(f_word);
  if (row < 0) return std::nullopt;
  auto col = f_to_e_.one_hot_target(row);
  if (!col) return std::nullopt;
  return e_vocab_.entry(*col).word;
}

std::optional<double> MonoDepScorer::score(const LabeledPair& pair,
                                           const ScorerParams& params) const {
  auto translation = translate(pair.f_word);
  if (!translation) return std::nullopt;
  int ui = english_.row_id(*translation);
  int vi = english_.row_id(pair.e_word);
  if (ui < 0 || vi < 0) return std::nullopt;
  auto u = RankedFeatureList::from_sparse_row(english_.rows[static_cast<std::size_t>(ui)])
               .truncated(static_cast<std::size_t>(params.top_k));
  auto v = RankedFeatureList::from_sparse_row(english_.rows[static_cast<std::size_t>(vi)])
               .truncated(static_cast<std::size_t>(params.top_k));
  return balapinc_score(u, v);
}

namespace {

struct ScoredDev {
  std::vector<double> scores;
  std::vector<bool> gold;
};

ScoredDev score_dev(const PairScorer& scorer, const std::vector<LabeledPair>& dev,
                    const ScorerParams& params) {
  ScoredDev out;
  for (const LabeledPair& p : dev) {
    auto s = scorer.score(p, params);
    if (!s) continue;
    out.scores.push_back(*s);
    out.gold.push_back(p.positive());
  }
  return out;
}

// Best threshold for fixed scores: candidates are the midpoints of
// consecutive distinct scores plus the two boundary rules (everything
// positive / everything negative).
std::pair<double, long long> best_threshold(const ScoredDev& dev) {
  const std::size_t n = dev.scores.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return dev.scores[a] < dev.scores[b]; });

  std::vector<double> distinct;
  for (std::size_t i : order)
    if (distinct.empty() || dev.scores[i] > distinct.back()) distinct.push_back(dev.scores[i]);

  std::vector<double> candidates;
  candidates.push_back(distinct.front() - 1.0);
  for (std::size_t i = 0; i + 1 < distinct.size(); ++i)
    candidates.push_back(0.5 * (distinct[i] + distinct[i + 1]));
  candidates.push_back(distinct.back());

  long long total_pos = 0;
  for (bool g : dev.gold) total_pos += g ? 1 : 0;

  double best_t = candidates.front();
  long long best_correct = -1;
  std::size_t cursor = 0;     // items with score <= t
  long long pos_below = 0;    // gold positives with score <= t
  long long neg_below = 0;    // gold negatives with score <= t
  for (double t : candidates) {
    while (cursor < n && dev.scores[order[cursor]] <= t) {
      if (dev.gold[order[cursor]])
        ++pos_below;
      else
        ++neg_below;
      ++cursor;
    }
    long long correct = (total_pos - pos_below) + neg_below;
    if (correct > best_correct) {
      best_correct = correct;
      best_t = t;
    }
  }
  return {best_t, best_correct};
}

}  // namespace

TuneResult tune_params(const PairScorer& scorer, const std::vector<LabeledPair>& dev,
                       int param_cap, bool tune_slqs_n) {
  if (dev.empty()) throw std::invalid_argument("tuning set is empty");
  bool has_pos = false, has_neg = false;
  for (const LabeledPair& p : dev) (p.positive() ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg)
    throw std::runtime_error("tuning set contains a single class");
  if (param_cap < 1) throw std::invalid_argument("param_cap must be >= 1");

  static const int kGrid[] = {10, 25, 50, 100, 250, 500, 1000};
  std::vector<int> grid;
  for (int g : kGrid)
    if (g <= param_cap) grid.push_back(g);
  if (grid.empty()) grid.push_back(param_cap);

  TuneResult best;
  bool have_best = false;
  for (int size : grid) {
    ScorerParams params;
    if (tune_slqs_n)
      params.slqs_n = size;
    else
      params.top_k = size;
    ScoredDev scored = score_dev(scorer, dev, params);
    if (scored.scores.empty()) continue;
    auto [t, correct] = best_threshold(scored);
    double acc = static_cast<double>(correct) / static_cast<double>(scored.scores.size());
    params.threshold = t;
    if (!have_best || acc > best.dev_accuracy ||
        (acc == best.dev_accuracy &&
         (tune_slqs_n ? params.slqs_n < best.params.slqs_n : params.top_k < best.params.top_k))) {
      best.params = params;
      best.dev_accuracy = acc;
      best.n_classifiable = static_cast<int>(scored.scores.size());
      have_best = true;
    }
  }
  if (!have_best) throw std::runtime_error("no classifiable pair in the tuning set");
  return best;
}

EvalResult evaluate_accuracy(const PairScorer& scorer, const ScorerParams& params,
                             const std::vector<LabeledPair>& test) {
  EvalResult result;
  result.n_total = static_cast<int>(test.size());
  for (const LabeledPair& p : test) {
    auto s = scorer.score(p, params);
    if (!s) continue;
    bool pred = classify_score(*s, params.threshold);
    result.predictions.push_back({p.f_word, p.e_word, p.positive(), pred, *s});
    ++result.n_classifiable;
    if (pred == p.positive()) ++result.n_correct;
  }
  if (result.n_classifiable == 0)
    throw std::runtime_error("no classifiable pair in the evaluation set");
  result.accuracy = static_cast<double>(result.n_correct) / static_cast<double>(result.n_classifiable);
  result.coverage = static_cast<double>(result.n_classifiable) / static_cast<double>(result.n_total);
  return result;
}

McNemarResult mcnemar_test(const std::vector<bool>& preds_a, const std::vector<bool>& preds_b,
                           const std::vector<bool>& gold) {
  if (preds_a.size() != gold.size() || preds_b.size() != gold.size())
    throw std::invalid_argument("prediction vectors are not aligned");
  McNemarResult r;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    bool a_ok = preds_a[i] == gold[i];
    bool b_ok = preds_b[i] == gold[i];
    if (a_ok && !b_ok) ++r.b;
    if (!a_ok && b_ok) ++r.c;
  }
  if (r.b + r.c == 0) {
    r.statistic = 0.0;
    r.p_value = 1.0;
    return r;
  }
  double diff = std::max(std::abs(static_cast<double>(r.b - r.c)) - 1.0, 0.0);
  r.statistic = diff * diff / static_cast<double>(r.b + r.c);
  r.p_value = chi_squared_tail(r.statistic, 1);
  return r;
}

double mcnemar_exact_p(long long b, long long c) {
  long long n = b + c;
  if (n == 0) return 1.0;
  long long m = std::min(b, c);
  double log_half_n = static_cast<double>(n) * std::log(0.5);
  double cdf = 0.0;
  for (long long i = 0; i <= m; ++i) {
    double log_choose = std::lgamma(static_cast<double>(n) + 1.0) -
                        std::lgamma(static_cast<double>(i) + 1.0) -
                        std::lgamma(static_cast<double>(n - i) + 1.0);
    cdf += std::exp(log_choose + log_half_n);
  }
  return std::min(1.0, 2.0 * cdf);
}

double regularized_gamma_q(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw std::domain_error("regularized_gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  const double log_gamma_a = std::lgamma(a);
  if (x < a + 1.0) {
    // Series for P(a, x); Q = 1 - P.
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    double p = sum * std::exp(-x + a * std::log(x) - log_gamma_a);
    return 1.0 - p;
  }
  // Continued fraction for Q(a, x), modified Lentz.
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - log_gamma_a) * h;
}

double chi_squared_tail(double statistic, int dof) {
  if (dof < 1) throw std::domain_error("chi-squared dof must be >= 1");
  if (statistic <= 0.0) return 1.0;
  return regularized_gamma_q(0.5 * static_cast<double>(dof), 0.5 * statistic);
}

void write_predictions(std::ostream& out, const std::vector<PairPrediction>& preds) {
  for (const PairPrediction& p : preds)
    out << p.f_word << '\t' << p.e_word << '\t' << (p.gold ? 1 : 0) << '\t' << (p.predicted ? 1 : 0)
        << '\t' << fmt_double(p.score) << '\n';
}

std::vector<PairPrediction> read_predictions(std::istream& in) {
  std::vector<PairPrediction> preds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cols = split_view(line, '\t');
    if (cols.size() != 5)
      throw std::runtime_error("prediction line " + std::to_string(line_no) + ": expected 5 columns");
    long long gold = 0, pred = 0;
    double score = 0;
    if (!parse_int64(cols[2], gold) || !parse_int64(cols[3], pred) || !parse_double(cols[4], score) ||
        (gold != 0 && gold != 1) || (pred != 0 && pred != 1))
      throw std::runtime_error("prediction line " + std::to_string(line_no) + ": bad fields");
    preds.push_back({std::string(cols[0]), std::string(cols[1]), gold == 1, pred == 1, score});
  }
  return preds;
}

}  // namespace crosshyp
