#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "crosshyp/eval.hpp"
#include "crosshyp/io_util.hpp"

using namespace crosshyp;

namespace {

class TestScorer : public PairScorer {
 public:
  using Fn = std::function<std::optional<double>(const LabeledPair&, const ScorerParams&)>;
  explicit TestScorer(Fn fn) : fn_(std::move(fn)) {}
  std::optional<double> score(const LabeledPair& pair, const ScorerParams& params) const override {
    return fn_(pair, params);
  }

 private:
  Fn fn_;
};

std::vector<LabeledPair> make_pairs(int n_pos, int n_neg) {
  std::vector<LabeledPair> pairs;
  for (int i = 0; i < n_pos; ++i)
    pairs.push_back({"fp" + std::to_string(i), "ep" + std::to_string(i), Relation::hyper});
  for (int i = 0; i < n_neg; ++i)
    pairs.push_back({"fn" + std::to_string(i), "en" + std::to_string(i), Relation::hypo});
  return pairs;
}

// Chi-squared (1 dof) upper tail by Simpson integration of the density,
// independent of the incomplete-gamma implementation under test.
double chi2_tail_quadrature(double stat) {
  auto pdf = [](double x) { return std::exp(-0.5 * x) / std::sqrt(2.0 * M_PI * x); };
  const double hi = stat + 120.0;
  const int steps = 200000;  // even
  const double h = (hi - stat) / steps;
  double sum = pdf(stat) + pdf(hi);
  for (int i = 1; i < steps; ++i) sum += pdf(stat + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

}  // namespace

TEST_CASE("pair TSV loading maps relations to labels") {
  std::stringstream ss(
      "pomme\tfruit\thyper\n"
      "aliments\tlemon\thypo\n"
      "biere\tvodka\tcohypo\n"
      "chaise\tidea\tnone\n");
  PairLoadResult r = load_pairs(ss);
  REQUIRE(r.errors.empty());
  REQUIRE(r.pairs.size() == 4);
  CHECK(r.pairs[0].positive());
  CHECK(!r.pairs[1].positive());
  CHECK(r.pairs[1].relation == Relation::hypo);
  CHECK(!r.pairs[2].positive());
  CHECK(!r.pairs[3].positive());
}

TEST_CASE("duplicate and malformed pair rows become error records") {
  std::stringstream ss(
      "pomme\tfruit\thyper\n"
      "pomme\tfruit\thyper\n"
      "x\ty\tsibling\n"
      "onlytwo\tcolumns\n");
  PairLoadResult r = load_pairs(ss);
  CHECK(r.pairs.size() == 1);
  REQUIRE(r.errors.size() == 3);
  CHECK(r.errors[0].message.find("duplicate") != std::string::npos);
  CHECK(r.errors[1].message.find("unknown relation") != std::string::npos);
}

TEST_CASE("nine pairs split 3 dev / 6 test") {
  EvalDataset ds = split_dataset(make_pairs(5, 4), 7);
  CHECK(ds.dev_indices.size() == 3);
  CHECK(ds.test_indices.size() == 6);
}

TEST_CASE("2115 pairs split 705 dev / 1410 test, stratified") {
  EvalDataset ds = split_dataset(make_pairs(1057, 1058), 13);
  CHECK(ds.dev_indices.size() == 705);
  CHECK(ds.test_indices.size() == 1410);

  auto positive_fraction = [&](const std::vector<int>& idx) {
    int pos = 0;
    for (int i : idx)
      if (ds.pairs[static_cast<std::size_t>(i)].positive()) ++pos;
    return static_cast<double>(pos) / static_cast<double>(idx.size());
  };
  double overall = 1057.0 / 2115.0;
  CHECK(std::abs(positive_fraction(ds.dev_indices) - overall) <= 0.05);
  CHECK(std::abs(positive_fraction(ds.test_indices) - overall) <= 0.05);
}

TEST_CASE("splitting is deterministic and partitions the dataset") {
  auto pairs = make_pairs(20, 20);
  EvalDataset a = split_dataset(pairs, 99);
  EvalDataset b = split_dataset(pairs, 99);
  CHECK(a.dev_indices == b.dev_indices);
  CHECK(a.test_indices == b.test_indices);

  std::set<int> seen;
  for (int i : a.dev_indices) CHECK(seen.insert(i).second);
  for (int i : a.test_indices) CHECK(seen.insert(i).second);
  CHECK(seen.size() == pairs.size());

  EvalDataset c = split_dataset(pairs, 100);
  CHECK(a.dev_indices != c.dev_indices);
}

TEST_CASE("fewer than three pairs cannot be split") {
  CHECK_THROWS_AS(split_dataset(make_pairs(1, 1), 1), std::invalid_argument);
}

TEST_CASE("tuning a separable dev set reaches accuracy 1") {
  auto pairs = make_pairs(4, 4);
  TestScorer scorer([](const LabeledPair& p, const ScorerParams&) -> std::optional<double> {
    return p.positive() ? 0.8 : 0.2;
  });
  TuneResult tr = tune_params(scorer, pairs, 100);
  CHECK(tr.dev_accuracy == doctest::Approx(1.0));
  CHECK(tr.params.threshold > 0.2);
  CHECK(tr.params.threshold < 0.8);
}

TEST_CASE("a constant scorer tunes to the majority-class accuracy") {
  auto pairs = make_pairs(4, 4);
  TestScorer scorer([](const LabeledPair&, const ScorerParams&) -> std::optional<double> {
    return 0.42;
  });
  TuneResult tr = tune_params(scorer, pairs, 100);
  CHECK(tr.dev_accuracy == doctest::Approx(0.5));
}

TEST_CASE("the midpoint threshold between separable clusters is selected") {
  std::vector<LabeledPair> pairs = make_pairs(2, 2);
  TestScorer scorer([](const LabeledPair& p, const ScorerParams&) -> std::optional<double> {
    if (p.f_word == "fp0") return 0.8;
    if (p.f_word == "fp1") return 0.6;
    if (p.f_word == "fn0") return 0.4;
    return 0.2;
  });
  TuneResult tr = tune_params(scorer, pairs, 100);
  CHECK(tr.dev_accuracy == doctest::Approx(1.0));
  CHECK(tr.params.threshold == doctest::Approx(0.5));
}

TEST_CASE("accuracy ties prefer the smaller size parameter") {
  auto pairs = make_pairs(3, 3);
  TestScorer scorer([](const LabeledPair& p, const ScorerParams&) -> std::optional<double> {
    return p.positive() ? 1.0 : 0.0;
  });
  TuneResult tr = tune_params(scorer, pairs, 1000);
  CHECK(tr.params.top_k == 10);
}

TEST_CASE("the size grid is capped at the sparse dimension count") {
  auto pairs = make_pairs(3, 3);
  int largest_seen = 0;
  TestScorer scorer([&](const LabeledPair& p, const ScorerParams& params) -> std::optional<double> {
    largest_seen = std::max(largest_seen, params.top_k);
    return p.positive() ? 1.0 : 0.0;
  });
  tune_params(scorer, pairs, 30);
  CHECK(largest_seen == 25);
}

TEST_CASE("tuning never falls below the majority-class baseline") {
  Rng rng(17);
  auto pairs = make_pairs(30, 70);
  TestScorer scorer([&](const LabeledPair&, const ScorerParams&) -> std::optional<double> {
    return rng.uniform();
  });
  TuneResult tr = tune_params(scorer, pairs, 100);
  CHECK(tr.dev_accuracy >= 0.7);
}

TEST_CASE("single-class tuning sets are rejected") {
  auto pairs = make_pairs(5, 0);
  TestScorer scorer([](const LabeledPair&, const ScorerParams&) -> std::optional<double> {
    return 0.5;
  });
  CHECK_THROWS_AS(tune_params(scorer, pairs, 100), std::runtime_error);
  CHECK_THROWS_AS(tune_params(scorer, {}, 100), std::invalid_argument);
}

TEST_CASE("evaluation reports accuracy, coverage and per-pair predictions") {
  auto pairs = make_pairs(5, 5);
  TestScorer scorer([](const LabeledPair& p, const ScorerParams&) -> std::optional<double> {
    if (p.f_word == "fp0") return std::nullopt;  // one unclassifiable pair
    return p.positive() ? 0.9 : 0.1;
  });
  ScorerParams params;
  params.threshold = 0.5;
  EvalResult r = evaluate_accuracy(scorer, params, pairs);
  CHECK(r.accuracy == doctest::Approx(1.0));
  CHECK(r.coverage == doctest::Approx(0.9));
  CHECK(r.n_classifiable == 9);
  CHECK(r.predictions.size() == 9);
}

TEST_CASE("a coin scorer lands within 3 sigma of one half on a balanced set") {
  Rng rng(23);
  auto pairs = make_pairs(500, 500);
  TestScorer scorer([&](const LabeledPair&, const ScorerParams&) -> std::optional<double> {
    return rng.uniform();
  });
  ScorerParams params;
  params.threshold = 0.5;
  EvalResult r = evaluate_accuracy(scorer, params, pairs);
  double sigma = std::sqrt(1000.0 * 0.25) / 1000.0;
  CHECK(std::abs(r.accuracy - 0.5) <= 3.0 * sigma);
}

TEST_CASE("zero classifiable pairs is an error") {
  auto pairs = make_pairs(2, 2);
  TestScorer scorer([](const LabeledPair&, const ScorerParams&) -> std::optional<double> {
    return std::nullopt;
  });
  ScorerParams params;
  CHECK_THROWS_AS(evaluate_accuracy(scorer, params, pairs), std::runtime_error);
}

TEST_CASE("a scorer and its flipped complement have accuracies summing to 1") {
  Rng rng(29);
  auto pairs = make_pairs(40, 60);
  std::map<std::string, double> scores;
  for (const LabeledPair& p : pairs) scores[p.f_word] = rng.uniform();
  TestScorer fwd([&](const LabeledPair& p, const ScorerParams&) -> std::optional<double> {
    return scores[p.f_word];
  });
  TestScorer flipped([&](const LabeledPair& p, const ScorerParams&) -> std::optional<double> {
    return -scores[p.f_word];
  });
  ScorerParams params;
  params.threshold = 0.5;
  ScorerParams flipped_params;
  flipped_params.threshold = -0.5;
  EvalResult a = evaluate_accuracy(fwd, params, pairs);
  EvalResult b = evaluate_accuracy(flipped, flipped_params, pairs);
  CHECK(a.accuracy + b.accuracy == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("balapinc pair scorer reads rows from both sides") {
  Eigen::MatrixXd f_rows(1, 4);
  f_rows << 0.0, 2.0, 1.0, 0.0;
  Eigen::MatrixXd e_rows(1, 4);
  e_rows << 0.0, 1.0, 3.0, 0.5;
  SparseEmbeddings f_side = SparseEmbeddings::from_dense({"chien"}, f_rows);
  SparseEmbeddings e_side = SparseEmbeddings::from_dense({"animal"}, e_rows);
  BalapincScorer scorer(f_side, e_side);

  ScorerParams params;
  params.top_k = 10;
  params.threshold = 0.0;
  LabeledPair pair{"chien", "animal", Relation::hyper};
  auto u = RankedFeatureList::from_dense(f_rows.row(0));
  auto v = RankedFeatureList::from_dense(e_rows.row(0));
  REQUIRE(scorer.score(pair, params).has_value());
  CHECK(*scorer.score(pair, params) == doctest::Approx(balapinc_score(u, v)));

  LabeledPair oov{"inconnu", "animal", Relation::hyper};
  CHECK(!scorer.score(oov, params).has_value());

  // Truncation to top-K applies before scoring.
  ScorerParams top1;
  top1.top_k = 1;
  CHECK(*scorer.score(pair, top1) ==
        doctest::Approx(balapinc_score(u.truncated(1), v.truncated(1))));
}

TEST_CASE("slqs pair scorer uses shared-space entropies and handles zero entropy") {
  Eigen::MatrixXd f_rows(2, 3);
  f_rows << 1.0, 1.0, 0.0,   // general word, two dims
            0.0, 0.0, 1.0;   // word on a point-mass dim
  Eigen::MatrixXd e_rows(2, 3);
  e_rows << 1.0, 0.5, 0.0,
            0.0, 0.0, 0.0;   // all-zero vector
  SparseEmbeddings f_side = SparseEmbeddings::from_dense({"fgen", "fpoint"}, f_rows);
  SparseEmbeddings e_side = SparseEmbeddings::from_dense({"egen", "ezero"}, e_rows);
  SlqsScorer scorer(f_side, e_side);
  ScorerParams params;
  params.slqs_n = 2;

  LabeledPair ok{"fgen", "egen", Relation::hyper};
  REQUIRE(scorer.score(ok, params).has_value());

  // Entailed word with only point-mass dimensions: E_v = 0, unclassifiable.
  LabeledPair zero_entropy{"fgen", "ezero", Relation::hyper};
  CHECK(!scorer.score(zero_entropy, params).has_value());
}

TEST_CASE("the translation baseline rewrites the pair into English") {
  Eigen::MatrixXd rows(3, 3);
  rows << 1.0, 2.0, 0.0,   // dog
          0.5, 1.0, 1.0,   // animal
          0.0, 0.0, 1.0;   // cat
  SparseEmbeddings english = SparseEmbeddings::from_dense({"dog", "animal", "cat"}, rows);

  std::vector<VocabEntry> f_entries = {{"chat", PosClass::noun, 1}, {"chien", PosClass::noun, 1}};
  Vocabulary f_vocab(std::move(f_entries));
  std::vector<VocabEntry> e_entries = {{"animal", PosClass::noun, 1},
                                       {"cat", PosClass::noun, 1},
                                       {"dog", PosClass::noun, 1}};
  Vocabulary e_vocab(std::move(e_entries));
  TranslationMatrix s = build_translation_matrix(
      {{"chien", "dog", 10}, {"chien", "cat", 1}, {"chat", "cat", 5}}, f_vocab, e_vocab,
      TranslationMatrix::Mode::one_hot);
  MonoDepScorer scorer(english, s, f_vocab, e_vocab);

  ScorerParams params;
  params.top_k = 10;
  CHECK(*scorer.translate("chien") == "dog");
  LabeledPair pair{"chien", "animal", Relation::hyper};
  auto u = RankedFeatureList::from_dense(rows.row(0));
  auto v = RankedFeatureList::from_dense(rows.row(1));
  REQUIRE(scorer.score(pair, params).has_value());
  CHECK(*scorer.score(pair, params) == doctest::Approx(balapinc_score(u, v)));

  // f word absent from the matrix: unclassifiable.
  LabeledPair missing{"vache", "animal", Relation::hyper};
  CHECK(!scorer.score(missing, params).has_value());

  // Translation equal to the English word scores the word against itself.
  LabeledPair self{"chat", "cat", Relation::hyper};
  auto w = RankedFeatureList::from_dense(rows.row(2));
  CHECK(*scorer.score(self, params) == doctest::Approx(balapinc_score(w, w)));

  // The baseline requires one-hot mode.
  TranslationMatrix weighted = build_translation_matrix(
      {{"chien", "dog", 10}}, f_vocab, e_vocab, TranslationMatrix::Mode::weighted);
  CHECK_THROWS_AS(MonoDepScorer(english, weighted, f_vocab, e_vocab), std::invalid_argument);
}

TEST_CASE("McNemar statistic and p-value for b=10, c=2") {
  std::vector<bool> gold(12, true);
  std::vector<bool> a(12), b(12);
  for (int i = 0; i < 12; ++i) {
    a[i] = i < 10;   // a correct on the first 10
    b[i] = i >= 10;  // b correct on the last 2
  }
  McNemarResult r = mcnemar_test(a, b, gold);
  CHECK(r.b == 10);
  CHECK(r.c == 2);
  CHECK(r.statistic == doctest::Approx(49.0 / 12.0).epsilon(1e-9));
  CHECK(r.p_value == doctest::Approx(chi2_tail_quadrature(49.0 / 12.0)).epsilon(1e-3));
  CHECK(r.p_value == doctest::Approx(0.0433).epsilon(0.03));
}

TEST_CASE("balanced disagreement has statistic 0 and p 1") {
  std::vector<bool> gold = {true, true, false, false};
  std::vector<bool> a = {true, false, true, false};
  std::vector<bool> b = {false, true, false, true};
  McNemarResult r = mcnemar_test(a, b, gold);
  CHECK(r.b == r.c);
  CHECK(r.statistic == doctest::Approx(0.0));
  CHECK(r.p_value == doctest::Approx(1.0));
}

TEST_CASE("identical prediction vectors give p 1") {
  std::vector<bool> gold = {true, false, true};
  std::vector<bool> a = {true, true, false};
  McNemarResult r = mcnemar_test(a, a, gold);
  CHECK(r.b == 0);
  CHECK(r.c == 0);
  CHECK(r.p_value == doctest::Approx(1.0));
}

TEST_CASE("McNemar is symmetric under swapping the systems") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 5 + static_cast<int>(rng.uniform_int(50));
    std::vector<bool> gold(static_cast<std::size_t>(n)), a(static_cast<std::size_t>(n)),
        b(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      gold[static_cast<std::size_t>(i)] = rng.uniform() < 0.5;
      a[static_cast<std::size_t>(i)] = rng.uniform() < 0.5;
      b[static_cast<std::size_t>(i)] = rng.uniform() < 0.5;
    }
    McNemarResult ab = mcnemar_test(a, b, gold);
    McNemarResult ba = mcnemar_test(b, a, gold);
    CHECK(ab.statistic == doctest::Approx(ba.statistic));
    CHECK(ab.p_value == doctest::Approx(ba.p_value));
  }
}

TEST_CASE("misaligned prediction vectors are rejected") {
  std::vector<bool> gold = {true, false};
  std::vector<bool> a = {true};
  CHECK_THROWS_AS(mcnemar_test(a, a, gold), std::invalid_argument);
}

TEST_CASE("the exact binomial variant matches the closed form for b=10, c=2") {
  // 2 * sum_{i<=2} C(12,i) / 2^12 = 2*79/4096.
  CHECK(mcnemar_exact_p(10, 2) == doctest::Approx(2.0 * 79.0 / 4096.0).epsilon(1e-12));
  CHECK(mcnemar_exact_p(3, 3) == doctest::Approx(1.0));
  CHECK(mcnemar_exact_p(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("the regularized gamma tail matches erfc for one degree of freedom") {
  for (double x : {0.1, 0.5, 1.0, 2.0, 4.0833333, 9.0, 20.0})
    CHECK(chi_squared_tail(x, 1) == doctest::Approx(std::erfc(std::sqrt(x / 2.0))).epsilon(1e-10));
}

TEST_CASE("prediction TSV round-trips") {
  std::vector<PairPrediction> preds = {{"chien", "animal", true, true, 0.75},
                                       {"vache", "lemon", false, true, 0.6}};
  std::stringstream ss;
  write_predictions(ss, preds);
  auto back = read_predictions(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[0].f_word == "chien");
  CHECK(back[0].gold);
  CHECK(back[1].predicted);
  CHECK(back[1].score == doctest::Approx(0.6));
}
