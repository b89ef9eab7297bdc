#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "crosshyp/cooc.hpp"
#include "crosshyp/io_util.hpp"

using namespace crosshyp;

namespace {

Vocabulary numbered_vocab(int n) {
  std::vector<VocabEntry> entries;
  for (int i = 0; i < n; ++i)
    entries.push_back({"w" + std::to_string(i), PosClass::noun, static_cast<std::uint64_t>(n - i)});
  return Vocabulary(std::move(entries));
}

std::vector<ContextEvent> events_from(const std::vector<std::pair<int, std::string>>& raw) {
  std::vector<ContextEvent> events;
  for (const auto& [target, ctx] : raw) events.push_back({target, ctx});
  return events;
}

CoocMatrix matrix_from_dense(const Eigen::MatrixXd& counts) {
  CoocCounter counter;
  for (Eigen::Index i = 0; i < counts.rows(); ++i)
    for (Eigen::Index j = 0; j < counts.cols(); ++j)
      for (int r = 0; r < static_cast<int>(counts(i, j)); ++r)
        counter.add(static_cast<int>(i), "c" + std::to_string(j));
  return counter.finalize(numbered_vocab(static_cast<int>(counts.rows())), 1000000);
}

// Independent dense PPMI transcription: p(w,c) over the full table, a
// triple loop, no sparsity tricks.
Eigen::MatrixXd ppmi_oracle(const Eigen::MatrixXd& counts) {
  double total = counts.sum();
  Eigen::VectorXd row = counts.rowwise().sum();
  Eigen::VectorXd col = counts.colwise().sum();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(counts.rows(), counts.cols());
  for (Eigen::Index i = 0; i < counts.rows(); ++i)
    for (Eigen::Index j = 0; j < counts.cols(); ++j) {
      if (counts(i, j) <= 0) continue;
      double p_wc = counts(i, j) / total;
      double p_w = row(i) / total;
      double p_c = col(j) / total;
      double pmi = std::log(p_wc / (p_w * p_c));
      out(i, j) = std::max(0.0, pmi);
    }
  return out;
}

Eigen::MatrixXd to_dense(const CoocMatrix& m, int rows, int cols) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, cols);
  for (const CoocCell& c : m.cells) {
    // Column names are "c<j>" in these tests; recover j from the name.
    int j = std::stoi(m.contexts[static_cast<std::size_t>(c.col)].substr(1));
    out(c.row, j) = c.value;
  }
  return out;
}

}  // namespace

TEST_CASE("events are counted into cells with the right total") {
  Vocabulary v = numbered_vocab(2);
  auto events = events_from({{0, "x"}, {0, "x"}, {1, "y"}});
  CoocMatrix m = count_cooccurrences(events, v, 100);
  CHECK(m.total == doctest::Approx(3.0));
  REQUIRE(m.cells.size() == 2);
  int cx = m.context_index.at("x");
  int cy = m.context_index.at("y");
  CHECK(m.value_at(0, cx) == doctest::Approx(2.0));
  CHECK(m.value_at(1, cy) == doctest::Approx(1.0));
}

TEST_CASE("empty event stream gives an empty matrix") {
  CoocMatrix m = count_cooccurrences({}, numbered_vocab(3), 10);
  CHECK(m.cells.empty());
  CHECK(m.total == 0.0);
  CHECK(m.cols() == 0);
}

TEST_CASE("context_limit keeps the most frequent context columns") {
  Vocabulary v = numbered_vocab(2);
  auto events = events_from({{0, "x"}, {0, "x"}, {1, "x"}, {1, "y"}});
  CoocMatrix m = count_cooccurrences(events, v, 1);
  REQUIRE(m.cols() == 1);
  CHECK(m.contexts[0] == "x");
  CHECK(m.total == doctest::Approx(3.0));
}

TEST_CASE("context marginal ties break lexicographically") {
  Vocabulary v = numbered_vocab(1);
  auto events = events_from({{0, "zz"}, {0, "aa"}});
  CoocMatrix m = count_cooccurrences(events, v, 1);
  REQUIRE(m.cols() == 1);
  CHECK(m.contexts[0] == "aa");
}

TEST_CASE("PPMI of a diagonal 2x2 matrix is ln 2 on the diagonal") {
  Eigen::MatrixXd counts(2, 2);
  counts << 4, 0, 0, 4;
  CoocMatrix weighted = ppmi_reweight(matrix_from_dense(counts));
  REQUIRE(weighted.cells.size() == 2);
  for (const CoocCell& c : weighted.cells)
    CHECK(c.value == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("uniform counts have zero PMI everywhere and an empty result") {
  Eigen::MatrixXd counts(2, 2);
  counts << 1, 1, 1, 1;
  CoocMatrix weighted = ppmi_reweight(matrix_from_dense(counts));
  CHECK(weighted.cells.empty());
  CHECK(weighted.total == 0.0);
}

TEST_CASE("a single-cell matrix has PMI 0 and empties out") {
  Eigen::MatrixXd counts(1, 1);
  counts << 5;
  CoocMatrix weighted = ppmi_reweight(matrix_from_dense(counts));
  CHECK(weighted.cells.empty());
}

TEST_CASE("PPMI of an all-zero matrix is an error") {
  CoocMatrix empty = count_cooccurrences({}, numbered_vocab(2), 10);
  CHECK_THROWS_AS(ppmi_reweight(empty), std::runtime_error);
}

TEST_CASE("PPMI matches the dense oracle on random count matrices") {
  Rng rng(20240811);
  for (int trial = 0; trial < 100; ++trial) {
    int rows = 2 + static_cast<int>(rng.uniform_int(19));   // <= 20
    int cols = 2 + static_cast<int>(rng.uniform_int(29));   // <= 30
    Eigen::MatrixXd counts(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        counts(i, j) = rng.uniform() < 0.3 ? static_cast<double>(rng.uniform_int(51)) : 0.0;
    if (counts.sum() == 0.0) counts(0, 0) = 1.0;

    CoocMatrix weighted = ppmi_reweight(matrix_from_dense(counts));
    Eigen::MatrixXd expected = ppmi_oracle(counts);
    Eigen::MatrixXd actual = to_dense(weighted, rows, cols);
    CHECK((actual - expected).cwiseAbs().maxCoeff() <= 1e-9);

    // Non-negativity and no stored zeros.
    for (const CoocCell& c : weighted.cells) CHECK(c.value > 0.0);
    double total = 0.0;
    for (const CoocCell& c : weighted.cells) total += c.value;
    CHECK(weighted.total == doctest::Approx(total).epsilon(1e-6));
  }
}

TEST_CASE("counter shards merge commutatively") {
  Vocabulary v = numbered_vocab(2);
  CoocCounter a, b;
  a.add(0, "x");
  a.add(1, "y");
  b.add(0, "x");
  b.add(0, "z");
  CoocCounter ab = a;
  ab.merge(b);
  CoocCounter ba = b;
  ba.merge(a);
  CoocMatrix mab = ab.finalize(v, 100);
  CoocMatrix mba = ba.finalize(v, 100);
  CHECK(mab.cells == mba.cells);
  CHECK(mab.contexts == mba.contexts);
}

TEST_CASE("text and binary dumps round-trip") {
  Vocabulary v = numbered_vocab(3);
  auto events = events_from({{0, "x"}, {0, "y"}, {2, "x"}, {1, "z"}, {1, "z"}});
  CoocMatrix m = count_cooccurrences(events, v, 100);

  std::stringstream text;
  write_cooc_text(text, m);
  CoocTriples from_text = read_cooc_text(text);
  CHECK(from_text.rows == static_cast<std::int64_t>(m.rows()));
  CHECK(from_text.cols == static_cast<std::int64_t>(m.cols()));
  CHECK(from_text.cells == m.cells);

  std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
  write_cooc_binary(bin, m);
  CoocTriples from_bin = read_cooc_binary(bin);
  CHECK(from_bin.rows == static_cast<std::int64_t>(m.rows()));
  CHECK(from_bin.cells == m.cells);
}
