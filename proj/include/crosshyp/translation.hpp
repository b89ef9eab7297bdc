#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crosshyp/vocab.hpp"

namespace crosshyp {

struct TranslationCount {
  std::string src;
  std::string dst;
  std::uint64_t count = 0;
};

// Sparse row-major src-vocabulary x dst-vocabulary correspondence matrix.
// one_hot rows hold a single entry of weight 1 (the most frequent
// translation, count ties broken by the lexicographically smallest dst
// word); weighted rows are count-normalized to sum 1. Empty rows are
// allowed for words without surviving translations.
struct TranslationMatrix {
  enum class Mode { one_hot, weighted };

  Mode mode = Mode::one_hot;
  int rows = 0;
  int cols = 0;
  std::vector<std::vector<std::pair<int, double>>> row_entries;  // col-sorted

  std::optional<int> one_hot_target(int row) const;
  double row_sum(int row) const;
  bool empty() const;
  void validate() const;  // throws on invariant violations
};

std::optional<TranslationMatrix::Mode> translation_mode_from_name(std::string_view name);

// Pairs whose words are missing from either vocabulary are dropped;
// duplicate (src, dst) pairs accumulate their counts.
TranslationMatrix build_translation_matrix(const std::vector<TranslationCount>& counts,
                                           const Vocabulary& src_vocab,
                                           const Vocabulary& dst_vocab,
                                           TranslationMatrix::Mode mode);
// Same, with rows/columns given as plain word lists (row order = ids).
TranslationMatrix build_translation_matrix(const std::vector<TranslationCount>& counts,
                                           const std::vector<std::string>& src_words,
                                           const std::vector<std::string>& dst_words,
                                           TranslationMatrix::Mode mode);

// TSV rows `src<TAB>dst<TAB>count`; count must be a positive integer.
std::vector<TranslationCount> read_translation_counts(std::istream& in);
std::vector<TranslationCount> read_translation_counts_file(const std::filesystem::path& path);
void write_translation_counts(std::ostream& out, const std::vector<TranslationCount>& counts);

// Deterministic dictionary subsampling: keeps each pair independently
// with probability `fraction`.
std::vector<TranslationCount> subsample_translation_counts(
    const std::vector<TranslationCount>& counts, double fraction, std::uint64_t seed);

}  // namespace crosshyp
