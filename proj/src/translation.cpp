#include "crosshyp/translation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <unordered_map>
#include <ostream>
#include <stdexcept>

#include "crosshyp/io_util.hpp"

namespace crosshyp {

std::optional<int> TranslationMatrix::one_hot_target(int row) const {
  if (row < 0 || row >= rows) return std::nullopt;
  const auto& entries = row_entries[static_cast<std::size_t>(row)];
  if (entries.empty()) return std::nullopt;
  return entries.front().first;
}

double TranslationMatrix::row_sum(int row) const {
  double s = 0.0;
  for (const auto& [col, v] : row_entries[static_cast<std::size_t>(row)]) s += v;
  return s;
}

bool TranslationMatrix::empty() const {
  for (const auto& entries : row_entries)
    if (!entries.empty()) return false;
  return true;
}

void TranslationMatrix::validate() const {
  if (static_cast<int>(row_entries.size()) != rows)
    throw std::runtime_error("translation matrix row count mismatch");
  for (int i = 0; i < rows; ++i) {
    const auto& entries = row_entries[static_cast<std::size_t>(i)];
    for (const auto& [col, v] : entries) {
      if (col < 0 || col >= cols) throw std::runtime_error("translation column out of range");
      if (v < 0.0) throw std::runtime_error("negative translation weight");
    }
    if (mode == Mode::one_hot) {
      if (entries.size() > 1 || (entries.size() == 1 && entries.front().second != 1.0))
        throw std::runtime_error("one-hot row must hold a single unit entry");
    } else if (!entries.empty()) {
      if (std::abs(row_sum(i) - 1.0) > 1e-9)
        throw std::runtime_error("weighted row must sum to 1");
    }
  }
}

std::optional<TranslationMatrix::Mode> translation_mode_from_name(std::string_view name) {
  if (name == "one_hot" || name == "one-hot") return TranslationMatrix::Mode::one_hot;
  if (name == "weighted") return TranslationMatrix::Mode::weighted;
  return std::nullopt;
}

namespace {

template <typename SrcId, typename DstId>
TranslationMatrix build_matrix_impl(const std::vector<TranslationCount>& counts, int n_src,
                                    int n_dst, SrcId src_id, DstId dst_id,
                                    TranslationMatrix::Mode mode) {
  // Accumulate per-row counts keyed by dst word so one-hot ties can
  // resolve on the word string, not the column id.
  std::vector<std::map<std::string, std::uint64_t>> acc(static_cast<std::size_t>(n_src));
  for (const TranslationCount& tc : counts) {
    if (tc.count == 0) throw std::invalid_argument("translation count must be >= 1");
    int src = src_id(tc.src);
    int dst = dst_id(tc.dst);
    if (src < 0 || dst < 0) continue;
    acc[static_cast<std::size_t>(src)][tc.dst] += tc.count;
  }

  TranslationMatrix m;
  m.mode = mode;
  m.rows = n_src;
  m.cols = n_dst;
  m.row_entries.resize(static_cast<std::size_t>(n_src));
  for (std::size_t row = 0; row < acc.size(); ++row) {
    const auto& choices = acc[row];
    if (choices.empty()) continue;
    auto& entries = m.row_entries[row];
    if (mode == TranslationMatrix::Mode::one_hot) {
      const std::string* best_word = nullptr;
      std::uint64_t best_count = 0;
      for (const auto& [word, count] : choices) {
        // std::map iterates words ascending, so '>' keeps the smallest
        // word among count ties.
        if (count > best_count) {
          best_count = count;
          best_word = &word;
        }
      }
      entries.emplace_back(dst_id(*best_word), 1.0);
    } else {
      std::uint64_t sum = 0;
      for (const auto& [word, count] : choices) sum += count;
      for (const auto& [word, count] : choices)
        entries.emplace_back(dst_id(word), static_cast<double>(count) / static_cast<double>(sum));
      std::sort(entries.begin(), entries.end());
    }
  }
  return m;
}

}  // namespace

TranslationMatrix build_translation_matrix(const std::vector<TranslationCount>& counts,
                                           const Vocabulary& src_vocab,
                                           const Vocabulary& dst_vocab,
                                           TranslationMatrix::Mode mode) {
  return build_matrix_impl(
      counts, static_cast<int>(src_vocab.size()), static_cast<int>(dst_vocab.size()),
      [&](const std::string& w) { return src_vocab.id(w); },
      [&](const std::string& w) { return dst_vocab.id(w); }, mode);
}

TranslationMatrix build_translation_matrix(const std::vector<TranslationCount>& counts,
                                           const std::vector<std::string>& src_words,
                                           const std::vector<std::string>& dst_words,
                                           TranslationMatrix::Mode mode) {
  std::unordered_map<std::string, int> src_index, dst_index;
  src_index.reserve(src_words.size());
  dst_index.reserve(dst_words.size());
  for (std::size_t i = 0; i < src_words.size(); ++i)
    src_index.emplace(src_words[i], static_cast<int>(i));
  for (std::size_t i = 0; i < dst_words.size(); ++i)
    dst_index.emplace(dst_words[i], static_cast<int>(i));
  auto lookup = [](const std::unordered_map<std::string, int>& index, const std::string& w) {
    auto it = index.find(w);
    return it == index.end() ? -1 : it->second;
  };
  return build_matrix_impl(
      counts, static_cast<int>(src_words.size()), static_cast<int>(dst_words.size()),
      [&](const std::string& w) { return lookup(src_index, w); },
      [&](const std::string& w) { return lookup(dst_index, w); }, mode);
}

std::vector<TranslationCount> read_translation_counts(std::istream& in) {
  std::vector<TranslationCount> counts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto cols = split_view(line, '\t');
    if (cols.size() != 3)
      throw std::runtime_error("translation line " + std::to_string(line_no) + ": expected 3 columns");
    long long count = 0;
    if (!parse_int64(cols[2], count) || count < 1)
      throw std::runtime_error("translation line " + std::to_string(line_no) + ": bad count");
    counts.push_back({std::string(cols[0]), std::string(cols[1]), static_cast<std::uint64_t>(count)});
  }
  return counts;
}

std::vector<TranslationCount> read_translation_counts_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open translation counts: " + path.string());
  return read_translation_counts(in);
}

void write_translation_counts(std::ostream& out, const std::vector<TranslationCount>& counts) {
  for (const TranslationCount& tc : counts)
    out << tc.src << '\t' << tc.dst << '\t' << tc.count << '\n';
}

std::vector<TranslationCount> subsample_translation_counts(
    const std::vector<TranslationCount>& counts, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0) || fraction > 1.0)
    throw std::invalid_argument("dictionary subsample fraction must be in (0,1]");
  Rng rng(seed);
  std::vector<TranslationCount> kept;
  for (const TranslationCount& tc : counts)
    if (rng.uniform() < fraction) kept.push_back(tc);
  return kept;
}

}  // namespace crosshyp
