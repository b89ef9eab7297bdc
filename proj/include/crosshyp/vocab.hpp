#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "crosshyp/conllu.hpp"
#include "crosshyp/io_util.hpp"

namespace crosshyp {

enum class PosClass : int { noun = 0, verb = 1, adj = 2 };

std::string_view pos_class_name(PosClass c);
std::optional<PosClass> pos_class_from_name(std::string_view name);

// Maps corpus POS tags to the three content classes. The default is the
// identity map on UPOS {NOUN, VERB, ADJ}; language-specific tagsets load
// from a two-column TSV `tag<TAB>class`.
class PosMapper {
 public:
  PosMapper() = default;
  static PosMapper from_tsv(const std::filesystem::path& path);

  std::optional<PosClass> map(std::string_view tag) const;

 private:
  bool identity_ = true;
  std::unordered_map<std::string, PosClass> table_;
};

struct PosSet {
  std::array<bool, 3> included{true, true, true};
  bool contains(PosClass c) const { return included[static_cast<int>(c)]; }
  bool empty() const { return !included[0] && !included[1] && !included[2]; }
};

struct VocabEntry {
  std::string word;
  PosClass pos = PosClass::noun;
  std::uint64_t freq = 0;
};

// Content-word vocabulary; ids are dense 0..size-1 in descending
// frequency order, ties broken lexicographically ascending.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<VocabEntry> entries);

  int id(std::string_view word) const;  // -1 when absent
  bool contains(std::string_view word) const { return id(word) >= 0; }
  std::size_t size() const { return entries_.size(); }
  const VocabEntry& entry(int id) const { return entries_[static_cast<std::size_t>(id)]; }
  const std::vector<VocabEntry>& entries() const { return entries_; }

  void write_tsv(std::ostream& out) const;
  static Vocabulary read_tsv(std::istream& in);
  static Vocabulary read_tsv_file(const std::filesystem::path& path);

 private:
  std::vector<VocabEntry> entries_;
  std::unordered_map<std::string, int> index_;
};

// Per-shard frequency counter; shards merge commutatively.
class VocabCounter {
 public:
  void add_sentence(const ParsedSentence& s, const PosMapper& mapper, const PosSet& pos_set,
                    bool use_lemma);
  void merge(const VocabCounter& other);

  // Top max_size words by total frequency (ties lexicographic). The POS
  // class recorded per word is its most frequent class, ties in class
  // counts resolved in enum order.
  Vocabulary build(std::size_t max_size) const;

 private:
  std::unordered_map<std::string, std::array<std::uint64_t, 3>> counts_;
};

// Deterministic per-sentence corpus subsampling: a sentence is kept when
// the next PRNG draw falls below `fraction`. Same (stream order,
// fraction, seed) always selects the same subset.
class SentenceSubsampler {
 public:
  SentenceSubsampler(double fraction, std::uint64_t seed);
  bool keep();

 private:
  double fraction_;
  Rng rng_;
};

std::vector<ParsedSentence> subsample_corpus(const std::vector<ParsedSentence>& sentences,
                                             double fraction, std::uint64_t seed);

}  // namespace crosshyp
