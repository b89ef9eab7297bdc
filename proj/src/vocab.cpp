#include "crosshyp/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace crosshyp {

std::string_view pos_class_name(PosClass c) {
  switch (c) {
    case PosClass::noun: return "NOUN";
    case PosClass::verb: return "VERB";
    case PosClass::adj: return "ADJ";
  }
  return "?";
}

std::optional<PosClass> pos_class_from_name(std::string_view name) {
  if (name == "NOUN") return PosClass::noun;
  if (name == "VERB") return PosClass::verb;
  if (name == "ADJ") return PosClass::adj;
  return std::nullopt;
}

PosMapper PosMapper::from_tsv(const std::filesystem::path& path) {
  PosMapper m;
  m.identity_ = false;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open POS map: " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto cols = split_view(line, '\t');
    if (cols.size() != 2)
      throw std::runtime_error("POS map line " + std::to_string(line_no) + ": expected 2 columns");
    auto cls = pos_class_from_name(cols[1]);
    if (!cls)
      throw std::runtime_error("POS map line " + std::to_string(line_no) + ": unknown class " +
                               std::string(cols[1]));
    m.table_.emplace(std::string(cols[0]), *cls);
  }
  return m;
}

std::optional<PosClass> PosMapper::map(std::string_view tag) const {
  if (identity_) return pos_class_from_name(tag);
  auto it = table_.find(std::string(tag));
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

Vocabulary::Vocabulary(std::vector<VocabEntry> entries) : entries_(std::move(entries)) {
  index_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    auto [it, inserted] = index_.emplace(entries_[i].word, static_cast<int>(i));
    if (!inserted) throw std::runtime_error("duplicate vocabulary word: " + entries_[i].word);
  }
}

int Vocabulary::id(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? -1 : it->second;
}

void Vocabulary::write_tsv(std::ostream& out) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const VocabEntry& e = entries_[i];
    out << e.word << '\t' << pos_class_name(e.pos) << '\t' << e.freq << '\t' << i << '\n';
  }
}

Vocabulary Vocabulary::read_tsv(std::istream& in) {
  std::vector<VocabEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cols = split_view(line, '\t');
    if (cols.size() != 4)
      throw std::runtime_error("vocab line " + std::to_string(line_no) + ": expected 4 columns");
    auto cls = pos_class_from_name(cols[1]);
    if (!cls)
      throw std::runtime_error("vocab line " + std::to_string(line_no) + ": unknown POS class");
    long long freq = 0, id = 0;
    if (!parse_int64(cols[2], freq) || !parse_int64(cols[3], id) || freq < 0)
      throw std::runtime_error("vocab line " + std::to_string(line_no) + ": bad numeric field");
    if (id != static_cast<long long>(entries.size()))
      throw std::runtime_error("vocab line " + std::to_string(line_no) + ": ids must be dense and sorted");
    entries.push_back({std::string(cols[0]), *cls, static_cast<std::uint64_t>(freq)});
  }
  return Vocabulary(std::move(entries));
}

Vocabulary Vocabulary::read_tsv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open vocabulary: " + path.string());
  return read_tsv(in);
}

void VocabCounter::add_sentence(const ParsedSentence& s, const PosMapper& mapper,
                                const PosSet& pos_set, bool use_lemma) {
  for (const Token& t : s.tokens) {
    auto cls = mapper.map(t.upos);
    if (!cls || !pos_set.contains(*cls)) continue;
    std::string_view w = word_unit(t, use_lemma);
    if (w.empty()) continue;
    counts_[std::string(w)][static_cast<int>(*cls)]++;
  }
}

void VocabCounter::merge(const VocabCounter& other) {
  for (const auto& [word, arr] : other.counts_) {
    auto& mine = counts_[word];
    for (int i = 0; i < 3; ++i) mine[i] += arr[i];
  }
}

Vocabulary VocabCounter::build(std::size_t max_size) const {
  std::vector<VocabEntry> entries;
  entries.reserve(counts_.size());
  for (const auto& [word, arr] : counts_) {
    std::uint64_t total = arr[0] + arr[1] + arr[2];
    if (total == 0) continue;
    int best_class = 0;
    for (int i = 1; i < 3; ++i)
      if (arr[i] > arr[best_class]) best_class = i;
    entries.push_back({word, static_cast<PosClass>(best_class), total});
  }
  std::sort(entries.begin(), entries.end(), [](const VocabEntry& a, const VocabEntry& b) {
    if (a.freq != b.freq) return a.freq > b.freq;
    return a.word < b.word;
  });
  if (entries.size() > max_size) entries.resize(max_size);
  return Vocabulary(std::move(entries));
}

SentenceSubsampler::SentenceSubsampler(double fraction, std::uint64_t seed)
    : fraction_(fraction), rng_(seed) {
  if (!(fraction > 0.0) || fraction > 1.0)
    throw std::invalid_argument("subsample fraction must be in (0,1]");
}

bool SentenceSubsampler::keep() { return rng_.uniform() < fraction_; }

std::vector<ParsedSentence> subsample_corpus(const std::vector<ParsedSentence>& sentences,
                                             double fraction, std::uint64_t seed) {
  SentenceSubsampler sampler(fraction, seed);
  std::vector<ParsedSentence> kept;
  for (const ParsedSentence& s : sentences)
    if (sampler.keep()) kept.push_back(s);
  return kept;
}

}  // namespace crosshyp
