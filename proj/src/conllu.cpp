#include "crosshyp/conllu.hpp"

#include <sstream>
#include <stdexcept>

#include "crosshyp/io_util.hpp"

namespace crosshyp {

std::string_view word_unit(const Token& t, bool use_lemma) {
  if (use_lemma && !t.lemma.empty() && t.lemma != "_") return t.lemma;
  return t.form;
}

std::optional<std::string> validate_sentence(const ParsedSentence& s) {
  const int n = static_cast<int>(s.tokens.size());
  for (int i = 0; i < n; ++i) {
    const Token& t = s.tokens[i];
    if (t.index != i + 1) return "non-sequential token id " + std::to_string(t.index);
    if (t.head < 0 || t.head > n)
      return "head out of range: " + std::to_string(t.head) + " (sentence length " + std::to_string(n) + ")";
    if (t.head == t.index) return "token " + std::to_string(t.index) + " is its own head";
    if (t.upos.empty()) return "empty upos on token " + std::to_string(t.index);
    if (t.deprel.empty()) return "empty deprel on token " + std::to_string(t.index);
  }
  // Walk each head chain; a chain longer than n tokens means a cycle.
  for (int i = 0; i < n; ++i) {
    int cur = i + 1;
    int steps = 0;
    while (cur != 0) {
      cur = s.tokens[cur - 1].head;
      if (++steps > n) return "cyclic head chain through token " + std::to_string(i + 1);
    }
  }
  return std::nullopt;
}

ConlluParser::ConlluParser(bool strict, SentenceSink sink)
    : strict_(strict), sink_(std::move(sink)) {}

void ConlluParser::fail(std::string message) {
  if (!current_bad_) {
    current_bad_ = true;
    current_bad_reason_ = std::move(message);
  }
}

void ConlluParser::feed_line(std::string_view line) {
  if (line.empty()) {
    flush_sentence();
    return;
  }
  if (line.front() == '#') return;
  current_has_lines_ = true;
  if (current_bad_) return;  // skip to the end of the bad sentence

  auto cols = split_view(line, '\t');
  if (cols.size() != 10) {
    fail("expected 10 tab-separated columns, got " + std::to_string(cols.size()));
    return;
  }
  std::string_view id = cols[0];
  if (id.find('-') != std::string_view::npos) return;  // multiword token range
  if (id.find('.') != std::string_view::npos) return;  // empty node

  long long idx = 0;
  if (!parse_int64(id, idx) || idx < 1) {
    fail("bad token id: " + std::string(id));
    return;
  }
  long long head = 0;
  if (!parse_int64(cols[6], head) || head < 0) {
    fail("non-integer head field: " + std::string(cols[6]));
    return;
  }
  Token t;
  t.index = static_cast<int>(idx);
  t.form = std::string(cols[1]);
  t.lemma = std::string(cols[2]);
  t.upos = std::string(cols[3]);
  t.head = static_cast<int>(head);
  t.deprel = std::string(cols[7]);
  current_.tokens.push_back(std::move(t));
}

void ConlluParser::flush_sentence() {
  if (!current_has_lines_) {
    current_ = ParsedSentence{};
    current_bad_ = false;
    return;
  }
  ++sentence_no_;
  std::optional<std::string> problem;
  if (current_bad_) {
    problem = current_bad_reason_;
  } else if (current_.tokens.empty()) {
    problem = "sentence contains no token lines";
  } else {
    problem = validate_sentence(current_);
  }
  if (problem) {
    if (strict_)
      throw std::runtime_error("sentence " + std::to_string(sentence_no_) + ": " + *problem);
    errors_.push_back({sentence_no_, *problem});
  } else {
    sink_(std::move(current_));
  }
  current_ = ParsedSentence{};
  current_bad_ = false;
  current_has_lines_ = false;
}

void ConlluParser::finish() { flush_sentence(); }

ParseResult parse_conllu_text(std::string_view text, bool strict) {
  ParseResult result;
  ConlluParser parser(strict, [&](ParsedSentence&& s) { result.sentences.push_back(std::move(s)); });
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t pos = text.find('\n', start);
    std::string_view line = (pos == std::string_view::npos)
                                ? text.substr(start)
                                : text.substr(start, pos - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    parser.feed_line(line);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  parser.finish();
  result.errors = parser.errors();
  return result;
}

std::vector<SentenceError> for_each_conllu_sentence(const std::filesystem::path& path,
                                                    bool strict, const SentenceSink& sink) {
  LineReader reader(path);
  ConlluParser parser(strict, sink);
  std::string line;
  while (reader.next(line)) parser.feed_line(line);
  parser.finish();
  return parser.errors();
}

std::string to_conllu(const ParsedSentence& s) {
  std::ostringstream out;
  for (const Token& t : s.tokens) {
    out << t.index << '\t' << t.form << '\t' << t.lemma << '\t' << t.upos << '\t'
        << '_' << '\t' << '_' << '\t' << t.head << '\t' << t.deprel << '\t' << '_'
        << '\t' << '_' << '\n';
  }
  return out.str();
}

}  // namespace crosshyp
