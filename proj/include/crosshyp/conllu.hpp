#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crosshyp {

struct Token {
  int index = 0;  // 1-based position in the sentence
  std::string form;
  std::string lemma;
  std::string upos;
  int head = 0;  // 0 = attached to the root
  std::string deprel;
  bool operator==(const Token&) const = default;
};

struct ParsedSentence {
  std::vector<Token> tokens;
  bool operator==(const ParsedSentence&) const = default;
};

// The word unit used throughout the pipeline: lemma by default, with a
// fall-back to the surface form when the lemma column is unset ("_").
std::string_view word_unit(const Token& t, bool use_lemma);

struct SentenceError {
  long long sentence_no = 0;  // 1-based ordinal in the stream
  std::string message;
};

// Checks head ranges, self-heads and cyclic head chains; tokens must be
// numbered 1..n in order. Returns a message for the first violation.
std::optional<std::string> validate_sentence(const ParsedSentence& s);

using SentenceSink = std::function<void(ParsedSentence&&)>;

// Streaming CoNLL-U parser. Feed lines in order, call finish() at EOF.
// Multiword ranges (id with '-') and empty nodes (id with '.') are
// skipped. In lenient mode malformed sentences become error records; in
// strict mode the first one throws.
class ConlluParser {
 public:
  ConlluParser(bool strict, SentenceSink sink);

  void feed_line(std::string_view line);
  void finish();

  const std::vector<SentenceError>& errors() const { return errors_; }

 private:
  void flush_sentence();
  void fail(std::string message);

  bool strict_;
  SentenceSink sink_;
  std::vector<SentenceError> errors_;
  ParsedSentence current_;
  bool current_bad_ = false;
  std::string current_bad_reason_;
  bool current_has_lines_ = false;
  long long sentence_no_ = 0;
};

struct ParseResult {
  std::vector<ParsedSentence> sentences;
  std::vector<SentenceError> errors;
};

ParseResult parse_conllu_text(std::string_view text, bool strict = false);

// Streams a (possibly gzip-compressed) file through the parser.
std::vector<SentenceError> for_each_conllu_sentence(const std::filesystem::path& path,
                                                    bool strict, const SentenceSink& sink);

// Serializes back to 10-column CoNLL-U (unused columns as "_").
std::string to_conllu(const ParsedSentence& s);

}  // namespace crosshyp
