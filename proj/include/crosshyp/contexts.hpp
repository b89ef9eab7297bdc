#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "crosshyp/conllu.hpp"
#include "crosshyp/vocab.hpp"

namespace crosshyp {

// One (target word, context string) co-occurrence. Emission count is
// always 1; aggregation happens downstream.
struct ContextEvent {
  int target_id = -1;   // row id in the word vocabulary
  std::string context;  // opaque key, no tabs or newlines
  bool operator==(const ContextEvent&) const = default;
};

enum class ContextType { full, joint, unlabeled, window };

std::optional<ContextType> context_type_from_name(std::string_view name);
std::string_view context_type_name(ContextType t);

struct ContextOptions {
  ContextType type = ContextType::full;
  int window = 0;                   // required for window contexts
  bool window_content_only = false; // restrict window contexts to content words
  bool use_lemma = true;
  PosMapper pos_mapper;             // only consulted by window_content_only
};

using EventSink = std::function<void(ContextEvent&&)>;

// Dependency neighborhood contexts. Parent contexts carry the inverse
// marker `lemma#label^-1`, child contexts `lemma#label`.
void extract_full_contexts(const ParsedSentence& s, const Vocabulary& vocab, bool use_lemma,
                           const EventSink& sink);

// Parent lemma concatenated with each sibling lemma: `parent#sibling`.
void extract_joint_contexts(const ParsedSentence& s, const Vocabulary& vocab, bool use_lemma,
                            const EventSink& sink);

// Bare parent/child lemmas, no label, no direction marker.
void extract_unlabeled_contexts(const ParsedSentence& s, const Vocabulary& vocab, bool use_lemma,
                                const EventSink& sink);

// Linear window of +-window positions around each in-vocabulary target.
void extract_window_contexts(const ParsedSentence& s, const Vocabulary& vocab, int window,
                             bool use_lemma, bool content_only, const PosMapper& mapper,
                             const EventSink& sink);

void extract_contexts(const ParsedSentence& s, const Vocabulary& vocab,
                      const ContextOptions& opts, const EventSink& sink);

// Convenience for tests and small corpora.
std::vector<ContextEvent> collect_contexts(const ParsedSentence& s, const Vocabulary& vocab,
                                           const ContextOptions& opts);

// Event dump line: `target<TAB>context<TAB>1`.
void write_event(std::ostream& out, const Vocabulary& vocab, const ContextEvent& ev);

}  // namespace crosshyp
