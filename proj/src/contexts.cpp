#include "crosshyp/contexts.hpp"

#include <ostream>
#include <stdexcept>

namespace crosshyp {

namespace {

bool is_punct(const Token& t) { return t.upos == "PUNCT"; }

bool usable_context_token(const Token& t, bool use_lemma) {
  return !is_punct(t) && !word_unit(t, use_lemma).empty();
}

void emit(const EventSink& sink, int target_id, std::string context) {
  if (context.empty()) return;
  sink(ContextEvent{target_id, std::move(context)});
}

}  // namespace

std::optional<ContextType> context_type_from_name(std::string_view name) {
  if (name == "full") return ContextType::full;
  if (name == "joint") return ContextType::joint;
  if (name == "unlabeled") return ContextType::unlabeled;
  if (name == "window") return ContextType::window;
  return std::nullopt;
}

std::string_view context_type_name(ContextType t) {
  switch (t) {
    case ContextType::full: return "full";
    case ContextType::joint: return "joint";
    case ContextType::unlabeled: return "unlabeled";
    case ContextType::window: return "window";
  }
  return "?";
}

void extract_full_contexts(const ParsedSentence& s, const Vocabulary& vocab, bool use_lemma,
                           const EventSink& sink) {
  const int n = static_cast<int>(s.tokens.size());
  for (int i = 0; i < n; ++i) {
    const Token& t = s.tokens[i];
    int target = vocab.id(word_unit(t, use_lemma));
    if (target < 0) continue;
    for (int j = 0; j < n; ++j) {
      const Token& c = s.tokens[j];
      if (c.head != t.index || j == i) continue;
      if (!usable_context_token(c, use_lemma)) continue;
      emit(sink, target, std::string(word_unit(c, use_lemma)) + "#" + c.deprel);
    }
    if (t.head > 0) {
      const Token& p = s.tokens[t.head - 1];
      if (usable_context_token(p, use_lemma))
        emit(sink, target, std::string(word_unit(p, use_lemma)) + "#" + t.deprel + "^-1");
    }
  }
}

void extract_joint_contexts(const ParsedSentence& s, const Vocabulary& vocab, bool use_lemma,
                            const EventSink& sink) {
  const int n = static_cast<int>(s.tokens.size());
  for (int i = 0; i < n; ++i) {
    const Token& t = s.tokens[i];
    int target = vocab.id(word_unit(t, use_lemma));
    if (target < 0) continue;
    if (t.head <= 0) continue;  // no parent token, no sibling contexts
    const Token& p = s.tokens[t.head - 1];
    if (!usable_context_token(p, use_lemma)) continue;
    for (int j = 0; j < n; ++j) {
      const Token& sib = s.tokens[j];
      if (sib.head != p.index || sib.index == t.index) continue;
      if (!usable_context_token(sib, use_lemma)) continue;
      emit(sink, target,
           std::string(word_unit(p, use_lemma)) + "#" + std::string(word_unit(sib, use_lemma)));
    }
  }
}

void extract_unlabeled_contexts(const ParsedSentence& s, const Vocabulary& vocab, bool use_lemma,
                                const EventSink& sink) {
  const int n = static_cast<int>(s.tokens.size());
  for (int i = 0; i < n; ++i) {
    const Token& t = s.tokens[i];
    int target = vocab.id(word_unit(t, use_lemma));
    if (target < 0) continue;
    for (int j = 0; j < n; ++j) {
      const Token& c = s.tokens[j];
      if (c.head != t.index || j == i) continue;
      if (!usable_context_token(c, use_lemma)) continue;
      emit(sink, target, std::string(word_unit(c, use_lemma)));
    }
    if (t.head > 0) {
      const Token& p = s.tokens[t.head - 1];
      if (usable_context_token(p, use_lemma))
        emit(sink, target, std::string(word_unit(p, use_lemma)));
    }
  }
}

void extract_window_contexts(const ParsedSentence& s, const Vocabulary& vocab, int window,
                             bool use_lemma, bool content_only, const PosMapper& mapper,
                             const EventSink& sink) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  const int n = static_cast<int>(s.tokens.size());
  for (int i = 0; i < n; ++i) {
    const Token& t = s.tokens[i];
    int target = vocab.id(word_unit(t, use_lemma));
    if (target < 0) continue;
    int lo = std::max(0, i - window);
    int hi = std::min(n - 1, i + window);
    for (int j = lo; j <= hi; ++j) {
      if (j == i) continue;
      const Token& c = s.tokens[j];
      if (!usable_context_token(c, use_lemma)) continue;
      if (content_only && !mapper.map(c.upos)) continue;
      emit(sink, target, std::string(word_unit(c, use_lemma)));
    }
  }
}

void extract_contexts(const ParsedSentence& s, const Vocabulary& vocab,
                      const ContextOptions& opts, const EventSink& sink) {
  switch (opts.type) {
    case ContextType::full:
      extract_full_contexts(s, vocab, opts.use_lemma, sink);
      return;
    case ContextType::joint:
      extract_joint_contexts(s, vocab, opts.use_lemma, sink);
      return;
    case ContextType::unlabeled:
      extract_unlabeled_contexts(s, vocab, opts.use_lemma, sink);
      return;
    case ContextType::window:
      extract_window_contexts(s, vocab, opts.window, opts.use_lemma, opts.window_content_only,
                              opts.pos_mapper, sink);
      return;
  }
}

std::vector<ContextEvent> collect_contexts(const ParsedSentence& s, const Vocabulary& vocab,
                                           const ContextOptions& opts) {
  std::vector<ContextEvent> events;
  extract_contexts(s, vocab, opts, [&](ContextEvent&& ev) { events.push_back(std::move(ev)); });
  return events;
}

void write_event(std::ostream& out, const Vocabulary& vocab, const ContextEvent& ev) {
  out << vocab.entry(ev.target_id).word << '\t' << ev.context << "\t1\n";
}

}  // namespace crosshyp
