#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "crosshyp/contexts.hpp"
#include "crosshyp/synth.hpp"

using namespace crosshyp;

TEST_CASE("depth 2 branching 2 plants 6 concepts and 4 hypernym pairs") {
  PlantedTaxonomy tax(2, 2);
  CHECK(tax.concepts().size() == 6);
  CHECK(tax.hyper_pairs().size() == 4);

  SynthConfig cfg;
  cfg.depth = 2;
  cfg.branching = 2;
  cfg.sentences_per_concept = 5;
  SynthBundle bundle = generate_corpora(cfg);
  CHECK(bundle.pairs.size() == 8);
  int hyper = 0, hypo = 0;
  for (const LabeledPair& p : bundle.pairs) {
    if (p.relation == Relation::hyper) ++hyper;
    if (p.relation == Relation::hypo) ++hypo;
  }
  CHECK(hyper == 4);
  CHECK(hypo == 4);
}

TEST_CASE("depth 3 branching 3 plants 39 concepts and 63 hypernym pairs") {
  PlantedTaxonomy tax(3, 3);
  CHECK(tax.concepts().size() == 39);
  CHECK(tax.hyper_pairs().size() == 9 + 27 * 2);
}

TEST_CASE("every non-top concept has exactly one parent") {
  PlantedTaxonomy tax(3, 2);
  int top = 0;
  for (const PlantedConcept& c : tax.concepts()) {
    if (c.parent < 0) {
      ++top;
      CHECK(c.level == 1);
    } else {
      CHECK(tax.concepts()[static_cast<std::size_t>(c.parent)].level == c.level - 1);
    }
  }
  CHECK(top == 2);
}

TEST_CASE("generation is byte-identical for a fixed seed") {
  SynthConfig cfg;
  cfg.depth = 2;
  cfg.branching = 2;
  cfg.sentences_per_concept = 40;
  cfg.seed = 5;
  SynthBundle a = generate_corpora(cfg);
  SynthBundle b = generate_corpora(cfg);
  REQUIRE(a.corpus_e.size() == b.corpus_e.size());
  for (std::size_t i = 0; i < a.corpus_e.size(); ++i)
    CHECK(to_conllu(a.corpus_e[i]) == to_conllu(b.corpus_e[i]));

  cfg.seed = 6;
  SynthBundle c = generate_corpora(cfg);
  bool all_same = a.corpus_e.size() == c.corpus_e.size();
  if (all_same)
    for (std::size_t i = 0; i < a.corpus_e.size(); ++i)
      if (!(a.corpus_e[i] == c.corpus_e[i])) all_same = false;
  CHECK(!all_same);
}

TEST_CASE("generated sentences have 3 to 6 tokens and validate cleanly") {
  SynthConfig cfg;
  cfg.depth = 2;
  cfg.branching = 3;
  cfg.sentences_per_concept = 50;
  SynthBundle bundle = generate_corpora(cfg);
  CHECK(bundle.corpus_e.size() == 12 * 50);
  for (const auto* corpus : {&bundle.corpus_e, &bundle.corpus_f})
    for (const ParsedSentence& s : *corpus) {
      CHECK(s.tokens.size() >= 3);
      CHECK(s.tokens.size() <= 6);
      CHECK(!validate_sentence(s).has_value());
    }
}

TEST_CASE("serialized corpora re-parse with zero error records") {
  SynthConfig cfg;
  cfg.depth = 2;
  cfg.branching = 2;
  cfg.sentences_per_concept = 30;
  SynthBundle bundle = generate_corpora(cfg);
  std::string text;
  for (const ParsedSentence& s : bundle.corpus_f) text += to_conllu(s) + "\n";
  ParseResult parsed = parse_conllu_text(text);
  CHECK(parsed.errors.empty());
  CHECK(parsed.sentences.size() == bundle.corpus_f.size());
}

TEST_CASE("translation counts pair the two lexicons one to one") {
  SynthConfig cfg;
  cfg.depth = 2;
  cfg.branching = 2;
  cfg.sentences_per_concept = 5;
  SynthBundle bundle = generate_corpora(cfg);
  std::set<std::string> e_seen, f_seen;
  for (const TranslationCount& tc : bundle.translation_counts) {
    CHECK(tc.count >= 1);
    CHECK(e_seen.insert(tc.src).second);  // each e word exactly once
    CHECK(f_seen.insert(tc.dst).second);
  }
  for (const PlantedConcept& c : bundle.taxonomy.concepts()) {
    CHECK(e_seen.count(concept_word(c.id, 0)));
    CHECK(f_seen.count(concept_word(c.id, 1)));
  }
}

TEST_CASE("hypernym words observe nearly all of their hyponyms' context types") {
  SynthConfig cfg;
  cfg.depth = 3;
  cfg.branching = 2;
  cfg.sentences_per_concept = 200;
  cfg.seed = 11;
  SynthBundle bundle = generate_corpora(cfg);

  // Vocabulary of all concept words; observed Full-context type sets.
  std::vector<VocabEntry> entries;
  for (const PlantedConcept& c : bundle.taxonomy.concepts())
    entries.push_back({concept_word(c.id, 0), PosClass::noun, 1});
  Vocabulary vocab(std::move(entries));

  std::map<int, std::set<std::string>> observed;
  ContextOptions opts;
  opts.type = ContextType::full;
  for (const ParsedSentence& s : bundle.corpus_e)
    extract_contexts(s, vocab, opts,
                     [&](ContextEvent&& ev) { observed[ev.target_id].insert(ev.context); });

  for (const PlantedConcept& c : bundle.taxonomy.concepts()) {
    if (c.parent < 0) continue;
    const auto& child_ctx = observed[vocab.id(concept_word(c.id, 0))];
    const auto& parent_ctx = observed[vocab.id(concept_word(c.parent, 0))];
    REQUIRE(!child_ctx.empty());
    std::size_t covered = 0;
    for (const std::string& ctx : child_ctx)
      if (parent_ctx.count(ctx)) ++covered;
    CHECK(static_cast<double>(covered) >= 0.95 * static_cast<double>(child_ctx.size()));
  }
}

TEST_CASE("degenerate taxonomy parameters are rejected") {
  CHECK_THROWS_AS(PlantedTaxonomy(1, 2), std::invalid_argument);
  CHECK_THROWS_AS(PlantedTaxonomy(2, 1), std::invalid_argument);
}
