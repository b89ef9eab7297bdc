#include "crosshyp/synth.hpp"

#include <stdexcept>

#include "crosshyp/io_util.hpp"

namespace crosshyp {

PlantedTaxonomy::PlantedTaxonomy(int depth, int branching) : depth_(depth), branching_(branching) {
  if (depth < 2 || branching < 2)
    throw std::invalid_argument("taxonomy needs depth >= 2 and branching >= 2");
  for (int b = 0; b < branching; ++b)
    concepts_.push_back({static_cast<int>(concepts_.size()), -1, 1});
  std::size_t level_start = 0;
  for (int level = 2; level <= depth; ++level) {
    std::size_t level_end = concepts_.size();
    for (std::size_t p = level_start; p < level_end; ++p)
      for (int b = 0; b < branching; ++b)
        concepts_.push_back({static_cast<int>(concepts_.size()), concepts_[p].id, level});
    level_start = level_end;
  }
}

std::vector<int> PlantedTaxonomy::ancestors(int id) const {
  std::vector<int> out;
  int cur = concepts_[static_cast<std::size_t>(id)].parent;
  while (cur >= 0) {
    out.push_back(cur);
    cur = concepts_[static_cast<std::size_t>(cur)].parent;
  }
  return out;
}

std::vector<std::pair<int, int>> PlantedTaxonomy::hyper_pairs() const {
  std::vector<std::pair<int, int>> out;
  for (const PlantedConcept& c : concepts_)
    for (int anc : ancestors(c.id)) out.emplace_back(c.id, anc);
  return out;
}

std::string concept_word(int concept_id, int lang) {
  return (lang == 0 ? "ce" : "cf") + std::to_string(concept_id);
}

std::string pool_word(char kind, int concept_id, int index, int lang) {
  std::string w(1, kind);
  w += (lang == 0 ? 'e' : 'f');
  w += std::to_string(concept_id);
  w += 'x';
  w += std::to_string(index);
  return w;
}

namespace {

Token make_token(int index, std::string lemma, const char* upos, int head, const char* deprel) {
  Token t;
  t.index = index;
  t.form = lemma;
  t.lemma = std::move(lemma);
  t.upos = upos;
  t.head = head;
  t.deprel = deprel;
  return t;
}

std::vector<ParsedSentence> generate_language(const SynthConfig& cfg,
                                              const PlantedTaxonomy& tax, int lang) {
  Rng rng(derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(lang)));
  std::vector<ParsedSentence> corpus;
  corpus.reserve(tax.concepts().size() * static_cast<std::size_t>(cfg.sentences_per_concept));

  for (const PlantedConcept& topic : tax.concepts()) {
    std::vector<int> mentions;
    mentions.push_back(topic.id);
    for (int anc : tax.ancestors(topic.id)) mentions.push_back(anc);

    for (int s = 0; s < cfg.sentences_per_concept; ++s) {
      int mention = mentions[rng.uniform_int(mentions.size())];
      std::string verb = pool_word('v', topic.id, static_cast<int>(rng.uniform_int(cfg.verbs_per_concept)), lang);
      std::string adj = pool_word('a', topic.id, static_cast<int>(rng.uniform_int(cfg.adjs_per_concept)), lang);
      bool has_obj = rng.uniform() < 0.7;
      bool has_obj_adj = has_obj && rng.uniform() < 0.5;

      // Linear order: adj mention verb [obj-adj] [obj], rooted at the verb.
      ParsedSentence sent;
      sent.tokens.push_back(make_token(1, adj, "ADJ", 2, "amod"));
      sent.tokens.push_back(make_token(2, concept_word(mention, lang), "NOUN", 3, "nsubj"));
      sent.tokens.push_back(make_token(3, verb, "VERB", 0, "root"));
      if (has_obj) {
        int obj_index = has_obj_adj ? 5 : 4;
        if (has_obj_adj) {
          std::string obj_adj =
              pool_word('a', topic.id, static_cast<int>(rng.uniform_int(cfg.adjs_per_concept)), lang);
          sent.tokens.push_back(make_token(4, obj_adj, "ADJ", obj_index, "amod"));
        }
        std::string obj =
            pool_word('o', topic.id, static_cast<int>(rng.uniform_int(cfg.objects_per_concept)), lang);
        sent.tokens.push_back(make_token(obj_index, obj, "NOUN", 3, "dobj"));
      }
      corpus.push_back(std::move(sent));
    }
  }
  return corpus;
}

}  // namespace

SynthBundle generate_corpora(const SynthConfig& cfg) {
  if (cfg.sentences_per_concept < 1)
    throw std::invalid_argument("sentences_per_concept must be >= 1");
  if (cfg.verbs_per_concept < 1 || cfg.adjs_per_concept < 1 || cfg.objects_per_concept < 1)
    throw std::invalid_argument("signature pools must be non-empty");

  SynthBundle bundle{PlantedTaxonomy(cfg.depth, cfg.branching), {}, {}, {}, {}};
  bundle.corpus_e = generate_language(cfg, bundle.taxonomy, 0);
  bundle.corpus_f = generate_language(cfg, bundle.taxonomy, 1);

  for (const PlantedConcept& c : bundle.taxonomy.concepts()) {
    std::uint64_t count = 1 + static_cast<std::uint64_t>((c.id * 7) % 13);
    bundle.translation_counts.push_back({concept_word(c.id, 0), concept_word(c.id, 1), count});
    const std::pair<char, int> pools[] = {{'v', cfg.verbs_per_concept},
                                          {'a', cfg.adjs_per_concept},
                                          {'o', cfg.objects_per_concept}};
    for (const auto& [kind, size] : pools)
      for (int i = 0; i < size; ++i) {
        std::uint64_t pc = 1 + static_cast<std::uint64_t>((c.id * 31 + i * 7 + kind) % 11);
        bundle.translation_counts.push_back(
            {pool_word(kind, c.id, i, 0), pool_word(kind, c.id, i, 1), pc});
      }
  }

  for (const auto& [descendant, ancestor] : bundle.taxonomy.hyper_pairs())
    bundle.pairs.push_back({concept_word(descendant, 1), concept_word(ancestor, 0), Relation::hyper});
  for (const auto& [descendant, ancestor] : bundle.taxonomy.hyper_pairs())
    bundle.pairs.push_back({concept_word(ancestor, 1), concept_word(descendant, 0), Relation::hypo});
  return bundle;
}

}  // namespace crosshyp
