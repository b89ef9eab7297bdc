#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "crosshyp/conllu.hpp"
#include "crosshyp/eval.hpp"
#include "crosshyp/translation.hpp"

namespace crosshyp {

// A planted concept hierarchy: `branching` top-level concepts, each
// concept above the bottom level has `branching` children. Hypernym
// pairs are all (descendant, ancestor) pairs.
struct PlantedConcept {
  int id = -1;
  int parent = -1;  // -1 for top-level concepts
  int level = 1;    // 1-based
};

class PlantedTaxonomy {
 public:
  PlantedTaxonomy(int depth, int branching);

  int depth() const { return depth_; }
  int branching() const { return branching_; }
  const std::vector<PlantedConcept>& concepts() const { return concepts_; }
  std::vector<int> ancestors(int id) const;  // nearest first
  // (descendant, ancestor) pairs ordered by descendant id, then by
  // ancestor nearness.
  std::vector<std::pair<int, int>> hyper_pairs() const;

 private:
  int depth_;
  int branching_;
  std::vector<PlantedConcept> concepts_;
};

// lang: 0 = e side, 1 = f side.
std::string concept_word(int concept_id, int lang);
// kind: 'v' (verbs), 'a' (adjectives), 'o' (objects).
std::string pool_word(char kind, int concept_id, int index, int lang);

struct SynthConfig {
  int depth = 3;
  int branching = 3;
  int sentences_per_concept = 300;
  std::uint64_t seed = 0;
  int verbs_per_concept = 8;
  int adjs_per_concept = 8;
  int objects_per_concept = 8;
};

struct SynthBundle {
  PlantedTaxonomy taxonomy;
  std::vector<ParsedSentence> corpus_e;
  std::vector<ParsedSentence> corpus_f;
  std::vector<TranslationCount> translation_counts;  // (e word, f word, count)
  std::vector<LabeledPair> pairs;                    // hyper positives + hypo negatives
};

// Every sentence is about one topic concept: its context tokens come
// from the topic's signature pools while the mentioned noun is the topic
// word or one of its ancestors' words. Ancestor words therefore co-occur
// with every descendant's signature contexts, which makes the observed
// context set of a hypernym a superset of its hyponyms' sets.
SynthBundle generate_corpora(const SynthConfig& cfg);

}  // namespace crosshyp
