#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace crosshyp {

// Exit codes shared with the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitMissingInput = 2;
inline constexpr int kExitRuntimeError = 3;

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

class MissingInputError : public std::runtime_error {
 public:
  explicit MissingInputError(const std::filesystem::path& path);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Declarative configuration for all pipeline stages, loaded from a flat
// key=value file with command-line overrides.
struct PipelineConfig {
  std::filesystem::path workdir;
  std::uint64_t seed = 42;
  int jobs = 1;
  bool strict = false;

  // extract-contexts
  std::vector<std::filesystem::path> corpus_e;
  std::vector<std::filesystem::path> corpus_f;
  std::string context_type = "full";
  int window = 0;  // must be set when context_type == "window"
  bool window_content_only = false;
  std::size_t vocab_size = 50000;
  std::size_t context_limit = 100000;
  std::filesystem::path pos_map_e;
  std::filesystem::path pos_map_f;
  bool use_lemma = true;
  double subsample_corpus = 1.0;

  // build-embeddings
  int svd_dim = 1000;
  int svd_exact_limit = 5000;
  int svd_oversample = 10;
  int svd_power_iters = 2;
  bool scale_by_singular = true;
  bool dump_cooc = false;

  // train
  std::filesystem::path translations;
  int sparse_dim = 100;
  double lambda_e = 0.1;
  double lambda_f = 0.1;
  double lambda_x = 0.5;
  bool row_normalize = true;
  int max_outer_iters = 200;
  double tolerance = 1e-5;
  int inner_iters = 1;
  double subsample_dict = 1.0;
  std::string translation_mode = "one_hot";

  // evaluate
  std::filesystem::path pairs;
  std::string scorer = "balapinc";
  std::string eval_mode = "bilingual";
  int slqs_n = 50;
  int top_k = 0;             // 0: tune on dev
  std::string threshold;     // empty: tune on dev

  // synth
  int synth_depth = 3;
  int synth_branching = 3;
  int synth_sentences = 300;

  static PipelineConfig from_kv(const std::map<std::string, std::string>& kv);
  std::map<std::string, std::string> to_kv() const;
  std::string config_hash() const;
};

enum class Stage { synth, extract, build, train, evaluate };
Stage stage_from_name(std::string_view name);  // throws on unknown
std::string_view stage_name(Stage s);

// Validates the keys a stage needs; throws ConfigError listing every
// violation at once.
void validate_config(const PipelineConfig& cfg, Stage stage);

// Stage entry points. Outputs are written atomically into the workdir
// together with a `<stage>.manifest` capturing the config hash and
// input/output digests. Each stage holds the workdir lock while running.
void run_synth(const PipelineConfig& cfg);
void run_extract(const PipelineConfig& cfg);
void run_build(const PipelineConfig& cfg);
void run_train(const PipelineConfig& cfg);
void run_evaluate(const PipelineConfig& cfg);
void run_stage(Stage stage, const PipelineConfig& cfg);

// Workdir file names, shared between stages and tests.
namespace workfile {
inline constexpr const char* corpus_e = "corpus_e.conllu";
inline constexpr const char* corpus_f = "corpus_f.conllu";
inline constexpr const char* translations = "translations.tsv";
inline constexpr const char* pairs = "pairs.tsv";
inline constexpr const char* vocab_e = "vocab_e.tsv";
inline constexpr const char* vocab_f = "vocab_f.tsv";
inline constexpr const char* events_e = "events_e.tsv";
inline constexpr const char* events_f = "events_f.tsv";
inline constexpr const char* emb_e = "emb_e.tsv";
inline constexpr const char* emb_f = "emb_f.tsv";
inline constexpr const char* sparse_e = "sparse_e.tsv";
inline constexpr const char* sparse_f = "sparse_f.tsv";
inline constexpr const char* results = "results.txt";
inline constexpr const char* predictions = "predictions.tsv";
}  // namespace workfile

}  // namespace crosshyp
