#include "crosshyp/pipeline.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <fstream>
#include <future>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

#include "crosshyp/contexts.hpp"
#include "crosshyp/cooc.hpp"
#include "crosshyp/eval.hpp"
#include "crosshyp/io_util.hpp"
#include "crosshyp/solver.hpp"
#include "crosshyp/sparse_embeddings.hpp"
#include "crosshyp/svd.hpp"
#include "crosshyp/synth.hpp"
#include "crosshyp/translation.hpp"
#include "crosshyp/vocab.hpp"

namespace crosshyp {

namespace {

std::string join_violations(const std::vector<std::string>& violations) {
  std::string msg = "invalid configuration:";
  for (const std::string& v : violations) msg += "\n  - " + v;
  return msg;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join_violations(violations)), violations_(std::move(violations)) {}

MissingInputError::MissingInputError(const std::filesystem::path& path)
    : std::runtime_error("missing input: " + path.string()), path_(path) {}

namespace {

bool parse_bool(std::string_view s, bool& out) {
  if (s == "true" || s == "1") {
    out = true;
    return true;
  }
  if (s == "false" || s == "0") {
    out = false;
    return true;
  }
  return false;
}

std::vector<std::filesystem::path> parse_path_list(std::string_view s) {
  std::vector<std::filesystem::path> out;
  for (std::string_view piece : split_view(s, ','))
    if (!piece.empty()) out.emplace_back(std::string(piece));
  return out;
}

std::string join_paths(const std::vector<std::filesystem::path>& paths) {
  std::string out;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (i) out += ',';
    out += paths[i].string();
  }
  return out;
}

}  // namespace

PipelineConfig PipelineConfig::from_kv(const std::map<std::string, std::string>& kv) {
  PipelineConfig cfg;
  std::vector<std::string> violations;

  auto bad = [&](const std::string& key, const std::string& why) {
    violations.push_back(key + ": " + why);
  };
  auto take_int = [&](const std::string& key, auto& field, long long lo, long long hi) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    long long v = 0;
    if (!parse_int64(it->second, v) || v < lo || v > hi)
      bad(key, "expected an integer in [" + std::to_string(lo) + "," + std::to_string(hi) + "]");
    else
      field = static_cast<std::decay_t<decltype(field)>>(v);
  };
  auto take_double = [&](const std::string& key, double& field) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    double v = 0;
    if (!parse_double(it->second, v))
      bad(key, "expected a number");
    else
      field = v;
  };
  auto take_bool = [&](const std::string& key, bool& field) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    if (!parse_bool(it->second, field)) bad(key, "expected true or false");
  };
  auto take_string = [&](const std::string& key, std::string& field) {
    auto it = kv.find(key);
    if (it != kv.end()) field = it->second;
  };
  auto take_path = [&](const std::string& key, std::filesystem::path& field) {
    auto it = kv.find(key);
    if (it != kv.end()) field = it->second;
  };

  static const std::set<std::string> known = {
      "workdir",        "seed",           "jobs",           "strict",
      "corpus_e",       "corpus_f",       "context_type",   "window",
      "window_content_only",             "vocab_size",      "context_limit",
      "pos_map_e",      "pos_map_f",      "use_lemma",      "subsample_corpus",
      "svd_dim",        "svd_exact_limit", "svd_oversample", "svd_power_iters",
      "scale_by_singular",               "dump_cooc",       "translations",
      "sparse_dim",     "lambda_e",       "lambda_f",       "lambda_x",
      "row_normalize",  "max_outer_iters", "tolerance",      "inner_iters",
      "subsample_dict", "translation_mode", "pairs",         "scorer",
      "eval_mode",      "slqs_n",         "top_k",          "threshold",
      "synth_depth",    "synth_branching", "synth_sentences"};
  for (const auto& [key, value] : kv)
    if (!known.count(key)) bad(key, "unknown configuration key");

  take_path("workdir", cfg.workdir);
  {
    auto it = kv.find("seed");
    if (it != kv.end()) {
      long long v = 0;
      if (!parse_int64(it->second, v) || v < 0)
        bad("seed", "expected a non-negative integer");
      else
        cfg.seed = static_cast<std::uint64_t>(v);
    }
  }
  take_int("jobs", cfg.jobs, 1, 4096);
  take_bool("strict", cfg.strict);

  if (auto it = kv.find("corpus_e"); it != kv.end()) cfg.corpus_e = parse_path_list(it->second);
  if (auto it = kv.find("corpus_f"); it != kv.end()) cfg.corpus_f = parse_path_list(it->second);
  take_string("context_type", cfg.context_type);
  take_int("window", cfg.window, 0, 1 << 20);
  take_bool("window_content_only", cfg.window_content_only);
  take_int("vocab_size", cfg.vocab_size, 1, 1LL << 40);
  take_int("context_limit", cfg.context_limit, 1, 1LL << 40);
  take_path("pos_map_e", cfg.pos_map_e);
  take_path("pos_map_f", cfg.pos_map_f);
  take_bool("use_lemma", cfg.use_lemma);
  take_double("subsample_corpus", cfg.subsample_corpus);

  take_int("svd_dim", cfg.svd_dim, 1, 1 << 24);
  take_int("svd_exact_limit", cfg.svd_exact_limit, 1, 1 << 24);
  take_int("svd_oversample", cfg.svd_oversample, 0, 1 << 16);
  take_int("svd_power_iters", cfg.svd_power_iters, 0, 64);
  take_bool("scale_by_singular", cfg.scale_by_singular);
  take_bool("dump_cooc", cfg.dump_cooc);

  take_path("translations", cfg.translations);
  take_int("sparse_dim", cfg.sparse_dim, 1, 1 << 20);
  take_double("lambda_e", cfg.lambda_e);
  take_double("lambda_f", cfg.lambda_f);
  take_double("lambda_x", cfg.lambda_x);
  take_bool("row_normalize", cfg.row_normalize);
  take_int("max_outer_iters", cfg.max_outer_iters, 1, 1 << 24);
  take_double("tolerance", cfg.tolerance);
  take_int("inner_iters", cfg.inner_iters, 1, 1 << 16);
  take_double("subsample_dict", cfg.subsample_dict);
  take_string("translation_mode", cfg.translation_mode);

  take_path("pairs", cfg.pairs);
  take_string("scorer", cfg.scorer);
  take_string("eval_mode", cfg.eval_mode);
  take_int("slqs_n", cfg.slqs_n, 1, 1 << 20);
  take_int("top_k", cfg.top_k, 0, 1 << 20);
  take_string("threshold", cfg.threshold);

  take_int("synth_depth", cfg.synth_depth, 0, 64);
  take_int("synth_branching", cfg.synth_branching, 0, 1 << 16);
  take_int("synth_sentences", cfg.synth_sentences, 1, 1 << 28);

  if (!violations.empty()) throw ConfigError(std::move(violations));
  return cfg;
}

std::map<std::string, std::string> PipelineConfig::to_kv() const {
  std::map<std::string, std::string> kv;
  kv["workdir"] = workdir.string();
  kv["seed"] = std::to_string(seed);
  kv["jobs"] = std::to_string(jobs);
  kv["strict"] = strict ? "true" : "false";
  kv["corpus_e"] = join_paths(corpus_e);
  kv["corpus_f"] = join_paths(corpus_f);
  kv["context_type"] = context_type;
  kv["window"] = std::to_string(window);
  kv["window_content_only"] = window_content_only ? "true" : "false";
  kv["vocab_size"] = std::to_string(vocab_size);
  kv["context_limit"] = std::to_string(context_limit);
  kv["pos_map_e"] = pos_map_e.string();
  kv["pos_map_f"] = pos_map_f.string();
  kv["use_lemma"] = use_lemma ? "true" : "false";
  kv["subsample_corpus"] = fmt_double(subsample_corpus);
  kv["svd_dim"] = std::to_string(svd_dim);
  kv["svd_exact_limit"] = std::to_string(svd_exact_limit);
  kv["svd_oversample"] = std::to_string(svd_oversample);
  kv["svd_power_iters"] = std::to_string(svd_power_iters);
  kv["scale_by_singular"] = scale_by_singular ? "true" : "false";
  kv["dump_cooc"] = dump_cooc ? "true" : "false";
  kv["translations"] = translations.string();
  kv["sparse_dim"] = std::to_string(sparse_dim);
  kv["lambda_e"] = fmt_double(lambda_e);
  kv["lambda_f"] = fmt_double(lambda_f);
  kv["lambda_x"] = fmt_double(lambda_x);
  kv["row_normalize"] = row_normalize ? "true" : "false";
  kv["max_outer_iters"] = std::to_string(max_outer_iters);
  kv["tolerance"] = fmt_double(tolerance);
  kv["inner_iters"] = std::to_string(inner_iters);
  kv["subsample_dict"] = fmt_double(subsample_dict);
  kv["translation_mode"] = translation_mode;
  kv["pairs"] = pairs.string();
  kv["scorer"] = scorer;
  kv["eval_mode"] = eval_mode;
  kv["slqs_n"] = std::to_string(slqs_n);
  kv["top_k"] = std::to_string(top_k);
  kv["threshold"] = threshold;
  kv["synth_depth"] = std::to_string(synth_depth);
  kv["synth_branching"] = std::to_string(synth_branching);
  kv["synth_sentences"] = std::to_string(synth_sentences);
  return kv;
}

std::string PipelineConfig::config_hash() const {
  std::string blob;
  for (const auto& [k, v] : to_kv()) {
    blob += k;
    blob += '=';
    blob += v;
    blob += '\n';
  }
  return fnv1a_hex(blob);
}

Stage stage_from_name(std::string_view name) {
  if (name == "synth") return Stage::synth;
  if (name == "extract-contexts" || name == "extract") return Stage::extract;
  if (name == "build-embeddings" || name == "build") return Stage::build;
  if (name == "train") return Stage::train;
  if (name == "evaluate") return Stage::evaluate;
  throw std::invalid_argument("unknown stage: " + std::string(name));
}

std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::synth: return "synth";
    case Stage::extract: return "extract";
    case Stage::build: return "build";
    case Stage::train: return "train";
    case Stage::evaluate: return "evaluate";
  }
  return "?";
}

void validate_config(const PipelineConfig& cfg, Stage stage) {
  std::vector<std::string> violations;
  auto require = [&](bool ok, const std::string& message) {
    if (!ok) violations.push_back(message);
  };

  require(!cfg.workdir.empty(), "workdir: required");
  require(cfg.jobs >= 1, "jobs: must be >= 1");

  switch (stage) {
    case Stage::synth:
      require(cfg.synth_depth >= 2, "synth_depth: must be >= 2");
      require(cfg.synth_branching >= 2, "synth_branching: must be >= 2");
      require(cfg.synth_sentences >= 1, "synth_sentences: must be >= 1");
      break;
    case Stage::extract: {
      require(!cfg.corpus_e.empty(), "corpus_e: required for extract-contexts");
      require(!cfg.corpus_f.empty(), "corpus_f: required for extract-contexts");
      auto type = context_type_from_name(cfg.context_type);
      require(type.has_value(), "context_type: must be one of full|joint|unlabeled|window");
      if (type == ContextType::window)
        require(cfg.window >= 1, "window: required (>= 1) when context_type=window");
      require(cfg.vocab_size >= 1, "vocab_size: must be >= 1");
      require(cfg.context_limit >= 1, "context_limit: must be >= 1");
      require(cfg.subsample_corpus > 0.0 && cfg.subsample_corpus <= 1.0,
              "subsample_corpus: must be in (0,1]");
      break;
    }
    case Stage::build:
      require(cfg.svd_dim >= 1, "svd_dim: must be >= 1");
      require(cfg.context_limit >= 1, "context_limit: must be >= 1");
      break;
    case Stage::train:
      require(!cfg.translations.empty(), "translations: required for train");
      require(cfg.sparse_dim >= 1, "sparse_dim: must be >= 1");
      require(cfg.lambda_e >= 0.0, "lambda_e: must be >= 0");
      require(cfg.lambda_f >= 0.0, "lambda_f: must be >= 0");
      require(cfg.lambda_x >= 0.0, "lambda_x: must be >= 0");
      require(cfg.tolerance > 0.0, "tolerance: must be > 0");
      require(cfg.max_outer_iters >= 1, "max_outer_iters: must be >= 1");
      require(cfg.inner_iters >= 1, "inner_iters: must be >= 1");
      require(cfg.subsample_dict > 0.0 && cfg.subsample_dict <= 1.0,
              "subsample_dict: must be in (0,1]");
      require(translation_mode_from_name(cfg.translation_mode).has_value(),
              "translation_mode: must be one_hot or weighted");
      break;
    case Stage::evaluate: {
      require(!cfg.pairs.empty(), "pairs: required for evaluate");
      require(cfg.scorer == "balapinc" || cfg.scorer == "slqs",
              "scorer: must be balapinc or slqs");
      require(cfg.eval_mode == "bilingual" || cfg.eval_mode == "mono_dep",
              "eval_mode: must be bilingual or mono_dep");
      require(cfg.slqs_n >= 1, "slqs_n: must be >= 1");
      if (!cfg.threshold.empty()) {
        double t = 0;
        require(parse_double(cfg.threshold, t), "threshold: must be a number");
      }
      require((cfg.top_k > 0) == !cfg.threshold.empty(),
              "top_k and threshold: set both to skip tuning, or neither");
      if (cfg.eval_mode == "mono_dep")
        require(!cfg.translations.empty(), "translations: required for eval_mode=mono_dep");
      break;
    }
  }
  if (!violations.empty()) throw ConfigError(std::move(violations));
}

namespace {

class WorkdirLock {
 public:
  explicit WorkdirLock(const std::filesystem::path& workdir) : path_(workdir / ".lock") {
    int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
      if (errno == EEXIST)
        throw std::runtime_error("workdir is locked by another stage: " + path_.string() +
                                 " (remove the file if it is stale)");
      throw std::runtime_error("cannot create lock file: " + path_.string());
    }
    ::close(fd);
  }
  ~WorkdirLock() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  WorkdirLock(const WorkdirLock&) = delete;
  WorkdirLock& operator=(const WorkdirLock&) = delete;

 private:
  std::filesystem::path path_;
};

void require_input(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw MissingInputError(path);
}

void write_manifest(const PipelineConfig& cfg, Stage stage,
                    const std::vector<std::filesystem::path>& inputs,
                    const std::vector<std::string>& outputs,
                    std::map<std::string, std::string> extra = {}) {
  std::map<std::string, std::string> kv = std::move(extra);
  kv["stage"] = std::string(stage_name(stage));
  kv["config_hash"] = cfg.config_hash();
  for (const std::filesystem::path& p : inputs) kv["input." + p.string()] = file_digest(p);
  for (const std::string& name : outputs)
    kv["output." + name] = file_digest(cfg.workdir / name);
  write_kv_file(cfg.workdir / (std::string(stage_name(stage)) + ".manifest"), kv);
}

std::uint64_t stream_seed(const PipelineConfig& cfg, std::uint64_t stream) {
  return derive_seed(cfg.seed, stream);
}

// Seed streams for the stages; language adds +0 (e) or +1 (f).
constexpr std::uint64_t kSeedSubsample = 10;
constexpr std::uint64_t kSeedSvd = 20;
constexpr std::uint64_t kSeedDict = 30;
constexpr std::uint64_t kSeedSolver = 40;
constexpr std::uint64_t kSeedSplit = 50;

}  // namespace

void run_synth(const PipelineConfig& cfg) {
  validate_config(cfg, Stage::synth);
  std::filesystem::create_directories(cfg.workdir);
  WorkdirLock lock(cfg.workdir);

  SynthConfig sc;
  sc.depth = cfg.synth_depth;
  sc.branching = cfg.synth_branching;
  sc.sentences_per_concept = cfg.synth_sentences;
  sc.seed = cfg.seed;
  SynthBundle bundle = generate_corpora(sc);

  auto write_corpus = [&](const char* name, const std::vector<ParsedSentence>& corpus) {
    atomic_write(cfg.workdir / name, [&](std::ostream& out) {
      for (const ParsedSentence& s : corpus) out << to_conllu(s) << '\n';
    });
  };
  write_corpus(workfile::corpus_e, bundle.corpus_e);
  write_corpus(workfile::corpus_f, bundle.corpus_f);
  atomic_write(cfg.workdir / workfile::translations,
               [&](std::ostream& out) { write_translation_counts(out, bundle.translation_counts); });
  atomic_write(cfg.workdir / workfile::pairs, [&](std::ostream& out) {
    for (const LabeledPair& p : bundle.pairs)
      out << p.f_word << '\t' << p.e_word << '\t' << relation_name(p.relation) << '\n';
  });

  write_manifest(cfg, Stage::synth, {},
                 {workfile::corpus_e, workfile::corpus_f, workfile::translations, workfile::pairs},
                 {{"concepts", std::to_string(bundle.taxonomy.concepts().size())},
                  {"pairs", std::to_string(bundle.pairs.size())}});
}

void run_extract(const PipelineConfig& cfg) {
  validate_config(cfg, Stage::extract);
  for (const auto& p : cfg.corpus_e) require_input(p);
  for (const auto& p : cfg.corpus_f) require_input(p);
  if (!cfg.pos_map_e.empty()) require_input(cfg.pos_map_e);
  if (!cfg.pos_map_f.empty()) require_input(cfg.pos_map_f);
  std::filesystem::create_directories(cfg.workdir);
  WorkdirLock lock(cfg.workdir);

  ContextOptions opts;
  opts.type = *context_type_from_name(cfg.context_type);
  opts.window = cfg.window;
  opts.window_content_only = cfg.window_content_only;
  opts.use_lemma = cfg.use_lemma;

  auto process_language = [&](int lang) -> std::string {
    const auto& corpora = lang == 0 ? cfg.corpus_e : cfg.corpus_f;
    const auto& pos_map_path = lang == 0 ? cfg.pos_map_e : cfg.pos_map_f;
    PosMapper mapper =
        pos_map_path.empty() ? PosMapper() : PosMapper::from_tsv(pos_map_path);
    ContextOptions lang_opts = opts;
    lang_opts.pos_mapper = mapper;

    std::size_t parse_errors = 0;
    // Pass 1: vocabulary counting over the (subsampled) corpus.
    VocabCounter counter;
    {
      SentenceSubsampler sampler(cfg.subsample_corpus,
                                 stream_seed(cfg, kSeedSubsample + static_cast<std::uint64_t>(lang)));
      for (const auto& path : corpora) {
        auto errors = for_each_conllu_sentence(path, cfg.strict, [&](ParsedSentence&& s) {
          if (!sampler.keep()) return;
          counter.add_sentence(s, mapper, PosSet{}, cfg.use_lemma);
        });
        parse_errors += errors.size();
      }
    }
    Vocabulary vocab = counter.build(cfg.vocab_size);
    atomic_write(cfg.workdir / (lang == 0 ? workfile::vocab_e : workfile::vocab_f),
                 [&](std::ostream& out) { vocab.write_tsv(out); });

    // Pass 2: context events over the same subsample.
    std::size_t n_events = 0;
    atomic_write(cfg.workdir / (lang == 0 ? workfile::events_e : workfile::events_f),
                 [&](std::ostream& out) {
                   SentenceSubsampler sampler(
                       cfg.subsample_corpus,
                       stream_seed(cfg, kSeedSubsample + static_cast<std::uint64_t>(lang)));
                   for (const auto& path : corpora) {
                     for_each_conllu_sentence(path, cfg.strict, [&](ParsedSentence&& s) {
                       if (!sampler.keep()) return;
                       extract_contexts(s, vocab, lang_opts, [&](ContextEvent&& ev) {
                         write_event(out, vocab, ev);
                         ++n_events;
                       });
                     });
                   }
                 });

    std::ostringstream msg;
    msg << "language " << (lang == 0 ? "e" : "f") << ": vocabulary " << vocab.size()
        << ", events " << n_events;
    if (parse_errors > 0) msg << ", skipped " << parse_errors << " malformed sentences";
    return msg.str();
  };

  std::string summary_e, summary_f;
  if (cfg.jobs > 1) {
    auto fut = std::async(std::launch::async, process_language, 1);
    summary_e = process_language(0);
    summary_f = fut.get();
  } else {
    summary_e = process_language(0);
    summary_f = process_language(1);
  }
  std::cerr << summary_e << '\n' << summary_f << '\n';

  std::vector<std::filesystem::path> inputs(cfg.corpus_e);
  inputs.insert(inputs.end(), cfg.corpus_f.begin(), cfg.corpus_f.end());
  write_manifest(cfg, Stage::extract, inputs,
                 {workfile::vocab_e, workfile::vocab_f, workfile::events_e, workfile::events_f});
}

void run_build(const PipelineConfig& cfg) {
  validate_config(cfg, Stage::build);
  const std::filesystem::path vocab_paths[2] = {cfg.workdir / workfile::vocab_e,
                                                cfg.workdir / workfile::vocab_f};
  const std::filesystem::path event_paths[2] = {cfg.workdir / workfile::events_e,
                                                cfg.workdir / workfile::events_f};
  for (int lang = 0; lang < 2; ++lang) {
    require_input(vocab_paths[lang]);
    require_input(event_paths[lang]);
  }
  WorkdirLock lock(cfg.workdir);

  std::vector<std::string> outputs;
  for (int lang = 0; lang < 2; ++lang) {
    Vocabulary vocab = Vocabulary::read_tsv_file(vocab_paths[lang]);

    CoocCounter counter;
    std::size_t unknown_targets = 0;
    {
      LineReader reader(event_paths[lang]);
      std::string line;
      std::size_t line_no = 0;
      while (reader.next(line)) {
        ++line_no;
        if (line.empty()) continue;
        auto cols = split_view(line, '\t');
        if (cols.size() != 3)
          throw std::runtime_error(event_paths[lang].string() + ":" + std::to_string(line_no) +
                                   ": expected 3 columns");
        long long count = 0;
        if (!parse_int64(cols[2], count) || count < 1)
          throw std::runtime_error(event_paths[lang].string() + ":" + std::to_string(line_no) +
                                   ": bad count");
        int id = vocab.id(cols[0]);
        if (id < 0) {
          ++unknown_targets;
          continue;
        }
        for (long long i = 0; i < count; ++i) counter.add(id, cols[1]);
      }
    }
    if (unknown_targets > 0)
      std::cerr << "language " << (lang == 0 ? "e" : "f") << ": dropped " << unknown_targets
                << " events with out-of-vocabulary targets\n";

    CoocMatrix matrix = counter.finalize(vocab, cfg.context_limit);
    if (cfg.dump_cooc) {
      std::string name = lang == 0 ? "cooc_counts_e.txt" : "cooc_counts_f.txt";
      atomic_write(cfg.workdir / name, [&](std::ostream& out) { write_cooc_text(out, matrix); });
      outputs.push_back(name);
    }
    CoocMatrix weighted = ppmi_reweight(matrix);
    if (cfg.dump_cooc) {
      std::string name = lang == 0 ? "cooc_ppmi_e.txt" : "cooc_ppmi_f.txt";
      atomic_write(cfg.workdir / name, [&](std::ostream& out) { write_cooc_text(out, weighted); });
      outputs.push_back(name);
    }

    SvdOptions svd_opts;
    svd_opts.exact_limit = cfg.svd_exact_limit;
    svd_opts.oversample = cfg.svd_oversample;
    svd_opts.power_iters = cfg.svd_power_iters;
    svd_opts.seed = stream_seed(cfg, kSeedSvd + static_cast<std::uint64_t>(lang));
    std::vector<std::string> warnings;
    DenseEmbeddings emb =
        reduce_embeddings(weighted, cfg.svd_dim, cfg.scale_by_singular, svd_opts, &warnings);
    for (const std::string& w : warnings)
      std::cerr << "language " << (lang == 0 ? "e" : "f") << ": " << w << '\n';

    std::vector<std::string> words;
    words.reserve(vocab.size());
    for (const VocabEntry& e : vocab.entries()) words.push_back(e.word);
    const char* name = lang == 0 ? workfile::emb_e : workfile::emb_f;
    atomic_write(cfg.workdir / name,
                 [&](std::ostream& out) { write_embeddings(out, words, emb.matrix); });
    outputs.push_back(name);
  }

  write_manifest(cfg, Stage::build,
                 {vocab_paths[0], vocab_paths[1], event_paths[0], event_paths[1]}, outputs);
}

void run_train(const PipelineConfig& cfg) {
  validate_config(cfg, Stage::train);
  const std::filesystem::path emb_e_path = cfg.workdir / workfile::emb_e;
  const std::filesystem::path emb_f_path = cfg.workdir / workfile::emb_f;
  require_input(emb_e_path);
  require_input(emb_f_path);
  require_input(cfg.translations);
  WorkdirLock lock(cfg.workdir);

  EmbeddingTable emb_e = read_embeddings_file(emb_e_path);
  EmbeddingTable emb_f = read_embeddings_file(emb_f_path);

  std::vector<TranslationCount> counts = read_translation_counts_file(cfg.translations);
  if (cfg.subsample_dict < 1.0)
    counts = subsample_translation_counts(counts, cfg.subsample_dict, stream_seed(cfg, kSeedDict));
  TranslationMatrix s = build_translation_matrix(counts, emb_e.words, emb_f.words,
                                                 *translation_mode_from_name(cfg.translation_mode));

  SolverConfig solver_cfg;
  solver_cfg.k = cfg.sparse_dim;
  solver_cfg.max_outer_iters = cfg.max_outer_iters;
  solver_cfg.tolerance = cfg.tolerance;
  solver_cfg.inner_iters = cfg.inner_iters;
  solver_cfg.seed = stream_seed(cfg, kSeedSolver);
  solver_cfg.row_normalize = cfg.row_normalize;

  Lambdas lambdas{cfg.lambda_e, cfg.lambda_f, cfg.lambda_x};
  BilingualSpace space = solve_bisparse(emb_e.matrix, emb_f.matrix, s, lambdas, solver_cfg);
  for (const std::string& w : space.warnings) std::cerr << w << '\n';

  SparseEmbeddings sparse_e = SparseEmbeddings::from_dense(emb_e.words, space.a_e);
  SparseEmbeddings sparse_f = SparseEmbeddings::from_dense(emb_f.words, space.a_f);
  atomic_write(cfg.workdir / workfile::sparse_e,
               [&](std::ostream& out) { write_sparse_embeddings(out, sparse_e); });
  atomic_write(cfg.workdir / workfile::sparse_f,
               [&](std::ostream& out) { write_sparse_embeddings(out, sparse_f); });

  write_manifest(cfg, Stage::train, {emb_e_path, emb_f_path, cfg.translations},
                 {workfile::sparse_e, workfile::sparse_f},
                 {{"lambda_e", fmt_double(lambdas.e)},
                  {"lambda_f", fmt_double(lambdas.f)},
                  {"lambda_x", fmt_double(lambdas.x)},
                  {"sparse_dim", std::to_string(cfg.sparse_dim)},
                  {"final_objective", fmt_double(space.objective)},
                  {"iterations", std::to_string(space.iterations)},
                  {"converged", space.converged ? "true" : "false"}});
}

void run_evaluate(const PipelineConfig& cfg) {
  validate_config(cfg, Stage::evaluate);
  const std::filesystem::path sparse_e_path = cfg.workdir / workfile::sparse_e;
  const std::filesystem::path sparse_f_path = cfg.workdir / workfile::sparse_f;
  require_input(cfg.pairs);
  require_input(sparse_e_path);
  const bool mono = cfg.eval_mode == "mono_dep";
  if (!mono) require_input(sparse_f_path);
  if (mono) require_input(cfg.translations);
  WorkdirLock lock(cfg.workdir);

  PairLoadResult loaded = load_pairs_file(cfg.pairs);
  if (!loaded.errors.empty()) {
    for (const RowError& e : loaded.errors)
      std::cerr << cfg.pairs.string() << ":" << e.line_no << ": " << e.message << '\n';
    if (cfg.strict) throw std::runtime_error("pair dataset has errors (strict mode)");
  }
  if (loaded.pairs.size() < 3) throw std::runtime_error("pair dataset has fewer than 3 usable rows");
  EvalDataset ds = split_dataset(std::move(loaded.pairs), stream_seed(cfg, kSeedSplit));

  SparseEmbeddings sparse_e = read_sparse_embeddings_file(sparse_e_path);
  SparseEmbeddings sparse_f;
  std::unique_ptr<PairScorer> scorer;
  std::unique_ptr<Vocabulary> mono_f_vocab, mono_e_vocab;
  std::unique_ptr<TranslationMatrix> mono_s;
  int param_cap = sparse_e.dim;

  if (mono) {
    std::vector<TranslationCount> counts = read_translation_counts_file(cfg.translations);
    if (cfg.subsample_dict < 1.0)
      counts = subsample_translation_counts(counts, cfg.subsample_dict, stream_seed(cfg, kSeedDict));
    // Swap to f->e so rows map the non-English word to its most common
    // English translation.
    std::set<std::string> f_words, e_words;
    std::vector<TranslationCount> swapped;
    swapped.reserve(counts.size());
    for (const TranslationCount& tc : counts) {
      swapped.push_back({tc.dst, tc.src, tc.count});
      f_words.insert(tc.dst);
      e_words.insert(tc.src);
    }
    auto make_vocab = [](const std::set<std::string>& words) {
      std::vector<VocabEntry> entries;
      for (const std::string& w : words) entries.push_back({w, PosClass::noun, 0});
      return std::make_unique<Vocabulary>(std::move(entries));
    };
    mono_f_vocab = make_vocab(f_words);
    mono_e_vocab = make_vocab(e_words);
    mono_s = std::make_unique<TranslationMatrix>(build_translation_matrix(
        swapped, *mono_f_vocab, *mono_e_vocab, TranslationMatrix::Mode::one_hot));
    scorer = std::make_unique<MonoDepScorer>(sparse_e, *mono_s, *mono_f_vocab, *mono_e_vocab);
  } else {
    sparse_f = read_sparse_embeddings_file(sparse_f_path);
    param_cap = std::max(param_cap, sparse_f.dim);
    if (cfg.scorer == "slqs")
      scorer = std::make_unique<SlqsScorer>(sparse_f, sparse_e);
    else
      scorer = std::make_unique<BalapincScorer>(sparse_f, sparse_e);
  }
  if (param_cap < 1) param_cap = 1;

  ScorerParams params;
  params.slqs_n = cfg.slqs_n;
  double dev_accuracy = 0.0;
  bool tuned = cfg.top_k == 0;
  if (tuned) {
    TuneResult tune = tune_params(*scorer, ds.dev(), param_cap, cfg.scorer == "slqs");
    params = tune.params;
    if (cfg.scorer != "slqs") params.slqs_n = cfg.slqs_n;
    dev_accuracy = tune.dev_accuracy;
  } else {
    params.top_k = cfg.top_k;
    parse_double(cfg.threshold, params.threshold);
  }

  EvalResult result = evaluate_accuracy(*scorer, params, ds.test());

  std::map<std::string, std::string> report;
  report["accuracy"] = fmt_double(result.accuracy);
  report["coverage"] = fmt_double(result.coverage);
  report["tuned_k"] = std::to_string(cfg.scorer == "slqs" ? params.slqs_n : params.top_k);
  report["tuned_t"] = fmt_double(params.threshold);
  report["n_dev"] = std::to_string(ds.dev_indices.size());
  report["n_test"] = std::to_string(ds.test_indices.size());
  report["n_classifiable"] = std::to_string(result.n_classifiable);
  report["n_correct"] = std::to_string(result.n_correct);
  report["scorer"] = cfg.scorer;
  report["eval_mode"] = cfg.eval_mode;
  if (tuned) report["dev_accuracy"] = fmt_double(dev_accuracy);
  write_kv_file(cfg.workdir / workfile::results, report);

  atomic_write(cfg.workdir / workfile::predictions,
               [&](std::ostream& out) { write_predictions(out, result.predictions); });

  std::vector<std::filesystem::path> inputs = {cfg.pairs, sparse_e_path};
  if (!mono) inputs.push_back(sparse_f_path);
  if (mono) inputs.push_back(cfg.translations);
  write_manifest(cfg, Stage::evaluate, inputs, {workfile::results, workfile::predictions});
}

void run_stage(Stage stage, const PipelineConfig& cfg) {
  switch (stage) {
    case Stage::synth: run_synth(cfg); return;
    case Stage::extract: run_extract(cfg); return;
    case Stage::build: run_build(cfg); return;
    case Stage::train: run_train(cfg); return;
    case Stage::evaluate: run_evaluate(cfg); return;
  }
}

}  // namespace crosshyp
