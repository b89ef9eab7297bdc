// Command-line driver for the cross-lingual hypernymy pipeline. Every
// stage is a subcommand over a shared flat key=value configuration.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "crosshyp/eval.hpp"
#include "crosshyp/io_util.hpp"
#include "crosshyp/pipeline.hpp"

namespace {

struct GlobalArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  long long seed = -1;
  int jobs = 0;
  bool strict = false;
};

crosshyp::PipelineConfig assemble_config(const GlobalArgs& args) {
  std::map<std::string, std::string> kv;
  if (!args.config_path.empty()) kv = crosshyp::read_kv_file(args.config_path);
  for (const std::string& item : args.overrides) {
    std::size_t eq = item.find('=');
    if (eq == std::string::npos)
      throw crosshyp::ConfigError({"--set expects key=value, got: " + item});
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  if (args.seed >= 0) kv["seed"] = std::to_string(args.seed);
  if (args.jobs > 0) kv["jobs"] = std::to_string(args.jobs);
  if (args.strict) kv["strict"] = "true";
  return crosshyp::PipelineConfig::from_kv(kv);
}

int run_mcnemar(const std::string& path_a, const std::string& path_b) {
  std::ifstream in_a(path_a), in_b(path_b);
  if (!in_a) throw crosshyp::MissingInputError(path_a);
  if (!in_b) throw crosshyp::MissingInputError(path_b);
  auto preds_a = crosshyp::read_predictions(in_a);
  auto preds_b = crosshyp::read_predictions(in_b);

  std::map<std::pair<std::string, std::string>, const crosshyp::PairPrediction*> by_pair;
  for (const auto& p : preds_a) by_pair[{p.f_word, p.e_word}] = &p;
  if (by_pair.size() != preds_a.size())
    throw std::runtime_error("duplicate pairs in " + path_a);

  std::vector<bool> a, b, gold;
  for (const auto& p : preds_b) {
    auto it = by_pair.find({p.f_word, p.e_word});
    if (it == by_pair.end())
      throw std::runtime_error("prediction sets are not aligned: " + p.f_word + "/" + p.e_word +
                               " only in " + path_b);
    if (it->second->gold != p.gold)
      throw std::runtime_error("gold labels disagree for " + p.f_word + "/" + p.e_word);
    a.push_back(it->second->predicted);
    b.push_back(p.predicted);
    gold.push_back(p.gold);
  }
  if (preds_a.size() != preds_b.size())
    throw std::runtime_error("prediction sets are not aligned: sizes differ");

  auto result = crosshyp::mcnemar_test(a, b, gold);
  std::cout << "n=" << gold.size() << " b=" << result.b << " c=" << result.c
            << " statistic=" << crosshyp::fmt_double(result.statistic)
            << " p=" << crosshyp::fmt_double(result.p_value) << '\n';
  return crosshyp::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-lingual hypernymy detection with sparse bilingual embeddings"};
  app.require_subcommand(1);

  GlobalArgs args;
  app.add_option("--config", args.config_path, "Flat key=value configuration file");
  app.add_option("--set", args.overrides, "Override a configuration key (key=value, repeatable)");
  app.add_option("--seed", args.seed, "Override the seed");
  app.add_option("--jobs", args.jobs, "Worker threads for per-file parallel stages");
  app.add_flag("--strict", args.strict, "Abort on malformed input instead of skipping");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic planted-taxonomy bundle");
  auto* extract = app.add_subcommand("extract-contexts", "Build vocabularies and context events");
  auto* build = app.add_subcommand("build-embeddings", "Count, PPMI-reweight and reduce with SVD");
  auto* train = app.add_subcommand("train", "Solve the bilingual sparse coding problem");
  auto* evaluate = app.add_subcommand("evaluate", "Tune on dev and score the test split");

  auto* mcnemar = app.add_subcommand("mcnemar", "Compare two prediction files");
  std::string preds_a, preds_b;
  mcnemar->add_option("predictions_a", preds_a, "First prediction TSV")->required();
  mcnemar->add_option("predictions_b", preds_b, "Second prediction TSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (mcnemar->parsed()) return run_mcnemar(preds_a, preds_b);

    crosshyp::Stage stage = crosshyp::Stage::synth;
    if (synth->parsed()) stage = crosshyp::Stage::synth;
    if (extract->parsed()) stage = crosshyp::Stage::extract;
    if (build->parsed()) stage = crosshyp::Stage::build;
    if (train->parsed()) stage = crosshyp::Stage::train;
    if (evaluate->parsed()) stage = crosshyp::Stage::evaluate;

    crosshyp::PipelineConfig cfg = assemble_config(args);
    crosshyp::run_stage(stage, cfg);
    return crosshyp::kExitOk;
  } catch (const crosshyp::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return crosshyp::kExitConfigError;
  } catch (const crosshyp::MissingInputError& e) {
    std::cerr << e.what() << '\n';
    return crosshyp::kExitMissingInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return crosshyp::kExitRuntimeError;
  }
}
