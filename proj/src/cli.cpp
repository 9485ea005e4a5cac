// Copyright 2026 The Arcoref Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "arcoref/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "arcoref/arabic.hpp"
#include "arcoref/config.hpp"
#include "arcoref/conll.hpp"
#include "arcoref/coref_model.hpp"
#include "arcoref/embeddings.hpp"
#include "arcoref/error.hpp"
#include "arcoref/mention_detector.hpp"
#include "arcoref/metrics.hpp"
#include "arcoref/synthetic.hpp"
#include "arcoref/trainer.hpp"

namespace arcoref {

namespace {

std::string flag_name(const std::string& key) {
  std::string flag = key;
  std::replace(flag.begin(), flag.end(), '_', '-');
  return "--" + flag;
}

// Config values from the --config file and explicit flags, in precedence
// order; applied on top of defaults or of a checkpoint's config.
struct ConfigOverrides {
  std::string config_path;
  std::map<std::string, std::string> flags;

  std::map<std::string, std::string> resolve() const {
    std::map<std::string, std::string> values;
    if (!config_path.empty()) {
      values = read_config_file(config_path);
      RunConfig probe;
      for (const auto& [key, value] : values) probe.set(key, value);
    }
    for (const auto& [key, value] : flags) values[key] = value;
    return values;
  }

  RunConfig fresh() const {
    RunConfig config;
    for (const auto& [key, value] : resolve()) config.set(key, value);
    config.validate();
    return config;
  }
};

void log_config(std::ostream& err, const RunConfig& config) {
  err << "[info] seed " << config.seed << "\n[info] resolved config:\n";
  std::string text = config.to_text();
  std::size_t begin = 0;
  while (begin < text.size()) {
    const auto end = text.find('\n', begin);
    err << "[info]   " << text.substr(begin, end - begin) << '\n';
    begin = end + 1;
  }
}

std::vector<Document> load_corpus(const std::string& path, const RunConfig& config) {
  auto docs = read_conll_file(path);
  return config.normalize ? normalize_corpus(docs) : docs;
}

ExternalCandidates load_candidates(const std::string& path, const std::vector<Document>& docs) {
  const auto mentions = read_mentions_file(path);
  validate_mentions(mentions, docs);
  return candidates_from_mentions(mentions);
}

void write_output(const std::string& path, std::ostream& out, const std::string& text) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot write '" + path + "'");
  file << text;
  if (!file) throw DataError("failed writing '" + path + "'");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Arabic neural coreference resolution"};
  app.require_subcommand(1);
  app.fallthrough();

  ConfigOverrides overrides;
  app.add_option("--config", overrides.config_path, "key=value config file")
      ->check(CLI::ExistingFile);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "suppress the config log");

  const RunConfig defaults;
  const auto default_values = defaults.to_map();
  std::map<std::string, std::string> flag_values;
  for (const auto& field : config_fields()) {
    app.add_option(flag_name(field.key), flag_values[field.key],
                   field.help + " (default: " + default_values.at(field.key) + ")")
        ->type_name("VALUE")
        ->group("Model configuration");
  }

  std::string input, output, model_path, mentions_path, dev_path, dev_mentions_path;
  std::string key_path, response_path;
  std::optional<double> ratio;
  int documents = 5;
  std::uint64_t corpus_seed = SyntheticOptions{}.seed;

  auto* normalize = app.add_subcommand("normalize", "normalize Arabic orthography in a CoNLL file");
  normalize->add_option("-i,--input", input, "CoNLL input")->required()->check(CLI::ExistingFile);
  normalize->add_option("-o,--output", output, "CoNLL output (default stdout)");

  auto* train_md = app.add_subcommand("train-md", "train the biaffine mention detector");
  train_md->add_option("--train", input, "training CoNLL file")->required()->check(CLI::ExistingFile);
  train_md->add_option("-o,--output", output, "detector checkpoint")->required();

  auto* detect = app.add_subcommand("detect", "export high-recall mention candidates");
  detect->add_option("--model", model_path, "detector checkpoint")->required()->check(CLI::ExistingFile);
  detect->add_option("-i,--input", input, "CoNLL input")->required()->check(CLI::ExistingFile);
  detect->add_option("-o,--output", output, "mention file (default stdout)");
  detect->add_option("--ratio", ratio, "spans kept per token (default: detector_ratio)");

  auto* train_coref_cmd = app.add_subcommand("train-coref", "train the coreference model");
  train_coref_cmd->add_option("--train", input, "training CoNLL file")->required()->check(CLI::ExistingFile);
  train_coref_cmd->add_option("--mentions", mentions_path, "external candidates for the training set")
      ->check(CLI::ExistingFile);
  train_coref_cmd->add_option("--dev", dev_path, "development CoNLL file for model selection")
      ->check(CLI::ExistingFile);
  train_coref_cmd->add_option("--dev-mentions", dev_mentions_path, "external candidates for the dev set")
      ->check(CLI::ExistingFile);
  train_coref_cmd->add_option("-o,--output", output, "coreference checkpoint")->required();

  auto* predict = app.add_subcommand("predict", "write predicted clusters as CoNLL");
  predict->add_option("--model", model_path, "coreference checkpoint")->required()->check(CLI::ExistingFile);
  predict->add_option("-i,--input", input, "CoNLL input")->required()->check(CLI::ExistingFile);
  predict->add_option("--mentions", mentions_path, "external candidates")->check(CLI::ExistingFile);
  predict->add_option("-o,--output", output, "CoNLL output (default stdout)");

  auto* evaluate = app.add_subcommand("evaluate", "score a checkpoint on a gold CoNLL file");
  evaluate->add_option("--model", model_path, "coreference checkpoint")->required()->check(CLI::ExistingFile);
  evaluate->add_option("-i,--input", input, "gold CoNLL file")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--mentions", mentions_path, "external candidates")->check(CLI::ExistingFile);

  auto* score = app.add_subcommand("score", "score a response CoNLL file against a key");
  score->add_option("--key", key_path, "gold CoNLL file")->required()->check(CLI::ExistingFile);
  score->add_option("--response", response_path, "predicted CoNLL file")->required()->check(CLI::ExistingFile);

  auto* generate = app.add_subcommand("generate-corpus", "write the synthetic Arabic corpus");
  generate->add_option("-o,--output", output, "CoNLL output (default stdout)");
  generate->add_option("--documents", documents, "number of documents")->check(CLI::PositiveNumber);
  generate->add_option("--corpus-seed", corpus_seed, "generator seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Error& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  for (const auto& field : config_fields()) {
    if (app.count(flag_name(field.key)) > 0) overrides.flags[field.key] = flag_values[field.key];
  }

  try {
    if (*normalize) {
      const auto docs = read_conll_file(input);
      write_output(output, out, write_conll_string(normalize_corpus(docs)));
      return kExitOk;
    }

    if (*score) {
      out << score_files(key_path, response_path).format_table();
      return kExitOk;
    }

    if (*generate) {
      SyntheticOptions options;
      options.documents = documents;
      options.seed = corpus_seed;
      write_output(output, out, write_conll_string(generate_synthetic_corpus(options)));
      return kExitOk;
    }

    if (*train_md) {
      const RunConfig config = overrides.fresh();
      if (!quiet) log_config(err, config);
      const auto docs = load_corpus(input, config);
      const EmbeddingProvider provider(config);
      Rng rng(config.seed);
      MentionDetector detector(config, &provider, rng);
      const auto history = train_detector(detector, docs, rng);
      err << "[info] trained " << history.size() << " detector steps, final loss "
          << (history.empty() ? 0.0 : history.back().loss) << '\n';
      nn::save_checkpoint(output, detector.to_checkpoint());
      return kExitOk;
    }

    if (*detect) {
      const auto checkpoint = nn::load_checkpoint(model_path);
      auto values = checkpoint.config;
      values.erase("model");
      RunConfig config = RunConfig::from_map(values);
      const auto extra = overrides.resolve();
      for (const auto& [key, value] : extra) config.set(key, value);
      if (!quiet) log_config(err, config);
      const EmbeddingProvider provider(config);
      auto detector = MentionDetector::from_checkpoint(checkpoint, &provider, extra);
      const auto docs = load_corpus(input, config);
      const auto mentions = detect_corpus(*detector, docs, ratio.value_or(config.detector_ratio));
      std::ostringstream text;
      write_mentions(text, mentions);
      write_output(output, out, text.str());
      return kExitOk;
    }

    if (*train_coref_cmd) {
      const RunConfig config = overrides.fresh();
      if (!quiet) log_config(err, config);
      const auto docs = load_corpus(input, config);
      std::optional<ExternalCandidates> train_candidates, dev_candidates;
      std::optional<std::vector<Document>> dev_docs;
      if (uses_external_candidates(config.mode)) {
        if (mentions_path.empty()) {
          throw ConfigError("--mentions is required in " + to_string(config.mode) + " mode");
        }
        train_candidates = load_candidates(mentions_path, docs);
      }
      if (!dev_path.empty()) {
        dev_docs = load_corpus(dev_path, config);
        if (uses_external_candidates(config.mode)) {
          if (dev_mentions_path.empty()) {
            throw ConfigError("--dev-mentions is required with --dev in " +
                              to_string(config.mode) + " mode");
          }
          dev_candidates = load_candidates(dev_mentions_path, *dev_docs);
        }
      }
      const EmbeddingProvider provider(config);
      Rng rng(config.seed);
      CorefModel model(config, &provider, rng);
      TrainData data;
      data.train = &docs;
      data.train_candidates = train_candidates ? &*train_candidates : nullptr;
      data.dev = dev_docs ? &*dev_docs : nullptr;
      data.dev_candidates = dev_candidates ? &*dev_candidates : nullptr;
      const auto result = train_coref(model, data, rng);
      double recent = 0.0;
      const std::size_t window = std::min<std::size_t>(result.steps.size(), 100);
      for (std::size_t i = result.steps.size() - window; i < result.steps.size(); ++i) {
        recent += result.steps[i].loss / static_cast<double>(window);
      }
      err << "[info] trained " << result.steps.size() << " steps (" << result.external_steps
          << " with external candidates), mean loss of the last " << window << " steps " << recent
          << '\n';
      if (result.best_step >= 0) {
        err << "[info] restored step " << result.best_step << " with dev Avg F1 "
            << result.best_dev_f1 << '\n';
      }
      nn::save_checkpoint(output, model.to_checkpoint());
      return kExitOk;
    }

    if (*predict || *evaluate) {
      const auto checkpoint = nn::load_checkpoint(model_path);
      auto values = checkpoint.config;
      values.erase("model");
      RunConfig config = RunConfig::from_map(values);
      const auto extra = overrides.resolve();
      for (const auto& [key, value] : extra) config.set(key, value);
      if (!quiet) log_config(err, config);
      const EmbeddingProvider provider(config);
      auto model = CorefModel::from_checkpoint(checkpoint, &provider, extra);
      const auto raw = read_conll_file(input);
      const auto docs = config.normalize ? normalize_corpus(raw) : raw;
      std::optional<ExternalCandidates> candidates;
      if (uses_external_candidates(config.mode)) {
        if (mentions_path.empty()) {
          throw ConfigError("--mentions is required for a " + to_string(config.mode) +
                            "-trained model");
        }
        candidates = load_candidates(mentions_path, docs);
      }
      const ExternalCandidates* external = candidates ? &*candidates : nullptr;
      if (*evaluate) {
        out << evaluate_on_split(*model, docs, external).format_table();
        return kExitOk;
      }
      const auto predictions = predict_corpus(*model, docs, external);
      auto result = raw;
      for (std::size_t d = 0; d < result.size(); ++d) result[d].gold_clusters = predictions[d];
      write_output(output, out, write_conll_string(result));
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace arcoref
