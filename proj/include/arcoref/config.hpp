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

#ifndef ARCOREF_CONFIG_HPP_
#define ARCOREF_CONFIG_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace arcoref {

enum class TrainingMode { kEndToEnd, kPipeline, kAnnealing };

std::string to_string(TrainingMode mode);
// Accepts e2e/end_to_end, pipeline, anneal/annealing. Throws ConfigError.
TrainingMode parse_training_mode(const std::string& text);

// Every hyperparameter, with defaults matching the published configuration.
struct RunConfig {
  // Encoder.
  int lstm_layers = 3;
  int lstm_size = 200;
  double lstm_dropout = 0.4;
  // Scorers.
  int ffnn_layers = 2;
  int ffnn_size = 150;
  double ffnn_dropout = 0.2;
  // Character CNN.
  std::vector<int> char_filter_widths = {3, 4, 5};
  int char_filter_size = 50;
  int char_embedding_size = 8;
  int char_buckets = 512;
  // Input embeddings. Sources are "hashed", "none" or a file path.
  int static_embedding_size = 300;
  int contextual_embedding_size = 768;
  std::string static_embeddings = "hashed";
  std::string contextual_embeddings = "hashed";
  double hashed_position_mix = 0.25;
  double embedding_dropout = 0.5;
  int feature_size = 20;
  // Mentions and antecedents.
  int max_span_width = 30;
  int max_antecedents = 50;
  double mention_ratio = 0.4;
  int coref_depth = 1;
  // Optimisation.
  double learning_rate = 1e-3;
  long training_steps = 400000;
  long eval_interval = 1000;
  std::uint64_t seed = 1;
  TrainingMode mode = TrainingMode::kEndToEnd;
  // Mention detector.
  double detector_ratio = 0.4;
  int detector_projection_size = 150;
  long detector_steps = 10000;
  // Preprocessing.
  bool normalize = true;

  // Throws ConfigError when a value violates its range.
  void validate() const;

  // Sets one field from text. Throws ConfigError on an unknown key or a
  // malformed value.
  void set(const std::string& key, const std::string& value);
  std::map<std::string, std::string> to_map() const;
  static RunConfig from_map(const std::map<std::string, std::string>& values);

  // key=value lines; '#' starts a comment. Later lines override earlier ones.
  void load_file(const std::string& path);
  void load_text(const std::string& text);
  std::string to_text() const;
};

// key=value lines with '#' comments. Keys are not checked; later lines win.
std::map<std::string, std::string> parse_config_text(const std::string& text);
// Throws ConfigError when the file cannot be read.
std::map<std::string, std::string> read_config_file(const std::string& path);

struct ConfigField {
  std::string key;
  std::string help;
};

// Every configurable key in declaration order with a one-line description.
const std::vector<ConfigField>& config_fields();

}  // namespace arcoref

#endif  // ARCOREF_CONFIG_HPP_
