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

#include "arcoref/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "arcoref/error.hpp"

namespace arcoref {

std::string to_string(TrainingMode mode) {
  switch (mode) {
    case TrainingMode::kEndToEnd:
      return "e2e";
    case TrainingMode::kPipeline:
      return "pipeline";
    case TrainingMode::kAnnealing:
      return "anneal";
  }
  return "e2e";
}

TrainingMode parse_training_mode(const std::string& text) {
  if (text == "e2e" || text == "end_to_end") return TrainingMode::kEndToEnd;
  if (text == "pipeline") return TrainingMode::kPipeline;
  if (text == "anneal" || text == "annealing") return TrainingMode::kAnnealing;
  throw ConfigError("unknown training mode '" + text + "' (expected e2e, pipeline or anneal)");
}

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T value{};
  if (!(in >> value) || !(in >> std::ws).eof()) {
    throw ConfigError("invalid value '" + text + "' for " + key);
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("invalid boolean '" + text + "' for " + key);
}

// Shortest text that parses back to the same value.
std::string format_double(double v) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), v);
  return std::string(buffer, result.ptr);
}

std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
  std::vector<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_number<int>(key, item));
  if (out.empty()) throw ConfigError("empty list for " + key);
  return out;
}

struct Accessor {
  ConfigField field;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

#define INT_FIELD(name, help)                                                          \
  Accessor {                                                                           \
    {#name, help}, [](const RunConfig& c) { return std::to_string(c.name); },          \
        [](RunConfig& c, const std::string& v) {                                       \
          c.name = parse_number<decltype(c.name)>(#name, v);                           \
        }                                                                              \
  }
#define DOUBLE_FIELD(name, help)                                                       \
  Accessor {                                                                           \
    {#name, help}, [](const RunConfig& c) { return format_double(c.name); },           \
        [](RunConfig& c, const std::string& v) { c.name = parse_number<double>(#name, v); } \
  }
#define STRING_FIELD(name, help)                                                       \
  Accessor {                                                                           \
    {#name, help}, [](const RunConfig& c) { return c.name; },                          \
        [](RunConfig& c, const std::string& v) { c.name = v; }                         \
  }

const std::vector<Accessor>& accessors() {
  static const std::vector<Accessor> table = {
      INT_FIELD(lstm_layers, "bi-directional LSTM layers"),
      INT_FIELD(lstm_size, "LSTM hidden size per direction"),
      DOUBLE_FIELD(lstm_dropout, "LSTM dropout"),
      INT_FIELD(ffnn_layers, "FFNN hidden layers"),
      INT_FIELD(ffnn_size, "FFNN hidden size"),
      DOUBLE_FIELD(ffnn_dropout, "FFNN dropout"),
      Accessor{{"char_filter_widths", "CNN filter widths (comma separated)"},
               [](const RunConfig& c) {
                 std::string s;
                 for (std::size_t i = 0; i < c.char_filter_widths.size(); ++i) {
                   if (i) s += ",";
                   s += std::to_string(c.char_filter_widths[i]);
                 }
                 return s;
               },
               [](RunConfig& c, const std::string& v) {
                 c.char_filter_widths = parse_int_list("char_filter_widths", v);
               }},
      INT_FIELD(char_filter_size, "CNN filters per width"),
      INT_FIELD(char_embedding_size, "character embedding size"),
      INT_FIELD(char_buckets, "hashed character vocabulary size"),
      INT_FIELD(static_embedding_size, "fastText (static) embedding size"),
      INT_FIELD(contextual_embedding_size, "BERT (contextual) embedding size"),
      STRING_FIELD(static_embeddings, "static source: hashed, none or a file path"),
      STRING_FIELD(contextual_embeddings, "contextual source: hashed, none or a file path"),
      DOUBLE_FIELD(hashed_position_mix, "weight of the position component in hashed contextual vectors"),
      DOUBLE_FIELD(embedding_dropout, "embedding dropout"),
      INT_FIELD(feature_size, "width/distance feature embedding size"),
      INT_FIELD(max_span_width, "maximum span width"),
      INT_FIELD(max_antecedents, "maximum number of antecedents"),
      DOUBLE_FIELD(mention_ratio, "mentions kept per token"),
      INT_FIELD(coref_depth, "second-order refinement iterations (0 disables)"),
      DOUBLE_FIELD(learning_rate, "Adam learning rate"),
      INT_FIELD(training_steps, "training steps (one document per step)"),
      INT_FIELD(eval_interval, "steps between dev evaluations"),
      INT_FIELD(seed, "random seed"),
      Accessor{{"mode", "training mode: e2e, pipeline or anneal"},
               [](const RunConfig& c) { return to_string(c.mode); },
               [](RunConfig& c, const std::string& v) { c.mode = parse_training_mode(v); }},
      DOUBLE_FIELD(detector_ratio, "mention detector high-recall mentions per token"),
      INT_FIELD(detector_projection_size, "mention detector start/end projection size"),
      INT_FIELD(detector_steps, "mention detector training steps"),
      Accessor{{"normalize", "apply Arabic orthographic normalization"},
               [](const RunConfig& c) { return std::string(c.normalize ? "true" : "false"); },
               [](RunConfig& c, const std::string& v) { c.normalize = parse_bool("normalize", v); }},
  };
  return table;
}

#undef INT_FIELD
#undef DOUBLE_FIELD
#undef STRING_FIELD

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::vector<ConfigField>& config_fields() {
  static const std::vector<ConfigField> fields = [] {
    std::vector<ConfigField> out;
    for (const auto& a : accessors()) out.push_back(a.field);
    return out;
  }();
  return fields;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  for (const auto& a : accessors()) {
    if (a.field.key == key) {
      a.set(*this, trim(value));
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

std::map<std::string, std::string> RunConfig::to_map() const {
  std::map<std::string, std::string> out;
  for (const auto& a : accessors()) out[a.field.key] = a.get(*this);
  return out;
}

RunConfig RunConfig::from_map(const std::map<std::string, std::string>& values) {
  RunConfig config;
  for (const auto& [key, value] : values) config.set(key, value);
  return config;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> values;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(number) + ": expected key=value");
    }
    values[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return values;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

void RunConfig::load_text(const std::string& text) {
  for (const auto& [key, value] : parse_config_text(text)) set(key, value);
}

void RunConfig::load_file(const std::string& path) {
  for (const auto& [key, value] : read_config_file(path)) set(key, value);
}

std::string RunConfig::to_text() const {
  std::string out;
  for (const auto& a : accessors()) out += a.field.key + "=" + a.get(*this) + "\n";
  return out;
}

void RunConfig::validate() const {
  auto positive = [](const char* key, long v) {
    if (v < 1) throw ConfigError(std::string(key) + " must be >= 1");
  };
  auto rate = [](const char* key, double v) {
    if (!(v >= 0.0 && v < 1.0)) throw ConfigError(std::string(key) + " must be in [0, 1)");
  };
  auto ratio = [](const char* key, double v) {
    if (!(v > 0.0 && v <= 1.0)) throw ConfigError(std::string(key) + " must be in (0, 1]");
  };
  positive("lstm_layers", lstm_layers);
  positive("lstm_size", lstm_size);
  rate("lstm_dropout", lstm_dropout);
  if (ffnn_layers < 0) throw ConfigError("ffnn_layers must be >= 0");
  positive("ffnn_size", ffnn_size);
  rate("ffnn_dropout", ffnn_dropout);
  for (int w : char_filter_widths) positive("char_filter_widths", w);
  if (char_filter_size < 0) throw ConfigError("char_filter_size must be >= 0");
  positive("char_embedding_size", char_embedding_size);
  positive("char_buckets", char_buckets);
  positive("static_embedding_size", static_embedding_size);
  positive("contextual_embedding_size", contextual_embedding_size);
  if (!(hashed_position_mix >= 0.0)) throw ConfigError("hashed_position_mix must be >= 0");
  rate("embedding_dropout", embedding_dropout);
  positive("feature_size", feature_size);
  positive("max_span_width", max_span_width);
  positive("max_antecedents", max_antecedents);
  ratio("mention_ratio", mention_ratio);
  if (coref_depth < 0) throw ConfigError("coref_depth must be >= 0");
  if (!(learning_rate >= 0.0)) throw ConfigError("learning_rate must be >= 0");
  positive("training_steps", training_steps);
  positive("eval_interval", eval_interval);
  ratio("detector_ratio", detector_ratio);
  positive("detector_projection_size", detector_projection_size);
  positive("detector_steps", detector_steps);
  if (static_embeddings == "none" && contextual_embeddings == "none" && char_filter_size == 0) {
    throw ConfigError("at least one embedding source must be enabled");
  }
}

}  // namespace arcoref
