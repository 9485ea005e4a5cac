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

#include "arcoref/layers.hpp"

#include <algorithm>

#include "arcoref/arabic.hpp"
#include "arcoref/error.hpp"

namespace arcoref::nn {

Linear::Linear(ParameterStore& store, const std::string& name, int in, int out, Rng& rng)
    : weight_(&store.add(name + "/w", in, out, Init::kGlorotUniform, rng)),
      bias_(&store.add(name + "/b", 1, out, Init::kZeros, rng)) {}

Var Linear::forward(Graph& g, Var x) const {
  return add_row(matmul(x, g.parameter(*weight_)), g.parameter(*bias_));
}

Ffnn::Ffnn(ParameterStore& store, const std::string& name, int in, int hidden_layers,
           int hidden_size, int out, double dropout, Rng& rng)
    : output_(store, name + "/out", hidden_layers > 0 ? hidden_size : in, out, rng),
      dropout_(dropout) {
  int dim = in;
  for (int l = 0; l < hidden_layers; ++l) {
    hidden_.emplace_back(store, name + "/hidden" + std::to_string(l), dim, hidden_size, rng);
    dim = hidden_size;
  }
}

Var Ffnn::forward(Graph& g, Var x, bool training, Rng& rng) const {
  Var h = x;
  for (const auto& layer : hidden_) h = dropout(relu(layer.forward(g, h)), dropout_, training, rng);
  return output_.forward(g, h);
}

LstmDirection::LstmDirection(ParameterStore& store, const std::string& name, int in, int hidden,
                             Rng& rng)
    : input_weights_(&store.add(name + "/w", in, 4 * hidden, Init::kGlorotUniform, rng)),
      recurrent_weights_(&store.add(name + "/u", hidden, 4 * hidden, Init::kGlorotUniform, rng)),
      bias_(&store.add(name + "/b", 1, 4 * hidden, Init::kZeros, rng)),
      hidden_(hidden) {
  for (int j = hidden; j < 2 * hidden; ++j) bias_->value[j] = 1.0;
}

Var LstmDirection::forward(Graph& g, Var inputs, bool reverse) const {
  const int length = inputs.rows();
  const int h = hidden_;
  Var projected = add_row(matmul(inputs, g.parameter(*input_weights_)), g.parameter(*bias_));
  Var recurrent = g.parameter(*recurrent_weights_);
  std::vector<Var> outputs(length);
  Var hidden_state, cell;
  for (int step = 0; step < length; ++step) {
    const int t = reverse ? length - 1 - step : step;
    const int row[] = {t};
    Var z = gather_rows(projected, row);
    if (hidden_state.valid()) z = add(z, matmul(hidden_state, recurrent));
    Var gates = sigmoid(slice_cols(z, 0, 3 * h));
    Var candidate = tanh(slice_cols(z, 3 * h, h));
    Var input_gate = slice_cols(gates, 0, h);
    Var output_gate = slice_cols(gates, 2 * h, h);
    if (cell.valid()) {
      Var forget_gate = slice_cols(gates, h, h);
      cell = add(mul(forget_gate, cell), mul(input_gate, candidate));
    } else {
      cell = mul(input_gate, candidate);
    }
    hidden_state = mul(output_gate, tanh(cell));
    outputs[t] = hidden_state;
  }
  return concat_rows(outputs);
}

BiLstm::BiLstm(ParameterStore& store, const std::string& name, int in, int layers, int hidden,
               double dropout, Rng& rng)
    : hidden_(hidden), dropout_(dropout) {
  int dim = in;
  for (int l = 0; l < layers; ++l) {
    const std::string prefix = name + "/layer" + std::to_string(l);
    forward_layers_.emplace_back(store, prefix + "/fw", dim, hidden, rng);
    backward_layers_.emplace_back(store, prefix + "/bw", dim, hidden, rng);
    dim = 2 * hidden;
  }
}

Var BiLstm::forward(Graph& g, Var sentence, bool training, Rng& rng) const {
  if (sentence.rows() == 0) throw DimensionError("bilstm: empty sequence");
  Var layer_input = sentence;
  for (std::size_t l = 0; l < forward_layers_.size(); ++l) {
    Var fw = forward_layers_[l].forward(g, layer_input, /*reverse=*/false);
    Var bw = backward_layers_[l].forward(g, layer_input, /*reverse=*/true);
    layer_input = dropout(concat_cols({fw, bw}), dropout_, training, rng);
  }
  return layer_input;
}

CharCnn::CharCnn(ParameterStore& store, const std::string& name, int buckets, int embedding_size,
                 std::vector<int> widths, int filters, Rng& rng)
    : embeddings_(&store.add(name + "/embeddings", buckets, embedding_size,
                             Init::kGlorotUniform, rng)),
      widths_(std::move(widths)),
      buckets_(buckets),
      filters_(filters) {
  if (buckets < 2) throw ConfigError("char_buckets must be at least 2");
  for (int w : widths_) {
    const std::string prefix = name + "/conv" + std::to_string(w);
    filters_weights_.push_back(
        &store.add(prefix + "/w", w * embedding_size, filters, Init::kGlorotUniform, rng));
    filters_bias_.push_back(&store.add(prefix + "/b", 1, filters, Init::kZeros, rng));
  }
}

int CharCnn::min_length() const {
  return widths_.empty() ? 1 : *std::max_element(widths_.begin(), widths_.end());
}

std::vector<int> CharCnn::char_ids(std::string_view word) const {
  std::vector<int> ids;
  for (char32_t cp : utf8_decode(word)) {
    ids.push_back(1 + static_cast<int>(cp % static_cast<char32_t>(buckets_ - 1)));
  }
  if (ids.empty()) ids.push_back(0);
  while (static_cast<int>(ids.size()) < min_length()) ids.push_back(0);
  return ids;
}

Var CharCnn::forward(Graph& g, const std::vector<std::string>& words) const {
  if (words.empty()) throw DimensionError("char_cnn: no words");
  std::vector<std::vector<int>> ids;
  ids.reserve(words.size());
  for (const auto& w : words) ids.push_back(char_ids(w));
  Var table = g.parameter(*embeddings_);
  const int e = embeddings_->value.cols();
  std::vector<Var> pooled;
  for (std::size_t k = 0; k < widths_.size(); ++k) {
    const int width = widths_[k];
    // Row gather of every window's characters, viewed as one row per window.
    std::vector<int> window_chars;
    std::vector<int> windows_per_word;
    for (const auto& word : ids) {
      const int n = static_cast<int>(word.size()) - width + 1;
      windows_per_word.push_back(n);
      for (int s = 0; s < n; ++s)
        for (int c = 0; c < width; ++c) window_chars.push_back(word[s + c]);
    }
    const int num_windows = static_cast<int>(window_chars.size()) / width;
    Var windows = reshape(embedding_lookup(table, window_chars), num_windows, width * e);
    Var conv = relu(add_row(matmul(windows, g.parameter(*filters_weights_[k])),
                            g.parameter(*filters_bias_[k])));
    pooled.push_back(segment_max(conv, windows_per_word));
  }
  return concat_cols(pooled);
}

}  // namespace arcoref::nn
