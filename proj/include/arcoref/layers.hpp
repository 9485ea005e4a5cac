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

#ifndef ARCOREF_LAYERS_HPP_
#define ARCOREF_LAYERS_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "arcoref/autodiff.hpp"
#include "arcoref/params.hpp"

namespace arcoref::nn {

// y = x W + b for x of shape n x in.
class Linear {
 public:
  Linear(ParameterStore& store, const std::string& name, int in, int out, Rng& rng);

  Var forward(Graph& g, Var x) const;
  Parameter& weight() const { return *weight_; }
  Parameter& bias() const { return *bias_; }
  int input_dim() const { return weight_->value.rows(); }
  int output_dim() const { return weight_->value.cols(); }

 private:
  Parameter* weight_;
  Parameter* bias_;
};

// Stack of ReLU hidden layers, each followed by dropout, then a linear output.
class Ffnn {
 public:
  Ffnn(ParameterStore& store, const std::string& name, int in, int hidden_layers,
       int hidden_size, int out, double dropout, Rng& rng);

  Var forward(Graph& g, Var x, bool training, Rng& rng) const;
  const std::vector<Linear>& hidden() const { return hidden_; }
  const Linear& output() const { return output_; }

 private:
  std::vector<Linear> hidden_;
  Linear output_;
  double dropout_;
};

// Single-direction LSTM with gates ordered [input, forget, output, cell].
// The forget-gate bias starts at 1.
class LstmDirection {
 public:
  LstmDirection(ParameterStore& store, const std::string& name, int in, int hidden, Rng& rng);

  // inputs: L x in. Returns L x hidden in input order.
  Var forward(Graph& g, Var inputs, bool reverse) const;
  int hidden_size() const { return hidden_; }

 private:
  Parameter* input_weights_;
  Parameter* recurrent_weights_;
  Parameter* bias_;
  int hidden_;
};

// Multi-layer bidirectional LSTM over one sentence. Output row t is the
// concatenation [forward_t; backward_t] of the top layer.
class BiLstm {
 public:
  BiLstm(ParameterStore& store, const std::string& name, int in, int layers, int hidden,
         double dropout, Rng& rng);

  // Throws DimensionError for an empty sequence.
  Var forward(Graph& g, Var sentence, bool training, Rng& rng) const;
  int output_dim() const { return 2 * hidden_; }

 private:
  std::vector<LstmDirection> forward_layers_;
  std::vector<LstmDirection> backward_layers_;
  int hidden_;
  double dropout_;
};

// Character CNN: embeddings of hashed characters, one convolution per filter
// width with ReLU, max-pooled over positions.
class CharCnn {
 public:
  CharCnn(ParameterStore& store, const std::string& name, int buckets, int embedding_size,
          std::vector<int> widths, int filters, Rng& rng);

  int output_dim() const { return static_cast<int>(widths_.size()) * filters_; }
  int min_length() const;

  // Character ids of a word: 0 is padding, code points hash into
  // 1..buckets-1. Words are right-padded to min_length; an empty word is a
  // single padding character.
  std::vector<int> char_ids(std::string_view word) const;

  // One row per word.
  Var forward(Graph& g, const std::vector<std::string>& words) const;

 private:
  Parameter* embeddings_;
  std::vector<Parameter*> filters_weights_;
  std::vector<Parameter*> filters_bias_;
  std::vector<int> widths_;
  int buckets_;
  int filters_;
};

}  // namespace arcoref::nn

#endif  // ARCOREF_LAYERS_HPP_
