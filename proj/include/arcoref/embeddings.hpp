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

#ifndef ARCOREF_EMBEDDINGS_HPP_
#define ARCOREF_EMBEDDINGS_HPP_

#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "arcoref/autodiff.hpp"
#include "arcoref/config.hpp"
#include "arcoref/conll.hpp"
#include "arcoref/layers.hpp"

namespace arcoref {

enum class EmbeddingKind { kStaticFile, kContextualFile, kHashedSynthetic };

// Deterministic unit-norm vector derived from a seeded hash of `key`.
std::vector<double> hashed_unit_vector(std::string_view key, int dimension, std::uint64_t seed);

// Word-level vectors. Unknown words resolve to a hashed fallback vector.
//
// File format: one word per line, `word<TAB>v1 v2 ... vD`.
class StaticEmbeddings {
 public:
  static StaticEmbeddings hashed(int dimension, std::uint64_t seed);
  // Throws DataError on a row whose dimension differs from `dimension`.
  static StaticEmbeddings load(std::istream& in, int dimension, std::uint64_t seed);
  static StaticEmbeddings load_file(const std::string& path, int dimension, std::uint64_t seed);

  EmbeddingKind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  bool contains(std::string_view word) const;
  std::vector<double> lookup(std::string_view word) const;

 private:
  EmbeddingKind kind_ = EmbeddingKind::kHashedSynthetic;
  int dimension_ = 0;
  std::uint64_t seed_ = 0;
  std::unordered_map<std::string, std::vector<double>> table_;
};

// Per-token contextual vectors, either precomputed or synthetic.
//
// File format: for each document a header line `doc_id part dimension`,
// then one line of floats per token; documents separated by blank lines.
class ContextualEmbeddings {
 public:
  // Vector is a function of (surface, position) only.
  static ContextualEmbeddings hashed(int dimension, std::uint64_t seed, double position_mix);
  static ContextualEmbeddings load(std::istream& in);
  static ContextualEmbeddings load_file(const std::string& path);

  EmbeddingKind kind() const { return kind_; }
  int dimension() const { return dimension_; }

  // File mode only. Throws DataError naming the missing key.
  std::vector<double> lookup(const std::string& doc_id, int part_id, int token_index) const;
  // Works in both modes.
  std::vector<double> lookup(const Document& doc, int token_index) const;

 private:
  EmbeddingKind kind_ = EmbeddingKind::kHashedSynthetic;
  int dimension_ = 0;
  std::uint64_t seed_ = 0;
  double position_mix_ = 0.0;
  std::map<std::string, std::vector<std::vector<double>>> documents_;
};

// Fixed (non-trainable) embedding sources resolved from a RunConfig.
class EmbeddingProvider {
 public:
  EmbeddingProvider() = default;
  explicit EmbeddingProvider(const RunConfig& config);

  const std::optional<ContextualEmbeddings>& contextual() const { return contextual_; }
  const std::optional<StaticEmbeddings>& static_words() const { return static_; }

  // [contextual; static] for each token, T x D.
  nn::Tensor fixed_features(const Document& doc, bool contextual_only = false) const;
  int fixed_dimension(bool contextual_only = false) const;

 private:
  std::optional<ContextualEmbeddings> contextual_;
  std::optional<StaticEmbeddings> static_;
};

// Composes [contextual; static; char_cnn(token)] with embedding dropout.
class TokenEmbedder {
 public:
  TokenEmbedder(const EmbeddingProvider* provider, nn::ParameterStore& store,
                const std::string& name, const RunConfig& config, Rng& rng);

  int dimension() const;
  nn::Var embed(nn::Graph& g, const Document& doc, bool training, Rng& rng) const;

 private:
  const EmbeddingProvider* provider_;
  std::optional<nn::CharCnn> char_cnn_;
  double dropout_;
};

}  // namespace arcoref

#endif  // ARCOREF_EMBEDDINGS_HPP_
