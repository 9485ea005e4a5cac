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

#include "arcoref/embeddings.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "arcoref/error.hpp"
#include "arcoref/random.hpp"

namespace arcoref {

namespace {
constexpr std::uint64_t kStaticSeed = 0x5354415449430001ULL;
constexpr std::uint64_t kContextualSeed = 0x434f4e5445585402ULL;
}  // namespace

std::vector<double> hashed_unit_vector(std::string_view key, int dimension, std::uint64_t seed) {
  std::uint64_t state = fnv1a64(key, seed);
  std::vector<double> v(dimension);
  double norm = 0.0;
  for (auto& x : v) {
    // Uniform in [-1, 1) from the top 53 bits.
    x = static_cast<double>(splitmix64(&state) >> 11) * 0x1.0p-52 - 1.0;
    norm += x * x;
  }
  norm = std::sqrt(norm);
  if (norm > 0.0)
    for (auto& x : v) x /= norm;
  return v;
}

StaticEmbeddings StaticEmbeddings::hashed(int dimension, std::uint64_t seed) {
  StaticEmbeddings e;
  e.kind_ = EmbeddingKind::kHashedSynthetic;
  e.dimension_ = dimension;
  e.seed_ = seed;
  return e;
}

StaticEmbeddings StaticEmbeddings::load(std::istream& in, int dimension, std::uint64_t seed) {
  StaticEmbeddings e = hashed(dimension, seed);
  e.kind_ = EmbeddingKind::kStaticFile;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("expected word<TAB>vector", number);
    std::istringstream values(line.substr(tab + 1));
    std::vector<double> v;
    double x;
    while (values >> x) v.push_back(x);
    if (!values.eof()) throw ParseError("non-numeric embedding value", number);
    if (static_cast<int>(v.size()) != dimension) {
      throw ParseError("embedding of dimension " + std::to_string(v.size()) + ", expected " +
                           std::to_string(dimension),
                       number);
    }
    e.table_[line.substr(0, tab)] = std::move(v);
  }
  return e;
}

StaticEmbeddings StaticEmbeddings::load_file(const std::string& path, int dimension,
                                             std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open static embedding file '" + path + "'");
  try {
    return load(in, dimension, seed);
  } catch (const ParseError& e) {
    throw DataError(path + ": " + e.what());
  }
}

bool StaticEmbeddings::contains(std::string_view word) const {
  return table_.count(std::string(word)) > 0;
}

std::vector<double> StaticEmbeddings::lookup(std::string_view word) const {
  auto it = table_.find(std::string(word));
  if (it != table_.end()) return it->second;
  return hashed_unit_vector(word, dimension_, seed_);
}

ContextualEmbeddings ContextualEmbeddings::hashed(int dimension, std::uint64_t seed,
                                                  double position_mix) {
  ContextualEmbeddings e;
  e.kind_ = EmbeddingKind::kHashedSynthetic;
  e.dimension_ = dimension;
  e.seed_ = seed;
  e.position_mix_ = position_mix;
  return e;
}

namespace {
std::string contextual_key(const std::string& doc_id, int part_id) {
  return doc_id + "/" + std::to_string(part_id);
}
}  // namespace

ContextualEmbeddings ContextualEmbeddings::load(std::istream& in) {
  ContextualEmbeddings e;
  e.kind_ = EmbeddingKind::kContextualFile;
  e.dimension_ = -1;
  std::string line;
  std::size_t number = 0;
  std::vector<std::vector<double>>* current = nullptr;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      current = nullptr;
      continue;
    }
    std::istringstream fields(line);
    if (!current) {
      std::string doc_id;
      int part = 0, dimension = 0;
      if (!(fields >> doc_id >> part >> dimension) || dimension < 1) {
        throw ParseError("expected header 'doc_id part dimension'", number);
      }
      if (e.dimension_ >= 0 && dimension != e.dimension_) {
        throw ParseError("document dimension " + std::to_string(dimension) + " differs from " +
                             std::to_string(e.dimension_),
                         number);
      }
      e.dimension_ = dimension;
      current = &e.documents_[contextual_key(doc_id, part)];
      current->clear();
      continue;
    }
    std::vector<double> v;
    double x;
    while (fields >> x) v.push_back(x);
    if (!fields.eof()) throw ParseError("non-numeric embedding value", number);
    if (static_cast<int>(v.size()) != e.dimension_) {
      throw ParseError("token vector of dimension " + std::to_string(v.size()) + ", expected " +
                           std::to_string(e.dimension_),
                       number);
    }
    current->push_back(std::move(v));
  }
  if (e.dimension_ < 0) e.dimension_ = 0;
  return e;
}

ContextualEmbeddings ContextualEmbeddings::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open contextual embedding file '" + path + "'");
  try {
    return load(in);
  } catch (const ParseError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::vector<double> ContextualEmbeddings::lookup(const std::string& doc_id, int part_id,
                                                 int token_index) const {
  const std::string key = contextual_key(doc_id, part_id);
  auto it = documents_.find(key);
  if (it == documents_.end()) throw DataError("no contextual embeddings for document " + key);
  if (token_index < 0 || token_index >= static_cast<int>(it->second.size())) {
    throw DataError("no contextual embedding for token " + std::to_string(token_index) +
                    " of document " + key + " (" + std::to_string(it->second.size()) +
                    " tokens)");
  }
  return it->second[token_index];
}

std::vector<double> ContextualEmbeddings::lookup(const Document& doc, int token_index) const {
  if (kind_ != EmbeddingKind::kHashedSynthetic) {
    return lookup(doc.doc_id, doc.part_id, token_index);
  }
  if (token_index < 0 || token_index >= doc.length()) {
    throw DataError("token " + std::to_string(token_index) + " past end of document " + doc.key());
  }
  const std::string& surface = doc.tokens[token_index].surface;
  std::vector<double> v = hashed_unit_vector(surface, dimension_, seed_);
  if (position_mix_ > 0.0) {
    const auto p = hashed_unit_vector(surface + "\x1f" + std::to_string(token_index), dimension_,
                                      seed_ ^ 0x9e3779b97f4a7c15ULL);
    double norm = 0.0;
    for (int i = 0; i < dimension_; ++i) {
      v[i] += position_mix_ * p[i];
      norm += v[i] * v[i];
    }
    norm = std::sqrt(norm);
    if (norm > 0.0)
      for (auto& x : v) x /= norm;
  }
  return v;
}

EmbeddingProvider::EmbeddingProvider(const RunConfig& config) {
  if (config.contextual_embeddings == "hashed") {
    contextual_ = ContextualEmbeddings::hashed(config.contextual_embedding_size, kContextualSeed,
                                               config.hashed_position_mix);
  } else if (config.contextual_embeddings != "none") {
    contextual_ = ContextualEmbeddings::load_file(config.contextual_embeddings);
    if (contextual_->dimension() != config.contextual_embedding_size) {
      throw DataError("contextual embedding file has dimension " +
                      std::to_string(contextual_->dimension()) + " but contextual_embedding_size is " +
                      std::to_string(config.contextual_embedding_size));
    }
  }
  if (config.static_embeddings == "hashed") {
    static_ = StaticEmbeddings::hashed(config.static_embedding_size, kStaticSeed);
  } else if (config.static_embeddings != "none") {
    static_ = StaticEmbeddings::load_file(config.static_embeddings, config.static_embedding_size,
                                          kStaticSeed);
  }
}

int EmbeddingProvider::fixed_dimension(bool contextual_only) const {
  int d = contextual_ ? contextual_->dimension() : 0;
  if (!contextual_only && static_) d += static_->dimension();
  return d;
}

nn::Tensor EmbeddingProvider::fixed_features(const Document& doc, bool contextual_only) const {
  const int dim = fixed_dimension(contextual_only);
  nn::Tensor out(doc.length(), dim);
  for (int t = 0; t < doc.length(); ++t) {
    auto row = out.row(t);
    int off = 0;
    if (contextual_) {
      const auto v = contextual_->lookup(doc, t);
      std::copy(v.begin(), v.end(), row.begin());
      off += static_cast<int>(v.size());
    }
    if (!contextual_only && static_) {
      const auto v = static_->lookup(doc.tokens[t].surface);
      std::copy(v.begin(), v.end(), row.begin() + off);
    }
  }
  return out;
}

TokenEmbedder::TokenEmbedder(const EmbeddingProvider* provider, nn::ParameterStore& store,
                             const std::string& name, const RunConfig& config, Rng& rng)
    : provider_(provider), dropout_(config.embedding_dropout) {
  if (config.char_filter_size > 0 && !config.char_filter_widths.empty()) {
    char_cnn_.emplace(store, name + "/char_cnn", config.char_buckets, config.char_embedding_size,
                      config.char_filter_widths, config.char_filter_size, rng);
  }
  if (dimension() == 0) throw ConfigError("token embedding dimension is zero");
}

int TokenEmbedder::dimension() const {
  return provider_->fixed_dimension() + (char_cnn_ ? char_cnn_->output_dim() : 0);
}

nn::Var TokenEmbedder::embed(nn::Graph& g, const Document& doc, bool training, Rng& rng) const {
  std::vector<nn::Var> parts;
  if (provider_->fixed_dimension() > 0) parts.push_back(g.constant(provider_->fixed_features(doc)));
  if (char_cnn_) {
    std::vector<std::string> words;
    words.reserve(doc.tokens.size());
    for (const auto& t : doc.tokens) words.push_back(t.surface);
    parts.push_back(char_cnn_->forward(g, words));
  }
  nn::Var emb = parts.size() == 1 ? parts[0] : nn::concat_cols(parts);
  return nn::dropout(emb, dropout_, training, rng);
}

}  // namespace arcoref
