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

#ifndef ARCOREF_COREF_MODEL_HPP_
#define ARCOREF_COREF_MODEL_HPP_

#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "arcoref/autodiff.hpp"
#include "arcoref/config.hpp"
#include "arcoref/conll.hpp"
#include "arcoref/embeddings.hpp"
#include "arcoref/layers.hpp"
#include "arcoref/params.hpp"

namespace arcoref {

inline constexpr int kNumDistanceBuckets = 9;

// All spans of width <= max_width inside one sentence, in (start, end) order.
std::vector<Span> enumerate_spans(const std::vector<std::pair<int, int>>& sentence_ranges,
                                  int max_width);
std::vector<Span> enumerate_spans(const Document& doc, int max_width);

// max(1, floor(ratio * num_tokens)).
int pruned_count(int num_tokens, double ratio);

// Indices of the top-k spans by score (ties: earlier span first), returned in
// document order.
std::vector<int> top_spans(std::span<const Span> spans, std::span<const double> scores, int k);

// Mention-order distance to bucket: 1,2,3,4,5-7,8-15,16-31,32-63,64+.
int distance_bucket(int distance);

// For each anaphor j, up to max_antecedents preceding indices i < j with the
// highest combined(i, j), ties to the earlier i, returned in ascending order.
std::vector<std::vector<int>> select_antecedents(const nn::Tensor& combined, int max_antecedents);

// s(i,j) = s_m(i) + s_m(j) + s_c(i,j) + s_a(i,j).
inline double pair_score(double mention_i, double mention_j, double coarse, double fine) {
  return mention_i + mention_j + coarse + fine;
}

// Row j of `scores` holds s(eps, j) = 0 in column 0 and s(antecedents[j][c], j)
// in column c + 1. Returns the predicted antecedent index per mention, or -1
// for eps. A link requires a score strictly above 0; ties go to the earlier
// antecedent.
std::vector<int> predict_antecedents(const nn::Tensor& scores,
                                     const std::vector<std::vector<int>>& antecedents);

// Connected components of the antecedent links; singletons are dropped.
ClusterSet decode_clusters(std::span<const Span> mentions, std::span<const int> antecedent);

// Gold antecedent mask in the score-grid layout: the candidates in j's gold
// cluster, or eps when there are none.
std::vector<char> gold_antecedent_mask(std::span<const Span> mentions,
                                       const std::vector<std::vector<int>>& antecedents,
                                       int columns, const ClusterSet& gold, int max_span_width);

// Per-document forward state of the coreference model.
struct CorefForward {
  std::vector<Span> spans;                     // all scored candidate spans
  nn::Var mention_vectors;                     // S x dim(M)
  nn::Var mention_scores;                      // S x 1
  std::vector<int> top;                        // kept span indices, document order
  std::vector<Span> top_spans;
  std::vector<std::vector<int>> antecedents;   // per kept mention: kept indices
  int columns = 1;                             // 1 + max candidates
  nn::Var scores;                              // K x columns, column 0 is eps
  std::vector<char> valid;                     // K x columns
  // Score parts for each (antecedent, anaphor) pair, in grid order.
  std::vector<int> pair_antecedent, pair_anaphor, pair_column;
  nn::Var pair_mention_antecedent, pair_mention_anaphor, pair_coarse, pair_fine;
  // Mention vectors of the kept spans after refinement.
  nn::Var refined_vectors;
};

// Span-ranking coreference model with coarse-to-fine antecedent scoring and
// optional second-order refinement.
class CorefModel {
 public:
  CorefModel(const RunConfig& config, const EmbeddingProvider* provider, Rng& rng);

  const RunConfig& config() const { return config_; }
  nn::ParameterStore& params() { return params_; }
  const nn::ParameterStore& params() const { return params_; }
  int token_dim() const { return encoder_.output_dim(); }
  int mention_dim() const { return 3 * token_dim() + config_.feature_size; }

  // Token representations x_t (T x 2H), one LSTM pass per sentence.
  nn::Var encode(nn::Graph& g, const Document& doc, bool training, Rng& rng) const;
  // Head-attention scores alpha_t (T x 1).
  nn::Var head_scores(nn::Graph& g, nn::Var tokens) const;

  // With external candidates the pruning step is bypassed and every external
  // span is kept. Otherwise spans are enumerated and pruned to
  // pruned_count(T, mention_ratio).
  CorefForward forward(nn::Graph& g, const Document& doc,
                       const std::vector<Span>* external, bool training, Rng& rng) const;

  // -sum_j log sum_{i in GOLD(j)} P(i | j).
  nn::Var loss(nn::Graph& g, const CorefForward& forward, const ClusterSet& gold) const;

  ClusterSet predict(const Document& doc, const std::vector<Span>* external = nullptr) const;

  nn::Checkpoint to_checkpoint() const;
  // Rebuilds the model from the checkpoint's config (with `overrides`
  // applied) and restores its parameters. Throws DataError on a shape
  // mismatch.
  static std::unique_ptr<CorefModel> from_checkpoint(
      const nn::Checkpoint& checkpoint, const EmbeddingProvider* provider,
      const std::map<std::string, std::string>& overrides = {});

 private:
  nn::Var fine_scores(nn::Graph& g, nn::Var vectors, const CorefForward& f, bool training,
                      Rng& rng) const;

  RunConfig config_;
  nn::ParameterStore params_;
  TokenEmbedder embedder_;
  nn::BiLstm encoder_;
  nn::Linear head_;
  nn::Parameter* width_embeddings_;
  nn::Parameter* distance_embeddings_;
  nn::Ffnn mention_scorer_;
  nn::Parameter* coarse_bilinear_;
  nn::Ffnn antecedent_scorer_;
  nn::Linear gate_;
};

}  // namespace arcoref

#endif  // ARCOREF_COREF_MODEL_HPP_
