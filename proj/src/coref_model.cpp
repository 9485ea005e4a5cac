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

#include "arcoref/coref_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "arcoref/error.hpp"

namespace arcoref {

std::vector<Span> enumerate_spans(const std::vector<std::pair<int, int>>& sentence_ranges,
                                  int max_width) {
  std::vector<Span> spans;
  for (const auto& [begin, end] : sentence_ranges) {
    for (int s = begin; s < end; ++s) {
      for (int e = s; e < end && e - s + 1 <= max_width; ++e) spans.push_back({s, e});
    }
  }
  return spans;
}

std::vector<Span> enumerate_spans(const Document& doc, int max_width) {
  return enumerate_spans(doc.sentence_ranges(), max_width);
}

int pruned_count(int num_tokens, double ratio) {
  return std::max(1, static_cast<int>(std::floor(ratio * num_tokens)));
}

std::vector<int> top_spans(std::span<const Span> spans, std::span<const double> scores, int k) {
  if (spans.size() != scores.size()) throw DimensionError("top_spans: spans and scores differ");
  std::vector<int> order(spans.size());
  std::iota(order.begin(), order.end(), 0);
  k = std::clamp(k, 0, static_cast<int>(order.size()));
  std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return spans[a] < spans[b];
  });
  order.resize(k);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return spans[a] < spans[b]; });
  return order;
}

int distance_bucket(int distance) {
  if (distance < 1) throw DimensionError("distance_bucket: distance must be positive");
  if (distance <= 4) return distance - 1;
  return std::min(kNumDistanceBuckets - 1, static_cast<int>(std::floor(std::log2(distance))) + 2);
}

std::vector<std::vector<int>> select_antecedents(const nn::Tensor& combined, int max_antecedents) {
  const int k = combined.rows();
  std::vector<std::vector<int>> result(k);
  for (int j = 0; j < k; ++j) {
    std::vector<int> candidates(j);
    std::iota(candidates.begin(), candidates.end(), 0);
    const int keep = std::min(j, max_antecedents);
    std::partial_sort(candidates.begin(), candidates.begin() + keep, candidates.end(),
                      [&](int a, int b) {
                        if (combined(a, j) != combined(b, j)) return combined(a, j) > combined(b, j);
                        return a < b;
                      });
    candidates.resize(keep);
    std::sort(candidates.begin(), candidates.end());
    result[j] = std::move(candidates);
  }
  return result;
}

std::vector<int> predict_antecedents(const nn::Tensor& scores,
                                     const std::vector<std::vector<int>>& antecedents) {
  std::vector<int> predicted(antecedents.size(), -1);
  for (std::size_t j = 0; j < antecedents.size(); ++j) {
    double best = 0.0;
    for (std::size_t c = 0; c < antecedents[j].size(); ++c) {
      const double s = scores(static_cast<int>(j), static_cast<int>(c) + 1);
      if (s > best) {
        best = s;
        predicted[j] = antecedents[j][c];
      }
    }
  }
  return predicted;
}

ClusterSet decode_clusters(std::span<const Span> mentions, std::span<const int> antecedent) {
  if (mentions.size() != antecedent.size()) {
    throw DimensionError("decode_clusters: mentions and antecedents differ in length");
  }
  const int n = static_cast<int>(mentions.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int j = 0; j < n; ++j) {
    const int i = antecedent[j];
    if (i < 0) continue;
    if (i >= j) throw DataError("decode_clusters: antecedent must precede its anaphor");
    parent[find(j)] = find(i);
  }
  std::map<int, std::vector<Span>> groups;
  for (int j = 0; j < n; ++j) groups[find(j)].push_back(mentions[j]);
  ClusterSet result;
  for (auto& [root, spans] : groups) {
    if (spans.size() > 1) result.clusters.push_back(std::move(spans));
  }
  return result.canonical();
}

std::vector<char> gold_antecedent_mask(std::span<const Span> mentions,
                                       const std::vector<std::vector<int>>& antecedents,
                                       int columns, const ClusterSet& gold, int max_span_width) {
  std::map<Span, int> cluster_of;
  for (std::size_t c = 0; c < gold.clusters.size(); ++c) {
    for (const Span& s : gold.clusters[c]) {
      if (s.width() <= max_span_width) cluster_of[s] = static_cast<int>(c);
    }
  }
  const int k = static_cast<int>(mentions.size());
  std::vector<char> mask(static_cast<std::size_t>(k) * columns, 0);
  for (int j = 0; j < k; ++j) {
    auto it = cluster_of.find(mentions[j]);
    bool any = false;
    if (it != cluster_of.end()) {
      for (std::size_t c = 0; c < antecedents[j].size(); ++c) {
        auto jt = cluster_of.find(mentions[antecedents[j][c]]);
        if (jt != cluster_of.end() && jt->second == it->second) {
          mask[static_cast<std::size_t>(j) * columns + c + 1] = 1;
          any = true;
        }
      }
    }
    if (!any) mask[static_cast<std::size_t>(j) * columns] = 1;
  }
  return mask;
}

namespace {
const RunConfig& validated(const RunConfig& config) {
  config.validate();
  return config;
}
}  // namespace

CorefModel::CorefModel(const RunConfig& config, const EmbeddingProvider* provider, Rng& rng)
    : config_(validated(config)),
      embedder_(provider, params_, "coref/embedder", config, rng),
      encoder_(params_, "coref/encoder", embedder_.dimension(), config.lstm_layers,
               config.lstm_size, config.lstm_dropout, rng),
      head_(params_, "coref/head", 2 * config.lstm_size, 1, rng),
      width_embeddings_(&params_.add("coref/width_embeddings", config.max_span_width,
                                     config.feature_size, nn::Init::kGlorotUniform, rng)),
      distance_embeddings_(&params_.add("coref/distance_embeddings", kNumDistanceBuckets,
                                        config.feature_size, nn::Init::kGlorotUniform, rng)),
      mention_scorer_(params_, "coref/mention_scorer", mention_dim(), config.ffnn_layers,
                      config.ffnn_size, 1, config.ffnn_dropout, rng),
      coarse_bilinear_(&params_.add("coref/coarse_bilinear", mention_dim(), mention_dim(),
                                    nn::Init::kGlorotUniform, rng)),
      antecedent_scorer_(params_, "coref/antecedent_scorer",
                         3 * mention_dim() + config.feature_size, config.ffnn_layers,
                         config.ffnn_size, 1, config.ffnn_dropout, rng),
      gate_(params_, "coref/gate", 2 * mention_dim(), mention_dim(), rng) {}

nn::Var CorefModel::encode(nn::Graph& g, const Document& doc, bool training, Rng& rng) const {
  if (doc.length() == 0) throw DataError("document " + doc.key() + " has no tokens");
  nn::Var embedded = embedder_.embed(g, doc, training, rng);
  const auto ranges = doc.sentence_ranges();
  if (ranges.size() == 1) return encoder_.forward(g, embedded, training, rng);
  std::vector<nn::Var> sentences;
  for (const auto& [begin, end] : ranges) {
    std::vector<int> rows(end - begin);
    std::iota(rows.begin(), rows.end(), begin);
    sentences.push_back(encoder_.forward(g, nn::gather_rows(embedded, rows), training, rng));
  }
  return nn::concat_rows(sentences);
}

nn::Var CorefModel::head_scores(nn::Graph& g, nn::Var tokens) const {
  return head_.forward(g, tokens);
}

nn::Var CorefModel::fine_scores(nn::Graph& g, nn::Var vectors, const CorefForward& f,
                                bool training, Rng& rng) const {
  nn::Var antecedent = nn::gather_rows(vectors, f.pair_antecedent);
  nn::Var anaphor = nn::gather_rows(vectors, f.pair_anaphor);
  std::vector<int> buckets(f.pair_antecedent.size());
  for (std::size_t p = 0; p < buckets.size(); ++p) {
    buckets[p] = distance_bucket(f.pair_anaphor[p] - f.pair_antecedent[p]);
  }
  nn::Var distance = nn::embedding_lookup(g.parameter(*distance_embeddings_), buckets);
  nn::Var pair = nn::concat_cols({antecedent, anaphor, nn::mul(antecedent, anaphor), distance});
  return antecedent_scorer_.forward(g, pair, training, rng);
}

CorefForward CorefModel::forward(nn::Graph& g, const Document& doc,
                                 const std::vector<Span>* external, bool training,
                                 Rng& rng) const {
  CorefForward f;
  nn::Var tokens = encode(g, doc, training, rng);
  nn::Var alpha = head_scores(g, tokens);

  if (external) {
    f.spans = *external;
    std::sort(f.spans.begin(), f.spans.end());
    f.spans.erase(std::unique(f.spans.begin(), f.spans.end()), f.spans.end());
    for (const Span& s : f.spans) {
      if (s.start < 0 || s.end < s.start || s.end >= doc.length()) {
        throw DataError("external span [" + std::to_string(s.start) + "," +
                        std::to_string(s.end) + "] out of range for document " + doc.key());
      }
    }
  } else {
    f.spans = enumerate_spans(doc, config_.max_span_width);
  }
  const int num_spans = static_cast<int>(f.spans.size());
  if (num_spans == 0) {
    f.columns = 1;
    return f;
  }

  std::vector<int> starts(num_spans), ends(num_spans), widths(num_spans);
  std::vector<nn::SpanRange> ranges(num_spans);
  for (int s = 0; s < num_spans; ++s) {
    starts[s] = f.spans[s].start;
    ends[s] = f.spans[s].end;
    widths[s] = std::min(f.spans[s].width(), config_.max_span_width) - 1;
    ranges[s] = {f.spans[s].start, f.spans[s].end};
  }
  nn::Var width = nn::embedding_lookup(g.parameter(*width_embeddings_), widths);
  f.mention_vectors =
      nn::concat_cols({nn::gather_rows(tokens, starts), nn::gather_rows(tokens, ends),
                       nn::span_attention(tokens, alpha, ranges), width});
  f.mention_scores = mention_scorer_.forward(g, f.mention_vectors, training, rng);

  if (external) {
    f.top.resize(num_spans);
    std::iota(f.top.begin(), f.top.end(), 0);
  } else {
    const auto& v = f.mention_scores.value().values();
    f.top = top_spans(f.spans, v, pruned_count(doc.length(), config_.mention_ratio));
  }
  const int k = static_cast<int>(f.top.size());
  for (int i : f.top) f.top_spans.push_back(f.spans[i]);

  nn::Var vectors = nn::gather_rows(f.mention_vectors, f.top);
  nn::Var mention = nn::gather_rows(f.mention_scores, f.top);
  nn::Var coarse = nn::matmul(nn::matmul(vectors, g.parameter(*coarse_bilinear_)),
                              nn::transpose(vectors));

  nn::Tensor combined(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      combined(i, j) = mention.value()[i] + mention.value()[j] + coarse.value()(i, j);
  f.antecedents = select_antecedents(combined, config_.max_antecedents);

  int max_candidates = 0;
  for (const auto& a : f.antecedents) max_candidates = std::max<int>(max_candidates, a.size());
  f.columns = 1 + max_candidates;
  f.valid.assign(static_cast<std::size_t>(k) * f.columns, 0);
  for (int j = 0; j < k; ++j) {
    f.valid[static_cast<std::size_t>(j) * f.columns] = 1;
    for (std::size_t c = 0; c < f.antecedents[j].size(); ++c) {
      f.valid[static_cast<std::size_t>(j) * f.columns + c + 1] = 1;
      f.pair_antecedent.push_back(f.antecedents[j][c]);
      f.pair_anaphor.push_back(j);
      f.pair_column.push_back(static_cast<int>(c) + 1);
    }
  }

  f.refined_vectors = vectors;
  if (f.pair_antecedent.empty()) {
    f.scores = g.constant(nn::Tensor(k, 1));
    return f;
  }

  f.pair_mention_antecedent = nn::gather_rows(mention, f.pair_antecedent);
  f.pair_mention_anaphor = nn::gather_rows(mention, f.pair_anaphor);
  f.pair_coarse = nn::gather_elements(coarse, f.pair_antecedent, f.pair_anaphor);
  nn::Var fast = nn::add(nn::add(f.pair_mention_antecedent, f.pair_mention_anaphor), f.pair_coarse);

  auto grid = [&](nn::Var fine) {
    return nn::scatter_elements(nn::add(fast, fine), f.pair_anaphor, f.pair_column, k, f.columns);
  };
  f.pair_fine = fine_scores(g, vectors, f, training, rng);
  f.scores = grid(f.pair_fine);

  // Each mention attends over [itself; candidates] with the current
  // antecedent distribution, then a gate mixes the result into its vector.
  std::vector<int> stacked(static_cast<std::size_t>(k) * f.columns);
  for (int j = 0; j < k; ++j) {
    for (int c = 0; c < f.columns; ++c) {
      const bool real = c > 0 && c - 1 < static_cast<int>(f.antecedents[j].size());
      stacked[static_cast<std::size_t>(j) * f.columns + c] = real ? f.antecedents[j][c - 1] : j;
    }
  }
  for (int iteration = 0; iteration < config_.coref_depth; ++iteration) {
    nn::Var probabilities = nn::masked_softmax(f.scores, f.valid);
    nn::Var attended = nn::weighted_group_sum(probabilities, nn::gather_rows(vectors, stacked));
    nn::Var gate = nn::sigmoid(gate_.forward(g, nn::concat_cols({vectors, attended})));
    vectors = nn::add(nn::mul(gate, attended), nn::mul(nn::affine(gate, -1.0, 1.0), vectors));
    f.pair_fine = fine_scores(g, vectors, f, training, rng);
    f.scores = grid(f.pair_fine);
  }
  f.refined_vectors = vectors;
  return f;
}

nn::Var CorefModel::loss(nn::Graph& g, const CorefForward& f, const ClusterSet& gold) const {
  if (f.top.empty()) return g.constant(nn::Tensor::scalar(0.0));
  const auto mask =
      gold_antecedent_mask(f.top_spans, f.antecedents, f.columns, gold, config_.max_span_width);
  return nn::marginal_nll(f.scores, f.valid, mask);
}

ClusterSet CorefModel::predict(const Document& doc, const std::vector<Span>* external) const {
  nn::Graph g;
  Rng unused(0);
  const CorefForward f = forward(g, doc, external, /*training=*/false, unused);
  if (f.top.empty()) return {};
  const auto antecedent = predict_antecedents(f.scores.value(), f.antecedents);
  return decode_clusters(f.top_spans, antecedent);
}

nn::Checkpoint CorefModel::to_checkpoint() const {
  nn::Checkpoint checkpoint;
  checkpoint.config = config_.to_map();
  checkpoint.config["model"] = "coref";
  checkpoint.params = params_.snapshot();
  return checkpoint;
}

std::unique_ptr<CorefModel> CorefModel::from_checkpoint(
    const nn::Checkpoint& checkpoint, const EmbeddingProvider* provider,
    const std::map<std::string, std::string>& overrides) {
  auto values = checkpoint.config;
  auto kind = values.find("model");
  if (kind == values.end() || kind->second != "coref") {
    throw DataError("checkpoint does not hold a coreference model");
  }
  values.erase(kind);
  RunConfig config = RunConfig::from_map(values);
  for (const auto& [key, value] : overrides) config.set(key, value);
  Rng rng(config.seed);
  auto model = std::make_unique<CorefModel>(config, provider, rng);
  model->params().restore(checkpoint.params);
  return model;
}

}  // namespace arcoref
