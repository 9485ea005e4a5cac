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

#ifndef ARCOREF_TESTS_FIXTURES_HPP_
#define ARCOREF_TESTS_FIXTURES_HPP_

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

#include "arcoref/config.hpp"
#include "arcoref/conll.hpp"
#include "arcoref/random.hpp"

namespace arcoref::testing {

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Random token surface drawn from Arabic letters, diacritics and Latin.
inline std::string random_surface(Rng& rng) {
  static const std::vector<std::string> pieces = {
      "ا", "أ", "إ", "آ", "ٱ", "ب", "ت", "ك", "م", "ه", "ي", "و", "َ", "ُ", "ِ", "ّ", "ْ", "ً",
      "a", "b", "Z", "9", ".", "-x", "é"};
  std::string s;
  const int n = uniform_int(rng, 1, 6);
  for (int i = 0; i < n; ++i) s += pieces[uniform_int(rng, 0, static_cast<int>(pieces.size()) - 1)];
  return s;
}

// Spans of one cluster never cross: each new span is disjoint from or nested
// with the others, so bracket notation is unambiguous.
inline bool compatible(const std::vector<Span>& cluster, const Span& s) {
  for (const Span& o : cluster) {
    if (o == s) return false;
    const bool disjoint = s.end < o.start || o.end < s.start;
    const bool nested = (s.start >= o.start && s.end <= o.end) ||
                        (o.start >= s.start && o.end <= s.end);
    if (!disjoint && !nested) return false;
  }
  return true;
}

inline Document random_document(Rng& rng, int index) {
  Document doc;
  doc.doc_id = "fuzz/doc" + std::to_string(index);
  doc.part_id = uniform_int(rng, 0, 12);
  const int sentences = uniform_int(rng, 1, 4);
  const int extras = uniform_int(rng, 0, 3);
  for (int s = 0; s < sentences; ++s) {
    const int length = uniform_int(rng, 1, 8);
    for (int t = 0; t < length; ++t) {
      Token token;
      token.surface = random_surface(rng);
      token.sentence_index = s;
      token.doc_token_index = doc.length();
      for (int e = 0; e < extras; ++e) token.extra_columns.push_back(e % 2 ? "-" : "NN");
      doc.tokens.push_back(token);
    }
  }
  const int clusters = uniform_int(rng, 0, 4);
  std::set<Span> used;
  for (int c = 0; c < clusters; ++c) {
    std::vector<Span> cluster;
    const int mentions = uniform_int(rng, 1, 4);
    for (int m = 0; m < mentions * 3 && static_cast<int>(cluster.size()) < mentions; ++m) {
      const int start = uniform_int(rng, 0, doc.length() - 1);
      const int end = std::min(doc.length() - 1, start + uniform_int(rng, 0, 3));
      const Span span{start, end};
      if (used.count(span) || !compatible(cluster, span)) continue;
      used.insert(span);
      cluster.push_back(span);
    }
    if (!cluster.empty()) doc.gold_clusters.clusters.push_back(cluster);
  }
  return doc;
}

// Random pair of cluster sets over a shared pool of spans. Either side may
// contain spans missing from the other.
inline std::pair<ClusterSet, ClusterSet> random_cluster_pair(Rng& rng, int max_clusters = 6) {
  std::vector<Span> pool;
  for (int s = 0; s < 8; ++s)
    for (int e = s; e < std::min(8, s + 3); ++e) pool.push_back({s, e});
  auto side = [&] {
    std::vector<Span> spans = pool;
    std::shuffle(spans.begin(), spans.end(), rng);
    spans.resize(uniform_int(rng, 0, 12));
    const int k = uniform_int(rng, 1, max_clusters);
    std::vector<std::vector<Span>> clusters(k);
    for (const Span& s : spans) clusters[uniform_int(rng, 0, k - 1)].push_back(s);
    ClusterSet set;
    for (auto& c : clusters)
      if (!c.empty()) set.clusters.push_back(c);
    return set;
  };
  ClusterSet gold = side();
  ClusterSet pred = side();
  return {gold, pred};
}

// A fresh empty directory under the system temp path.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("arcoref_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Small configuration for fast tests.
inline RunConfig tiny_config() {
  RunConfig c;
  c.lstm_layers = 1;
  c.lstm_size = 4;
  c.ffnn_layers = 1;
  c.ffnn_size = 5;
  c.char_filter_widths = {2, 3};
  c.char_filter_size = 3;
  c.char_embedding_size = 3;
  c.char_buckets = 31;
  c.static_embedding_size = 4;
  c.contextual_embedding_size = 5;
  c.feature_size = 3;
  c.detector_projection_size = 4;
  c.max_span_width = 4;
  c.lstm_dropout = 0.0;
  c.ffnn_dropout = 0.0;
  c.embedding_dropout = 0.0;
  return c;
}

// Two-sentence Arabic document with two clusters.
inline Document tiny_document() {
  Document doc;
  doc.doc_id = "tiny";
  const std::vector<std::pair<std::string, int>> words = {
      {"أحمد", 0}, {"ذهب", 0}, {"إلى", 0}, {"دمشق", 0},
      {"هو", 1},   {"يحب", 1}, {"دمشق", 1}, {"كثيرا", 1}};
  for (const auto& [w, s] : words) {
    Token t;
    t.surface = w;
    t.sentence_index = s;
    t.doc_token_index = doc.length();
    doc.tokens.push_back(t);
  }
  doc.gold_clusters.clusters = {{{0, 0}, {4, 4}}, {{3, 3}, {6, 6}}};
  return doc;
}

}  // namespace arcoref::testing

#endif  // ARCOREF_TESTS_FIXTURES_HPP_
