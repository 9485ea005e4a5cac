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

#ifndef ARCOREF_TESTS_ORACLES_HPP_
#define ARCOREF_TESTS_ORACLES_HPP_

#include <algorithm>
#include <numeric>
#include <utility>
#include <vector>

#include "arcoref/conll.hpp"

// Brute-force reference implementations of the coreference metrics, written
// directly from the textbook definitions with no shared code.
namespace arcoref::oracle {

inline int cluster_of(const ClusterSet& set, const Span& s) {
  for (std::size_t c = 0; c < set.clusters.size(); ++c)
    for (const Span& m : set.clusters[c])
      if (m == s) return static_cast<int>(c);
  return -1;
}

// Number of connected components of cluster S when two mentions are joined
// iff the other side puts them in one cluster.
inline int components(const std::vector<Span>& cluster, const ClusterSet& other) {
  const int n = static_cast<int>(cluster.size());
  std::vector<int> label(n);
  std::iota(label.begin(), label.end(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const int ca = cluster_of(other, cluster[a]);
        if (ca >= 0 && ca == cluster_of(other, cluster[b]) && label[b] < label[a]) {
          label[a] = label[b];
          changed = true;
        }
      }
  }
  std::sort(label.begin(), label.end());
  return static_cast<int>(std::unique(label.begin(), label.end()) - label.begin());
}

// (numerator, denominator) of MUC recall of `key` against `response`.
inline std::pair<double, double> muc_recall(const ClusterSet& key, const ClusterSet& response) {
  double num = 0.0, den = 0.0;
  for (const auto& cluster : key.clusters) {
    num += static_cast<double>(cluster.size()) - components(cluster, response);
    den += static_cast<double>(cluster.size()) - 1.0;
  }
  return {num, den};
}

inline std::pair<double, double> b_cubed_recall(const ClusterSet& key,
                                                const ClusterSet& response) {
  double num = 0.0, den = 0.0;
  for (const auto& cluster : key.clusters) {
    for (const Span& m : cluster) {
      den += 1.0;
      const int r = cluster_of(response, m);
      if (r < 0) continue;
      int common = 0;
      for (const Span& other : cluster) common += cluster_of(response, other) == r;
      num += static_cast<double>(common) / static_cast<double>(cluster.size());
    }
  }
  return {num, den};
}

inline double phi4_similarity(const std::vector<Span>& a, const std::vector<Span>& b) {
  int common = 0;
  for (const Span& x : a)
    for (const Span& y : b) common += x == y;
  return 2.0 * common / static_cast<double>(a.size() + b.size());
}

// Best total phi4 over every one-to-one alignment, by permutation search.
inline double ceaf_best_alignment(const ClusterSet& key, const ClusterSet& response) {
  const int n = static_cast<int>(std::max(key.clusters.size(), response.clusters.size()));
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    double total = 0.0;
    for (int i = 0; i < static_cast<int>(key.clusters.size()); ++i) {
      if (perm[i] < static_cast<int>(response.clusters.size())) {
        total += phi4_similarity(key.clusters[i], response.clusters[perm[i]]);
      }
    }
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace arcoref::oracle

#endif  // ARCOREF_TESTS_ORACLES_HPP_
