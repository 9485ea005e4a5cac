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

#ifndef ARCOREF_METRICS_HPP_
#define ARCOREF_METRICS_HPP_

#include <string>
#include <vector>

#include "arcoref/conll.hpp"

namespace arcoref {

// Recall, precision and F1 as fractions in [0, 1].
struct Prf {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
};

// F1 = 2PR / (P + R), 0 when P + R = 0.
double f1_score(double precision, double recall);

// Numerators and denominators, summed over documents before dividing.
struct MetricCounts {
  double recall_num = 0.0;
  double recall_den = 0.0;
  double precision_num = 0.0;
  double precision_den = 0.0;

  MetricCounts& operator+=(const MetricCounts& other);
  // 0 / 0 ratios are 0.
  Prf prf() const;
};

// Throws DataError when a span repeats within or across clusters.
void validate_clusters(const ClusterSet& clusters);

MetricCounts muc_counts(const ClusterSet& gold, const ClusterSet& pred);
MetricCounts b_cubed_counts(const ClusterSet& gold, const ClusterSet& pred);
MetricCounts ceaf_phi4_counts(const ClusterSet& gold, const ClusterSet& pred);
MetricCounts mention_counts(const std::vector<Span>& gold, const std::vector<Span>& pred);

inline Prf muc(const ClusterSet& gold, const ClusterSet& pred) { return muc_counts(gold, pred).prf(); }
inline Prf b_cubed(const ClusterSet& gold, const ClusterSet& pred) {
  return b_cubed_counts(gold, pred).prf();
}
inline Prf ceaf_phi4(const ClusterSet& gold, const ClusterSet& pred) {
  return ceaf_phi4_counts(gold, pred).prf();
}
inline Prf mention_prf(const std::vector<Span>& gold, const std::vector<Span>& pred) {
  return mention_counts(gold, pred).prf();
}

// phi4(K, R) = 2 |K ∩ R| / (|K| + |R|).
double phi4(const std::vector<Span>& key, const std::vector<Span>& response);

// Maximum-weight one-to-one assignment on a rectangular similarity matrix
// (Kuhn-Munkres on the zero-padded square). Returns, per row, the assigned
// column or -1 when the row is matched to padding.
std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& similarity);

double conll_average(double muc_f1, double b_cubed_f1, double ceaf_f1);

// Percent-scaled scores, full precision.
struct MetricReport {
  Prf muc;
  Prf b_cubed;
  Prf ceaf_phi4;
  Prf mentions;
  double conll_f1 = 0.0;

  // Fixed-width table with R / P / F1 per metric and the average F1, one
  // decimal place.
  std::string format_table() const;
};

// Micro-averaged report over aligned (gold, pred) document pairs.
MetricReport score_corpus(const std::vector<ClusterSet>& gold, const std::vector<ClusterSet>& pred);

// Aligns documents by key. Throws DataError listing the ids present on only
// one side.
MetricReport score_documents(const std::vector<Document>& key,
                             const std::vector<Document>& response);
MetricReport score_files(const std::string& key_path, const std::string& response_path);

}  // namespace arcoref

#endif  // ARCOREF_METRICS_HPP_
