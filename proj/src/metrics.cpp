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

#include "arcoref/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

#include "arcoref/error.hpp"

namespace arcoref {

double f1_score(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

MetricCounts& MetricCounts::operator+=(const MetricCounts& other) {
  recall_num += other.recall_num;
  recall_den += other.recall_den;
  precision_num += other.precision_num;
  precision_den += other.precision_den;
  return *this;
}

Prf MetricCounts::prf() const {
  Prf p;
  p.recall = recall_den > 0.0 ? recall_num / recall_den : 0.0;
  p.precision = precision_den > 0.0 ? precision_num / precision_den : 0.0;
  p.f1 = f1_score(p.precision, p.recall);
  return p;
}

namespace {

using ClusterIndex = std::map<Span, int>;

ClusterIndex index_clusters(const ClusterSet& clusters) {
  ClusterIndex index;
  for (std::size_t c = 0; c < clusters.clusters.size(); ++c) {
    for (const Span& s : clusters.clusters[c]) {
      if (!index.emplace(s, static_cast<int>(c)).second) {
        throw DataError("span [" + std::to_string(s.start) + "," + std::to_string(s.end) +
                        "] appears more than once in a cluster set");
      }
    }
  }
  return index;
}

// Sum over clusters S of (|S| - partitions of S under `other`) and of (|S| - 1).
std::pair<double, double> muc_side(const ClusterSet& side, const ClusterIndex& other) {
  double num = 0.0, den = 0.0;
  for (const auto& cluster : side.clusters) {
    std::set<int> parts;
    int unaligned = 0;
    for (const Span& s : cluster) {
      auto it = other.find(s);
      if (it == other.end()) {
        ++unaligned;
      } else {
        parts.insert(it->second);
      }
    }
    const double size = static_cast<double>(cluster.size());
    num += size - static_cast<double>(parts.size() + unaligned);
    den += size - 1.0;
  }
  return {num, den};
}

// Sum over mentions m of |C_side(m) ∩ C_other(m)| / |C_side(m)|.
std::pair<double, double> b_cubed_side(const ClusterSet& side, const ClusterIndex& other) {
  double num = 0.0, den = 0.0;
  for (const auto& cluster : side.clusters) {
    std::map<int, int> overlap;
    for (const Span& s : cluster) {
      auto it = other.find(s);
      if (it != other.end()) ++overlap[it->second];
    }
    const double size = static_cast<double>(cluster.size());
    for (const Span& s : cluster) {
      den += 1.0;
      auto it = other.find(s);
      if (it != other.end()) num += overlap[it->second] / size;
    }
  }
  return {num, den};
}

}  // namespace

void validate_clusters(const ClusterSet& clusters) { index_clusters(clusters); }

MetricCounts muc_counts(const ClusterSet& gold, const ClusterSet& pred) {
  const auto gold_index = index_clusters(gold);
  const auto pred_index = index_clusters(pred);
  MetricCounts c;
  std::tie(c.recall_num, c.recall_den) = muc_side(gold, pred_index);
  std::tie(c.precision_num, c.precision_den) = muc_side(pred, gold_index);
  return c;
}

MetricCounts b_cubed_counts(const ClusterSet& gold, const ClusterSet& pred) {
  const auto gold_index = index_clusters(gold);
  const auto pred_index = index_clusters(pred);
  MetricCounts c;
  std::tie(c.recall_num, c.recall_den) = b_cubed_side(gold, pred_index);
  std::tie(c.precision_num, c.precision_den) = b_cubed_side(pred, gold_index);
  return c;
}

double phi4(const std::vector<Span>& key, const std::vector<Span>& response) {
  if (key.empty() && response.empty()) return 0.0;
  const std::set<Span> k(key.begin(), key.end());
  int common = 0;
  for (const Span& s : response) common += static_cast<int>(k.count(s));
  return 2.0 * common / static_cast<double>(key.size() + response.size());
}

std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& similarity) {
  const int rows = static_cast<int>(similarity.size());
  int cols = 0;
  for (const auto& row : similarity) cols = std::max<int>(cols, row.size());
  const int n = std::max(rows, cols);
  if (n == 0) return {};
  // Minimise -similarity on the zero-padded square with row/column potentials.
  auto cost = [&](int i, int j) {
    if (i >= rows || j >= static_cast<int>(similarity[i].size())) return 0.0;
    return -similarity[i][j];
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> min_value(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (reduced < min_value[j]) {
          min_value[j] = reduced;
          way[j] = j0;
        }
        if (min_value[j] < delta) {
          delta = min_value[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          min_value[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(rows, -1);
  for (int j = 1; j <= n; ++j) {
    const int i = match[j] - 1;
    if (i < rows && j - 1 < static_cast<int>(similarity[i].size())) assignment[i] = j - 1;
  }
  return assignment;
}

MetricCounts ceaf_phi4_counts(const ClusterSet& gold, const ClusterSet& pred) {
  index_clusters(gold);
  index_clusters(pred);
  std::vector<std::vector<double>> similarity(gold.clusters.size(),
                                              std::vector<double>(pred.clusters.size()));
  for (std::size_t i = 0; i < gold.clusters.size(); ++i)
    for (std::size_t j = 0; j < pred.clusters.size(); ++j)
      similarity[i][j] = phi4(gold.clusters[i], pred.clusters[j]);
  const auto assignment = max_weight_assignment(similarity);
  double total = 0.0;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] >= 0) total += similarity[i][assignment[i]];
  }
  MetricCounts c;
  c.recall_num = c.precision_num = total;
  c.recall_den = static_cast<double>(gold.clusters.size());
  c.precision_den = static_cast<double>(pred.clusters.size());
  return c;
}

MetricCounts mention_counts(const std::vector<Span>& gold, const std::vector<Span>& pred) {
  const std::set<Span> g(gold.begin(), gold.end());
  const std::set<Span> p(pred.begin(), pred.end());
  double common = 0.0;
  for (const Span& s : p) common += static_cast<double>(g.count(s));
  MetricCounts c;
  c.recall_num = c.precision_num = common;
  c.recall_den = static_cast<double>(g.size());
  c.precision_den = static_cast<double>(p.size());
  return c;
}

double conll_average(double muc_f1, double b_cubed_f1, double ceaf_f1) {
  return (muc_f1 + b_cubed_f1 + ceaf_f1) / 3.0;
}

namespace {
Prf percent(const Prf& p) { return {100.0 * p.recall, 100.0 * p.precision, 100.0 * p.f1}; }
}  // namespace

std::string MetricReport::format_table() const {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof(line), "%-10s %8s %10s %8s\n", "Metric", "Recall", "Precision", "F1");
  out += line;
  const std::pair<const char*, const Prf*> rows[] = {
      {"MUC", &muc}, {"B3", &b_cubed}, {"CEAF_phi4", &ceaf_phi4}, {"Mentions", &mentions}};
  for (const auto& [name, p] : rows) {
    std::snprintf(line, sizeof(line), "%-10s %8.1f %10.1f %8.1f\n", name, p->recall, p->precision,
                  p->f1);
    out += line;
  }
  std::snprintf(line, sizeof(line), "%-10s %8s %10s %8.1f\n", "Avg F1", "", "", conll_f1);
  out += line;
  return out;
}

MetricReport score_corpus(const std::vector<ClusterSet>& gold, const std::vector<ClusterSet>& pred) {
  if (gold.size() != pred.size()) throw DataError("score_corpus: document counts differ");
  MetricCounts m, b, c, mentions;
  for (std::size_t d = 0; d < gold.size(); ++d) {
    m += muc_counts(gold[d], pred[d]);
    b += b_cubed_counts(gold[d], pred[d]);
    c += ceaf_phi4_counts(gold[d], pred[d]);
    mentions += mention_counts(gold[d].mentions(), pred[d].mentions());
  }
  MetricReport report;
  report.muc = percent(m.prf());
  report.b_cubed = percent(b.prf());
  report.ceaf_phi4 = percent(c.prf());
  report.mentions = percent(mentions.prf());
  report.conll_f1 = conll_average(report.muc.f1, report.b_cubed.f1, report.ceaf_phi4.f1);
  return report;
}

MetricReport score_documents(const std::vector<Document>& key,
                             const std::vector<Document>& response) {
  std::map<std::string, const Document*> responses;
  for (const Document& d : response) {
    if (!responses.emplace(d.key(), &d).second) {
      throw DataError("document " + d.key() + " appears twice in the response");
    }
  }
  std::vector<ClusterSet> gold, pred;
  std::vector<std::string> missing;
  std::set<std::string> key_ids;
  for (const Document& d : key) {
    key_ids.insert(d.key());
    auto it = responses.find(d.key());
    if (it == responses.end()) {
      missing.push_back(d.key() + " (missing from response)");
      continue;
    }
    gold.push_back(d.gold_clusters);
    pred.push_back(it->second->gold_clusters);
  }
  for (const Document& d : response) {
    if (!key_ids.count(d.key())) missing.push_back(d.key() + " (missing from key)");
  }
  if (!missing.empty()) {
    std::string message = "key and response documents differ:";
    for (const auto& m : missing) message += " " + m;
    throw DataError(message);
  }
  return score_corpus(gold, pred);
}

MetricReport score_files(const std::string& key_path, const std::string& response_path) {
  return score_documents(read_conll_file(key_path), read_conll_file(response_path));
}

}  // namespace arcoref
