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

#ifndef ARCOREF_MENTION_DETECTOR_HPP_
#define ARCOREF_MENTION_DETECTOR_HPP_

#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "arcoref/autodiff.hpp"
#include "arcoref/config.hpp"
#include "arcoref/conll.hpp"
#include "arcoref/embeddings.hpp"
#include "arcoref/layers.hpp"
#include "arcoref/params.hpp"

namespace arcoref {

struct ScoredMention {
  Span span;
  double score = 0.0;

  bool operator==(const ScoredMention&) const = default;
};

// Sorted by descending score, ties by span; no duplicate spans.
using ScoredMentionList = std::vector<ScoredMention>;

struct DocumentMentions {
  std::string doc_id;
  int part_id = 0;
  ScoredMentionList mentions;

  std::string key() const;
  bool operator==(const DocumentMentions&) const = default;
};

// Top-k of a scored list under the detector's ordering. k is clamped to the
// list size.
ScoredMentionList top_mentions(ScoredMentionList all, int k);

// Biaffine span scorer over the detector's own BiLSTM:
//   score(b, e) = s_bᵀ U e_e + wᵀ [s_b; e_e] + bias
// with s = relu(W_s x + b_s) and e = relu(W_e x + b_e).
class MentionDetector {
 public:
  MentionDetector(const RunConfig& config, const EmbeddingProvider* provider, Rng& rng);

  const RunConfig& config() const { return config_; }
  nn::ParameterStore& params() { return params_; }
  const nn::ParameterStore& params() const { return params_; }

  struct Output {
    std::vector<Span> spans;  // every in-sentence span up to max_span_width
    nn::Var scores;           // spans x 1
  };

  Output score(nn::Graph& g, const Document& doc, bool training, Rng& rng) const;

  // Biaffine form on given start/end projections (n x P each) for the
  // listed (start row, end row) pairs.
  nn::Var biaffine(nn::Graph& g, nn::Var starts, nn::Var ends, std::span<const int> start_rows,
                   std::span<const int> end_rows) const;

  // Sigmoid cross-entropy against the gold mention set.
  nn::Var loss(nn::Graph& g, const Output& output, const Document& doc) const;

  // All spans with scores, sorted.
  ScoredMentionList score_all(const Document& doc) const;
  // Top max(1, floor(ratio * T)) spans.
  ScoredMentionList detect_high_recall(const Document& doc, double ratio) const;
  // Spans with positive score.
  ScoredMentionList detect_high_f1(const Document& doc) const;

  nn::Checkpoint to_checkpoint() const;
  static std::unique_ptr<MentionDetector> from_checkpoint(
      const nn::Checkpoint& checkpoint, const EmbeddingProvider* provider,
      const std::map<std::string, std::string>& overrides = {});

  nn::Parameter& bilinear() const { return *bilinear_; }
  nn::Parameter& linear() const { return *linear_; }
  nn::Parameter& bias() const { return *bias_; }
  const nn::Linear& start_projection() const { return start_projection_; }
  const nn::Linear& end_projection() const { return end_projection_; }

 private:
  RunConfig config_;
  nn::ParameterStore params_;
  const EmbeddingProvider* provider_;
  nn::BiLstm encoder_;
  nn::Linear start_projection_;
  nn::Linear end_projection_;
  nn::Parameter* bilinear_;
  nn::Parameter* linear_;
  nn::Parameter* bias_;
  double dropout_;
};

struct DetectorStep {
  long step = 0;
  std::string doc_key;
  double loss = 0.0;
};

// Trains for config.detector_steps steps, one document per step, cycling
// over a shuffled corpus. Throws DataError on an empty corpus.
std::vector<DetectorStep> train_detector(MentionDetector& detector,
                                         const std::vector<Document>& corpus, Rng& rng,
                                         const std::function<void(const DetectorStep&)>& observer = {});

// High-recall lists for a whole corpus.
std::vector<DocumentMentions> detect_corpus(const MentionDetector& detector,
                                            const std::vector<Document>& corpus, double ratio);

// `doc_id<TAB>part<TAB>start<TAB>end<TAB>score`, one mention per line,
// documents contiguous.
void write_mentions(std::ostream& out, const std::vector<DocumentMentions>& documents);
std::vector<DocumentMentions> read_mentions(std::istream& in);
void write_mentions_file(const std::string& path, const std::vector<DocumentMentions>& documents);
std::vector<DocumentMentions> read_mentions_file(const std::string& path);

// Throws DataError when a span lies outside its document or a document key
// is unknown.
void validate_mentions(const std::vector<DocumentMentions>& mentions,
                       const std::vector<Document>& corpus);

}  // namespace arcoref

#endif  // ARCOREF_MENTION_DETECTOR_HPP_
