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

#ifndef ARCOREF_TRAINER_HPP_
#define ARCOREF_TRAINER_HPP_

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "arcoref/config.hpp"
#include "arcoref/conll.hpp"
#include "arcoref/coref_model.hpp"
#include "arcoref/mention_detector.hpp"
#include "arcoref/metrics.hpp"

namespace arcoref {

enum class CandidateSource { kEndToEnd, kExternal };

std::string to_string(CandidateSource source);

// n / N. Throws ConfigError when N <= 0 or n is outside [0, N].
double pipeline_ratio(long n, long total);

// EXTERNAL when draw <= n / N, END_TO_END otherwise.
CandidateSource choose_candidate_source(long n, long total, double draw);

// Candidate spans per document key ("doc_id/part").
using ExternalCandidates = std::map<std::string, std::vector<Span>>;

ExternalCandidates candidates_from_mentions(const std::vector<DocumentMentions>& mentions);

struct TrainStep {
  long step = 0;
  std::string doc_key;
  CandidateSource source = CandidateSource::kEndToEnd;
  double draw = 0.0;
  double loss = 0.0;
};

struct Evaluation {
  long step = 0;
  double conll_f1 = 0.0;
};

struct TrainResult {
  std::vector<TrainStep> steps;
  std::vector<Evaluation> evaluations;
  long external_steps = 0;
  // Step of the restored parameters; -1 when no dev set was given.
  long best_step = -1;
  double best_dev_f1 = 0.0;
};

struct TrainData {
  const std::vector<Document>* train = nullptr;
  const ExternalCandidates* train_candidates = nullptr;
  const std::vector<Document>* dev = nullptr;
  const ExternalCandidates* dev_candidates = nullptr;
};

// Runs config.training_steps steps of `model.config().mode`, one document per
// step cycling over a reshuffled corpus. The schedule draw is taken from
// `rng` at every step in every mode. With a dev set the model is evaluated
// every eval_interval steps and after the last step, and the best
// CoNLL-average parameters are restored at the end.
//
// Throws DataError naming the document when a mode that needs external
// candidates lacks them.
TrainResult train_coref(CorefModel& model, const TrainData& data, Rng& rng,
                        const std::function<void(const TrainStep&)>& observer = {});

// Predicted clusters per document. External candidates are used when given.
std::vector<ClusterSet> predict_corpus(const CorefModel& model, const std::vector<Document>& docs,
                                       const ExternalCandidates* candidates = nullptr);

// Inference runs in pipeline fashion for pipeline- and annealing-trained
// models and end to end otherwise.
MetricReport evaluate_on_split(const CorefModel& model, const std::vector<Document>& docs,
                               const ExternalCandidates* candidates = nullptr);

// Whether inference for this mode reads external candidates.
bool uses_external_candidates(TrainingMode mode);

// Fraction of gold mentions (width <= max_width) found in each document's
// kept candidates, micro-averaged.
double candidate_recall(const std::vector<Document>& docs,
                        const std::vector<std::vector<Span>>& candidates, int max_width);

// Kept (pruned) mention spans of the model per document.
std::vector<std::vector<Span>> pruned_candidates(const CorefModel& model,
                                                 const std::vector<Document>& docs);

}  // namespace arcoref

#endif  // ARCOREF_TRAINER_HPP_
