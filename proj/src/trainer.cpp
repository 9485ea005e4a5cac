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

#include "arcoref/trainer.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "arcoref/error.hpp"
#include "arcoref/log.hpp"

namespace arcoref {

std::string to_string(CandidateSource source) {
  return source == CandidateSource::kExternal ? "external" : "end_to_end";
}

double pipeline_ratio(long n, long total) {
  if (total <= 0) throw ConfigError("the schedule needs a positive number of training steps");
  if (n < 0 || n > total) {
    throw ConfigError("step " + std::to_string(n) + " outside [0, " + std::to_string(total) + "]");
  }
  return static_cast<double>(n) / static_cast<double>(total);
}

CandidateSource choose_candidate_source(long n, long total, double draw) {
  return draw <= pipeline_ratio(n, total) ? CandidateSource::kExternal
                                          : CandidateSource::kEndToEnd;
}

ExternalCandidates candidates_from_mentions(const std::vector<DocumentMentions>& mentions) {
  ExternalCandidates candidates;
  for (const auto& doc : mentions) {
    auto& spans = candidates[doc.key()];
    for (const auto& m : doc.mentions) spans.push_back(m.span);
  }
  return candidates;
}

bool uses_external_candidates(TrainingMode mode) { return mode != TrainingMode::kEndToEnd; }

namespace {

const std::vector<Span>& candidates_for(const ExternalCandidates* candidates, const Document& doc) {
  if (!candidates) throw DataError("no external candidates given for document " + doc.key());
  auto it = candidates->find(doc.key());
  if (it == candidates->end()) throw DataError("no external candidates for document " + doc.key());
  return it->second;
}

void warn_unreachable_gold(const std::vector<Document>& docs, int max_width) {
  int dropped = 0;
  for (const Document& doc : docs)
    for (const Span& s : doc.gold_clusters.mentions()) dropped += s.width() > max_width;
  if (dropped > 0) {
    log_warning(std::to_string(dropped) + " gold mentions wider than " + std::to_string(max_width) +
                " tokens are unreachable and dropped from the gold antecedent sets");
  }
}

}  // namespace

std::vector<ClusterSet> predict_corpus(const CorefModel& model, const std::vector<Document>& docs,
                                       const ExternalCandidates* candidates) {
  std::vector<ClusterSet> predictions;
  predictions.reserve(docs.size());
  for (const Document& doc : docs) {
    const std::vector<Span>* external = candidates ? &candidates_for(candidates, doc) : nullptr;
    predictions.push_back(model.predict(doc, external));
  }
  return predictions;
}

MetricReport evaluate_on_split(const CorefModel& model, const std::vector<Document>& docs,
                               const ExternalCandidates* candidates) {
  const bool external = uses_external_candidates(model.config().mode);
  if (external && !candidates) {
    throw DataError("a " + to_string(model.config().mode) +
                    "-trained model is evaluated with external candidates, but none were given");
  }
  std::vector<ClusterSet> gold;
  for (const Document& doc : docs) gold.push_back(doc.gold_clusters);
  return score_corpus(gold, predict_corpus(model, docs, external ? candidates : nullptr));
}

TrainResult train_coref(CorefModel& model, const TrainData& data, Rng& rng,
                        const std::function<void(const TrainStep&)>& observer) {
  const RunConfig& config = model.config();
  if (!data.train || data.train->empty()) throw DataError("the training corpus is empty");
  const auto& train = *data.train;
  const bool needs_external = uses_external_candidates(config.mode);
  if (needs_external) {
    for (const Document& doc : train) candidates_for(data.train_candidates, doc);
  }
  if (data.dev && needs_external) {
    for (const Document& doc : *data.dev) candidates_for(data.dev_candidates, doc);
  }
  warn_unreachable_gold(train, config.max_span_width);

  nn::Adam adam(nn::AdamOptions{config.learning_rate});
  const auto params = model.params().all();
  const long total = config.training_steps;
  std::vector<int> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();

  TrainResult result;
  std::map<std::string, nn::Tensor> best;
  auto evaluate = [&](long step) {
    const MetricReport report = evaluate_on_split(model, *data.dev, data.dev_candidates);
    result.evaluations.push_back({step, report.conll_f1});
    log_info("step " + std::to_string(step) + " dev Avg F1 " + std::to_string(report.conll_f1));
    if (result.best_step < 0 || report.conll_f1 > result.best_dev_f1) {
      result.best_step = step;
      result.best_dev_f1 = report.conll_f1;
      best = model.params().snapshot();
    }
  };

  for (long n = 0; n <= total; ++n) {
    if (cursor == order.size()) {
      std::shuffle(order.begin(), order.end(), rng);
      cursor = 0;
    }
    const Document& doc = train[order[cursor++]];
    TrainStep step;
    step.step = n;
    step.doc_key = doc.key();
    step.draw = uniform01(rng);
    switch (config.mode) {
      case TrainingMode::kEndToEnd: step.source = CandidateSource::kEndToEnd; break;
      case TrainingMode::kPipeline: step.source = CandidateSource::kExternal; break;
      case TrainingMode::kAnnealing:
        step.source = choose_candidate_source(n, total, step.draw);
        break;
    }
    const std::vector<Span>* external = nullptr;
    if (step.source == CandidateSource::kExternal) {
      external = &candidates_for(data.train_candidates, doc);
      ++result.external_steps;
    }

    model.params().zero_grad();
    nn::Graph g;
    const CorefForward forward = model.forward(g, doc, external, /*training=*/true, rng);
    nn::Var loss = model.loss(g, forward, doc.gold_clusters);
    step.loss = loss.scalar();
    if (loss.requires_grad()) {
      g.backward(loss);
      adam.step(params);
    }
    result.steps.push_back(step);
    if (observer) observer(step);

    if (data.dev && ((n + 1) % config.eval_interval == 0 || n == total)) evaluate(n);
  }
  if (data.dev && result.best_step >= 0) model.params().restore(best);
  return result;
}

double candidate_recall(const std::vector<Document>& docs,
                        const std::vector<std::vector<Span>>& candidates, int max_width) {
  if (docs.size() != candidates.size()) throw DataError("candidate_recall: document counts differ");
  double found = 0.0, total = 0.0;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const std::set<Span> kept(candidates[d].begin(), candidates[d].end());
    for (const Span& s : docs[d].gold_clusters.mentions()) {
      if (s.width() > max_width) continue;
      total += 1.0;
      found += static_cast<double>(kept.count(s));
    }
  }
  return total > 0.0 ? found / total : 0.0;
}

std::vector<std::vector<Span>> pruned_candidates(const CorefModel& model,
                                                 const std::vector<Document>& docs) {
  std::vector<std::vector<Span>> result;
  for (const Document& doc : docs) {
    nn::Graph g;
    Rng unused(0);
    result.push_back(model.forward(g, doc, nullptr, /*training=*/false, unused).top_spans);
  }
  return result;
}

}  // namespace arcoref
