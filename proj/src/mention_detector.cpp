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

#include "arcoref/mention_detector.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "arcoref/coref_model.hpp"
#include "arcoref/error.hpp"

namespace arcoref {

std::string DocumentMentions::key() const { return doc_id + "/" + std::to_string(part_id); }

namespace {

bool mention_before(const ScoredMention& a, const ScoredMention& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.span < b.span;
}

const RunConfig& checked_detector_config(const RunConfig& config,
                                         const EmbeddingProvider* provider) {
  config.validate();
  if (provider->fixed_dimension(/*contextual_only=*/true) == 0) {
    throw ConfigError("the mention detector needs contextual embeddings");
  }
  return config;
}

}  // namespace

ScoredMentionList top_mentions(ScoredMentionList all, int k) {
  k = std::clamp(k, 0, static_cast<int>(all.size()));
  std::partial_sort(all.begin(), all.begin() + k, all.end(), mention_before);
  all.resize(k);
  return all;
}

MentionDetector::MentionDetector(const RunConfig& config, const EmbeddingProvider* provider,
                                 Rng& rng)
    : config_(checked_detector_config(config, provider)),
      provider_(provider),
      encoder_(params_, "md/encoder", provider->fixed_dimension(true), config.lstm_layers,
               config.lstm_size, config.lstm_dropout, rng),
      start_projection_(params_, "md/start", 2 * config.lstm_size,
                        config.detector_projection_size, rng),
      end_projection_(params_, "md/end", 2 * config.lstm_size, config.detector_projection_size,
                      rng),
      bilinear_(&params_.add("md/bilinear", config.detector_projection_size,
                             config.detector_projection_size, nn::Init::kGlorotUniform, rng)),
      linear_(&params_.add("md/linear", 2 * config.detector_projection_size, 1,
                           nn::Init::kGlorotUniform, rng)),
      bias_(&params_.add("md/bias", 1, 1, nn::Init::kZeros, rng)),
      dropout_(config.ffnn_dropout) {}

nn::Var MentionDetector::biaffine(nn::Graph& g, nn::Var starts, nn::Var ends,
                                  std::span<const int> start_rows,
                                  std::span<const int> end_rows) const {
  nn::Var pairwise = nn::matmul(nn::matmul(starts, g.parameter(*bilinear_)), nn::transpose(ends));
  nn::Var bilinear_part = nn::gather_elements(pairwise, start_rows, end_rows);
  nn::Var concat =
      nn::concat_cols({nn::gather_rows(starts, start_rows), nn::gather_rows(ends, end_rows)});
  nn::Var linear_part = nn::matmul(concat, g.parameter(*linear_));
  return nn::add_row(nn::add(bilinear_part, linear_part), g.parameter(*bias_));
}

MentionDetector::Output MentionDetector::score(nn::Graph& g, const Document& doc, bool training,
                                               Rng& rng) const {
  if (doc.length() == 0) throw DataError("document " + doc.key() + " has no tokens");
  Output out;
  nn::Var embedded = nn::dropout(g.constant(provider_->fixed_features(doc, true)),
                                 config_.embedding_dropout, training, rng);
  std::vector<nn::Var> sentences;
  for (const auto& [begin, end] : doc.sentence_ranges()) {
    std::vector<int> rows(end - begin);
    std::iota(rows.begin(), rows.end(), begin);
    sentences.push_back(encoder_.forward(g, nn::gather_rows(embedded, rows), training, rng));
  }
  nn::Var tokens = sentences.size() == 1 ? sentences[0] : nn::concat_rows(sentences);
  nn::Var starts = nn::dropout(nn::relu(start_projection_.forward(g, tokens)), dropout_, training, rng);
  nn::Var ends = nn::dropout(nn::relu(end_projection_.forward(g, tokens)), dropout_, training, rng);
  out.spans = enumerate_spans(doc, config_.max_span_width);
  std::vector<int> start_rows, end_rows;
  for (const Span& s : out.spans) {
    start_rows.push_back(s.start);
    end_rows.push_back(s.end);
  }
  out.scores = biaffine(g, starts, ends, start_rows, end_rows);
  return out;
}

nn::Var MentionDetector::loss(nn::Graph&, const Output& output, const Document& doc) const {
  const auto gold = doc.gold_clusters.mentions();
  const std::set<Span> gold_set(gold.begin(), gold.end());
  std::vector<double> labels;
  labels.reserve(output.spans.size());
  for (const Span& s : output.spans) labels.push_back(gold_set.count(s) ? 1.0 : 0.0);
  return nn::sigmoid_cross_entropy(output.scores, labels);
}

ScoredMentionList MentionDetector::score_all(const Document& doc) const {
  nn::Graph g;
  Rng unused(0);
  const Output out = score(g, doc, /*training=*/false, unused);
  ScoredMentionList all;
  all.reserve(out.spans.size());
  for (std::size_t i = 0; i < out.spans.size(); ++i) {
    all.push_back({out.spans[i], out.scores.value()[static_cast<int>(i)]});
  }
  std::sort(all.begin(), all.end(), mention_before);
  return all;
}

ScoredMentionList MentionDetector::detect_high_recall(const Document& doc, double ratio) const {
  return top_mentions(score_all(doc), pruned_count(doc.length(), ratio));
}

ScoredMentionList MentionDetector::detect_high_f1(const Document& doc) const {
  ScoredMentionList all = score_all(doc);
  all.erase(std::find_if(all.begin(), all.end(), [](const ScoredMention& m) { return m.score <= 0; }),
            all.end());
  return all;
}

nn::Checkpoint MentionDetector::to_checkpoint() const {
  nn::Checkpoint checkpoint;
  checkpoint.config = config_.to_map();
  checkpoint.config["model"] = "detector";
  checkpoint.params = params_.snapshot();
  return checkpoint;
}

std::unique_ptr<MentionDetector> MentionDetector::from_checkpoint(
    const nn::Checkpoint& checkpoint, const EmbeddingProvider* provider,
    const std::map<std::string, std::string>& overrides) {
  auto values = checkpoint.config;
  auto kind = values.find("model");
  if (kind == values.end() || kind->second != "detector") {
    throw DataError("checkpoint does not hold a mention detector");
  }
  values.erase(kind);
  RunConfig config = RunConfig::from_map(values);
  for (const auto& [key, value] : overrides) config.set(key, value);
  Rng rng(config.seed);
  auto detector = std::make_unique<MentionDetector>(config, provider, rng);
  detector->params().restore(checkpoint.params);
  return detector;
}

std::vector<DetectorStep> train_detector(MentionDetector& detector,
                                         const std::vector<Document>& corpus, Rng& rng,
                                         const std::function<void(const DetectorStep&)>& observer) {
  if (corpus.empty()) throw DataError("cannot train the mention detector on an empty corpus");
  nn::Adam adam(nn::AdamOptions{detector.config().learning_rate});
  const auto params = detector.params().all();
  std::vector<int> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<DetectorStep> history;
  std::size_t cursor = order.size();
  for (long step = 0; step < detector.config().detector_steps; ++step) {
    if (cursor == order.size()) {
      std::shuffle(order.begin(), order.end(), rng);
      cursor = 0;
    }
    const Document& doc = corpus[order[cursor++]];
    detector.params().zero_grad();
    nn::Graph g;
    const auto out = detector.score(g, doc, /*training=*/true, rng);
    nn::Var loss = detector.loss(g, out, doc);
    g.backward(loss);
    adam.step(params);
    history.push_back({step, doc.key(), loss.scalar()});
    if (observer) observer(history.back());
  }
  return history;
}

std::vector<DocumentMentions> detect_corpus(const MentionDetector& detector,
                                            const std::vector<Document>& corpus, double ratio) {
  std::vector<DocumentMentions> result;
  result.reserve(corpus.size());
  for (const Document& doc : corpus) {
    result.push_back({doc.doc_id, doc.part_id, detector.detect_high_recall(doc, ratio)});
  }
  return result;
}

void write_mentions(std::ostream& out, const std::vector<DocumentMentions>& documents) {
  char score[64];
  for (const auto& doc : documents) {
    for (const auto& m : doc.mentions) {
      std::snprintf(score, sizeof(score), "%.17g", m.score);
      out << doc.doc_id << '\t' << doc.part_id << '\t' << m.span.start << '\t' << m.span.end << '\t'
          << score << '\n';
    }
  }
}

std::vector<DocumentMentions> read_mentions(std::istream& in) {
  std::vector<DocumentMentions> documents;
  std::set<std::string> finished;
  std::set<Span> seen;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream stream(line);
    std::string field;
    while (std::getline(stream, field, '\t')) fields.push_back(field);
    if (fields.size() != 5) throw ParseError("expected 5 tab-separated fields", number);
    DocumentMentions header;
    ScoredMention mention;
    try {
      std::size_t used = 0;
      header.doc_id = fields[0];
      header.part_id = std::stoi(fields[1], &used);
      if (used != fields[1].size()) throw std::invalid_argument("part");
      mention.span.start = std::stoi(fields[2], &used);
      if (used != fields[2].size()) throw std::invalid_argument("start");
      mention.span.end = std::stoi(fields[3], &used);
      if (used != fields[3].size()) throw std::invalid_argument("end");
      mention.score = std::stod(fields[4], &used);
      if (used != fields[4].size()) throw std::invalid_argument("score");
    } catch (const std::logic_error&) {
      throw ParseError("malformed number in mention record", number);
    }
    if (mention.span.start < 0 || mention.span.end < mention.span.start) {
      throw ParseError("invalid span", number);
    }
    if (documents.empty() || documents.back().key() != header.key()) {
      if (!documents.empty()) finished.insert(documents.back().key());
      if (finished.count(header.key())) {
        throw ParseError("records of document " + header.key() + " are not contiguous", number);
      }
      documents.push_back(std::move(header));
      seen.clear();
    }
    if (!seen.insert(mention.span).second) throw ParseError("duplicate span", number);
    documents.back().mentions.push_back(mention);
  }
  return documents;
}

void write_mentions_file(const std::string& path, const std::vector<DocumentMentions>& documents) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write mention file '" + path + "'");
  write_mentions(out, documents);
  if (!out) throw DataError("failed writing mention file '" + path + "'");
}

std::vector<DocumentMentions> read_mentions_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open mention file '" + path + "'");
  try {
    return read_mentions(in);
  } catch (const ParseError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void validate_mentions(const std::vector<DocumentMentions>& mentions,
                       const std::vector<Document>& corpus) {
  std::map<std::string, int> lengths;
  for (const Document& doc : corpus) lengths[doc.key()] = doc.length();
  for (const auto& doc : mentions) {
    auto it = lengths.find(doc.key());
    if (it == lengths.end()) throw DataError("mentions for unknown document " + doc.key());
    for (const auto& m : doc.mentions) {
      if (m.span.start < 0 || m.span.end < m.span.start || m.span.end >= it->second) {
        throw DataError("mention [" + std::to_string(m.span.start) + "," +
                        std::to_string(m.span.end) + "] outside document " + doc.key());
      }
    }
  }
}

}  // namespace arcoref
