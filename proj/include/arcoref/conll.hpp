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

#ifndef ARCOREF_CONLL_HPP_
#define ARCOREF_CONLL_HPP_

#include <compare>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace arcoref {

struct Token {
  std::string surface;
  int sentence_index = 0;
  int doc_token_index = 0;
  // Columns between the word and the coreference column, kept verbatim.
  std::vector<std::string> extra_columns;

  bool operator==(const Token&) const = default;
};

// Inclusive token interval [start, end] over document token indices.
struct Span {
  int start = 0;
  int end = 0;

  int width() const { return end - start + 1; }

  auto operator<=>(const Span&) const = default;
};

// A partition of a subset of spans into entities. Order of clusters and of
// spans within a cluster is not significant; use canonical() to compare.
struct ClusterSet {
  std::vector<std::vector<Span>> clusters;

  bool empty() const { return clusters.empty(); }
  std::size_t size() const { return clusters.size(); }

  // Spans sorted within each cluster, clusters sorted by their first span,
  // empty clusters removed.
  ClusterSet canonical() const;

  // Sorted union of all spans.
  std::vector<Span> mentions() const;

  bool operator==(const ClusterSet& other) const;
};

struct Document {
  std::string doc_id;
  int part_id = 0;
  std::vector<Token> tokens;
  ClusterSet gold_clusters;

  int length() const { return static_cast<int>(tokens.size()); }
  int num_sentences() const {
    return tokens.empty() ? 0 : tokens.back().sentence_index + 1;
  }
  // Half-open token ranges [begin, end) of each sentence.
  std::vector<std::pair<int, int>> sentence_ranges() const;
  // "<doc_id>/<part>" key used to align documents across files.
  std::string key() const;

  bool operator==(const Document&) const = default;
};

// Reads CoNLL-2012 documents. Throws ParseError on malformed input.
std::vector<Document> parse_conll(std::istream& in);
std::vector<Document> parse_conll_string(std::string_view text);
std::vector<Document> read_conll_file(const std::string& path);

// Writes CoNLL-2012 documents with clusters renumbered densely. Throws
// DataError when a span is out of range.
void write_conll(std::ostream& out, const std::vector<Document>& documents);
std::string write_conll_string(const std::vector<Document>& documents);
void write_conll_file(const std::string& path, const std::vector<Document>& documents);

// Validates span bounds against a document; throws DataError.
void validate_spans(const Document& doc, const ClusterSet& clusters);

}  // namespace arcoref

#endif  // ARCOREF_CONLL_HPP_
