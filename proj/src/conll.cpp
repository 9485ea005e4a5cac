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

#include "arcoref/conll.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "arcoref/error.hpp"

namespace arcoref {

ClusterSet ClusterSet::canonical() const {
  ClusterSet out;
  for (const auto& cluster : clusters) {
    if (cluster.empty()) continue;
    auto sorted = cluster;
    std::sort(sorted.begin(), sorted.end());
    out.clusters.push_back(std::move(sorted));
  }
  std::sort(out.clusters.begin(), out.clusters.end());
  return out;
}

std::vector<Span> ClusterSet::mentions() const {
  std::vector<Span> all;
  for (const auto& cluster : clusters) all.insert(all.end(), cluster.begin(), cluster.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

bool ClusterSet::operator==(const ClusterSet& other) const {
  return canonical().clusters == other.canonical().clusters;
}

std::vector<std::pair<int, int>> Document::sentence_ranges() const {
  std::vector<std::pair<int, int>> ranges;
  int begin = 0;
  for (int t = 1; t <= length(); ++t) {
    if (t == length() || tokens[t].sentence_index != tokens[t - 1].sentence_index) {
      ranges.emplace_back(begin, t);
      begin = t;
    }
  }
  return ranges;
}

std::string Document::key() const { return doc_id + "/" + std::to_string(part_id); }

namespace {

std::vector<std::string> split_whitespace(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream in(line);
  std::string field;
  while (in >> field) fields.push_back(field);
  return fields;
}

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

struct OpenMention {
  int start;
  std::size_t line;
};

// Builds one document while lines are consumed.
class DocumentBuilder {
 public:
  DocumentBuilder(std::string doc_id, int part, std::size_t begin_line)
      : begin_line_(begin_line) {
    doc_.doc_id = std::move(doc_id);
    doc_.part_id = part;
  }

  std::size_t begin_line() const { return begin_line_; }

  void sentence_break() {
    if (sentence_has_tokens_) {
      ++sentence_;
      sentence_has_tokens_ = false;
    }
  }

  void add_token(const std::vector<std::string>& fields, std::size_t line) {
    if (fields.size() < 5) {
      throw ParseError("expected at least 5 columns, found " + std::to_string(fields.size()),
                       line);
    }
    Token token;
    token.surface = fields[3];
    token.sentence_index = sentence_;
    token.doc_token_index = doc_.length();
    token.extra_columns.assign(fields.begin() + 4, fields.end() - 1);
    doc_.tokens.push_back(std::move(token));
    sentence_has_tokens_ = true;
    parse_coref_cell(fields.back(), line);
  }

  Document finish(std::size_t line) {
    for (const auto& [id, stack] : open_) {
      if (!stack.empty()) {
        throw ParseError("unclosed mention of cluster " + std::to_string(id) +
                             " opened on line " + std::to_string(stack.back().line),
                         line);
      }
    }
    for (auto& [id, spans] : spans_) doc_.gold_clusters.clusters.push_back(std::move(spans));
    return std::move(doc_);
  }

 private:
  void parse_coref_cell(const std::string& cell, std::size_t line) {
    if (cell == "-") return;
    const int position = doc_.length() - 1;
    std::size_t i = 0;
    while (i < cell.size()) {
      const char c = cell[i];
      if (c == '|') {
        ++i;
        continue;
      }
      const bool opens = c == '(';
      if (opens) ++i;
      const std::size_t digits_begin = i;
      while (i < cell.size() && std::isdigit(static_cast<unsigned char>(cell[i]))) ++i;
      if (i == digits_begin) {
        throw ParseError("non-numeric cluster id in coreference cell '" + cell + "'", line);
      }
      const int id = std::stoi(cell.substr(digits_begin, i - digits_begin));
      const bool closes = i < cell.size() && cell[i] == ')';
      if (closes) ++i;
      if (i < cell.size() && cell[i] != '|' && cell[i] != '(') {
        throw ParseError("unexpected character in coreference cell '" + cell + "'", line);
      }
      if (opens && closes) {
        add_span(id, {position, position});
      } else if (opens) {
        open_[id].push_back({position, line});
      } else if (closes) {
        auto& stack = open_[id];
        if (stack.empty()) {
          throw ParseError("closing bracket for cluster " + std::to_string(id) +
                               " without matching open",
                           line);
        }
        add_span(id, {stack.back().start, position});
        stack.pop_back();
      } else {
        throw ParseError("cluster id without bracket in coreference cell '" + cell + "'", line);
      }
    }
  }

  void add_span(int id, Span span) {
    auto& spans = spans_[id];
    if (std::find(spans.begin(), spans.end(), span) == spans.end()) spans.push_back(span);
  }

  Document doc_;
  std::size_t begin_line_;
  int sentence_ = 0;
  bool sentence_has_tokens_ = false;
  std::map<int, std::vector<OpenMention>> open_;
  std::map<int, std::vector<Span>> spans_;
};

bool parse_begin_line(const std::string& line, std::string* doc_id, int* part) {
  static const std::string kBegin = "#begin document";
  if (line.compare(0, kBegin.size(), kBegin) != 0) return false;
  std::string rest = line.substr(kBegin.size());
  const auto open = rest.find('(');
  const auto close = rest.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    std::istringstream in(rest);
    in >> *doc_id;
  } else {
    *doc_id = rest.substr(open + 1, close - open - 1);
    rest = rest.substr(close + 1);
  }
  *part = 0;
  const auto part_pos = rest.find("part");
  if (part_pos != std::string::npos) {
    std::istringstream in(rest.substr(part_pos + 4));
    if (!(in >> *part)) *part = 0;
  }
  return true;
}

}  // namespace

std::vector<Document> parse_conll(std::istream& in) {
  std::vector<Document> documents;
  std::unique_ptr<DocumentBuilder> current;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string doc_id;
    int part = 0;
    if (parse_begin_line(line, &doc_id, &part)) {
      if (current) {
        throw ParseError("document '" + doc_id + "' begins before previous document ended",
                         line_number);
      }
      current = std::make_unique<DocumentBuilder>(doc_id, part, line_number);
      continue;
    }
    if (line.rfind("#end document", 0) == 0) {
      if (!current) throw ParseError("#end document without #begin document", line_number);
      documents.push_back(current->finish(line_number));
      current.reset();
      continue;
    }
    if (is_blank(line)) {
      if (current) current->sentence_break();
      continue;
    }
    if (line[0] == '#') continue;
    if (!current) throw ParseError("token line outside of a document", line_number);
    current->add_token(split_whitespace(line), line_number);
  }
  if (current) {
    throw ParseError("missing #end document for document begun on line " +
                         std::to_string(current->begin_line()),
                     line_number + 1);
  }
  return documents;
}

std::vector<Document> parse_conll_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_conll(in);
}

std::vector<Document> read_conll_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open CoNLL file '" + path + "'");
  return parse_conll(in);
}

void validate_spans(const Document& doc, const ClusterSet& clusters) {
  for (const auto& cluster : clusters.clusters) {
    for (const auto& span : cluster) {
      if (span.start < 0 || span.end < span.start || span.end >= doc.length()) {
        throw DataError("span [" + std::to_string(span.start) + "," + std::to_string(span.end) +
                        "] out of range for document " + doc.key() + " of length " +
                        std::to_string(doc.length()));
      }
    }
  }
}

namespace {

std::vector<std::string> coref_cells(const Document& doc) {
  const int n = doc.length();
  struct Mark {
    int id;
    Span span;
  };
  std::vector<std::vector<Mark>> starts(n), ends(n);
  const ClusterSet canonical = doc.gold_clusters.canonical();
  for (std::size_t id = 0; id < canonical.clusters.size(); ++id) {
    for (const auto& span : canonical.clusters[id]) {
      starts[span.start].push_back({static_cast<int>(id), span});
      if (span.end != span.start) ends[span.end].push_back({static_cast<int>(id), span});
    }
  }
  std::vector<std::string> cells(n);
  for (int t = 0; t < n; ++t) {
    // Outer mentions open first; inner mentions close first.
    std::sort(starts[t].begin(), starts[t].end(), [](const Mark& a, const Mark& b) {
      if (a.span.end != b.span.end) return a.span.end > b.span.end;
      return a.id < b.id;
    });
    std::sort(ends[t].begin(), ends[t].end(), [](const Mark& a, const Mark& b) {
      if (a.span.start != b.span.start) return a.span.start > b.span.start;
      return a.id < b.id;
    });
    std::vector<std::string> pieces;
    for (const auto& m : starts[t]) {
      pieces.push_back("(" + std::to_string(m.id) + (m.span.end == t ? ")" : ""));
    }
    for (const auto& m : ends[t]) pieces.push_back(std::to_string(m.id) + ")");
    if (pieces.empty()) {
      cells[t] = "-";
    } else {
      std::string cell;
      for (std::size_t k = 0; k < pieces.size(); ++k) {
        if (k) cell += '|';
        cell += pieces[k];
      }
      cells[t] = std::move(cell);
    }
  }
  return cells;
}

std::string format_part(int part) {
  std::string digits = std::to_string(part);
  if (digits.size() < 3) digits.insert(0, 3 - digits.size(), '0');
  return digits;
}

}  // namespace

void write_conll(std::ostream& out, const std::vector<Document>& documents) {
  for (const auto& doc : documents) {
    validate_spans(doc, doc.gold_clusters);
    const auto cells = coref_cells(doc);
    out << "#begin document (" << doc.doc_id << "); part " << format_part(doc.part_id) << "\n";
    int word_in_sentence = 0;
    for (int t = 0; t < doc.length(); ++t) {
      const Token& token = doc.tokens[t];
      if (t > 0 && token.sentence_index != doc.tokens[t - 1].sentence_index) {
        out << "\n";
        word_in_sentence = 0;
      }
      out << doc.doc_id << '\t' << doc.part_id << '\t' << word_in_sentence++ << '\t'
          << token.surface;
      for (const auto& column : token.extra_columns) out << '\t' << column;
      out << '\t' << cells[t] << "\n";
    }
    out << "\n#end document\n";
  }
}

std::string write_conll_string(const std::vector<Document>& documents) {
  std::ostringstream out;
  write_conll(out, documents);
  return out.str();
}

void write_conll_file(const std::string& path, const std::vector<Document>& documents) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write CoNLL file '" + path + "'");
  write_conll(out, documents);
}

}  // namespace arcoref
