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

#include <gtest/gtest.h>

#include "arcoref/error.hpp"
#include "fixtures.hpp"

namespace arcoref {
namespace {

const char* kSample =
    "#begin document (bc/sample); part 002\n"
    "bc/sample\t2\t0\tقال\tVBD\t-\n"
    "bc/sample\t2\t1\tالرئيس\tNN\t(0\n"
    "bc/sample\t2\t2\tالمصري\tJJ\t0)|(1)\n"
    "\n"
    "bc/sample\t2\t0\tإنه\tPRP\t(0)\n"
    "bc/sample\t2\t1\tسعيد\tJJ\t-\n"
    "\n"
    "#end document\n";

TEST(ConllTest, ParsesTokensSentencesAndClusters) {
  const auto docs = parse_conll_string(kSample);
  ASSERT_EQ(docs.size(), 1u);
  const Document& doc = docs[0];
  EXPECT_EQ(doc.doc_id, "bc/sample");
  EXPECT_EQ(doc.part_id, 2);
  EXPECT_EQ(doc.key(), "bc/sample/2");
  ASSERT_EQ(doc.length(), 5);
  EXPECT_EQ(doc.num_sentences(), 2);
  EXPECT_EQ(doc.tokens[3].surface, "إنه");
  EXPECT_EQ(doc.tokens[3].sentence_index, 1);
  EXPECT_EQ(doc.tokens[3].doc_token_index, 3);
  EXPECT_EQ(doc.tokens[1].extra_columns, std::vector<std::string>{"NN"});
  const auto ranges = doc.sentence_ranges();
  EXPECT_EQ(ranges, (std::vector<std::pair<int, int>>{{0, 3}, {3, 5}}));
  const ClusterSet expected{{{{1, 2}, {3, 3}}, {{2, 2}}}};
  EXPECT_EQ(doc.gold_clusters, expected);
}

TEST(ConllTest, NestedSameClusterMentions) {
  const auto docs = parse_conll_string(
      "#begin document (d); part 000\n"
      "d\t0\t0\ta\t(3\n"
      "d\t0\t1\tb\t(3)\n"
      "d\t0\t2\tc\t3)\n"
      "#end document\n");
  EXPECT_EQ(docs[0].gold_clusters, (ClusterSet{{{{0, 2}, {1, 1}}}}));
}

TEST(ConllTest, RoundTripPreservesEverything) {
  const auto docs = parse_conll_string(kSample);
  const auto again = parse_conll_string(write_conll_string(docs));
  ASSERT_EQ(again.size(), 1u);
  EXPECT_EQ(again[0].tokens, docs[0].tokens);
  EXPECT_EQ(again[0].gold_clusters, docs[0].gold_clusters);
  EXPECT_EQ(again[0].key(), docs[0].key());
}

TEST(ConllTest, WriterOutputIsAFixedPoint) {
  const std::string once = write_conll_string(parse_conll_string(kSample));
  EXPECT_EQ(write_conll_string(parse_conll_string(once)), once);
}

TEST(ConllTest, EmptyDocumentAndComments) {
  const auto docs = parse_conll_string(
      "# a comment\n"
      "#begin document (empty); part 000\n"
      "#end document\n"
      "#begin document (one); part 001\n"
      "one\t1\t0\tx\t-\n"
      "#end document\n");
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[0].length(), 0);
  EXPECT_EQ(docs[0].num_sentences(), 0);
  EXPECT_EQ(docs[1].length(), 1);
}

std::size_t parse_error_line(const std::string& text) {
  try {
    parse_conll_string(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  ADD_FAILURE() << "expected ParseError for:\n" << text;
  return 0;
}

TEST(ConllTest, MalformedInputReportsLine) {
  const std::string begin = "#begin document (d); part 000\n";
  EXPECT_EQ(parse_error_line(begin + "d\t0\t0\ta\t(0\n#end document\n"), 3u);
  EXPECT_EQ(parse_error_line(begin + "d\t0\t0\ta\t0)\n#end document\n"), 2u);
  EXPECT_EQ(parse_error_line(begin + "d\t0\t0\ta\t(x)\n#end document\n"), 2u);
  EXPECT_EQ(parse_error_line(begin + "d\t0\t0\ta\t(0)?\n#end document\n"), 2u);
  EXPECT_EQ(parse_error_line(begin + "d\t0\ta\t-\n#end document\n"), 2u);
  EXPECT_EQ(parse_error_line(begin + "d\t0\t0\ta\t-\n"), 3u);
  EXPECT_EQ(parse_error_line("d\t0\t0\ta\t-\n"), 1u);
  EXPECT_EQ(parse_error_line("#end document\n"), 1u);
  EXPECT_EQ(parse_error_line(begin + begin), 2u);
}

TEST(ConllTest, MissingFileIsDataError) {
  EXPECT_THROW(read_conll_file("/nonexistent/file.conll"), DataError);
}

TEST(ConllTest, WriterRejectsOutOfRangeSpans) {
  Document doc = testing::tiny_document();
  doc.gold_clusters.clusters.push_back({{7, 8}});
  EXPECT_THROW(write_conll_string({doc}), DataError);
  doc.gold_clusters.clusters.back() = {{3, 2}};
  EXPECT_THROW(write_conll_string({doc}), DataError);
}

TEST(ConllTest, FuzzedRoundTrip) {
  Rng rng(2024);
  std::vector<Document> docs;
  for (int i = 0; i < 500; ++i) docs.push_back(testing::random_document(rng, i));
  const auto parsed = parse_conll_string(write_conll_string(docs));
  ASSERT_EQ(parsed.size(), docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    EXPECT_EQ(parsed[i].tokens, docs[i].tokens) << docs[i].doc_id;
    EXPECT_EQ(parsed[i].gold_clusters, docs[i].gold_clusters) << docs[i].doc_id;
    EXPECT_EQ(parsed[i].key(), docs[i].key());
  }
}

TEST(ConllTest, FileRoundTrip) {
  const auto dir = testing::temp_dir("conll");
  const std::string path = (dir / "out.conll").string();
  const auto docs = parse_conll_string(kSample);
  write_conll_file(path, docs);
  EXPECT_EQ(read_conll_file(path)[0].gold_clusters, docs[0].gold_clusters);
}

TEST(ClusterSetTest, CanonicalOrderAndEquality) {
  const ClusterSet a{{{{5, 5}, {1, 2}}, {}, {{0, 0}}}};
  const ClusterSet b{{{{0, 0}}, {{1, 2}, {5, 5}}}};
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.canonical().clusters.size(), 2u);
  EXPECT_EQ(a.canonical().clusters[0], (std::vector<Span>{{0, 0}}));
  EXPECT_EQ(a.mentions(), (std::vector<Span>{{0, 0}, {1, 2}, {5, 5}}));
}

}  // namespace
}  // namespace arcoref
