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

#include "arcoref/arabic.hpp"

#include <gtest/gtest.h>

#include <set>

#include "arcoref/error.hpp"
#include "fixtures.hpp"

namespace arcoref {
namespace {

TEST(ArabicTest, AlifVariantsBecomeBareAlif) {
  EXPECT_EQ(normalize_token("أحمد"), "احمد");
  EXPECT_EQ(normalize_token("إبراهيم"), "ابراهيم");
  EXPECT_EQ(normalize_token("آمنة"), "امنة");
  EXPECT_EQ(normalize_token("ٱلله"), "الله");
}

TEST(ArabicTest, DiacriticsAreRemoved) {
  EXPECT_EQ(normalize_token("عَلَى"), "على");
  EXPECT_EQ(normalize_token("كِتَابٌ"), "كتاب");
  EXPECT_EQ(normalize_token("مُدَرِّسْ"), "مدرس");
  EXPECT_EQ(normalize_token("هٰذا"), "هذا");
}

TEST(ArabicTest, OtherTextIsUnchanged) {
  EXPECT_EQ(normalize_token("hello 123"), "hello 123");
  EXPECT_EQ(normalize_token(""), "");
  // Tatweel, alif maqsura and ta marbuta are kept.
  EXPECT_EQ(normalize_token("كـتاب"), "كـتاب");
  EXPECT_EQ(normalize_token("مستشفى"), "مستشفى");
  EXPECT_EQ(normalize_token("مدرسة"), "مدرسة");
}

TEST(ArabicTest, MalformedUtf8DecodesToReplacementCharacter) {
  const auto cps = utf8_decode(std::string("a\xff" "b", 3));
  EXPECT_EQ(cps, (std::vector<char32_t>{U'a', 0xFFFD, U'b'}));
  EXPECT_EQ(utf8_encode(utf8_decode("أحمد é")), "أحمد é");
}

TEST(ArabicTest, RulesAreValidated) {
  NormalizationRules rules = NormalizationRules::Default();
  EXPECT_NO_THROW(rules.validate());
  rules.alif_variants.insert(kBareAlif);
  EXPECT_THROW(rules.validate(), ConfigError);
  rules = NormalizationRules::Default();
  rules.diacritics.insert(U'أ');
  EXPECT_THROW(rules.validate(), ConfigError);
}

TEST(ArabicTest, CustomRulesApply) {
  NormalizationRules rules = NormalizationRules::Default();
  rules.alif_variants.insert(U'ى');
  EXPECT_EQ(normalize_token("على", rules), "علا");
}

TEST(ArabicTest, DocumentStructureIsUntouched) {
  Document doc = testing::tiny_document();
  doc.tokens[0].surface = "أَحْمَد";
  const Document normalized = normalize_document(doc);
  EXPECT_EQ(normalized.tokens[0].surface, "احمد");
  EXPECT_EQ(normalized.length(), doc.length());
  EXPECT_EQ(normalized.sentence_ranges(), doc.sentence_ranges());
  EXPECT_EQ(normalized.gold_clusters, doc.gold_clusters);
  EXPECT_EQ(normalize_document(normalized), normalized);
}

TEST(ArabicTest, LatinDocumentIsIdentical) {
  Document doc;
  doc.doc_id = "latin";
  for (const char* w : {"John", "met", "Mary", "."}) {
    Token t;
    t.surface = w;
    t.doc_token_index = doc.length();
    doc.tokens.push_back(t);
  }
  doc.gold_clusters.clusters = {{{0, 0}}};
  EXPECT_EQ(normalize_document(doc), doc);
}

// 10k random strings mixing alif forms, diacritics, other Arabic, Latin,
// and stray bytes.
std::vector<std::string> fuzz_corpus() {
  Rng rng(77);
  std::vector<std::string> out;
  for (int i = 0; i < 10000; ++i) {
    std::string s = testing::random_surface(rng);
    if (i % 7 == 0) s += "\xd9";
    out.push_back(s);
  }
  return out;
}

TEST(ArabicTest, FuzzedIdempotenceAndLength) {
  const auto rules = NormalizationRules::Default();
  for (const std::string& s : fuzz_corpus()) {
    const std::string once = normalize_token(s);
    EXPECT_EQ(normalize_token(once), once) << s;
    EXPECT_LE(utf8_decode(once).size(), utf8_decode(s).size()) << s;
    for (char32_t cp : utf8_decode(once)) {
      EXPECT_FALSE(rules.alif_variants.count(cp)) << s;
      EXPECT_FALSE(rules.diacritics.count(cp)) << s;
    }
  }
}

TEST(ArabicTest, FuzzedAlifAndDiacriticExamples) {
  Rng rng(78);
  for (int i = 0; i < 10000; ++i) {
    const std::string base = testing::random_surface(rng);
    // Inserting a diacritic or swapping in an alif variant does not change the result.
    EXPECT_EQ(normalize_token(base + "َ"), normalize_token(base));
    EXPECT_EQ(normalize_token("أ" + base), normalize_token("ا" + base));
  }
}

TEST(ArabicTest, VocabularyNeverGrows) {
  const auto corpus = fuzz_corpus();
  std::set<std::string> before, after;
  for (const auto& s : corpus) {
    before.insert(s);
    after.insert(normalize_token(s));
  }
  EXPECT_LE(after.size(), before.size());
  EXPECT_LT(after.size(), before.size());
}

}  // namespace
}  // namespace arcoref
