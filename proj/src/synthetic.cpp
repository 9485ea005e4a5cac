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

#include "arcoref/synthetic.hpp"

#include <array>
#include <string>

#include "arcoref/arabic.hpp"
#include "arcoref/random.hpp"

namespace arcoref {

namespace {

constexpr std::array<const char*, 5> kMaleNames = {"أحمد", "إبراهيم", "عمر", "يوسف", "خالد"};
constexpr std::array<const char*, 5> kFemaleNames = {"فاطمة", "مريم", "آمنة", "ليلى", "سارة"};
constexpr std::array<const char*, 5> kPlaces = {"القاهرة", "دمشق", "بغداد", "تونس", "الرباط"};
constexpr const char* kMalePronoun = "هو";
constexpr const char* kFemalePronoun = "هي";

// Slots: 'X' first person, 'Y' second person, 'P' place; anything else is
// literal text.
constexpr std::array<std::array<const char*, 7>, 8> kTemplates = {{
    {"X", "ذهب", "إلى", "P", nullptr},
    {"X", "قال", "إن", "Y", "في", "P", nullptr},
    {"ثم", "رأى", "X", "Y", "هناك", nullptr},
    {"كان", "X", "مع", "Y", "يوم", "الجمعة", nullptr},
    {"بعد", "ذلك", "عاد", "X", "من", "P", nullptr},
    {"X", "يحب", "P", "كثيرا", nullptr},
    {"تحدث", "X", "عن", "P", "طويلا", nullptr},
    {"سأل", "X", "Y", "عن", "الطريق", nullptr},
}};
constexpr std::array<const char*, 4> kFiller = {"كان", "الجو", "جميلا", "جدا"};

constexpr char32_t kFatha = 0x064E;

// A spelling variant: a short vowel after the first letter, or a bare alif
// for a decorated initial alif.
std::string variant(const std::string& name, Rng& rng) {
  std::vector<char32_t> cps = utf8_decode(name);
  const char32_t first = cps.front();
  const bool decorated_alif = first == 0x0622 || first == 0x0623 || first == 0x0625;
  if (decorated_alif && uniform01(rng) < 0.5) {
    cps[0] = kBareAlif;
  } else {
    cps.insert(cps.begin() + 1, kFatha);
  }
  return utf8_encode(cps);
}

struct Builder {
  Document doc;
  int sentence = 0;
  std::array<std::vector<Span>, 3> chains;

  void token(const std::string& surface, const std::string& pos) {
    Token t;
    t.surface = surface;
    t.sentence_index = sentence;
    t.doc_token_index = doc.length();
    t.extra_columns = {pos, "-"};
    doc.tokens.push_back(std::move(t));
  }
};

Document generate_document(int index, const SyntheticOptions& options, Rng& rng) {
  const std::string male = kMaleNames[rng() % kMaleNames.size()];
  const std::string female = kFemaleNames[rng() % kFemaleNames.size()];
  const std::string place = kPlaces[rng() % kPlaces.size()];

  Builder b;
  b.doc.doc_id = "synthetic/doc" + std::to_string(index);
  b.doc.part_id = 0;
  std::array<bool, 2> introduced = {false, false};
  int mentions = 0;

  auto person = [&](int who) {
    const int start = b.doc.length();
    const bool use_name = !introduced[who] || uniform01(rng) < 0.5;
    if (use_name) {
      std::string name = who == 0 ? male : female;
      if (uniform01(rng) < options.variant_rate) name = variant(name, rng);
      b.token(name, "NNP");
    } else {
      b.token(who == 0 ? kMalePronoun : kFemalePronoun, "PRP");
    }
    introduced[who] = true;
    b.chains[who].push_back({start, start});
    ++mentions;
  };

  for (int s = 0; s < options.sentences; ++s) {
    const auto& tmpl = kTemplates[rng() % kTemplates.size()];
    const int x = static_cast<int>(rng() % 2);
    for (const char* slot : tmpl) {
      if (!slot) break;
      const std::string text = slot;
      if (text == "X" || text == "Y") {
        person(text == "X" ? x : 1 - x);
      } else if (text == "P") {
        const int start = b.doc.length();
        b.token(place, "NNP");
        b.chains[2].push_back({start, start});
        ++mentions;
      } else {
        b.token(text, "-");
      }
    }
    ++b.sentence;
  }
  // Filler sentences keep the gold mention count well under the pruning
  // budget.
  while (mentions * 10 > b.doc.length() * 3) {
    for (const char* word : kFiller) b.token(word, "-");
    ++b.sentence;
  }
  for (auto& chain : b.chains) {
    if (chain.size() > 1) b.doc.gold_clusters.clusters.push_back(chain);
  }
  return b.doc;
}

// Every entity needs a second mention to form a cluster.
bool all_entities_repeat(const Document& doc) { return doc.gold_clusters.size() == 3; }

}  // namespace

std::vector<Document> generate_synthetic_corpus(const SyntheticOptions& options) {
  Rng rng(options.seed);
  std::vector<Document> corpus;
  for (int d = 0; d < options.documents; ++d) {
    Document doc;
    do {
      doc = generate_document(d, options, rng);
    } while (!all_entities_repeat(doc));
    doc.gold_clusters = doc.gold_clusters.canonical();
    corpus.push_back(std::move(doc));
  }
  return corpus;
}

}  // namespace arcoref
