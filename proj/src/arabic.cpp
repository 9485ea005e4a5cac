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

#include <algorithm>
#include <iterator>

#include "arcoref/error.hpp"

namespace arcoref {

namespace {
constexpr char32_t kReplacement = 0xFFFD;
}  // namespace

std::vector<char32_t> utf8_decode(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    int extra;
    char32_t cp;
    char32_t min;
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    } else if ((b0 & 0xE0) == 0xC0) {
      extra = 1, cp = b0 & 0x1F, min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
      extra = 2, cp = b0 & 0x0F, min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
      extra = 3, cp = b0 & 0x07, min = 0x10000;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    bool ok = true;
    for (int k = 0; k < extra; ++k, ++j) {
      if (j >= n || (static_cast<unsigned char>(text[j]) & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (static_cast<unsigned char>(text[j]) & 0x3F);
    }
    if (!ok || cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(kReplacement);
      i = ok ? j : std::max(j, i + 1);
      continue;
    }
    out.push_back(cp);
    i = j;
  }
  return out;
}

void utf8_append(std::string* out, char32_t cp) {
  if (cp < 0x80) {
    out->push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out->push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out->push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out->push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out->push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out->push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out->push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out->push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out->push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out->push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string utf8_encode(const std::vector<char32_t>& code_points) {
  std::string out;
  out.reserve(code_points.size() * 2);
  for (char32_t cp : code_points) utf8_append(&out, cp);
  return out;
}

NormalizationRules NormalizationRules::Default() {
  NormalizationRules rules;
  rules.alif_variants = {U'آ', U'أ', U'إ', U'ٱ'};
  for (char32_t cp = 0x064B; cp <= 0x065F; ++cp) rules.diacritics.insert(cp);
  rules.diacritics.insert(U'ٰ');
  return rules;
}

void NormalizationRules::validate() const {
  if (alif_variants.count(kBareAlif)) {
    throw ConfigError("bare alif U+0627 cannot be an alif variant");
  }
  std::vector<char32_t> common;
  std::set_intersection(alif_variants.begin(), alif_variants.end(), diacritics.begin(),
                        diacritics.end(), std::back_inserter(common));
  if (!common.empty()) throw ConfigError("alif variant and diacritic sets overlap");
}

std::string normalize_token(std::string_view surface, const NormalizationRules& rules) {
  std::string out;
  out.reserve(surface.size());
  for (char32_t cp : utf8_decode(surface)) {
    if (rules.diacritics.count(cp)) continue;
    utf8_append(&out, rules.alif_variants.count(cp) ? kBareAlif : cp);
  }
  return out;
}

Document normalize_document(const Document& doc, const NormalizationRules& rules) {
  Document out = doc;
  for (auto& token : out.tokens) {
    std::string normalized = normalize_token(token.surface, rules);
    // A token made only of diacritics would vanish; keep it addressable.
    if (!normalized.empty()) token.surface = std::move(normalized);
  }
  return out;
}

std::vector<Document> normalize_corpus(const std::vector<Document>& docs,
                                       const NormalizationRules& rules) {
  std::vector<Document> out;
  out.reserve(docs.size());
  for (const auto& doc : docs) out.push_back(normalize_document(doc, rules));
  return out;
}

}  // namespace arcoref
