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

#ifndef ARCOREF_ARABIC_HPP_
#define ARCOREF_ARABIC_HPP_

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "arcoref/conll.hpp"

namespace arcoref {

// Decodes UTF-8 into code points. Malformed sequences decode to U+FFFD.
std::vector<char32_t> utf8_decode(std::string_view text);
std::string utf8_encode(const std::vector<char32_t>& code_points);
void utf8_append(std::string* out, char32_t code_point);

inline constexpr char32_t kBareAlif = U'ا';

// Orthographic normalization applied before any embedding lookup.
struct NormalizationRules {
  // Mapped to bare alif (U+0627).
  std::set<char32_t> alif_variants;
  // Deleted.
  std::set<char32_t> diacritics;

  // Alif with madda, hamza above, hamza below and wasla; harakat and tanwin
  // U+064B..U+065F plus superscript alef U+0670. Tatweel is kept.
  static NormalizationRules Default();

  // Throws ConfigError if bare alif is a variant or the two sets intersect.
  void validate() const;
};

std::string normalize_token(std::string_view surface,
                            const NormalizationRules& rules = NormalizationRules::Default());

// Normalizes token surfaces; tokens, sentences and clusters are untouched.
Document normalize_document(const Document& doc,
                            const NormalizationRules& rules = NormalizationRules::Default());

std::vector<Document> normalize_corpus(const std::vector<Document>& docs,
                                       const NormalizationRules& rules = NormalizationRules::Default());

}  // namespace arcoref

#endif  // ARCOREF_ARABIC_HPP_
