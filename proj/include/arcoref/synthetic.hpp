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

#ifndef ARCOREF_SYNTHETIC_HPP_
#define ARCOREF_SYNTHETIC_HPP_

#include <cstdint>
#include <vector>

#include "arcoref/conll.hpp"

namespace arcoref {

struct SyntheticOptions {
  int documents = 5;
  int sentences = 6;
  std::uint64_t seed = 2026;
  // Probability that a name occurrence is written with diacritics or an
  // alternative alif form.
  double variant_rate = 0.3;
};

// Arabic pseudo-text with planted coreference chains. Each document has one
// male and one female person, referred to by name or by the pronouns هو and
// هي, and one city. Every person and city occurrence is a gold mention;
// fillers never are.
std::vector<Document> generate_synthetic_corpus(const SyntheticOptions& options = {});

}  // namespace arcoref

#endif  // ARCOREF_SYNTHETIC_HPP_
