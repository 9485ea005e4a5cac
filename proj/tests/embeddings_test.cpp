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

#include "arcoref/embeddings.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "arcoref/error.hpp"
#include "fixtures.hpp"

namespace arcoref {
namespace {

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

TEST(EmbeddingsTest, HashedVectorsAreDeterministicUnitVectors) {
  const auto a = hashed_unit_vector("كتاب", 16, 3);
  EXPECT_EQ(a.size(), 16u);
  EXPECT_NEAR(norm(a), 1.0, 1e-12);
  EXPECT_EQ(hashed_unit_vector("كتاب", 16, 3), a);
  EXPECT_NE(hashed_unit_vector("كتب", 16, 3), a);
  EXPECT_NE(hashed_unit_vector("كتاب", 16, 4), a);
}

TEST(EmbeddingsTest, StaticFileWithFallback) {
  std::istringstream in("word\t1 2 3\nother\t0.5 0 -1\n");
  const auto e = StaticEmbeddings::load(in, 3, 9);
  EXPECT_EQ(e.kind(), EmbeddingKind::kStaticFile);
  EXPECT_TRUE(e.contains("word"));
  EXPECT_FALSE(e.contains("missing"));
  EXPECT_EQ(e.lookup("word"), (std::vector<double>{1, 2, 3}));
  const auto fallback = e.lookup("missing");
  EXPECT_EQ(fallback.size(), 3u);
  EXPECT_EQ(fallback, e.lookup("missing"));
}

TEST(EmbeddingsTest, StaticFileDimensionMismatchIsDataError) {
  std::istringstream in("word\t1 2\n");
  EXPECT_THROW(StaticEmbeddings::load(in, 3, 9), DataError);
  std::istringstream bad("word\t1 x 2\n");
  EXPECT_THROW(StaticEmbeddings::load(bad, 3, 9), DataError);
  EXPECT_THROW(StaticEmbeddings::load_file("/nonexistent.vec", 3, 9), DataError);
}

TEST(EmbeddingsTest, ContextualFileLookup) {
  std::istringstream in("doc 0 2\n1 2\n3 4\n\ndoc 1 2\n5 6\n");
  const auto e = ContextualEmbeddings::load(in);
  EXPECT_EQ(e.dimension(), 2);
  EXPECT_EQ(e.lookup("doc", 0, 1), (std::vector<double>{3, 4}));
  EXPECT_EQ(e.lookup("doc", 1, 0), (std::vector<double>{5, 6}));
  EXPECT_THROW(e.lookup("doc", 1, 1), DataError);
  EXPECT_THROW(e.lookup("absent", 0, 0), DataError);
  std::istringstream mismatch("doc 0 2\n1 2 3\n");
  EXPECT_THROW(ContextualEmbeddings::load(mismatch), DataError);
}

TEST(EmbeddingsTest, HashedContextualDependsOnSurfaceAndPosition) {
  const auto e = ContextualEmbeddings::hashed(8, 5, 0.25);
  const Document doc = testing::tiny_document();
  // Tokens 3 and 6 share a surface but sit at different positions.
  const auto a = e.lookup(doc, 3), b = e.lookup(doc, 6);
  EXPECT_NE(a, b);
  EXPECT_NEAR(norm(a), 1.0, 1e-12);
  double cosine = 0.0;
  for (int i = 0; i < 8; ++i) cosine += a[i] * b[i];
  EXPECT_GT(cosine, 0.5);
  EXPECT_EQ(e.lookup(doc, 3), a);
  EXPECT_THROW(e.lookup(doc, doc.length()), DataError);
}

TEST(EmbeddingsTest, ProviderFeaturesConcatenateSources) {
  RunConfig config = testing::tiny_config();
  const EmbeddingProvider provider(config);
  const Document doc = testing::tiny_document();
  const auto features = provider.fixed_features(doc);
  EXPECT_EQ(features.rows(), doc.length());
  EXPECT_EQ(features.cols(), config.contextual_embedding_size + config.static_embedding_size);
  EXPECT_EQ(provider.fixed_dimension(true), config.contextual_embedding_size);
  config.contextual_embeddings = "none";
  config.static_embeddings = "none";
  const EmbeddingProvider empty(config);
  EXPECT_EQ(empty.fixed_dimension(), 0);
}

TEST(EmbeddingsTest, ProviderRejectsFileOfWrongDimension) {
  const auto dir = testing::temp_dir("embeddings");
  const std::string path = (dir / "ctx.txt").string();
  std::ofstream(path) << "tiny 0 3\n1 2 3\n";
  RunConfig config = testing::tiny_config();
  config.contextual_embeddings = path;
  EXPECT_THROW(EmbeddingProvider{config}, DataError);
}

TEST(EmbeddingsTest, TokenEmbedderDimension) {
  RunConfig config = testing::tiny_config();
  const EmbeddingProvider provider(config);
  nn::ParameterStore store;
  Rng rng(1);
  TokenEmbedder embedder(&provider, store, "emb", config, rng);
  EXPECT_EQ(embedder.dimension(), 5 + 4 + 2 * 3);
  nn::Graph g;
  const auto out = embedder.embed(g, testing::tiny_document(), false, rng);
  EXPECT_EQ(out.rows(), 8);
  EXPECT_EQ(out.cols(), embedder.dimension());

  config.contextual_embeddings = config.static_embeddings = "none";
  config.char_filter_size = 0;
  const EmbeddingProvider none(config);
  nn::ParameterStore other;
  EXPECT_THROW(TokenEmbedder(&none, other, "emb", config, rng), ConfigError);
}

}  // namespace
}  // namespace arcoref
