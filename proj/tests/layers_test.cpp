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

#include "arcoref/layers.hpp"

#include <gtest/gtest.h>

#include "arcoref/error.hpp"
#include "grad_check.hpp"

namespace arcoref::nn {
namespace {

constexpr double kTolerance = 1e-4;

Tensor random_tensor(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Tensor t(rows, cols);
  for (auto& v : t.values()) v = 2.0 * uniform01(rng) - 1.0;
  return t;
}

Var project(Graph& g, Var v, std::uint64_t seed = 99) {
  return sum(mul(v, g.constant(random_tensor(v.rows(), v.cols(), seed))));
}

// Biases start at zero; randomizing them makes every gradient entry non-trivial.
void perturb_all(ParameterStore& store, std::uint64_t seed) {
  Rng rng(seed);
  for (auto* p : store.all())
    for (auto& v : p->value.values()) v += 0.3 * (2.0 * uniform01(rng) - 1.0);
}

void expect_gradients_match(ParameterStore& store, const std::function<Var(Graph&)>& loss) {
  const auto result = testing::check_gradients(store.all(), loss, 1e-5, 30);
  EXPECT_LT(result.max_relative_error, kTolerance) << result.worst;
  EXPECT_GT(result.checked, 0);
}

TEST(LayersTest, LinearForward) {
  ParameterStore store;
  Rng rng(1);
  Linear linear(store, "lin", 2, 1, rng);
  linear.weight().value = Tensor(2, 1, {2.0, -1.0});
  linear.bias().value = Tensor(1, 1, {0.5});
  Graph g;
  const Tensor& y = linear.forward(g, g.constant(Tensor(2, 2, {1, 1, 3, 4}))).value();
  EXPECT_EQ(y, Tensor(2, 1, {1.5, 2.5}));
}

TEST(LayersTest, FfnnGradients) {
  ParameterStore store;
  Rng rng(2);
  Ffnn ffnn(store, "ffnn", 5, 2, 4, 3, 0.0, rng);
  perturb_all(store, 3);
  const Tensor x = random_tensor(3, 5, 4);
  expect_gradients_match(store, [&](Graph& g) {
    Rng unused(0);
    return project(g, ffnn.forward(g, g.constant(x), false, unused));
  });
}

TEST(LayersTest, LstmDirectionGradients) {
  ParameterStore store;
  Rng rng(5);
  LstmDirection lstm(store, "lstm", 3, 4, rng);
  perturb_all(store, 6);
  const Tensor x = random_tensor(5, 3, 7);
  for (bool reverse : {false, true}) {
    expect_gradients_match(store, [&](Graph& g) {
      return project(g, lstm.forward(g, g.constant(x), reverse));
    });
  }
}

TEST(LayersTest, LstmForgetBiasStartsAtOne) {
  ParameterStore store;
  Rng rng(8);
  LstmDirection lstm(store, "lstm", 3, 2, rng);
  const Tensor& bias = store.get("lstm/b").value;
  ASSERT_EQ(bias.size(), 8);
  EXPECT_EQ(bias[0], 0.0);
  EXPECT_EQ(bias[2], 1.0);
  EXPECT_EQ(bias[3], 1.0);
  EXPECT_EQ(bias[4], 0.0);
}

TEST(LayersTest, ReverseDirectionReadsRightToLeft) {
  ParameterStore store;
  Rng rng(9);
  LstmDirection lstm(store, "lstm", 2, 3, rng);
  const Tensor x = random_tensor(4, 2, 10);
  Tensor flipped(4, 2);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 2; ++c) flipped(r, c) = x(3 - r, c);
  Graph g;
  const Tensor backward = lstm.forward(g, g.constant(x), true).value();
  const Tensor forward = lstm.forward(g, g.constant(flipped), false).value();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(backward(r, c), forward(3 - r, c), 1e-12);
}

TEST(LayersTest, BiLstmGradients) {
  ParameterStore store;
  Rng rng(11);
  BiLstm bilstm(store, "bilstm", 3, 2, 3, 0.0, rng);
  perturb_all(store, 12);
  const Tensor x = random_tensor(4, 3, 13);
  expect_gradients_match(store, [&](Graph& g) {
    Rng unused(0);
    Var out = bilstm.forward(g, g.constant(x), false, unused);
    EXPECT_EQ(out.cols(), bilstm.output_dim());
    return project(g, out);
  });
}

TEST(LayersTest, BiLstmRejectsEmptySentence) {
  ParameterStore store;
  Rng rng(14);
  BiLstm bilstm(store, "bilstm", 3, 1, 2, 0.0, rng);
  Graph g;
  EXPECT_THROW(bilstm.forward(g, g.constant(Tensor(0, 3)), false, rng), DimensionError);
}

TEST(LayersTest, CharCnnGradients) {
  ParameterStore store;
  Rng rng(15);
  CharCnn cnn(store, "cnn", 17, 3, {2, 3}, 4, rng);
  perturb_all(store, 16);
  const std::vector<std::string> words = {"أحمد", "x", "", "كتاب"};
  expect_gradients_match(store, [&](Graph& g) {
    Var out = cnn.forward(g, words);
    EXPECT_EQ(out.rows(), 4);
    EXPECT_EQ(out.cols(), cnn.output_dim());
    return project(g, out);
  });
}

TEST(LayersTest, CharIdsArePaddedAndInRange) {
  ParameterStore store;
  Rng rng(17);
  CharCnn cnn(store, "cnn", 17, 3, {2, 5}, 4, rng);
  EXPECT_EQ(cnn.min_length(), 5);
  const auto ids = cnn.char_ids("أب");
  ASSERT_EQ(ids.size(), 5u);
  EXPECT_GE(ids[0], 1);
  EXPECT_LT(ids[0], 17);
  EXPECT_EQ(ids[2], 0);
  EXPECT_EQ(cnn.char_ids("abcdefg").size(), 7u);
  EXPECT_EQ(cnn.char_ids("أب"), ids);
}

}  // namespace
}  // namespace arcoref::nn
