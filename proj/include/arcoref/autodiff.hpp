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

#ifndef ARCOREF_AUTODIFF_HPP_
#define ARCOREF_AUTODIFF_HPP_

#include <deque>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "arcoref/params.hpp"
#include "arcoref/random.hpp"
#include "arcoref/tensor.hpp"

namespace arcoref::nn {

class Graph;

// Handle to a node on a Graph. Cheap to copy; valid while the graph lives.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  int rows() const { return value().rows(); }
  int cols() const { return value().cols(); }
  // Value of a 1 x 1 node.
  double scalar() const;
  bool requires_grad() const;
  // Gradient accumulated by Graph::backward (zeros if none reached it).
  const Tensor& grad() const;

  Graph* graph() const { return graph_; }
  int id() const { return id_; }
  bool valid() const { return graph_ != nullptr; }

 private:
  friend class Graph;
  Var(Graph* graph, int id) : graph_(graph), id_(id) {}
  Graph* graph_ = nullptr;
  int id_ = -1;
};

// A computation tape. Nodes are appended in evaluation order, so creation
// order is a topological order and backward replays it in reverse, visiting
// each node exactly once. Parameter leaves alias their Parameter storage:
// backward accumulates directly into Parameter::grad.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor value);
  Var parameter(Parameter& param);

  // Seeds d(root)/d(root) = 1 for a 1 x 1 root and runs the tape backward.
  void backward(Var root);

  std::size_t size() const { return nodes_.size(); }

  // Backward rule: called with the node's accumulated output gradient.
  using BackwardFn = std::function<void(Graph&, const Tensor& out_grad)>;

  // Appends a node. Throws NumericError if value contains NaN/Inf.
  Var record(Tensor value, std::vector<Var> inputs, BackwardFn backward, const char* op);

  const Tensor& value(int id) const;
  const Tensor& grad(int id);
  // Mutable gradient accumulator for an input, allocated on first use.
  Tensor& grad_accumulator(Var v);
  bool requires_grad(int id) const { return nodes_[id].requires_grad; }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    Parameter* param = nullptr;
    bool requires_grad = false;
    BackwardFn backward;
  };
  std::deque<Node> nodes_;
};

// --- Elementary operations. All throw DimensionError on shape mismatch. ---

Var matmul(Var a, Var b);
Var transpose(Var a);
Var add(Var a, Var b);
Var sub(Var a, Var b);
// Elementwise (Hadamard) product.
Var mul(Var a, Var b);
// Adds a 1 x n row to every row of an m x n matrix.
Var add_row(Var a, Var row);
// scale * a + shift, elementwise.
Var affine(Var a, double scale, double shift);
Var tanh(Var a);
Var relu(Var a);
Var sigmoid(Var a);
// Row-wise softmax.
Var softmax(Var a);
// Row-wise softmax over entries with mask != 0; masked entries are 0.
// Every row needs at least one unmasked entry.
Var masked_softmax(Var a, const std::vector<char>& mask);
Var concat_cols(const std::vector<Var>& parts);
Var concat_rows(const std::vector<Var>& parts);
Var slice_cols(Var a, int begin, int count);
// Row r of the result is row idx[r] of a.
Var gather_rows(Var a, std::span<const int> idx);
// Embedding lookup is a row gather from a parameter table.
inline Var embedding_lookup(Var table, std::span<const int> ids) { return gather_rows(table, ids); }
// Column vector of a(rows[k], cols[k]).
Var gather_elements(Var a, std::span<const int> rows, std::span<const int> cols);
// rows x cols matrix with values[k] placed at (rows_idx[k], cols_idx[k]), 0 elsewhere.
Var scatter_elements(Var values, std::span<const int> rows_idx, std::span<const int> cols_idx,
                     int rows, int cols);
Var sum(Var a);
// Inverted dropout: identity when !training or rate == 0.
Var dropout(Var a, double rate, bool training, Rng& rng);
// Sliding windows: row r is rows r..r+width-1 of a, concatenated.
Var unfold_rows(Var a, int width);
// Column-wise maximum over rows: 1 x cols.
Var max_rows(Var a);
// Same row-major data viewed with a new shape.
Var reshape(Var a, int rows, int cols);
// Column-wise maximum within consecutive row segments of the given sizes.
// Result: segments x cols.
Var segment_max(Var a, std::span<const int> segment_sizes);

// --- Fused model operations. ---

struct SpanRange {
  int start;
  int end;  // inclusive
};

// Attention-weighted average of x rows over each span, with weights
// softmax(scores[start..end]). x: T x D, scores: T x 1. Result: S x D.
Var span_attention(Var x, Var scores, std::span<const SpanRange> spans);

// out[k] = sum_g weights(k, g) * values(k * G + g). weights: K x G,
// values: (K*G) x D. Result: K x D.
Var weighted_group_sum(Var weights, Var values);

// Sum over rows of log(sum_{valid} exp) - log(sum_{gold} exp). Every row needs
// at least one gold entry, and gold entries must be valid.
Var marginal_nll(Var scores, const std::vector<char>& valid, const std::vector<char>& gold);

// Sum of sigmoid cross-entropy of logits (n x 1) against 0/1 labels.
Var sigmoid_cross_entropy(Var logits, std::span<const double> labels);

}  // namespace arcoref::nn

#endif  // ARCOREF_AUTODIFF_HPP_
