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

#include "arcoref/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "arcoref/error.hpp"

namespace arcoref::nn {

// --- Tensor ---

Tensor::Tensor(int rows, int cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != static_cast<std::size_t>(rows) * cols) {
    throw DimensionError("tensor of shape " + shape_string() + " given " +
                         std::to_string(data_.size()) + " values");
  }
}

Tensor Tensor::identity(int n) {
  Tensor t(n, n);
  for (int i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

std::string Tensor::shape_string() const {
  return "[" + std::to_string(rows_) + "x" + std::to_string(cols_) + "]";
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

// --- Var / Graph ---

const Tensor& Var::value() const { return graph_->value(id_); }
double Var::scalar() const {
  const Tensor& v = value();
  if (v.size() != 1) throw DimensionError("scalar() on tensor of shape " + v.shape_string());
  return v[0];
}
bool Var::requires_grad() const { return graph_->requires_grad(id_); }
const Tensor& Var::grad() const { return graph_->grad(id_); }

Var Graph::constant(Tensor value) {
  if (!value.all_finite()) throw NumericError("non-finite value in constant");
  Node node;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Graph::parameter(Parameter& param) {
  Node node;
  node.param = &param;
  node.requires_grad = true;
  if (!param.grad.same_shape(param.value)) param.grad = Tensor(param.value.rows(), param.value.cols());
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Graph::record(Tensor value, std::vector<Var> inputs, BackwardFn backward, const char* op) {
  if (!value.all_finite()) {
    throw NumericError(std::string("non-finite value produced by ") + op);
  }
  Node node;
  node.value = std::move(value);
  for (const Var& in : inputs) {
    if (in.graph() != this) throw Error(std::string(op) + ": operand from a different graph");
    if (nodes_[in.id()].requires_grad) node.requires_grad = true;
  }
  if (node.requires_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

const Tensor& Graph::value(int id) const {
  const Node& n = nodes_[id];
  return n.param ? n.param->value : n.value;
}

const Tensor& Graph::grad(int id) {
  Node& n = nodes_[id];
  if (n.param) return n.param->grad;
  if (!n.grad.same_shape(n.value)) n.grad = Tensor(n.value.rows(), n.value.cols());
  return n.grad;
}

Tensor& Graph::grad_accumulator(Var v) {
  Node& n = nodes_[v.id()];
  if (n.param) return n.param->grad;
  if (!n.grad.same_shape(n.value)) n.grad = Tensor(n.value.rows(), n.value.cols());
  return n.grad;
}

void Graph::backward(Var root) {
  if (root.graph() != this) throw Error("backward: root from a different graph");
  if (root.value().size() != 1) {
    throw DimensionError("backward requires a scalar root, got " + root.value().shape_string());
  }
  if (!nodes_[root.id()].requires_grad) return;
  grad_accumulator(root)[0] += 1.0;
  for (int id = root.id(); id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.requires_grad || !n.backward) continue;
    if (!n.grad.same_shape(n.value)) continue;  // unreached
    n.backward(*this, n.grad);
  }
}

namespace {

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  throw DimensionError(std::string(op) + ": incompatible shapes " + a.shape_string() + " and " +
                       b.shape_string());
}

bool needs(Graph& g, Var v) { return g.requires_grad(v.id()); }

}  // namespace

Var matmul(Var a, Var b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (A.cols() != B.rows()) shape_error("matmul", A, B);
  const int m = A.rows(), k = A.cols(), n = B.cols();
  Tensor C(m, n);
  for (int i = 0; i < m; ++i) {
    double* c = C.row(i).data();
    const double* arow = A.row(i).data();
    for (int p = 0; p < k; ++p) {
      const double av = arow[p];
      if (av == 0.0) continue;
      const double* brow = B.row(p).data();
      for (int j = 0; j < n; ++j) c[j] += av * brow[j];
    }
  }
  return a.graph()->record(
      std::move(C), {a, b},
      [a, b, m, k, n](Graph& g, const Tensor& dC) {
        const Tensor& A = g.value(a.id());
        const Tensor& B = g.value(b.id());
        if (needs(g, a)) {
          Tensor& dA = g.grad_accumulator(a);
          for (int i = 0; i < m; ++i) {
            const double* dc = dC.row(i).data();
            double* da = dA.row(i).data();
            for (int p = 0; p < k; ++p) {
              const double* brow = B.row(p).data();
              double s = 0.0;
              for (int j = 0; j < n; ++j) s += dc[j] * brow[j];
              da[p] += s;
            }
          }
        }
        if (needs(g, b)) {
          Tensor& dB = g.grad_accumulator(b);
          for (int i = 0; i < m; ++i) {
            const double* dc = dC.row(i).data();
            const double* arow = A.row(i).data();
            for (int p = 0; p < k; ++p) {
              const double av = arow[p];
              if (av == 0.0) continue;
              double* db = dB.row(p).data();
              for (int j = 0; j < n; ++j) db[j] += av * dc[j];
            }
          }
        }
      },
      "matmul");
}

Var transpose(Var a) {
  const Tensor& A = a.value();
  Tensor T(A.cols(), A.rows());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) T(j, i) = A(i, j);
  return a.graph()->record(
      std::move(T), {a},
      [a](Graph& g, const Tensor& dT) {
        Tensor& dA = g.grad_accumulator(a);
        for (int i = 0; i < dA.rows(); ++i)
          for (int j = 0; j < dA.cols(); ++j) dA(i, j) += dT(j, i);
      },
      "transpose");
}

namespace {

template <typename Fwd, typename Da, typename Db>
Var binary_elementwise(Var a, Var b, const char* op, Fwd fwd, Da da, Db db) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (!A.same_shape(B)) shape_error(op, A, B);
  Tensor C(A.rows(), A.cols());
  for (std::size_t i = 0; i < C.size(); ++i) C[i] = fwd(A[i], B[i]);
  return a.graph()->record(
      std::move(C), {a, b},
      [a, b, da, db](Graph& g, const Tensor& dC) {
        const Tensor& A = g.value(a.id());
        const Tensor& B = g.value(b.id());
        if (needs(g, a)) {
          Tensor& dA = g.grad_accumulator(a);
          for (std::size_t i = 0; i < dC.size(); ++i) dA[i] += dC[i] * da(A[i], B[i]);
        }
        if (needs(g, b)) {
          Tensor& dB = g.grad_accumulator(b);
          for (std::size_t i = 0; i < dC.size(); ++i) dB[i] += dC[i] * db(A[i], B[i]);
        }
      },
      op);
}

// Unary op whose derivative is expressed through input x and output y.
template <typename Fwd, typename Deriv>
Var unary_elementwise(Var a, const char* op, Fwd fwd, Deriv deriv) {
  const Tensor& A = a.value();
  Tensor Y(A.rows(), A.cols());
  for (std::size_t i = 0; i < Y.size(); ++i) Y[i] = fwd(A[i]);
  Graph* g = a.graph();
  const int out_id = static_cast<int>(g->size());
  return g->record(
      std::move(Y), {a},
      [a, out_id, deriv](Graph& g, const Tensor& dY) {
        const Tensor& A = g.value(a.id());
        const Tensor& Y = g.value(out_id);
        Tensor& dA = g.grad_accumulator(a);
        for (std::size_t i = 0; i < dY.size(); ++i) dA[i] += dY[i] * deriv(A[i], Y[i]);
      },
      op);
}

}  // namespace

Var add(Var a, Var b) {
  return binary_elementwise(
      a, b, "add", [](double x, double y) { return x + y; },
      [](double, double) { return 1.0; }, [](double, double) { return 1.0; });
}

Var sub(Var a, Var b) {
  return binary_elementwise(
      a, b, "sub", [](double x, double y) { return x - y; },
      [](double, double) { return 1.0; }, [](double, double) { return -1.0; });
}

Var mul(Var a, Var b) {
  return binary_elementwise(
      a, b, "mul", [](double x, double y) { return x * y; },
      [](double, double y) { return y; }, [](double x, double) { return x; });
}

Var add_row(Var a, Var row) {
  const Tensor& A = a.value();
  const Tensor& R = row.value();
  if (R.rows() != 1 || R.cols() != A.cols()) shape_error("add_row", A, R);
  Tensor C = A;
  for (int i = 0; i < C.rows(); ++i) {
    auto c = C.row(i);
    for (int j = 0; j < C.cols(); ++j) c[j] += R[j];
  }
  return a.graph()->record(
      std::move(C), {a, row},
      [a, row](Graph& g, const Tensor& dC) {
        if (needs(g, a)) {
          Tensor& dA = g.grad_accumulator(a);
          for (std::size_t i = 0; i < dC.size(); ++i) dA[i] += dC[i];
        }
        if (needs(g, row)) {
          Tensor& dR = g.grad_accumulator(row);
          for (int i = 0; i < dC.rows(); ++i)
            for (int j = 0; j < dC.cols(); ++j) dR[j] += dC(i, j);
        }
      },
      "add_row");
}

Var affine(Var a, double scale, double shift) {
  return unary_elementwise(
      a, "affine", [scale, shift](double x) { return scale * x + shift; },
      [scale](double, double) { return scale; });
}

Var tanh(Var a) {
  return unary_elementwise(
      a, "tanh", [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Var relu(Var a) {
  return unary_elementwise(
      a, "relu", [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var sigmoid(Var a) {
  return unary_elementwise(
      a, "sigmoid",
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

namespace {

// Row-wise (masked) softmax; mask may be empty for "all valid".
Tensor softmax_forward(const Tensor& A, const std::vector<char>& mask) {
  Tensor Y(A.rows(), A.cols());
  for (int i = 0; i < A.rows(); ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < A.cols(); ++j) {
      if (!mask.empty() && !mask[static_cast<std::size_t>(i) * A.cols() + j]) continue;
      mx = std::max(mx, A(i, j));
    }
    if (!std::isfinite(mx)) throw DimensionError("softmax: row without valid entries");
    double z = 0.0;
    for (int j = 0; j < A.cols(); ++j) {
      if (!mask.empty() && !mask[static_cast<std::size_t>(i) * A.cols() + j]) continue;
      Y(i, j) = std::exp(A(i, j) - mx);
      z += Y(i, j);
    }
    for (int j = 0; j < A.cols(); ++j) Y(i, j) /= z;
  }
  return Y;
}

Var softmax_impl(Var a, std::vector<char> mask, const char* op) {
  const Tensor& A = a.value();
  if (!mask.empty() && mask.size() != A.size()) {
    throw DimensionError(std::string(op) + ": mask size does not match " + A.shape_string());
  }
  Tensor Y = softmax_forward(A, mask);
  Graph* g = a.graph();
  const int out_id = static_cast<int>(g->size());
  return g->record(
      std::move(Y), {a},
      [a, out_id](Graph& g, const Tensor& dY) {
        const Tensor& Y = g.value(out_id);
        Tensor& dA = g.grad_accumulator(a);
        for (int i = 0; i < Y.rows(); ++i) {
          double dot = 0.0;
          for (int j = 0; j < Y.cols(); ++j) dot += dY(i, j) * Y(i, j);
          for (int j = 0; j < Y.cols(); ++j) dA(i, j) += Y(i, j) * (dY(i, j) - dot);
        }
      },
      op);
}

}  // namespace

Var softmax(Var a) { return softmax_impl(a, {}, "softmax"); }

Var masked_softmax(Var a, const std::vector<char>& mask) {
  return softmax_impl(a, mask, "masked_softmax");
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw DimensionError("concat_cols: no operands");
  const int rows = parts[0].rows();
  int cols = 0;
  for (const Var& p : parts) {
    if (p.rows() != rows) shape_error("concat_cols", parts[0].value(), p.value());
    cols += p.cols();
  }
  Tensor C(rows, cols);
  std::vector<int> offsets;
  int off = 0;
  for (const Var& p : parts) {
    offsets.push_back(off);
    const Tensor& P = p.value();
    for (int i = 0; i < rows; ++i) std::copy(P.row(i).begin(), P.row(i).end(), C.row(i).begin() + off);
    off += P.cols();
  }
  return parts[0].graph()->record(
      std::move(C), parts,
      [parts, offsets](Graph& g, const Tensor& dC) {
        for (std::size_t k = 0; k < parts.size(); ++k) {
          if (!needs(g, parts[k])) continue;
          Tensor& dP = g.grad_accumulator(parts[k]);
          for (int i = 0; i < dP.rows(); ++i)
            for (int j = 0; j < dP.cols(); ++j) dP(i, j) += dC(i, offsets[k] + j);
        }
      },
      "concat_cols");
}

Var concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) throw DimensionError("concat_rows: no operands");
  const int cols = parts[0].cols();
  int rows = 0;
  for (const Var& p : parts) {
    if (p.cols() != cols) shape_error("concat_rows", parts[0].value(), p.value());
    rows += p.rows();
  }
  Tensor C(rows, cols);
  std::vector<int> offsets;
  int off = 0;
  for (const Var& p : parts) {
    offsets.push_back(off);
    const Tensor& P = p.value();
    std::copy(P.values().begin(), P.values().end(),
              C.values().begin() + static_cast<std::ptrdiff_t>(off) * cols);
    off += P.rows();
  }
  return parts[0].graph()->record(
      std::move(C), parts,
      [parts, offsets, cols](Graph& g, const Tensor& dC) {
        for (std::size_t k = 0; k < parts.size(); ++k) {
          if (!needs(g, parts[k])) continue;
          Tensor& dP = g.grad_accumulator(parts[k]);
          const std::size_t base = static_cast<std::size_t>(offsets[k]) * cols;
          for (std::size_t i = 0; i < dP.size(); ++i) dP[i] += dC[base + i];
        }
      },
      "concat_rows");
}

Var slice_cols(Var a, int begin, int count) {
  const Tensor& A = a.value();
  if (begin < 0 || count < 0 || begin + count > A.cols()) {
    throw DimensionError("slice_cols: columns [" + std::to_string(begin) + ", " +
                         std::to_string(begin + count) + ") out of range for " + A.shape_string());
  }
  Tensor C(A.rows(), count);
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < count; ++j) C(i, j) = A(i, begin + j);
  return a.graph()->record(
      std::move(C), {a},
      [a, begin, count](Graph& g, const Tensor& dC) {
        Tensor& dA = g.grad_accumulator(a);
        for (int i = 0; i < dC.rows(); ++i)
          for (int j = 0; j < count; ++j) dA(i, begin + j) += dC(i, j);
      },
      "slice_cols");
}

Var gather_rows(Var a, std::span<const int> idx) {
  const Tensor& A = a.value();
  Tensor C(static_cast<int>(idx.size()), A.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (idx[r] < 0 || idx[r] >= A.rows()) {
      throw DimensionError("gather_rows: row " + std::to_string(idx[r]) + " out of range for " +
                           A.shape_string());
    }
    std::copy(A.row(idx[r]).begin(), A.row(idx[r]).end(), C.row(static_cast<int>(r)).begin());
  }
  std::vector<int> rows(idx.begin(), idx.end());
  return a.graph()->record(
      std::move(C), {a},
      [a, rows = std::move(rows)](Graph& g, const Tensor& dC) {
        Tensor& dA = g.grad_accumulator(a);
        for (std::size_t r = 0; r < rows.size(); ++r) {
          auto src = dC.row(static_cast<int>(r));
          auto dst = dA.row(rows[r]);
          for (std::size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
        }
      },
      "gather_rows");
}

Var gather_elements(Var a, std::span<const int> rows, std::span<const int> cols) {
  const Tensor& A = a.value();
  if (rows.size() != cols.size()) throw DimensionError("gather_elements: index lengths differ");
  Tensor C(static_cast<int>(rows.size()), 1);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] < 0 || rows[k] >= A.rows() || cols[k] < 0 || cols[k] >= A.cols()) {
      throw DimensionError("gather_elements: index out of range for " + A.shape_string());
    }
    C[k] = A(rows[k], cols[k]);
  }
  std::vector<int> r(rows.begin(), rows.end()), c(cols.begin(), cols.end());
  return a.graph()->record(
      std::move(C), {a},
      [a, r = std::move(r), c = std::move(c)](Graph& g, const Tensor& dC) {
        Tensor& dA = g.grad_accumulator(a);
        for (std::size_t k = 0; k < r.size(); ++k) dA(r[k], c[k]) += dC[k];
      },
      "gather_elements");
}

Var scatter_elements(Var values, std::span<const int> rows_idx, std::span<const int> cols_idx,
                     int rows, int cols) {
  const Tensor& V = values.value();
  if (V.cols() != 1 || static_cast<std::size_t>(V.rows()) != rows_idx.size() ||
      rows_idx.size() != cols_idx.size()) {
    throw DimensionError("scatter_elements: values " + V.shape_string() +
                         " do not match index lists");
  }
  Tensor C(rows, cols);
  for (std::size_t k = 0; k < rows_idx.size(); ++k) {
    if (rows_idx[k] < 0 || rows_idx[k] >= rows || cols_idx[k] < 0 || cols_idx[k] >= cols) {
      throw DimensionError("scatter_elements: index out of range");
    }
    C(rows_idx[k], cols_idx[k]) += V[k];
  }
  std::vector<int> r(rows_idx.begin(), rows_idx.end()), c(cols_idx.begin(), cols_idx.end());
  return values.graph()->record(
      std::move(C), {values},
      [values, r = std::move(r), c = std::move(c)](Graph& g, const Tensor& dC) {
        Tensor& dV = g.grad_accumulator(values);
        for (std::size_t k = 0; k < r.size(); ++k) dV[k] += dC(r[k], c[k]);
      },
      "scatter_elements");
}

Var sum(Var a) {
  const Tensor& A = a.value();
  double s = 0.0;
  for (double v : A.values()) s += v;
  return a.graph()->record(
      Tensor::scalar(s), {a},
      [a](Graph& g, const Tensor& dC) {
        Tensor& dA = g.grad_accumulator(a);
        for (std::size_t i = 0; i < dA.size(); ++i) dA[i] += dC[0];
      },
      "sum");
}

Var dropout(Var a, double rate, bool training, Rng& rng) {
  if (!training || rate <= 0.0) return a;
  if (rate >= 1.0) throw ConfigError("dropout rate must be below 1");
  const Tensor& A = a.value();
  const double keep = 1.0 - rate;
  std::vector<double> mask(A.size());
  std::bernoulli_distribution draw(keep);
  for (auto& m : mask) m = draw(rng) ? 1.0 / keep : 0.0;
  Tensor C(A.rows(), A.cols());
  for (std::size_t i = 0; i < C.size(); ++i) C[i] = A[i] * mask[i];
  return a.graph()->record(
      std::move(C), {a},
      [a, mask = std::move(mask)](Graph& g, const Tensor& dC) {
        Tensor& dA = g.grad_accumulator(a);
        for (std::size_t i = 0; i < dA.size(); ++i) dA[i] += dC[i] * mask[i];
      },
      "dropout");
}

Var unfold_rows(Var a, int width) {
  const Tensor& A = a.value();
  if (width < 1 || A.rows() < width) {
    throw DimensionError("unfold_rows: width " + std::to_string(width) + " exceeds rows of " +
                         A.shape_string());
  }
  const int out_rows = A.rows() - width + 1;
  const int c = A.cols();
  Tensor C(out_rows, width * c);
  for (int r = 0; r < out_rows; ++r)
    for (int w = 0; w < width; ++w)
      std::copy(A.row(r + w).begin(), A.row(r + w).end(), C.row(r).begin() + w * c);
  return a.graph()->record(
      std::move(C), {a},
      [a, width, c](Graph& g, const Tensor& dC) {
        Tensor& dA = g.grad_accumulator(a);
        for (int r = 0; r < dC.rows(); ++r)
          for (int w = 0; w < width; ++w)
            for (int j = 0; j < c; ++j) dA(r + w, j) += dC(r, w * c + j);
      },
      "unfold_rows");
}

Var max_rows(Var a) {
  const Tensor& A = a.value();
  if (A.rows() == 0) throw DimensionError("max_rows: empty operand");
  Tensor C(1, A.cols());
  std::vector<int> arg(A.cols(), 0);
  for (int j = 0; j < A.cols(); ++j) {
    C[j] = A(0, j);
    for (int i = 1; i < A.rows(); ++i) {
      if (A(i, j) > C[j]) {
        C[j] = A(i, j);
        arg[j] = i;
      }
    }
  }
  return a.graph()->record(
      std::move(C), {a},
      [a, arg = std::move(arg)](Graph& g, const Tensor& dC) {
        Tensor& dA = g.grad_accumulator(a);
        for (std::size_t j = 0; j < arg.size(); ++j) dA(arg[j], static_cast<int>(j)) += dC[j];
      },
      "max_rows");
}

Var reshape(Var a, int rows, int cols) {
  const Tensor& A = a.value();
  if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows) * cols != A.size()) {
    throw DimensionError("reshape: cannot view " + A.shape_string() + " as [" +
                         std::to_string(rows) + "x" + std::to_string(cols) + "]");
  }
  return a.graph()->record(
      Tensor(rows, cols, A.values()), {a},
      [a](Graph& g, const Tensor& dC) {
        Tensor& dA = g.grad_accumulator(a);
        for (std::size_t i = 0; i < dA.size(); ++i) dA[i] += dC[i];
      },
      "reshape");
}

Var segment_max(Var a, std::span<const int> segment_sizes) {
  const Tensor& A = a.value();
  int total = 0;
  for (int s : segment_sizes) {
    if (s < 1) throw DimensionError("segment_max: empty segment");
    total += s;
  }
  if (total != A.rows()) {
    throw DimensionError("segment_max: segments cover " + std::to_string(total) + " rows of " +
                         A.shape_string());
  }
  const int cols = A.cols();
  Tensor C(static_cast<int>(segment_sizes.size()), cols);
  std::vector<int> arg(C.size());
  int begin = 0;
  for (std::size_t s = 0; s < segment_sizes.size(); ++s) {
    for (int j = 0; j < cols; ++j) {
      int best = begin;
      for (int i = begin + 1; i < begin + segment_sizes[s]; ++i) {
        if (A(i, j) > A(best, j)) best = i;
      }
      C(static_cast<int>(s), j) = A(best, j);
      arg[s * cols + j] = best;
    }
    begin += segment_sizes[s];
  }
  return a.graph()->record(
      std::move(C), {a},
      [a, arg = std::move(arg), cols](Graph& g, const Tensor& dC) {
        Tensor& dA = g.grad_accumulator(a);
        for (std::size_t k = 0; k < arg.size(); ++k) {
          dA(arg[k], static_cast<int>(k % cols)) += dC[k];
        }
      },
      "segment_max");
}

Var span_attention(Var x, Var scores, std::span<const SpanRange> spans) {
  const Tensor& X = x.value();
  const Tensor& A = scores.value();
  if (A.cols() != 1 || A.rows() != X.rows()) shape_error("span_attention", X, A);
  const int d = X.cols();
  Tensor H(static_cast<int>(spans.size()), d);
  // Attention weights, flattened span by span.
  std::vector<double> weights;
  for (std::size_t s = 0; s < spans.size(); ++s) {
    const auto [b, e] = spans[s];
    if (b < 0 || e < b || e >= X.rows()) {
      throw DimensionError("span_attention: span [" + std::to_string(b) + "," +
                           std::to_string(e) + "] out of range for " + X.shape_string());
    }
    double mx = A[b];
    for (int t = b + 1; t <= e; ++t) mx = std::max(mx, A[t]);
    const std::size_t base = weights.size();
    double z = 0.0;
    for (int t = b; t <= e; ++t) {
      weights.push_back(std::exp(A[t] - mx));
      z += weights.back();
    }
    auto h = H.row(static_cast<int>(s));
    for (int t = b; t <= e; ++t) {
      double& w = weights[base + (t - b)];
      w /= z;
      auto xt = X.row(t);
      for (int j = 0; j < d; ++j) h[j] += w * xt[j];
    }
  }
  std::vector<SpanRange> ranges(spans.begin(), spans.end());
  return x.graph()->record(
      std::move(H), {x, scores},
      [x, scores, ranges = std::move(ranges), weights = std::move(weights), d](
          Graph& g, const Tensor& dH) {
        const Tensor& X = g.value(x.id());
        Tensor* dX = needs(g, x) ? &g.grad_accumulator(x) : nullptr;
        Tensor* dA = needs(g, scores) ? &g.grad_accumulator(scores) : nullptr;
        std::size_t base = 0;
        std::vector<double> dw;
        for (std::size_t s = 0; s < ranges.size(); ++s) {
          const auto [b, e] = ranges[s];
          auto dh = dH.row(static_cast<int>(s));
          const int len = e - b + 1;
          dw.assign(len, 0.0);
          double dot = 0.0;
          for (int t = b; t <= e; ++t) {
            const double w = weights[base + (t - b)];
            auto xt = X.row(t);
            double g_w = 0.0;
            for (int j = 0; j < d; ++j) g_w += dh[j] * xt[j];
            dw[t - b] = g_w;
            dot += w * g_w;
            if (dX) {
              auto dxt = dX->row(t);
              for (int j = 0; j < d; ++j) dxt[j] += w * dh[j];
            }
          }
          if (dA) {
            for (int t = b; t <= e; ++t) {
              const double w = weights[base + (t - b)];
              (*dA)[t] += w * (dw[t - b] - dot);
            }
          }
          base += len;
        }
      },
      "span_attention");
}

Var weighted_group_sum(Var weights, Var values) {
  const Tensor& W = weights.value();
  const Tensor& V = values.value();
  const int k = W.rows(), groups = W.cols(), d = V.cols();
  if (V.rows() != k * groups) shape_error("weighted_group_sum", W, V);
  Tensor C(k, d);
  for (int r = 0; r < k; ++r) {
    auto c = C.row(r);
    for (int q = 0; q < groups; ++q) {
      const double w = W(r, q);
      if (w == 0.0) continue;
      auto v = V.row(r * groups + q);
      for (int j = 0; j < d; ++j) c[j] += w * v[j];
    }
  }
  return weights.graph()->record(
      std::move(C), {weights, values},
      [weights, values, k, groups, d](Graph& g, const Tensor& dC) {
        const Tensor& W = g.value(weights.id());
        const Tensor& V = g.value(values.id());
        Tensor* dW = needs(g, weights) ? &g.grad_accumulator(weights) : nullptr;
        Tensor* dV = needs(g, values) ? &g.grad_accumulator(values) : nullptr;
        for (int r = 0; r < k; ++r) {
          auto dc = dC.row(r);
          for (int q = 0; q < groups; ++q) {
            auto v = V.row(r * groups + q);
            if (dW) {
              double s = 0.0;
              for (int j = 0; j < d; ++j) s += dc[j] * v[j];
              (*dW)(r, q) += s;
            }
            if (dV) {
              auto dv = dV->row(r * groups + q);
              const double w = W(r, q);
              for (int j = 0; j < d; ++j) dv[j] += w * dc[j];
            }
          }
        }
      },
      "weighted_group_sum");
}

Var marginal_nll(Var scores, const std::vector<char>& valid, const std::vector<char>& gold) {
  const Tensor& S = scores.value();
  if (valid.size() != S.size() || gold.size() != S.size()) {
    throw DimensionError("marginal_nll: masks do not match " + S.shape_string());
  }
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] && !valid[i]) throw DimensionError("marginal_nll: gold entry is not valid");
  }
  Tensor p_valid = softmax_forward(S, valid);
  Tensor p_gold = softmax_forward(S, gold);
  double loss = 0.0;
  for (int i = 0; i < S.rows(); ++i) {
    // log-sum-exp differences, computed stably per row.
    double mv = -std::numeric_limits<double>::infinity(), mg = mv;
    for (int j = 0; j < S.cols(); ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * S.cols() + j;
      if (valid[k]) mv = std::max(mv, S(i, j));
      if (gold[k]) mg = std::max(mg, S(i, j));
    }
    double zv = 0.0, zg = 0.0;
    for (int j = 0; j < S.cols(); ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * S.cols() + j;
      if (valid[k]) zv += std::exp(S(i, j) - mv);
      if (gold[k]) zg += std::exp(S(i, j) - mg);
    }
    loss += (mv + std::log(zv)) - (mg + std::log(zg));
  }
  Tensor grad_cache(S.rows(), S.cols());
  for (std::size_t i = 0; i < grad_cache.size(); ++i) grad_cache[i] = p_valid[i] - p_gold[i];
  return scores.graph()->record(
      Tensor::scalar(loss), {scores},
      [scores, grad_cache = std::move(grad_cache)](Graph& g, const Tensor& dL) {
        Tensor& dS = g.grad_accumulator(scores);
        for (std::size_t i = 0; i < dS.size(); ++i) dS[i] += dL[0] * grad_cache[i];
      },
      "marginal_nll");
}

Var sigmoid_cross_entropy(Var logits, std::span<const double> labels) {
  const Tensor& Z = logits.value();
  if (Z.cols() != 1 || static_cast<std::size_t>(Z.rows()) != labels.size()) {
    throw DimensionError("sigmoid_cross_entropy: logits " + Z.shape_string() + " vs " +
                         std::to_string(labels.size()) + " labels");
  }
  double loss = 0.0;
  std::vector<double> grad(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double z = Z[i];
    loss += std::max(z, 0.0) - z * labels[i] + std::log1p(std::exp(-std::abs(z)));
    const double p = z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    grad[i] = p - labels[i];
  }
  return logits.graph()->record(
      Tensor::scalar(loss), {logits},
      [logits, grad = std::move(grad)](Graph& g, const Tensor& dL) {
        Tensor& dZ = g.grad_accumulator(logits);
        for (std::size_t i = 0; i < grad.size(); ++i) dZ[i] += dL[0] * grad[i];
      },
      "sigmoid_cross_entropy");
}

}  // namespace arcoref::nn
