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

#ifndef ARCOREF_PARAMS_HPP_
#define ARCOREF_PARAMS_HPP_

#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "arcoref/random.hpp"
#include "arcoref/tensor.hpp"

namespace arcoref::nn {

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
};

enum class Init { kZeros, kGlorotUniform, kOnes };

// Named trainable tensors with stable addresses, kept in creation order.
class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(const ParameterStore&) = delete;
  ParameterStore& operator=(const ParameterStore&) = delete;

  // Throws ConfigError on a duplicate name.
  Parameter& add(const std::string& name, int rows, int cols, Init init, Rng& rng);

  Parameter& get(const std::string& name);
  const Parameter& get(const std::string& name) const;
  bool contains(const std::string& name) const { return index_.count(name) > 0; }

  std::vector<Parameter*> all();
  std::vector<const Parameter*> all() const;
  std::size_t size() const { return params_.size(); }
  std::size_t num_values() const;

  void zero_grad();

  // Named snapshot of all values, for model selection.
  std::map<std::string, Tensor> snapshot() const;
  // Throws DataError on a missing name or a shape mismatch.
  void restore(const std::map<std::string, Tensor>& values);

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::map<std::string, Parameter*> index_;
};

// Checkpoint container:
//
//   arcoref-checkpoint 1
//   config <n>
//   <key>=<value>            (n lines)
//   params <m>
//   <name> <rows> <cols>     (m blocks, values on the following line,
//   <v0> <v1> ...             printed with 17 significant digits)
//   end
struct Checkpoint {
  std::map<std::string, std::string> config;
  std::map<std::string, Tensor> params;
};

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction. Moment accumulators are keyed by parameter.
class Adam {
 public:
  explicit Adam(AdamOptions options = {}) : options_(options) {}

  // Applies one update from each parameter's grad. Throws NumericError
  // naming the parameter if any gradient is non-finite; no parameter is
  // modified in that case.
  void step(const std::vector<Parameter*>& params);

  long step_count() const { return step_; }
  const AdamOptions& options() const { return options_; }

 private:
  struct Moments {
    Tensor m;
    Tensor v;
  };
  AdamOptions options_;
  long step_ = 0;
  std::map<const Parameter*, Moments> moments_;
};

}  // namespace arcoref::nn

#endif  // ARCOREF_PARAMS_HPP_
