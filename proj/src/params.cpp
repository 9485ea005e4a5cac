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

#include "arcoref/params.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "arcoref/error.hpp"

namespace arcoref::nn {

Parameter& ParameterStore::add(const std::string& name, int rows, int cols, Init init, Rng& rng) {
  if (index_.count(name)) throw ConfigError("duplicate parameter name '" + name + "'");
  auto param = std::make_unique<Parameter>();
  param->name = name;
  param->value = Tensor(rows, cols);
  param->grad = Tensor(rows, cols);
  switch (init) {
    case Init::kZeros:
      break;
    case Init::kOnes:
      param->value.fill(1.0);
      break;
    case Init::kGlorotUniform: {
      const double limit = std::sqrt(6.0 / (rows + cols));
      std::uniform_real_distribution<double> dist(-limit, limit);
      for (auto& v : param->value.values()) v = dist(rng);
      break;
    }
  }
  Parameter& ref = *param;
  index_[name] = param.get();
  params_.push_back(std::move(param));
  return ref;
}

Parameter& ParameterStore::get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw DataError("unknown parameter '" + name + "'");
  return *it->second;
}

const Parameter& ParameterStore::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw DataError("unknown parameter '" + name + "'");
  return *it->second;
}

std::vector<Parameter*> ParameterStore::all() {
  std::vector<Parameter*> out;
  for (auto& p : params_) out.push_back(p.get());
  return out;
}

std::vector<const Parameter*> ParameterStore::all() const {
  std::vector<const Parameter*> out;
  for (const auto& p : params_) out.push_back(p.get());
  return out;
}

std::size_t ParameterStore::num_values() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) {
    if (!p->grad.same_shape(p->value)) p->grad = Tensor(p->value.rows(), p->value.cols());
    p->grad.fill(0.0);
  }
}

std::map<std::string, Tensor> ParameterStore::snapshot() const {
  std::map<std::string, Tensor> out;
  for (const auto& p : params_) out[p->name] = p->value;
  return out;
}

void ParameterStore::restore(const std::map<std::string, Tensor>& values) {
  for (auto& p : params_) {
    auto it = values.find(p->name);
    if (it == values.end()) throw DataError("checkpoint is missing parameter '" + p->name + "'");
    if (!it->second.same_shape(p->value)) {
      throw DataError("parameter '" + p->name + "' has shape " + p->value.shape_string() +
                      " but checkpoint holds " + it->second.shape_string());
    }
  }
  for (auto& p : params_) p->value = values.at(p->name);
}

void write_checkpoint(std::ostream& out, const Checkpoint& checkpoint) {
  out << "arcoref-checkpoint 1\n";
  out << "config " << checkpoint.config.size() << "\n";
  for (const auto& [key, value] : checkpoint.config) out << key << "=" << value << "\n";
  out << "params " << checkpoint.params.size() << "\n";
  out << std::setprecision(17);
  for (const auto& [name, tensor] : checkpoint.params) {
    out << name << " " << tensor.rows() << " " << tensor.cols() << "\n";
    for (std::size_t i = 0; i < tensor.size(); ++i) {
      if (i) out << ' ';
      out << tensor[i];
    }
    out << "\n";
  }
  out << "end\n";
}

Checkpoint read_checkpoint(std::istream& in) {
  Checkpoint checkpoint;
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "arcoref-checkpoint") {
    throw DataError("not an arcoref checkpoint");
  }
  if (version != 1) throw DataError("unsupported checkpoint version " + std::to_string(version));
  std::string word;
  std::size_t count = 0;
  if (!(in >> word >> count) || word != "config") throw DataError("checkpoint: missing config section");
  std::string line;
  std::getline(in, line);
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw DataError("checkpoint: truncated config section");
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DataError("checkpoint: bad config line '" + line + "'");
    checkpoint.config[line.substr(0, eq)] = line.substr(eq + 1);
  }
  if (!(in >> word >> count) || word != "params") throw DataError("checkpoint: missing params section");
  for (std::size_t i = 0; i < count; ++i) {
    std::string name;
    int rows = 0, cols = 0;
    if (!(in >> name >> rows >> cols) || rows < 0 || cols < 0) {
      throw DataError("checkpoint: bad parameter header");
    }
    std::vector<double> values(static_cast<std::size_t>(rows) * cols);
    for (auto& v : values) {
      if (!(in >> v)) throw DataError("checkpoint: truncated values for '" + name + "'");
    }
    checkpoint.params[name] = Tensor(rows, cols, std::move(values));
  }
  if (!(in >> word) || word != "end") throw DataError("checkpoint: missing end marker");
  return checkpoint;
}

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write checkpoint '" + path + "'");
  write_checkpoint(out, checkpoint);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint '" + path + "'");
  return read_checkpoint(in);
}

void Adam::step(const std::vector<Parameter*>& params) {
  for (const Parameter* p : params) {
    if (!p->grad.all_finite()) throw NumericError("non-finite gradient for parameter '" + p->name + "'");
    if (!p->grad.same_shape(p->value)) {
      throw DimensionError("gradient shape " + p->grad.shape_string() + " does not match parameter '" +
                           p->name + "' " + p->value.shape_string());
    }
  }
  ++step_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (Parameter* p : params) {
    auto& moments = moments_[p];
    if (!moments.m.same_shape(p->value)) {
      moments.m = Tensor(p->value.rows(), p->value.cols());
      moments.v = Tensor(p->value.rows(), p->value.cols());
    }
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double g = p->grad[i];
      moments.m[i] = b1 * moments.m[i] + (1.0 - b1) * g;
      moments.v[i] = b2 * moments.v[i] + (1.0 - b2) * g * g;
      const double m_hat = moments.m[i] / correction1;
      const double v_hat = moments.v[i] / correction2;
      p->value[i] -= options_.learning_rate * m_hat / (std::sqrt(v_hat) + options_.eps);
    }
  }
}

}  // namespace arcoref::nn
