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

#ifndef ARCOREF_TESTS_GRAD_CHECK_HPP_
#define ARCOREF_TESTS_GRAD_CHECK_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "arcoref/autodiff.hpp"
#include "arcoref/params.hpp"
#include "arcoref/random.hpp"

namespace arcoref::testing {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst;  // "param[index]: analytic vs numeric"
  int checked = 0;
};

// Relative error with a floor on the denominator so that entries whose true
// gradient is ~0 are compared absolutely.
inline double relative_error(double analytic, double numeric, double floor) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), floor});
}

// Compares backward gradients of `loss` against central differences for up
// to `samples_per_param` entries of every parameter (all entries when the
// parameter is small enough).
inline GradCheckResult check_gradients(const std::vector<nn::Parameter*>& params,
                                       const std::function<nn::Var(nn::Graph&)>& loss,
                                       double step = 1e-5, int samples_per_param = 12,
                                       double floor = 1e-4, std::uint64_t seed = 7) {
  for (auto* p : params) p->grad = nn::Tensor(p->value.rows(), p->value.cols());
  {
    nn::Graph g;
    g.backward(loss(g));
  }
  std::vector<nn::Tensor> analytic;
  for (auto* p : params) analytic.push_back(p->grad);

  auto evaluate = [&] {
    nn::Graph g;
    return loss(g).scalar();
  };
  Rng rng(seed);
  GradCheckResult result;
  for (std::size_t k = 0; k < params.size(); ++k) {
    nn::Parameter& p = *params[k];
    std::vector<int> entries(p.value.size());
    std::iota(entries.begin(), entries.end(), 0);
    if (static_cast<int>(entries.size()) > samples_per_param) {
      std::shuffle(entries.begin(), entries.end(), rng);
      entries.resize(samples_per_param);
    }
    for (int e : entries) {
      const double saved = p.value[e];
      p.value[e] = saved + step;
      const double plus = evaluate();
      p.value[e] = saved - step;
      const double minus = evaluate();
      p.value[e] = saved;
      const double numeric = (plus - minus) / (2.0 * step);
      const double err = relative_error(analytic[k][e], numeric, floor);
      ++result.checked;
      if (err > result.max_relative_error) {
        result.max_relative_error = err;
        result.worst = p.name + "[" + std::to_string(e) + "]: " + std::to_string(analytic[k][e]) +
                       " vs " + std::to_string(numeric);
      }
    }
  }
  return result;
}

}  // namespace arcoref::testing

#endif  // ARCOREF_TESTS_GRAD_CHECK_HPP_
