// Copyright 2026 The actid Authors
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
//
// Test-only oracles. The finite-difference gradient is the independent
// reference the analytic tape is checked against; it never touches the
// reverse-mode path.

#ifndef ACTID_TESTS_TEST_UTIL_HPP_
#define ACTID_TESTS_TEST_UTIL_HPP_

#include <cmath>
#include <functional>
#include <vector>

#include "actid/common.hpp"

namespace actid::testutil {

// Central finite differences with per-coordinate step h = h0 * max(1, |z_i|).
inline std::vector<double> fd_gradient(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> z, double h0 = 1e-6) {
  std::vector<double> grad(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double h = h0 * std::max(1.0, std::abs(z[i]));
    const double saved = z[i];
    z[i] = saved + h;
    const double fp = f(z);
    z[i] = saved - h;
    const double fm = f(z);
    z[i] = saved;
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

inline double rel_err(double a, double b, double floor = 1e-8) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace actid::testutil

#endif  // ACTID_TESTS_TEST_UTIL_HPP_
