/*
 Copyright 2026 The fracblow Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <Eigen/Core>

#include <limits>
#include <stdexcept>
#include <string>

namespace fracblow {

// Points in R^N for N <= 3; the fixed maximum keeps them off the heap.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

inline Vec make_vec(int n, double fill = 0.0) { return Vec::Constant(n, fill); }

inline Vec unit_vec(int n, int axis) {
  Vec v = Vec::Zero(n);
  v[axis] = 1.0;
  return v;
}

/// Raised when a numerical procedure cannot deliver a result (divergence,
/// non-convergence, failed certification).
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr double kPi = 3.14159265358979323846;
constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace fracblow
