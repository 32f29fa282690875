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

#ifndef ACTID_COMMON_HPP_
#define ACTID_COMMON_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace actid {

// Thrown when a rollout produces a non-finite state. Carries the step index
// at which the state first went non-finite.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, long step)
      : std::runtime_error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

// Misuse of an API contract (bad argument, wrong model kind, invalid config).
// CLI maps this to exit code 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// All randomness in the toolkit flows from one global seed. Component streams
// are derived as derive_seed(global, tag), so any sub-experiment can be
// reproduced in isolation from (seed, tag).
std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view tag);

// Deterministic random stream. Wraps a fixed 64-bit generator and does its
// own uniform/normal mapping so outputs are identical across platforms and
// standard-library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform();                        // [0, 1)
  double uniform(double lo, double hi);    // [lo, hi)
  int uniform_int(int lo, int hi);         // {lo, ..., hi} inclusive
  double normal();                         // standard normal

 private:
  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace actid

#endif  // ACTID_COMMON_HPP_
