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
// Scalar reverse-mode differentiation on a Wengert tape. Local partials are
// computed at record time, so the backward sweep is a single reverse pass
// that visits each node exactly once. Tapes are single-threaded; parallel
// callers each own a private tape.

#ifndef ACTID_TAPE_HPP_
#define ACTID_TAPE_HPP_

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "actid/common.hpp"

namespace actid::ad {

enum class Op : std::uint8_t {
  kLeaf,
  kConst,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kNeg,
  kSin,
  kCos,
  kTanh,
  kExp,
  kClip,
  kMin,
  kMax,
  kSquare,
  kSqrt,
};

const char* op_name(Op op);

class Tape;

// Handle to one node of a tape. Cheap to copy; valid until Tape::clear().
class Var {
 public:
  Var() = default;
  double value() const { return value_; }
  int id() const { return id_; }
  Tape* tape() const { return tape_; }

 private:
  friend class Tape;
  Var(Tape* tape, int id, double value) : tape_(tape), id_(id), value_(value) {}

  Tape* tape_ = nullptr;
  std::int32_t id_ = -1;
  double value_ = 0.0;
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaves are differentiation roots (parameters). Constants are recorded
  // values with no adjoint of interest; both are zero-arity nodes.
  Var leaf(double value) { return push(Op::kLeaf, value, -1, -1, 0.0, 0.0); }
  Var constant(double value) { return push(Op::kConst, value, -1, -1, 0.0, 0.0); }

  int size() const { return static_cast<int>(nodes_.size()); }
  void clear() { nodes_.clear(); }
  void reserve(std::size_t n) { nodes_.reserve(n); }

  // Reverse sweep from `loss`; fan-out accumulates by summation. Returns
  // d loss / d params[i] in `grad_out` (same layout as `params`).
  void gradient(const Var& loss, std::span<const Var> params,
                std::span<double> grad_out);

  // Raw adjoints after the last gradient() call, indexed by node id.
  double adjoint(const Var& v) const { return adjoints_[v.id_]; }

  Var record_binary(Op op, const Var& a, const Var& b);
  Var record_unary(Op op, const Var& a);
  Var record_clip(const Var& x, double lo, double hi);

 private:
  // The op kind is only needed for record-time diagnostics, so the hot node
  // carries just partials and parent links (24 bytes).
  struct Node {
    double d0, d1;          // local partials w.r.t. parents
    std::int32_t p0, p1;    // parent node ids, -1 if none
  };

  Var push(Op, double value, std::int32_t p0, std::int32_t p1, double d0,
           double d1) {
    nodes_.push_back(Node{d0, d1, p0, p1});
    return Var(this, static_cast<int>(nodes_.size()) - 1, value);
  }

  [[noreturn]] void fail(Op op, const std::string& what, int node) const;

  std::vector<Node> nodes_;
  std::vector<double> adjoints_;
};

namespace detail {
inline void check_same_tape(const Var& a, const Var& b) {
  if (a.tape() != b.tape() || a.tape() == nullptr)
    throw UsageError("ad: operands belong to different tapes");
}
}  // namespace detail

// -- arithmetic ---------------------------------------------------------

inline Var operator+(const Var& a, const Var& b) {
  detail::check_same_tape(a, b);
  return a.tape()->record_binary(Op::kAdd, a, b);
}
inline Var operator-(const Var& a, const Var& b) {
  detail::check_same_tape(a, b);
  return a.tape()->record_binary(Op::kSub, a, b);
}
inline Var operator*(const Var& a, const Var& b) {
  detail::check_same_tape(a, b);
  return a.tape()->record_binary(Op::kMul, a, b);
}
inline Var operator/(const Var& a, const Var& b) {
  detail::check_same_tape(a, b);
  return a.tape()->record_binary(Op::kDiv, a, b);
}
inline Var operator-(const Var& a) { return a.tape()->record_unary(Op::kNeg, a); }

inline Var operator+(const Var& a, double b) { return a + a.tape()->constant(b); }
inline Var operator+(double a, const Var& b) { return b.tape()->constant(a) + b; }
inline Var operator-(const Var& a, double b) { return a - a.tape()->constant(b); }
inline Var operator-(double a, const Var& b) { return b.tape()->constant(a) - b; }
inline Var operator*(const Var& a, double b) { return a * a.tape()->constant(b); }
inline Var operator*(double a, const Var& b) { return b.tape()->constant(a) * b; }
inline Var operator/(const Var& a, double b) { return a / a.tape()->constant(b); }
inline Var operator/(double a, const Var& b) { return b.tape()->constant(a) / b; }

// -- primitives ---------------------------------------------------------

inline Var sin(const Var& a) { return a.tape()->record_unary(Op::kSin, a); }
inline Var cos(const Var& a) { return a.tape()->record_unary(Op::kCos, a); }
inline Var tanh(const Var& a) { return a.tape()->record_unary(Op::kTanh, a); }
inline Var exp(const Var& a) { return a.tape()->record_unary(Op::kExp, a); }
inline Var sqrt(const Var& a) { return a.tape()->record_unary(Op::kSqrt, a); }
inline Var square(const Var& a) { return a.tape()->record_unary(Op::kSquare, a); }

// Subgradient convention: derivative 1 inside the active region, 0 outside;
// an input sitting exactly on a boundary takes the interior branch. For
// min/max, ties follow the first argument.
inline Var min(const Var& a, const Var& b) {
  detail::check_same_tape(a, b);
  return a.tape()->record_binary(Op::kMin, a, b);
}
inline Var max(const Var& a, const Var& b) {
  detail::check_same_tape(a, b);
  return a.tape()->record_binary(Op::kMax, a, b);
}
inline Var min(const Var& a, double b) { return min(a, a.tape()->constant(b)); }
inline Var max(const Var& a, double b) { return max(a, a.tape()->constant(b)); }
inline Var clip(const Var& x, double lo, double hi) {
  return x.tape()->record_clip(x, lo, hi);
}
inline Var relu(const Var& x) { return max(x, 0.0); }

}  // namespace actid::ad

namespace actid {

// Double counterparts so generic code compiles for both scalar types.
inline double square(double x) { return x * x; }
inline double clip(double x, double lo, double hi) {
  return x < lo ? lo : (x > hi ? hi : x);
}
inline double relu(double x) { return x > 0.0 ? x : 0.0; }

using ad::clip;
using ad::relu;
using ad::square;

}  // namespace actid

#endif  // ACTID_TAPE_HPP_
