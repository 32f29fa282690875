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

#include "actid/tape.hpp"

#include <algorithm>

namespace actid::ad {

const char* op_name(Op op) {
  switch (op) {
    case Op::kLeaf: return "leaf";
    case Op::kConst: return "const";
    case Op::kAdd: return "add";
    case Op::kSub: return "sub";
    case Op::kMul: return "mul";
    case Op::kDiv: return "div";
    case Op::kNeg: return "neg";
    case Op::kSin: return "sin";
    case Op::kCos: return "cos";
    case Op::kTanh: return "tanh";
    case Op::kExp: return "exp";
    case Op::kClip: return "clip";
    case Op::kMin: return "min";
    case Op::kMax: return "max";
    case Op::kSquare: return "square";
    case Op::kSqrt: return "sqrt";
  }
  return "?";
}

void Tape::fail(Op op, const std::string& what, int node) const {
  throw std::domain_error("ad: " + what + " in " + op_name(op) + " at node " +
                          std::to_string(node));
}

Var Tape::record_binary(Op op, const Var& a, const Var& b) {
  const double x = a.value(), y = b.value();
  double v = 0.0, da = 0.0, db = 0.0;
  switch (op) {
    case Op::kAdd: v = x + y; da = 1.0; db = 1.0; break;
    case Op::kSub: v = x - y; da = 1.0; db = -1.0; break;
    case Op::kMul: v = x * y; da = y; db = x; break;
    case Op::kDiv:
      if (y == 0.0) fail(op, "division by zero", size());
      v = x / y;
      da = 1.0 / y;
      db = -x / (y * y);
      break;
    case Op::kMin:
      v = (x <= y) ? x : y;
      da = (x <= y) ? 1.0 : 0.0;
      db = 1.0 - da;
      break;
    case Op::kMax:
      v = (x >= y) ? x : y;
      da = (x >= y) ? 1.0 : 0.0;
      db = 1.0 - da;
      break;
    default: fail(op, "not a binary op", size());
  }
  return push(op, v, a.id(), b.id(), da, db);
}

Var Tape::record_unary(Op op, const Var& a) {
  const double x = a.value();
  double v = 0.0, d = 0.0;
  switch (op) {
    case Op::kNeg: v = -x; d = -1.0; break;
    case Op::kSin: v = std::sin(x); d = std::cos(x); break;
    case Op::kCos: v = std::cos(x); d = -std::sin(x); break;
    case Op::kTanh: {
      v = std::tanh(x);
      d = 1.0 - v * v;
      break;
    }
    case Op::kExp: v = std::exp(x); d = v; break;
    case Op::kSquare: v = x * x; d = 2.0 * x; break;
    case Op::kSqrt:
      if (x < 0.0) fail(op, "square root of negative value", size());
      v = std::sqrt(x);
      d = 0.5 / v;
      break;
    default: fail(op, "not a unary op", size());
  }
  return push(op, v, a.id(), -1, d, 0.0);
}

Var Tape::record_clip(const Var& x, double lo, double hi) {
  const double v = x.value();
  // Interior derivative at an exact boundary.
  const double d = (v >= lo && v <= hi) ? 1.0 : 0.0;
  return push(Op::kClip, std::clamp(v, lo, hi), x.id(), -1, d, 0.0);
}

void Tape::gradient(const Var& loss, std::span<const Var> params,
                    std::span<double> grad_out) {
  if (loss.tape() != this || loss.id() < 0 || loss.id() >= size())
    throw UsageError("ad: loss is not a node on this tape");
  if (grad_out.size() != params.size())
    throw UsageError("ad: gradient output size mismatch");

  adjoints_.assign(nodes_.size(), 0.0);
  adjoints_[loss.id()] = 1.0;
  for (int i = loss.id(); i >= 0; --i) {
    const double a = adjoints_[i];
    if (a == 0.0) continue;
    const Node& n = nodes_[i];
    if (n.p0 >= 0) adjoints_[n.p0] += a * n.d0;
    if (n.p1 >= 0) adjoints_[n.p1] += a * n.d1;
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    const Var& p = params[k];
    if (p.tape() != this) throw UsageError("ad: parameter not on this tape");
    grad_out[k] = adjoints_[p.id()];
  }
}

}  // namespace actid::ad
