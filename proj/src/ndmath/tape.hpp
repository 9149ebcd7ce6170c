#pragma once

#include <cstddef>
#include <vector>

#include "ndmath/matrix.hpp"

namespace egan::nd {

struct Var {
  std::size_t id;
};

// Reverse-mode gradient record over a small closed set of matrix primitives.
// Values are stored by value; operations append to the record in evaluation
// order, so backward is a single reverse sweep.
class Tape {
 public:
  enum class Op { kLeaf, kMatmul, kAdd, kAddRow, kLeakyRelu, kScale, kSum, kMean, kMse };

  Var leaf(Matrix value, bool requires_grad = false);

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var add_row(Var a, Var row);
  Var leaky_relu(Var a, float slope = kLeakySlope);
  Var scale(Var a, float s);
  Var sum(Var a);
  Var mean(Var a);
  // mean((pred - target)^2) over all entries.
  Var mse(Var pred, Var target);

  const Matrix& value(Var v) const { return nodes_.at(v.id).value; }
  // Zero-filled when v received no gradient.
  Matrix grad(Var v) const;
  bool requires_grad(Var v) const { return nodes_.at(v.id).requires_grad; }
  std::size_t size() const noexcept { return nodes_.size(); }

  // Loss must be 1x1. Clears gradients from any earlier backward call.
  void backward(Var loss);

  // Recomputes every non-leaf node from the stored leaves and returns the
  // recomputed value of `out`; the record itself is left untouched.
  Matrix replay(Var out) const;

 private:
  struct Node {
    Op op = Op::kLeaf;
    std::size_t a = 0;
    std::size_t b = 0;
    float param = 0.0f;
    bool requires_grad = false;
    Matrix value{};
    Matrix grad{};
  };

  static Matrix evaluate(const Node& n, const Matrix* a, const Matrix* b);
  Var push(Node n);
  void accumulate(std::size_t id, Matrix g);

  std::vector<Node> nodes_;
};

}  // namespace egan::nd
