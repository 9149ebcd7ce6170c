#include "ndmath/tape.hpp"

#include <string>

#include "common/error.hpp"

namespace egan::nd {

namespace {

Matrix scalar(double v) { return Matrix(1, 1, static_cast<float>(v)); }

double mse_value(const Matrix& p, const Matrix& t) {
  require(p.same_shape(t), ErrorKind::kShape, "mse: prediction and target shapes differ");
  double s = 0.0;
  auto pv = p.values();
  auto tv = t.values();
  for (std::size_t i = 0; i < pv.size(); ++i) {
    const double d = double{pv[i]} - tv[i];
    s += d * d;
  }
  return s / static_cast<double>(pv.size());
}

}  // namespace

Matrix Tape::evaluate(const Node& n, const Matrix* a, const Matrix* b) {
  switch (n.op) {
    case Op::kLeaf: return n.value;
    case Op::kMatmul: return nd::matmul(*a, *b);
    case Op::kAdd: return nd::add(*a, *b);
    case Op::kAddRow: return nd::add_row(*a, *b);
    case Op::kLeakyRelu: return nd::leaky_relu(*a, n.param);
    case Op::kScale: return nd::scale(*a, n.param);
    case Op::kSum: return scalar(nd::sum(*a));
    case Op::kMean: return scalar(nd::sum(*a) / static_cast<double>(a->size()));
    case Op::kMse: return scalar(mse_value(*a, *b));
  }
  fail(ErrorKind::kContract, "tape: unknown op");
}

Var Tape::push(Node n) {
  const Matrix* a = n.op == Op::kLeaf ? nullptr : &nodes_.at(n.a).value;
  const Matrix* b = nullptr;
  if (n.op == Op::kMatmul || n.op == Op::kAdd || n.op == Op::kAddRow || n.op == Op::kMse) {
    b = &nodes_.at(n.b).value;
    n.requires_grad = nodes_[n.a].requires_grad || nodes_[n.b].requires_grad;
  } else if (n.op != Op::kLeaf) {
    n.requires_grad = nodes_[n.a].requires_grad;
  }
  if (n.op != Op::kLeaf) n.value = evaluate(n, a, b);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Var Tape::leaf(Matrix value, bool requires_grad) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  return push(std::move(n));
}

Var Tape::matmul(Var a, Var b) { return push({.op = Op::kMatmul, .a = a.id, .b = b.id}); }
Var Tape::add(Var a, Var b) { return push({.op = Op::kAdd, .a = a.id, .b = b.id}); }
Var Tape::add_row(Var a, Var row) { return push({.op = Op::kAddRow, .a = a.id, .b = row.id}); }
Var Tape::leaky_relu(Var a, float slope) { return push({.op = Op::kLeakyRelu, .a = a.id, .param = slope}); }
Var Tape::scale(Var a, float s) { return push({.op = Op::kScale, .a = a.id, .param = s}); }
Var Tape::sum(Var a) { return push({.op = Op::kSum, .a = a.id}); }
Var Tape::mean(Var a) { return push({.op = Op::kMean, .a = a.id}); }
Var Tape::mse(Var pred, Var target) { return push({.op = Op::kMse, .a = pred.id, .b = target.id}); }

Matrix Tape::grad(Var v) const {
  const auto& n = nodes_.at(v.id);
  if (n.grad.same_shape(n.value)) return n.grad;
  return Matrix(n.value.rows(), n.value.cols());
}

void Tape::accumulate(std::size_t id, Matrix g) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return;
  if (!n.grad.same_shape(n.value)) {
    n.grad = std::move(g);
    return;
  }
  auto dst = n.grad.values();
  auto src = g.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

void Tape::backward(Var loss) {
  require(loss.id < nodes_.size(), ErrorKind::kContract, "backward: unknown variable");
  const Matrix& lv = nodes_[loss.id].value;
  require(lv.rows() == 1 && lv.cols() == 1, ErrorKind::kContract,
          "backward: loss must be a scalar, got " + std::to_string(lv.rows()) + "x" +
              std::to_string(lv.cols()));
  for (auto& n : nodes_) n.grad = Matrix();
  if (!nodes_[loss.id].requires_grad) return;
  nodes_[loss.id].grad = Matrix(1, 1, 1.0f);

  for (std::size_t id = loss.id + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (n.op == Op::kLeaf || !n.requires_grad || !n.grad.same_shape(n.value)) continue;
    const Matrix& up = n.grad;
    switch (n.op) {
      case Op::kLeaf: break;
      case Op::kMatmul: {
        const Matrix& a = nodes_[n.a].value;
        const Matrix& b = nodes_[n.b].value;
        if (nodes_[n.a].requires_grad) accumulate(n.a, nd::matmul_a_bt(up, b));
        if (nodes_[n.b].requires_grad) accumulate(n.b, nd::matmul_at_b(a, up));
        break;
      }
      case Op::kAdd:
        accumulate(n.a, up);
        accumulate(n.b, up);
        break;
      case Op::kAddRow: {
        accumulate(n.a, up);
        if (nodes_[n.b].requires_grad) {
          std::vector<double> col(up.cols(), 0.0);
          for (std::size_t i = 0; i < up.rows(); ++i)
            for (std::size_t j = 0; j < up.cols(); ++j) col[j] += up(i, j);
          Matrix g(1, up.cols());
          for (std::size_t j = 0; j < col.size(); ++j) g(0, j) = static_cast<float>(col[j]);
          accumulate(n.b, g);
        }
        break;
      }
      case Op::kLeakyRelu: {
        const Matrix& x = nodes_[n.a].value;
        Matrix g = up;
        auto gv = g.values();
        auto xv = x.values();
        for (std::size_t i = 0; i < gv.size(); ++i)
          if (!(xv[i] > 0.0f)) gv[i] *= n.param;
        accumulate(n.a, std::move(g));
        break;
      }
      case Op::kScale:
        accumulate(n.a, nd::scale(up, n.param));
        break;
      case Op::kSum:
      case Op::kMean: {
        const Matrix& x = nodes_[n.a].value;
        double g = up(0, 0);
        if (n.op == Op::kMean) g /= static_cast<double>(x.size());
        accumulate(n.a, Matrix(x.rows(), x.cols(), static_cast<float>(g)));
        break;
      }
      case Op::kMse: {
        const Matrix& p = nodes_[n.a].value;
        const Matrix& t = nodes_[n.b].value;
        const double k = 2.0 * up(0, 0) / static_cast<double>(p.size());
        Matrix g(p.rows(), p.cols());
        auto gv = g.values();
        auto pv = p.values();
        auto tv = t.values();
        for (std::size_t i = 0; i < gv.size(); ++i)
          gv[i] = static_cast<float>(k * (double{pv[i]} - tv[i]));
        if (nodes_[n.a].requires_grad) accumulate(n.a, g);
        if (nodes_[n.b].requires_grad) accumulate(n.b, nd::scale(g, -1.0f));
        break;
      }
    }
  }
}

Matrix Tape::replay(Var out) const {
  require(out.id < nodes_.size(), ErrorKind::kContract, "replay: unknown variable");
  std::vector<Matrix> vals(out.id + 1);
  for (std::size_t id = 0; id <= out.id; ++id) {
    const Node& n = nodes_[id];
    if (n.op == Op::kLeaf) {
      vals[id] = n.value;
      continue;
    }
    const Matrix* b = (n.op == Op::kMatmul || n.op == Op::kAdd || n.op == Op::kAddRow ||
                       n.op == Op::kMse)
                          ? &vals[n.b]
                          : nullptr;
    vals[id] = evaluate(n, &vals[n.a], b);
  }
  return vals[out.id];
}

}  // namespace egan::nd
