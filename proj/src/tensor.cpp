#include "sail/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace sail::nn {

namespace {

std::size_t shape_numel(const std::vector<std::size_t>& s) {
  std::size_t n = 1;
  for (auto d : s) {
    if (d == 0) throw std::invalid_argument("tensor shape with zero extent");
    n *= d;
  }
  return n;
}

void check_rank(const std::vector<std::size_t>& s) {
  if (s.empty() || s.size() > 2)
    throw std::invalid_argument("tensor rank must be 1 or 2, got shape " + shape_str(s));
}

void check_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    std::ostringstream os;
    os << op << ": shape mismatch " << shape_str(a.shape()) << " vs " << shape_str(b.shape());
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

std::string shape_str(const std::vector<std::size_t>& s) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "x" : "") << s[i];
  os << "]";
  return os.str();
}

Tensor make_op(std::vector<std::size_t> shape, std::vector<double> value,
               std::vector<Tensor> parents, std::function<void(detail::Node&)> pull) {
  auto n = std::make_shared<detail::Node>();
  n->shape = std::move(shape);
  n->value = std::move(value);
  n->leaf = false;
  bool needs = false;
  for (const auto& p : parents) needs = needs || p.requires_grad();
  n->requires_grad = needs;
  if (needs) {
    n->parents.reserve(parents.size());
    for (const auto& p : parents) n->parents.push_back(p.node_shared());
    n->pull = std::move(pull);
  }
  return Tensor(std::shared_ptr<detail::Node>(std::move(n)));
}

const std::vector<double>& Tensor::grad() const {
  if (!has_grad()) throw std::logic_error("tensor has no gradient (no backward pass reached it)");
  return node_->grad;
}

void Tensor::zero_grad() {
  if (node_->grad.size() != node_->value.size()) node_->grad.assign(node_->numel(), 0.0);
  std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

void Tensor::set_grad(std::vector<double> g) {
  if (g.size() != node_->value.size())
    throw std::invalid_argument("set_grad: size mismatch");
  node_->grad = std::move(g);
}

double Tensor::item() const {
  if (numel() != 1)
    throw std::logic_error("item() on tensor of shape " + shape_str(shape()));
  return node_->value[0];
}

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
  check_rank(shape);
  std::size_t n = shape_numel(shape);
  return constant(std::move(shape), std::vector<double>(n, 0.0));
}

Tensor Tensor::constant(std::vector<std::size_t> shape, std::vector<double> data) {
  check_rank(shape);
  if (shape_numel(shape) != data.size())
    throw std::invalid_argument("constant: shape " + shape_str(shape) + " does not match data size " +
                                std::to_string(data.size()));
  auto n = std::make_shared<detail::Node>();
  n->shape = std::move(shape);
  n->value = std::move(data);
  return Tensor(std::move(n));
}

Tensor Tensor::param(std::vector<std::size_t> shape, std::vector<double> data) {
  Tensor t = constant(std::move(shape), std::move(data));
  t.node()->requires_grad = true;
  return t;
}

// --- ops ---

namespace {
using detail::Node;

Tensor unary(const Tensor& a, std::vector<double> value,
             std::function<void(Node&)> pull) {
  return make_op(a.shape(), std::move(value), {a}, std::move(pull));
}
}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape("add", a, b);
  std::vector<double> v(a.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.data()[i] + b.data()[i];
  return make_op(a.shape(), std::move(v), {a, b}, [](Node& n) {
    for (std::size_t k = 0; k < 2; ++k) {
      Node& p = *n.parents[k];
      if (!p.requires_grad) continue;
      p.ensure_grad();
      for (std::size_t i = 0; i < n.numel(); ++i) p.grad[i] += n.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_same_shape("sub", a, b);
  std::vector<double> v(a.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.data()[i] - b.data()[i];
  return make_op(a.shape(), std::move(v), {a, b}, [](Node& n) {
    Node& pa = *n.parents[0];
    Node& pb = *n.parents[1];
    if (pa.requires_grad) {
      pa.ensure_grad();
      for (std::size_t i = 0; i < n.numel(); ++i) pa.grad[i] += n.grad[i];
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      for (std::size_t i = 0; i < n.numel(); ++i) pb.grad[i] -= n.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_same_shape("mul", a, b);
  std::vector<double> v(a.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.data()[i] * b.data()[i];
  return make_op(a.shape(), std::move(v), {a, b}, [](Node& n) {
    Node& pa = *n.parents[0];
    Node& pb = *n.parents[1];
    if (pa.requires_grad) {
      pa.ensure_grad();
      for (std::size_t i = 0; i < n.numel(); ++i) pa.grad[i] += n.grad[i] * pb.value[i];
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      for (std::size_t i = 0; i < n.numel(); ++i) pb.grad[i] += n.grad[i] * pa.value[i];
    }
  });
}

Tensor add_scalar(const Tensor& a, double c) {
  std::vector<double> v(a.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.data()[i] + c;
  return unary(a, std::move(v), [](Node& n) {
    Node& p = *n.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < n.numel(); ++i) p.grad[i] += n.grad[i];
  });
}

Tensor mul_scalar(const Tensor& a, double c) {
  std::vector<double> v(a.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.data()[i] * c;
  return unary(a, std::move(v), [c](Node& n) {
    Node& p = *n.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < n.numel(); ++i) p.grad[i] += n.grad[i] * c;
  });
}

Tensor neg(const Tensor& a) { return mul_scalar(a, -1.0); }

Tensor add_row(const Tensor& x, const Tensor& v) {
  if (v.cols() != x.cols() || v.rows() != 1)
    throw std::invalid_argument("add_row: " + shape_str(x.shape()) + " vs " + shape_str(v.shape()));
  std::size_t rows = x.rows(), d = x.cols();
  std::vector<double> out(x.numel());
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < d; ++j) out[r * d + j] = x.data()[r * d + j] + v.data()[j];
  return make_op(x.shape(), std::move(out), {x, v}, [rows, d](Node& n) {
    Node& px = *n.parents[0];
    Node& pv = *n.parents[1];
    if (px.requires_grad) {
      px.ensure_grad();
      for (std::size_t i = 0; i < n.numel(); ++i) px.grad[i] += n.grad[i];
    }
    if (pv.requires_grad) {
      pv.ensure_grad();
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < d; ++j) pv.grad[j] += n.grad[r * d + j];
    }
  });
}

Tensor mul_row(const Tensor& x, const Tensor& v) {
  if (v.cols() != x.cols() || v.rows() != 1)
    throw std::invalid_argument("mul_row: " + shape_str(x.shape()) + " vs " + shape_str(v.shape()));
  std::size_t rows = x.rows(), d = x.cols();
  std::vector<double> out(x.numel());
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < d; ++j) out[r * d + j] = x.data()[r * d + j] * v.data()[j];
  return make_op(x.shape(), std::move(out), {x, v}, [rows, d](Node& n) {
    Node& px = *n.parents[0];
    Node& pv = *n.parents[1];
    if (px.requires_grad) {
      px.ensure_grad();
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < d; ++j) px.grad[r * d + j] += n.grad[r * d + j] * pv.value[j];
    }
    if (pv.requires_grad) {
      pv.ensure_grad();
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < d; ++j) pv.grad[j] += n.grad[r * d + j] * px.value[r * d + j];
    }
  });
}

Tensor relu(const Tensor& a) {
  std::vector<double> v(a.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.data()[i] > 0.0 ? a.data()[i] : 0.0;
  return unary(a, std::move(v), [](Node& n) {
    Node& p = *n.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < n.numel(); ++i)
      if (p.value[i] > 0.0) p.grad[i] += n.grad[i];
  });
}

Tensor exp(const Tensor& a) {
  std::vector<double> v(a.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(a.data()[i]);
  return unary(a, std::move(v), [](Node& n) {
    Node& p = *n.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < n.numel(); ++i) p.grad[i] += n.grad[i] * n.value[i];
  });
}

Tensor square(const Tensor& a) {
  std::vector<double> v(a.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.data()[i] * a.data()[i];
  return unary(a, std::move(v), [](Node& n) {
    Node& p = *n.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < n.numel(); ++i) p.grad[i] += n.grad[i] * 2.0 * p.value[i];
  });
}

Tensor softplus(const Tensor& a) {
  std::vector<double> v(a.numel());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double x = a.data()[i];
    v[i] = x > 30.0 ? x : std::log1p(std::exp(x));
  }
  return unary(a, std::move(v), [](Node& n) {
    Node& p = *n.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < n.numel(); ++i) {
      double x = p.value[i];
      double sig = x > 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
      p.grad[i] += n.grad[i] * sig;
    }
  });
}

Tensor minimum(const Tensor& a, const Tensor& b) {
  check_same_shape("minimum", a, b);
  std::vector<double> v(a.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::min(a.data()[i], b.data()[i]);
  return make_op(a.shape(), std::move(v), {a, b}, [](Node& n) {
    Node& pa = *n.parents[0];
    Node& pb = *n.parents[1];
    for (std::size_t i = 0; i < n.numel(); ++i) {
      bool take_a = pa.value[i] <= pb.value[i];
      Node& p = take_a ? pa : pb;
      if (!p.requires_grad) continue;
      p.ensure_grad();
      p.grad[i] += n.grad[i];
    }
  });
}

Tensor clamp(const Tensor& a, double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("clamp: lo > hi");
  std::vector<double> v(a.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::clamp(a.data()[i], lo, hi);
  return unary(a, std::move(v), [lo, hi](Node& n) {
    Node& p = *n.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < n.numel(); ++i)
      if (p.value[i] > lo && p.value[i] < hi) p.grad[i] += n.grad[i];
  });
}

Tensor sum(const Tensor& a) {
  double s = 0.0;
  for (double x : a.data()) s += x;
  return make_op({1}, {s}, {a}, [](Node& n) {
    Node& p = *n.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < p.numel(); ++i) p.grad[i] += n.grad[0];
  });
}

Tensor mean(const Tensor& a) {
  double s = 0.0;
  for (double x : a.data()) s += x;
  double inv = 1.0 / static_cast<double>(a.numel());
  return make_op({1}, {s * inv}, {a}, [inv](Node& n) {
    Node& p = *n.parents[0];
    p.ensure_grad();
    for (std::size_t i = 0; i < p.numel(); ++i) p.grad[i] += n.grad[0] * inv;
  });
}

Tensor row_sum(const Tensor& a) {
  std::size_t rows = a.rows(), d = a.cols();
  std::vector<double> v(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < d; ++j) v[r] += a.data()[r * d + j];
  return make_op({rows, 1}, std::move(v), {a}, [rows, d](Node& n) {
    Node& p = *n.parents[0];
    p.ensure_grad();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t j = 0; j < d; ++j) p.grad[r * d + j] += n.grad[r];
  });
}

Tensor slice_cols(const Tensor& a, std::size_t start, std::size_t len) {
  std::size_t rows = a.rows(), d = a.cols();
  if (start + len > d)
    throw std::invalid_argument("slice_cols: [" + std::to_string(start) + ", " +
                                std::to_string(start + len) + ") out of " + shape_str(a.shape()));
  std::vector<double> v(rows * len);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < len; ++j) v[r * len + j] = a.data()[r * d + start + j];
  std::vector<std::size_t> shape =
      a.shape().size() == 2 ? std::vector<std::size_t>{rows, len} : std::vector<std::size_t>{len};
  return make_op(std::move(shape), std::move(v), {a}, [rows, d, start, len](Node& n) {
    Node& p = *n.parents[0];
    p.ensure_grad();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t j = 0; j < len; ++j) p.grad[r * d + start + j] += n.grad[r * len + j];
  });
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows())
    throw std::invalid_argument("concat_cols: row mismatch " + shape_str(a.shape()) + " vs " +
                                shape_str(b.shape()));
  std::size_t rows = a.rows(), da = a.cols(), db = b.cols();
  std::vector<double> v(rows * (da + db));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < da; ++j) v[r * (da + db) + j] = a.data()[r * da + j];
    for (std::size_t j = 0; j < db; ++j) v[r * (da + db) + da + j] = b.data()[r * db + j];
  }
  std::vector<std::size_t> shape = (a.shape().size() == 2 || b.shape().size() == 2)
                                       ? std::vector<std::size_t>{rows, da + db}
                                       : std::vector<std::size_t>{da + db};
  return make_op(std::move(shape), std::move(v), {a, b}, [rows, da, db](Node& n) {
    Node& pa = *n.parents[0];
    Node& pb = *n.parents[1];
    std::size_t d = da + db;
    if (pa.requires_grad) {
      pa.ensure_grad();
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < da; ++j) pa.grad[r * da + j] += n.grad[r * d + j];
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < db; ++j) pb.grad[r * db + j] += n.grad[r * d + da + j];
    }
  });
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  std::size_t in = x.cols(), rows = x.rows();
  if (w.shape().size() != 2 || w.shape()[1] != in)
    throw std::invalid_argument("linear: input " + shape_str(x.shape()) + " incompatible with weight " +
                                shape_str(w.shape()));
  std::size_t out = w.shape()[0];
  if (b.numel() != out)
    throw std::invalid_argument("linear: bias " + shape_str(b.shape()) + " incompatible with weight " +
                                shape_str(w.shape()));
  std::vector<double> v(rows * out);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t o = 0; o < out; ++o) {
      double acc = b.data()[o];
      const double* wr = w.data().data() + o * in;
      const double* xr = x.data().data() + r * in;
      for (std::size_t i = 0; i < in; ++i) acc += wr[i] * xr[i];
      v[r * out + o] = acc;
    }
  }
  std::vector<std::size_t> shape = x.shape().size() == 2 ? std::vector<std::size_t>{rows, out}
                                                         : std::vector<std::size_t>{out};
  return make_op(std::move(shape), std::move(v), {x, w, b}, [rows, in, out](Node& n) {
    Node& px = *n.parents[0];
    Node& pw = *n.parents[1];
    Node& pb = *n.parents[2];
    if (px.requires_grad) {
      px.ensure_grad();
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t i = 0; i < in; ++i) {
          double acc = 0.0;
          for (std::size_t o = 0; o < out; ++o) acc += n.grad[r * out + o] * pw.value[o * in + i];
          px.grad[r * in + i] += acc;
        }
    }
    if (pw.requires_grad) {
      pw.ensure_grad();
      for (std::size_t o = 0; o < out; ++o)
        for (std::size_t i = 0; i < in; ++i) {
          double acc = 0.0;
          for (std::size_t r = 0; r < rows; ++r) acc += n.grad[r * out + o] * px.value[r * in + i];
          pw.grad[o * in + i] += acc;
        }
    }
    if (pb.requires_grad) {
      pb.ensure_grad();
      for (std::size_t o = 0; o < out; ++o) {
        double acc = 0.0;
        for (std::size_t r = 0; r < rows; ++r) acc += n.grad[r * out + o];
        pb.grad[o] += acc;
      }
    }
  });
}

void backward(const Tensor& scalar_loss) {
  if (!scalar_loss.defined() || scalar_loss.numel() != 1)
    throw std::invalid_argument("backward: loss must have exactly one element");
  detail::Node* root = scalar_loss.node();
  if (!root->requires_grad)
    throw std::invalid_argument("backward: loss does not depend on any differentiable leaf (tape empty)");
  if (root->consumed) throw std::logic_error("backward: tape already consumed");

  // Iterative post-order DFS for a topological order.
  std::vector<detail::Node*> topo;
  std::unordered_set<detail::Node*> visited;
  std::vector<std::pair<detail::Node*, std::size_t>> stack;
  stack.emplace_back(root, 0);
  visited.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::Node* p = node->parents[next++].get();
      if (p->requires_grad && !p->leaf && !visited.count(p)) {
        visited.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      topo.push_back(node);
      stack.pop_back();
    }
  }

  for (detail::Node* n : topo) n->ensure_grad();
  root->grad[0] = 1.0;
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    detail::Node* n = *it;
    if (n->pull) n->pull(*n);
  }
  // Consume the tape: interior nodes release parents and closures, leaves
  // keep their accumulated gradients.
  for (detail::Node* n : topo) {
    n->consumed = true;
    n->parents.clear();
    n->pull = nullptr;
  }
}

}  // namespace sail::nn
