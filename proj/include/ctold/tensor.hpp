#pragma once

// Dense row-major tensors of doubles with a reverse-mode tape.
//
// A Tensor is a cheap handle onto a shared node.  Every op that touches a
// tensor with requires_grad records its parents and a closure that pushes the
// output gradient back into them; backward() walks that DAG in reverse
// topological order.  Tensors that do not require grad carry no history and
// are immutable, so they may be shared read-only across threads.

#include <cstddef>
#include <functional>
#include <memory>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ctold {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>{});
}

inline std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ']';
  return os.str();
}

/// Thrown when a caller breaks an operation's precondition (bad shapes,
/// out-of-range ids, invalid rates).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // empty until first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad and accumulates into parents that require grad.
  std::function<void(Node&)> backward;
  const char* op = "leaf";

  void ensure_grad() {
    if (grad.empty()) grad.assign(data.size(), 0.0);
  }
};

}  // namespace detail

class Tensor {
 public:
  Tensor() = default;

  Tensor(Shape shape, std::vector<double> data, bool requires_grad = false)
      : node_(std::make_shared<detail::Node>()) {
    for (auto extent : shape)
      require(extent > 0, "Tensor: shape extents must be positive, got " +
                              shape_str(shape));
    require(!shape.empty(), "Tensor: shape must have at least one extent");
    require(shape_numel(shape) == data.size(),
            "Tensor: data length " + std::to_string(data.size()) +
                " does not match shape " + shape_str(shape));
    node_->shape = std::move(shape);
    node_->data = std::move(data);
    node_->requires_grad = requires_grad;
  }

  static Tensor zeros(Shape shape, bool requires_grad = false) {
    auto n = shape_numel(shape);
    return Tensor(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
  }

  static Tensor full(Shape shape, double value, bool requires_grad = false) {
    auto n = shape_numel(shape);
    return Tensor(std::move(shape), std::vector<double>(n, value),
                  requires_grad);
  }

  static Tensor scalar(double value, bool requires_grad = false) {
    return Tensor({1}, {value}, requires_grad);
  }

  static Tensor vector(std::vector<double> values, bool requires_grad = false) {
    Shape shape{values.size()};
    return Tensor(std::move(shape), std::move(values), requires_grad);
  }

  static Tensor matrix(std::size_t rows, std::size_t cols,
                       std::vector<double> values, bool requires_grad = false) {
    return Tensor({rows, cols}, std::move(values), requires_grad);
  }

  bool defined() const { return static_cast<bool>(node_); }

  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t numel() const { return node_->data.size(); }
  std::size_t dim(std::size_t axis) const { return node_->shape.at(axis); }
  // Rows/cols view a rank-1 tensor as a single row.
  std::size_t rows() const { return rank() == 1 ? 1 : node_->shape[0]; }
  std::size_t cols() const { return node_->shape.back(); }

  std::span<const double> data() const { return node_->data; }
  double item() const {
    require(numel() == 1, "item: tensor is not a scalar " + shape_str(shape()));
    return node_->data[0];
  }
  double operator[](std::size_t i) const { return node_->data.at(i); }
  double at(std::size_t r, std::size_t c) const {
    return node_->data.at(r * cols() + c);
  }

  // In-place access for optimizers, initializers and checkpoint loading.
  std::span<double> mutable_data() { return node_->data; }

  bool requires_grad() const { return node_->requires_grad; }
  bool has_grad() const { return !node_->grad.empty(); }
  std::span<const double> grad() const { return node_->grad; }
  std::span<double> mutable_grad() {
    node_->ensure_grad();
    return node_->grad;
  }
  void zero_grad() { node_->grad.clear(); }

  const char* op() const { return node_->op; }
  bool is_leaf() const { return !node_->backward; }

  // Shallow copy detached from history.
  Tensor detach() const { return Tensor(shape(), node_->data, false); }

  detail::Node* node() const { return node_.get(); }
  const std::shared_ptr<detail::Node>& node_ptr() const { return node_; }

 private:
  std::shared_ptr<detail::Node> node_;
};

namespace detail {

// Builds an op result.  History is only kept when some parent needs grad.
inline Tensor make_result(Shape shape, std::vector<double> data,
                          std::vector<Tensor> parents, const char* op,
                          std::function<void(Node&)> backward) {
  Tensor out(std::move(shape), std::move(data), false);
  bool needs = false;
  for (const auto& p : parents) needs = needs || p.requires_grad();
  if (!needs) return out;
  auto* node = out.node();
  node->requires_grad = true;
  node->op = op;
  node->parents.reserve(parents.size());
  for (auto& p : parents) node->parents.push_back(p.node_ptr());
  node->backward = std::move(backward);
  return out;
}

// Accumulates `values` into parent `index` of `self` if it wants grad.
inline std::vector<double>* parent_grad(Node& self, std::size_t index) {
  auto& p = self.parents[index];
  if (!p->requires_grad) return nullptr;
  p->ensure_grad();
  return &p->grad;
}

}  // namespace detail

/// Reverse-mode sweep from a scalar loss.  Leaf gradients accumulate across
/// calls; interior gradients are recomputed each call.
inline void backward(const Tensor& loss) {
  require(loss.defined(), "backward: undefined loss");
  require(loss.numel() == 1,
          "backward: loss must be a scalar, got " + shape_str(loss.shape()));
  if (!loss.requires_grad()) return;

  using detail::Node;
  enum class Mark { visiting, done };
  std::unordered_map<Node*, Mark> marks;
  std::vector<Node*> order;  // parents before children
  std::vector<std::pair<Node*, std::size_t>> stack{{loss.node(), 0}};
  marks[loss.node()] = Mark::visiting;
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (!parent->requires_grad) continue;
      auto it = marks.find(parent);
      if (it == marks.end()) {
        marks[parent] = Mark::visiting;
        stack.emplace_back(parent, 0);
      } else if (it->second == Mark::visiting) {
        throw ContractViolation("backward: cycle in expression graph at op '" +
                                std::string(parent->op) + "'");
      }
    } else {
      marks[node] = Mark::done;
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (Node* node : order)
    if (node->backward) node->grad.assign(node->data.size(), 0.0);
  Node* root = loss.node();
  root->ensure_grad();
  root->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (node->backward) node->backward(*node);
  }
}

}  // namespace ctold
