#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace transg::numerics {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

namespace detail {

// One vertex of the dynamic computation graph. Non-leaf nodes carry the
// parents they were computed from and a rule that pushes this node's grad
// into those parents.
struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;
  bool requires_grad = false;
  bool is_leaf = true;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;

  // Grad buffer of a parent, allocated on first use.
  std::span<double> grad_buffer();
};

}  // namespace detail

// Dense row-major f64 tensor with reverse-mode autodiff.
//
// A Tensor is a cheap handle; copies alias the same storage. Values are treated
// as immutable once an op has consumed them; only parameters are updated in
// place (by the optimizer, outside any recorded graph).
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const;

  std::span<const double> data() const;
  // In-place access for parameter updates and test fixtures.
  std::span<double> mutable_data();
  double item() const;
  double at(std::initializer_list<std::size_t> index) const;

  bool requires_grad() const;
  // Marks this leaf as a trainable parameter and allocates a zeroed grad.
  void set_requires_grad(bool flag);
  bool is_leaf() const;

  // Empty span when no grad buffer exists.
  std::span<const double> grad() const;
  std::span<double> mutable_grad();
  bool has_grad() const;
  void zero_grad();

  // New leaf holding a copy of the value, cut from the graph.
  Tensor detach() const;

  // Reverse-mode sweep from this scalar. Grads accumulate additively into
  // every reachable leaf with requires_grad; the recorded graph is released
  // afterwards.
  void backward() const;

  // Internal: construct a node produced by an op.
  static Tensor make_result(const char* op, Shape shape, std::vector<double> value,
                            std::vector<Tensor> inputs,
                            std::function<void(detail::Node&)> backward);
  const std::shared_ptr<detail::Node>& node() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node> node_;
};

// While alive on a thread, ops on that thread record no graph.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

// Debug verification mode: every op output is scanned for NaN/Inf and a
// ContractViolation names the offending op.
void set_verify_finite(bool enabled);
bool verify_finite();

}  // namespace transg::numerics
