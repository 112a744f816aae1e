#pragma once

// Dense tensors with reverse-mode automatic differentiation.
//
// A Tensor is a cheap handle onto a graph node. Operations on tensors that
// require gradients record their inputs and a backward closure; `backward`
// walks the recorded DAG from a scalar root in decreasing creation order,
// which is a valid reverse topological order and makes gradient accumulation
// deterministic.
//
// The scalar type is a template parameter: double for adjoint, gradient and
// oracle work, float for training speed. Both are explicitly instantiated.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace sei {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

template <class T>
class Tensor;

namespace detail {

template <class T>
struct Node {
    using BackwardFn = std::function<void(std::span<const T> grad_out,
                                          std::span<std::vector<T>*> parent_grads)>;

    std::uint64_t id = 0;
    Shape shape;
    std::vector<T> value;
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    BackwardFn backward;
};

std::uint64_t next_node_id();

}  // namespace detail

template <class T>
class Gradients;

/// Whether new results record history on this thread.
bool grad_enabled();

/// Disables graph recording on the current thread for its lifetime.
class NoGradGuard {
   public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

   private:
    bool previous_;
};

template <class T>
class Tensor {
   public:
    using value_type = T;
    using NodePtr = std::shared_ptr<detail::Node<T>>;

    Tensor();
    Tensor(Shape shape, std::vector<T> values, bool requires_grad = false);

    static Tensor zeros(const Shape& shape, bool requires_grad = false);
    static Tensor full(const Shape& shape, T value, bool requires_grad = false);
    static Tensor scalar(T value, bool requires_grad = false);

    /// Records a non-leaf result. Parents that do not require gradients are
    /// dropped; if none remain the result is a plain constant.
    static Tensor make_result(Shape shape, std::vector<T> values,
                              std::vector<Tensor> inputs,
                              typename detail::Node<T>::BackwardFn backward);

    const Shape& shape() const { return node_->shape; }
    std::size_t rank() const { return node_->shape.size(); }
    std::size_t dim(std::size_t axis) const { return node_->shape.at(axis); }
    std::size_t numel() const { return node_->value.size(); }

    std::span<const T> data() const { return node_->value; }
    const std::vector<T>& values() const { return node_->value; }
    /// Mutable access, for leaves only (parameter updates, test setup).
    std::span<T> mutable_data();

    T item() const;
    T operator[](std::size_t i) const { return node_->value[i]; }

    bool requires_grad() const { return node_->requires_grad; }
    Tensor& set_requires_grad(bool flag);
    bool is_leaf() const { return node_->parents.empty(); }
    std::uint64_t id() const { return node_->id; }

    /// Deep copy of the values as a new leaf.
    Tensor clone(bool requires_grad = false) const;

    const NodePtr& node() const { return node_; }

   private:
    NodePtr node_;
};

/// Result of a backward pass: node id -> gradient of the root.
template <class T>
class Gradients {
   public:
    bool contains(const Tensor<T>& t) const { return grads_.count(t.id()) != 0; }
    /// Gradient for `t`; zeros of the right shape when `t` did not influence
    /// the root.
    Tensor<T> of(const Tensor<T>& t) const;
    const std::vector<T>& raw(const Tensor<T>& t) const;

    std::unordered_map<std::uint64_t, std::vector<T>>& map() { return grads_; }

   private:
    std::unordered_map<std::uint64_t, std::vector<T>> grads_;
    std::vector<T> empty_;
};

/// Reverse-mode sweep from a scalar root. Each reachable node is visited
/// once; contributions from shared subgraphs are summed.
template <class T>
Gradients<T> backward(const Tensor<T>& root);

/// Same values, no history, never requires gradients.
template <class T>
Tensor<T> detach(const Tensor<T>& x);

// Elementwise and reduction ops. Binary ops require identical shapes.
template <class T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <class T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <class T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
template <class T>
Tensor<T> scale(const Tensor<T>& a, T factor);
template <class T>
Tensor<T> add_scalar(const Tensor<T>& a, T offset);
template <class T>
Tensor<T> relu(const Tensor<T>& a);
template <class T>
Tensor<T> sum(const Tensor<T>& a);
template <class T>
Tensor<T> mean(const Tensor<T>& a);
/// Inner product <a, b> as a scalar tensor.
template <class T>
Tensor<T> dot(const Tensor<T>& a, const Tensor<T>& b);
/// (1/n) sum (a_i - b_i)^2.
template <class T>
Tensor<T> mse(const Tensor<T>& a, const Tensor<T>& b);

template <class T>
Tensor<T> operator+(const Tensor<T>& a, const Tensor<T>& b) {
    return add(a, b);
}
template <class T>
Tensor<T> operator-(const Tensor<T>& a, const Tensor<T>& b) {
    return sub(a, b);
}
template <class T>
Tensor<T> operator*(const Tensor<T>& a, const Tensor<T>& b) {
    return mul(a, b);
}

/// Returns a tensor with the same values and a new shape of equal size.
template <class T>
Tensor<T> reshape(const Tensor<T>& a, const Shape& shape);

/// Converts values between precisions (no gradient flow).
template <class To, class From>
Tensor<To> cast(const Tensor<From>& x) {
    std::vector<To> v(x.values().begin(), x.values().end());
    return Tensor<To>(x.shape(), std::move(v));
}

}  // namespace sei
