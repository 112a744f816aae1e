#include "sei/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

#include "sei/error.hpp"

namespace sei {

std::size_t shape_numel(const Shape& shape) {
    std::size_t n = 1;
    for (auto e : shape) n *= e;
    return n;
}

std::string shape_str(const Shape& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << 'x';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

namespace detail {

std::uint64_t next_node_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1, std::memory_order_relaxed);
}

}  // namespace detail

namespace {

thread_local bool g_grad_enabled = true;

template <class T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
    if (a.shape() != b.shape()) {
        throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) +
                             " vs " + shape_str(b.shape()));
    }
}

}  // namespace

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

template <class T>
Tensor<T>::Tensor() : Tensor(Shape{0}, {}) {}

template <class T>
Tensor<T>::Tensor(Shape shape, std::vector<T> values, bool requires_grad)
    : node_(std::make_shared<detail::Node<T>>()) {
    if (shape_numel(shape) != values.size()) {
        throw DimensionError("tensor: " + std::to_string(values.size()) +
                             " values do not fill shape " + shape_str(shape));
    }
    node_->id = detail::next_node_id();
    node_->shape = std::move(shape);
    node_->value = std::move(values);
    node_->requires_grad = requires_grad;
}

template <class T>
Tensor<T> Tensor<T>::zeros(const Shape& shape, bool requires_grad) {
    return Tensor(shape, std::vector<T>(shape_numel(shape), T(0)), requires_grad);
}

template <class T>
Tensor<T> Tensor<T>::full(const Shape& shape, T value, bool requires_grad) {
    return Tensor(shape, std::vector<T>(shape_numel(shape), value), requires_grad);
}

template <class T>
Tensor<T> Tensor<T>::scalar(T value, bool requires_grad) {
    return Tensor(Shape{}, std::vector<T>{value}, requires_grad);
}

template <class T>
Tensor<T> Tensor<T>::make_result(Shape shape, std::vector<T> values,
                                 std::vector<Tensor> inputs,
                                 typename detail::Node<T>::BackwardFn backward) {
    Tensor out(std::move(shape), std::move(values));
    if (!g_grad_enabled) return out;
    bool any = std::any_of(inputs.begin(), inputs.end(),
                           [](const Tensor& t) { return t.requires_grad(); });
    if (!any) return out;
    // Parent slots are kept positionally so backward closures can index them;
    // constant inputs get a null slot and are skipped during the sweep.
    out.node_->requires_grad = true;
    out.node_->parents.reserve(inputs.size());
    for (auto& in : inputs) {
        out.node_->parents.push_back(in.requires_grad() ? in.node_ : nullptr);
    }
    out.node_->backward = std::move(backward);
    return out;
}

template <class T>
std::span<T> Tensor<T>::mutable_data() {
    if (!is_leaf()) {
        throw ValidationError("mutable_data: only leaf tensors may be modified in place");
    }
    return node_->value;
}

template <class T>
T Tensor<T>::item() const {
    if (numel() != 1) {
        throw DimensionError("item: tensor of shape " + shape_str(shape()) + " is not a scalar");
    }
    return node_->value[0];
}

template <class T>
Tensor<T>& Tensor<T>::set_requires_grad(bool flag) {
    if (!is_leaf()) {
        throw ValidationError("set_requires_grad: only valid on leaf tensors");
    }
    node_->requires_grad = flag;
    return *this;
}

template <class T>
Tensor<T> Tensor<T>::clone(bool requires_grad) const {
    return Tensor(shape(), values(), requires_grad);
}

template <class T>
Tensor<T> Gradients<T>::of(const Tensor<T>& t) const {
    auto it = grads_.find(t.id());
    if (it == grads_.end()) return Tensor<T>::zeros(t.shape());
    return Tensor<T>(t.shape(), it->second);
}

template <class T>
const std::vector<T>& Gradients<T>::raw(const Tensor<T>& t) const {
    auto it = grads_.find(t.id());
    return it == grads_.end() ? empty_ : it->second;
}

template <class T>
Gradients<T> backward(const Tensor<T>& root) {
    if (root.numel() != 1) {
        throw DimensionError("backward: root must be a scalar, got shape " +
                             shape_str(root.shape()));
    }
    Gradients<T> result;
    if (!root.requires_grad()) return result;

    using Node = detail::Node<T>;
    std::vector<Node*> order;
    std::unordered_map<Node*, std::vector<T>> grads;
    std::vector<Node*> stack{root.node().get()};
    grads[root.node().get()];
    while (!stack.empty()) {
        Node* n = stack.back();
        stack.pop_back();
        order.push_back(n);
        for (auto& p : n->parents) {
            if (p && grads.try_emplace(p.get()).second) stack.push_back(p.get());
        }
    }
    // Creation ids increase along every edge, so descending id is a reverse
    // topological order.
    std::sort(order.begin(), order.end(), [](Node* a, Node* b) { return a->id > b->id; });

    grads[root.node().get()] = std::vector<T>{T(1)};
    std::vector<std::vector<T>*> slots;
    for (Node* n : order) {
        auto& g = grads[n];
        if (g.empty()) g.assign(n->value.size(), T(0));
        if (n->parents.empty() || !n->backward) continue;
        slots.assign(n->parents.size(), nullptr);
        for (std::size_t i = 0; i < n->parents.size(); ++i) {
            Node* p = n->parents[i].get();
            if (!p) continue;
            auto& pg = grads[p];
            if (pg.empty()) pg.assign(p->value.size(), T(0));
            slots[i] = &pg;
        }
        n->backward(std::span<const T>(g), std::span<std::vector<T>*>(slots));
    }
    for (Node* n : order) result.map()[n->id] = std::move(grads[n]);
    return result;
}

template <class T>
Tensor<T> detach(const Tensor<T>& x) {
    return Tensor<T>(x.shape(), x.values(), false);
}

template <class T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
    require_same_shape(a, b, "add");
    std::vector<T> v(a.numel());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + b[i];
    return Tensor<T>::make_result(a.shape(), std::move(v), {a, b},
                                  [](std::span<const T> g, std::span<std::vector<T>*> pg) {
                                      for (auto* slot : pg) {
                                          if (!slot) continue;
                                          for (std::size_t i = 0; i < g.size(); ++i)
                                              (*slot)[i] += g[i];
                                      }
                                  });
}

template <class T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
    require_same_shape(a, b, "sub");
    std::vector<T> v(a.numel());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] - b[i];
    return Tensor<T>::make_result(a.shape(), std::move(v), {a, b},
                                  [](std::span<const T> g, std::span<std::vector<T>*> pg) {
                                      if (pg[0])
                                          for (std::size_t i = 0; i < g.size(); ++i)
                                              (*pg[0])[i] += g[i];
                                      if (pg[1])
                                          for (std::size_t i = 0; i < g.size(); ++i)
                                              (*pg[1])[i] -= g[i];
                                  });
}

template <class T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
    require_same_shape(a, b, "mul");
    std::vector<T> v(a.numel());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] * b[i];
    auto an = a.node();
    auto bn = b.node();
    return Tensor<T>::make_result(
        a.shape(), std::move(v), {a, b},
        [an, bn](std::span<const T> g, std::span<std::vector<T>*> pg) {
            if (pg[0])
                for (std::size_t i = 0; i < g.size(); ++i) (*pg[0])[i] += g[i] * bn->value[i];
            if (pg[1])
                for (std::size_t i = 0; i < g.size(); ++i) (*pg[1])[i] += g[i] * an->value[i];
        });
}

template <class T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
    std::vector<T> v(a.numel());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] * factor;
    return Tensor<T>::make_result(a.shape(), std::move(v), {a},
                                  [factor](std::span<const T> g, std::span<std::vector<T>*> pg) {
                                      for (std::size_t i = 0; i < g.size(); ++i)
                                          (*pg[0])[i] += g[i] * factor;
                                  });
}

template <class T>
Tensor<T> add_scalar(const Tensor<T>& a, T offset) {
    std::vector<T> v(a.numel());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + offset;
    return Tensor<T>::make_result(a.shape(), std::move(v), {a},
                                  [](std::span<const T> g, std::span<std::vector<T>*> pg) {
                                      for (std::size_t i = 0; i < g.size(); ++i)
                                          (*pg[0])[i] += g[i];
                                  });
}

template <class T>
Tensor<T> relu(const Tensor<T>& a) {
    std::vector<T> v(a.numel());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] > T(0) ? a[i] : T(0);
    auto an = a.node();
    return Tensor<T>::make_result(a.shape(), std::move(v), {a},
                                  [an](std::span<const T> g, std::span<std::vector<T>*> pg) {
                                      auto& dst = *pg[0];
                                      for (std::size_t i = 0; i < g.size(); ++i)
                                          if (an->value[i] > T(0)) dst[i] += g[i];
                                  });
}

template <class T>
Tensor<T> sum(const Tensor<T>& a) {
    T acc = 0;
    for (auto x : a.data()) acc += x;
    return Tensor<T>::make_result(Shape{}, {acc}, {a},
                                  [](std::span<const T> g, std::span<std::vector<T>*> pg) {
                                      for (auto& d : *pg[0]) d += g[0];
                                  });
}

template <class T>
Tensor<T> mean(const Tensor<T>& a) {
    if (a.numel() == 0) throw DimensionError("mean: empty tensor");
    return scale(sum(a), T(1) / static_cast<T>(a.numel()));
}

template <class T>
Tensor<T> dot(const Tensor<T>& a, const Tensor<T>& b) {
    if (a.numel() != b.numel()) {
        throw DimensionError("dot: size mismatch " + shape_str(a.shape()) + " vs " +
                             shape_str(b.shape()));
    }
    T acc = 0;
    for (std::size_t i = 0; i < a.numel(); ++i) acc += a[i] * b[i];
    auto an = a.node();
    auto bn = b.node();
    return Tensor<T>::make_result(
        Shape{}, {acc}, {a, b}, [an, bn](std::span<const T> g, std::span<std::vector<T>*> pg) {
            if (pg[0])
                for (std::size_t i = 0; i < bn->value.size(); ++i)
                    (*pg[0])[i] += g[0] * bn->value[i];
            if (pg[1])
                for (std::size_t i = 0; i < an->value.size(); ++i)
                    (*pg[1])[i] += g[0] * an->value[i];
        });
}

template <class T>
Tensor<T> mse(const Tensor<T>& a, const Tensor<T>& b) {
    require_same_shape(a, b, "mse");
    const std::size_t n = a.numel();
    if (n == 0) throw DimensionError("mse: empty tensors");
    std::vector<T> diff(n);
    T acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        diff[i] = a[i] - b[i];
        acc += diff[i] * diff[i];
    }
    const T inv_n = T(1) / static_cast<T>(n);
    return Tensor<T>::make_result(
        Shape{}, {acc * inv_n}, {a, b},
        [diff = std::move(diff), inv_n](std::span<const T> g, std::span<std::vector<T>*> pg) {
            const T c = T(2) * inv_n * g[0];
            if (pg[0])
                for (std::size_t i = 0; i < diff.size(); ++i) (*pg[0])[i] += c * diff[i];
            if (pg[1])
                for (std::size_t i = 0; i < diff.size(); ++i) (*pg[1])[i] -= c * diff[i];
        });
}

template <class T>
Tensor<T> reshape(const Tensor<T>& a, const Shape& shape) {
    if (shape_numel(shape) != a.numel()) {
        throw DimensionError("reshape: " + shape_str(a.shape()) + " -> " + shape_str(shape));
    }
    return Tensor<T>::make_result(shape, a.values(), {a},
                                  [](std::span<const T> g, std::span<std::vector<T>*> pg) {
                                      for (std::size_t i = 0; i < g.size(); ++i)
                                          (*pg[0])[i] += g[i];
                                  });
}

#define SEI_INSTANTIATE(T)                                                  \
    template class Tensor<T>;                                               \
    template class Gradients<T>;                                            \
    template Gradients<T> backward(const Tensor<T>&);                       \
    template Tensor<T> detach(const Tensor<T>&);                            \
    template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);             \
    template Tensor<T> sub(const Tensor<T>&, const Tensor<T>&);             \
    template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);             \
    template Tensor<T> scale(const Tensor<T>&, T);                          \
    template Tensor<T> add_scalar(const Tensor<T>&, T);                     \
    template Tensor<T> relu(const Tensor<T>&);                              \
    template Tensor<T> sum(const Tensor<T>&);                               \
    template Tensor<T> mean(const Tensor<T>&);                              \
    template Tensor<T> dot(const Tensor<T>&, const Tensor<T>&);             \
    template Tensor<T> mse(const Tensor<T>&, const Tensor<T>&);             \
    template Tensor<T> reshape(const Tensor<T>&, const Shape&);

SEI_INSTANTIATE(float)
SEI_INSTANTIATE(double)

}  // namespace sei
