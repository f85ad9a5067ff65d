#include <functional>
#include <map>
#include <unordered_map>

#include "cvxdef/errors.hpp"
#include "cvxdef/expr.hpp"
#include "differentiator.hpp"
#include "node_eval.hpp"

namespace cvxdef {

namespace {

using Tuple = std::vector<int>;

// Sorted index tuples of the given length, in the colex order of SymTensor slots.
std::vector<Tuple> sorted_tuples(int length, int n) {
  std::vector<Tuple> out;
  Tuple t(static_cast<std::size_t>(length), 0);
  // Enumerate non-decreasing tuples with the last index varying slowest.
  std::function<void(int, int)> rec = [&](int pos, int hi) {
    if (pos < 0) {
      out.push_back(t);
      return;
    }
    for (int v = 0; v <= hi; ++v) {
      t[static_cast<std::size_t>(pos)] = v;
      rec(pos - 1, v);
    }
  };
  rec(length - 1, n - 1);
  return out;
}

}  // namespace

JetProgram::JetProgram(const Expr& e, std::size_t dim, int max_order) : expr_(e), dim_(dim), max_order_(max_order) {
  if (dim == 0) throw DimensionError("JetProgram: dimension must be at least 1");
  if (max_order < 0 || max_order > 4) throw DimensionError("JetProgram: order must be in [0, 4]");
  if (max_variable_index(e) >= static_cast<int>(dim))
    throw DimensionError("JetProgram: expression uses a variable beyond dimension " + std::to_string(dim));

  const int n = static_cast<int>(dim);
  std::unordered_map<const Node*, int> slot_of;

  std::function<int(const NodePtr&)> emit = [&](const NodePtr& p) -> int {
    if (auto it = slot_of.find(p.get()); it != slot_of.end()) return it->second;
    const int a = p->a ? emit(p->a) : -1;
    const int b = p->b ? emit(p->b) : -1;
    tape_.push_back(Instr{p->op, p->value, p->var, a, b, p.get()});
    const int slot = static_cast<int>(tape_.size()) - 1;
    slot_of.emplace(p.get(), slot);
    return slot;
  };

  detail::Differentiator diff;
  std::map<Tuple, Expr> prev;
  const Expr root = simplify(e);
  keep_.push_back(root);
  value_slot_ = emit(root.ptr());
  prev.emplace(Tuple{}, root);
  boundary_.push_back(tape_.size());

  for (int order = 1; order <= max_order; ++order) {
    std::map<Tuple, Expr> current;
    std::vector<int>& slots = order == 1 ? grad_slots_ : order == 2 ? hess_slots_ : order == 3 ? third_slots_ : fourth_slots_;
    for (const Tuple& t : sorted_tuples(order, n)) {
      // d_{t} = ∂/∂x_{last} of d_{t without last}; t is sorted so the parent is too.
      Tuple parent(t.begin(), t.end() - 1);
      const Expr d = diff.d(prev.at(parent), t.back());
      keep_.push_back(d);
      current.emplace(t, d);
      slots.push_back(emit(d.ptr()));
    }
    prev = std::move(current);
    boundary_.push_back(tape_.size());
  }
}

std::vector<double> JetProgram::run(std::span<const double> x, int order) const {
  if (x.size() != dim_) throw DimensionError("JetProgram: point has wrong dimension");
  if (order < 0 || order > max_order_) throw DimensionError("JetProgram: requested order exceeds compiled order");
  const std::size_t end = boundary_[static_cast<std::size_t>(order)];
  std::vector<double> slots(end);
  for (std::size_t i = 0; i < end; ++i) {
    const Instr& in = tape_[i];
    switch (in.op) {
      case Op::Const:
        slots[i] = in.value;
        break;
      case Op::Var:
        slots[i] = x[static_cast<std::size_t>(in.var)];
        break;
      default:
        slots[i] = detail::apply_op(in.op, slots[static_cast<std::size_t>(in.a)],
                                    in.b >= 0 ? slots[static_cast<std::size_t>(in.b)] : 0.0, in.source);
    }
  }
  return slots;
}

double JetProgram::value(std::span<const double> x) const {
  return run(x, 0)[static_cast<std::size_t>(value_slot_)];
}

Jet3 JetProgram::jet(std::span<const double> x, int order) const {
  if (order > 3) throw DimensionError("JetProgram::jet: order above three needs jet4");
  const std::vector<double> s = run(x, order);
  auto at = [&](int slot) { return s[static_cast<std::size_t>(slot)]; };
  Jet3 out(dim_, order);
  out.value = at(value_slot_);
  if (order >= 1)
    for (std::size_t i = 0; i < dim_; ++i) out.grad[i] = at(grad_slots_[i]);
  if (order >= 2) {
    std::size_t k = 0;
    for (std::size_t j = 0; j < dim_; ++j)
      for (std::size_t i = 0; i <= j; ++i) out.hess.at(i, j) = at(hess_slots_[k++]);
  }
  if (order >= 3) {
    std::size_t m = 0;
    for (std::size_t k = 0; k < dim_; ++k)
      for (std::size_t j = 0; j <= k; ++j)
        for (std::size_t i = 0; i <= j; ++i) out.third.at(i, j, k) = at(third_slots_[m++]);
  }
  return out;
}

Jet4 JetProgram::jet4(std::span<const double> x) const {
  if (max_order_ < 4) throw DimensionError("JetProgram::jet4: program compiled below order four");
  const std::vector<double> s = run(x, 4);
  auto at = [&](int slot) { return s[static_cast<std::size_t>(slot)]; };
  Jet4 out(dim_);
  Jet3& low = out.low;
  low.value = at(value_slot_);
  for (std::size_t i = 0; i < dim_; ++i) low.grad[i] = at(grad_slots_[i]);
  std::size_t c = 0;
  for (std::size_t j = 0; j < dim_; ++j)
    for (std::size_t i = 0; i <= j; ++i) low.hess.at(i, j) = at(hess_slots_[c++]);
  c = 0;
  for (std::size_t k = 0; k < dim_; ++k)
    for (std::size_t j = 0; j <= k; ++j)
      for (std::size_t i = 0; i <= j; ++i) low.third.at(i, j, k) = at(third_slots_[c++]);
  c = 0;
  for (std::size_t l = 0; l < dim_; ++l)
    for (std::size_t k = 0; k <= l; ++k)
      for (std::size_t j = 0; j <= k; ++j)
        for (std::size_t i = 0; i <= j; ++i) out.fourth.at(i, j, k, l) = at(fourth_slots_[c++]);
  return out;
}

Jet3 eval_jet3(const Expr& e, std::span<const double> x) {
  return JetProgram(e, x.size(), 3).jet(x, 3);
}

}  // namespace cvxdef
