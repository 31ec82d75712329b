#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "enatt/array.hpp"

namespace enatt {

// Learnable array plus its gradient accumulator. Gradients accumulate across
// backward calls until zero_grad().
struct Param {
  std::string name;
  Array value;
  Array grad;

  Param() = default;
  Param(std::string n, Array v)
      : name(std::move(n)), value(std::move(v)), grad(make_grad(value)) {}

  void zero_grad() { grad.fill(0.0); }

 private:
  static Array make_grad(const Array& v) {
    return v.ndim() == 1 ? Array::zeros(v.rows(), v.dtype())
                         : Array::zeros(v.rows(), v.cols(), v.dtype());
  }
};

using NodeRef = std::uint32_t;
inline constexpr NodeRef kNoNode = 0xffffffffu;

enum class Op : std::uint8_t {
  Leaf,
  Const,
  Row,
  MatMul,
  MatVec,
  Add,
  Mul,
  Concat,
  Dot,
  Sum,
  Sigmoid,
  Tanh,
  Selu,
  Log,
  Softmax,
  ScaleShift,
  ScalarMul,
  Pack,
  RowsDot,
  WeightedRowsSum,
  AddAtIndices,
  Clamp,
};

const char* op_name(Op op);

// SeLU constants from the self-normalizing-network formulation; recorded here
// so configs and reports can audit them.
inline constexpr double kSeluLambda = 1.0507009873554805;
inline constexpr double kSeluAlpha = 1.6732632423543772;

// Reverse-mode tape over dense arrays. Nodes are appended in execution order;
// values live in an arena that is reused across reset() calls, so building a
// graph per batch costs no steady-state allocation. Single-threaded by
// contract: one Graph per training step.
class Graph {
 public:
  explicit Graph(Dtype dt = Dtype::F64) : dtype_(dt) {}

  void reset();
  Dtype dtype() const { return dtype_; }
  size_t node_count() const { return nodes_.size(); }

  // -- leaves --------------------------------------------------------------
  NodeRef param(Param& p);               // external value + grad
  NodeRef constant(const Array& a);      // copied into the arena, no grad
  NodeRef constant(std::span<const double> v);  // 1-D copy
  NodeRef scalar_const(double v);
  NodeRef zeros_const(int len);

  // -- ops -----------------------------------------------------------------
  NodeRef matmul(NodeRef a, NodeRef b);
  NodeRef matvec(NodeRef m, NodeRef x);
  NodeRef add(NodeRef a, NodeRef b);
  NodeRef mul(NodeRef a, NodeRef b);
  NodeRef concat(NodeRef a, NodeRef b);
  NodeRef dot(NodeRef a, NodeRef b);
  NodeRef sum(NodeRef a);
  NodeRef sigmoid(NodeRef a);
  NodeRef tanh(NodeRef a);
  NodeRef selu(NodeRef a);
  NodeRef log(NodeRef a);
  NodeRef softmax(NodeRef a);
  // k*x + b, elementwise with scalar constants
  NodeRef scale_shift(NodeRef a, double k, double b);
  // scalar node times vector node
  NodeRef scalar_mul(NodeRef s, NodeRef v);
  // 1-D vector from scalar nodes
  NodeRef pack(std::span<const NodeRef> scalars);
  // row r of a 2-D node (view; gradient scatters into the row)
  NodeRef row(NodeRef m, int r);
  // s_i = x . M[rows[i]]
  NodeRef rows_dot(NodeRef x, NodeRef m, std::span<const int> rows);
  // c = sum_i w_i * M[rows[i]]
  NodeRef weighted_rows_sum(NodeRef w, NodeRef m, std::span<const int> rows);
  // y = v; y[idx] += s for each idx (s scalar node)
  NodeRef add_at_indices(NodeRef v, NodeRef s, std::span<const int> idx);
  // clamps into [lo, hi]; pass-through gradient strictly inside the range.
  // Counts clamp events into clamp_events.
  NodeRef clamp(NodeRef a, double lo, double hi);

  // -- execution -----------------------------------------------------------
  // Seeds d(loss)/d(loss) = 1 and sweeps the tape in reverse. Loss must be
  // scalar-shaped. Parameter gradients accumulate additively.
  void backward(NodeRef loss);

  std::span<const double> value(NodeRef n) const;
  // Gradient of the last backward() w.r.t. node n (empty if none was stored).
  std::span<const double> grad(NodeRef n) const;
  double scalar(NodeRef n) const;
  int rows(NodeRef n) const { return nodes_[n].rows; }
  int cols(NodeRef n) const { return nodes_[n].cols; }
  int ndim(NodeRef n) const { return nodes_[n].ndim; }
  int size(NodeRef n) const { return nodes_[n].rows * nodes_[n].cols; }
  bool requires_grad(NodeRef n) const { return nodes_[n].requires_grad; }

  // Clamp-event (probability saturation) counter; reset() preserves it so a
  // caller can accumulate across batches and sample when reporting.
  std::uint64_t clamp_events = 0;

  // When true, every op output is checked for NaN/Inf (used by tests and
  // gradient checking; off in the training hot path).
  bool check_values = false;

 private:
  struct Node {
    Op op = Op::Const;
    std::uint8_t ndim = 1;
    bool requires_grad = false;
    int rows = 0;
    int cols = 0;
    NodeRef a = kNoNode;
    NodeRef b = kNoNode;
    std::uint32_t voff = kExt;   // value offset in vbuf_, kExt -> ext_val
    std::uint32_t goff = kExt;   // grad offset in gbuf_, kExt -> ext or none
    const double* ext_val = nullptr;
    double* ext_grad = nullptr;  // param leaves only
    double k0 = 0.0, k1 = 0.0;   // op constants
    std::uint32_t aux_off = 0;   // side data (indices / pack parents)
    std::uint32_t aux_len = 0;
  };
  static constexpr std::uint32_t kExt = 0xffffffffu;

  Dtype dtype_;
  std::vector<Node> nodes_;
  std::vector<double> vbuf_;
  std::vector<double> gbuf_;
  std::vector<std::uint32_t> aux_;

  NodeRef push(Node n);
  std::uint32_t alloc_val(int n);
  double* val_ptr(NodeRef n) {
    Node& nd = nodes_[n];
    return nd.voff == kExt ? const_cast<double*>(nd.ext_val) : vbuf_.data() + nd.voff;
  }
  const double* val_ptr(NodeRef n) const {
    const Node& nd = nodes_[n];
    return nd.voff == kExt ? nd.ext_val : vbuf_.data() + nd.voff;
  }
  double* grad_ptr(NodeRef n) {
    Node& nd = nodes_[n];
    if (nd.ext_grad) return nd.ext_grad;
    return nd.goff == kExt ? nullptr : gbuf_.data() + nd.goff;
  }
  void store(double* out, int n);  // rounds in place when dtype is F32
  void check_node(NodeRef n, const char* what) const;
  void shape_error(const char* op, NodeRef a, NodeRef b) const;
  void backward_node(NodeRef i);
};

}  // namespace enatt
