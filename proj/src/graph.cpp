#include "enatt/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace enatt {

const char* op_name(Op op) {
  switch (op) {
    case Op::Leaf: return "leaf";
    case Op::Const: return "const";
    case Op::Row: return "row";
    case Op::MatMul: return "matmul";
    case Op::MatVec: return "matvec";
    case Op::Add: return "add";
    case Op::Mul: return "mul";
    case Op::Concat: return "concat";
    case Op::Dot: return "dot";
    case Op::Sum: return "sum";
    case Op::Sigmoid: return "sigmoid";
    case Op::Tanh: return "tanh";
    case Op::Selu: return "selu";
    case Op::Log: return "log";
    case Op::Softmax: return "softmax";
    case Op::ScaleShift: return "scale_shift";
    case Op::ScalarMul: return "scalar_mul";
    case Op::Pack: return "pack";
    case Op::RowsDot: return "rows_dot";
    case Op::WeightedRowsSum: return "weighted_rows_sum";
    case Op::AddAtIndices: return "add_at_indices";
    case Op::Clamp: return "clamp";
  }
  return "?";
}

void Graph::reset() {
  nodes_.clear();
  vbuf_.clear();
  gbuf_.clear();
  aux_.clear();
}

NodeRef Graph::push(Node n) {
  nodes_.push_back(n);
  return static_cast<NodeRef>(nodes_.size() - 1);
}

std::uint32_t Graph::alloc_val(int n) {
  std::uint32_t off = static_cast<std::uint32_t>(vbuf_.size());
  vbuf_.resize(vbuf_.size() + static_cast<size_t>(n), 0.0);
  return off;
}

void Graph::store(double* out, int n) {
  if (dtype_ == Dtype::F32)
    for (int i = 0; i < n; ++i) out[i] = static_cast<double>(static_cast<float>(out[i]));
}

void Graph::check_node(NodeRef n, const char* what) const {
  if (!check_values) return;
  const double* v = val_ptr(n);
  int sz = size(n);
  for (int i = 0; i < sz; ++i)
    if (!std::isfinite(v[i]))
      throw std::runtime_error(std::string(what) + ": non-finite output at index " +
                               std::to_string(i));
}

void Graph::shape_error(const char* op, NodeRef a, NodeRef b) const {
  const Node& na = nodes_[a];
  std::string msg = std::string(op) + ": shape mismatch " +
                    shape_str(na.rows, na.cols, na.ndim);
  if (b != kNoNode) {
    const Node& nb = nodes_[b];
    msg += " vs " + shape_str(nb.rows, nb.cols, nb.ndim);
  }
  throw std::invalid_argument(msg);
}

// ---------------------------------------------------------------------------
// leaves

NodeRef Graph::param(Param& p) {
  Node n;
  n.op = Op::Leaf;
  n.ndim = static_cast<std::uint8_t>(p.value.ndim());
  n.rows = p.value.rows();
  n.cols = p.value.cols();
  n.ext_val = p.value.data();
  n.ext_grad = p.grad.data();
  n.requires_grad = true;
  return push(n);
}

NodeRef Graph::constant(const Array& a) {
  Node n;
  n.op = Op::Const;
  n.ndim = static_cast<std::uint8_t>(a.ndim());
  n.rows = a.rows();
  n.cols = a.cols();
  n.voff = alloc_val(a.size());
  std::copy(a.values().begin(), a.values().end(), vbuf_.begin() + n.voff);
  return push(n);
}

NodeRef Graph::constant(std::span<const double> v) {
  Node n;
  n.op = Op::Const;
  n.ndim = 1;
  n.rows = static_cast<int>(v.size());
  n.cols = 1;
  n.voff = alloc_val(n.rows);
  std::copy(v.begin(), v.end(), vbuf_.begin() + n.voff);
  store(vbuf_.data() + n.voff, n.rows);
  return push(n);
}

NodeRef Graph::scalar_const(double v) {
  return constant(std::span<const double>(&v, 1));
}

NodeRef Graph::zeros_const(int len) {
  Node n;
  n.op = Op::Const;
  n.ndim = 1;
  n.rows = len;
  n.cols = 1;
  n.voff = alloc_val(len);
  return push(n);
}

// ---------------------------------------------------------------------------
// forward ops

NodeRef Graph::matmul(NodeRef a, NodeRef b) {
  const Node& na = nodes_[a];
  const Node& nb = nodes_[b];
  if (na.ndim != 2 || nb.ndim != 2 || na.cols != nb.rows) shape_error("matmul", a, b);
  Node n;
  n.op = Op::MatMul;
  n.ndim = 2;
  n.rows = na.rows;
  n.cols = nb.cols;
  n.a = a;
  n.b = b;
  n.requires_grad = na.requires_grad || nb.requires_grad;
  n.voff = alloc_val(n.rows * n.cols);
  const double* pa = val_ptr(a);
  const double* pb = val_ptr(b);
  double* out = vbuf_.data() + n.voff;
  const int m = na.rows, k = na.cols, c = nb.cols;
  for (int i = 0; i < m; ++i) {
    double* orow = out + static_cast<size_t>(i) * c;
    for (int p = 0; p < k; ++p) {
      const double av = pa[static_cast<size_t>(i) * k + p];
      const double* brow = pb + static_cast<size_t>(p) * c;
      for (int j = 0; j < c; ++j) orow[j] += av * brow[j];
    }
  }
  store(out, n.rows * n.cols);
  NodeRef r = push(n);
  check_node(r, "matmul");
  return r;
}

NodeRef Graph::matvec(NodeRef m, NodeRef x) {
  const Node& nm = nodes_[m];
  const Node& nx = nodes_[x];
  if (nm.ndim != 2 || nx.ndim != 1 || nm.cols != nx.rows) shape_error("matvec", m, x);
  Node n;
  n.op = Op::MatVec;
  n.ndim = 1;
  n.rows = nm.rows;
  n.cols = 1;
  n.a = m;
  n.b = x;
  n.requires_grad = nm.requires_grad || nx.requires_grad;
  n.voff = alloc_val(n.rows);
  const double* pm = val_ptr(m);
  const double* px = val_ptr(x);
  double* out = vbuf_.data() + n.voff;
  const int rows = nm.rows, cols = nm.cols;
  for (int i = 0; i < rows; ++i) {
    const double* wrow = pm + static_cast<size_t>(i) * cols;
    double s = 0.0;
    for (int j = 0; j < cols; ++j) s += wrow[j] * px[j];
    out[i] = s;
  }
  store(out, n.rows);
  NodeRef r = push(n);
  check_node(r, "matvec");
  return r;
}

NodeRef Graph::add(NodeRef a, NodeRef b) {
  const Node& na = nodes_[a];
  const Node& nb = nodes_[b];
  if (na.ndim != nb.ndim || na.rows != nb.rows || na.cols != nb.cols)
    shape_error("add", a, b);
  Node n;
  n.op = Op::Add;
  n.ndim = na.ndim;
  n.rows = na.rows;
  n.cols = na.cols;
  n.a = a;
  n.b = b;
  n.requires_grad = na.requires_grad || nb.requires_grad;
  const int sz = n.rows * n.cols;
  n.voff = alloc_val(sz);
  const double* pa = val_ptr(a);
  const double* pb = val_ptr(b);
  double* out = vbuf_.data() + n.voff;
  for (int i = 0; i < sz; ++i) out[i] = pa[i] + pb[i];
  store(out, sz);
  NodeRef r = push(n);
  check_node(r, "add");
  return r;
}

NodeRef Graph::mul(NodeRef a, NodeRef b) {
  const Node& na = nodes_[a];
  const Node& nb = nodes_[b];
  if (na.ndim != nb.ndim || na.rows != nb.rows || na.cols != nb.cols)
    shape_error("mul", a, b);
  Node n;
  n.op = Op::Mul;
  n.ndim = na.ndim;
  n.rows = na.rows;
  n.cols = na.cols;
  n.a = a;
  n.b = b;
  n.requires_grad = na.requires_grad || nb.requires_grad;
  const int sz = n.rows * n.cols;
  n.voff = alloc_val(sz);
  const double* pa = val_ptr(a);
  const double* pb = val_ptr(b);
  double* out = vbuf_.data() + n.voff;
  for (int i = 0; i < sz; ++i) out[i] = pa[i] * pb[i];
  store(out, sz);
  NodeRef r = push(n);
  check_node(r, "mul");
  return r;
}

NodeRef Graph::concat(NodeRef a, NodeRef b) {
  const Node& na = nodes_[a];
  const Node& nb = nodes_[b];
  if (na.ndim != 1 || nb.ndim != 1) shape_error("concat", a, b);
  Node n;
  n.op = Op::Concat;
  n.ndim = 1;
  n.rows = na.rows + nb.rows;
  n.cols = 1;
  n.a = a;
  n.b = b;
  n.requires_grad = na.requires_grad || nb.requires_grad;
  n.voff = alloc_val(n.rows);
  const double* pa = val_ptr(a);
  const double* pb = val_ptr(b);
  double* out = vbuf_.data() + n.voff;
  std::copy(pa, pa + na.rows, out);
  std::copy(pb, pb + nb.rows, out + na.rows);
  return push(n);
}

NodeRef Graph::dot(NodeRef a, NodeRef b) {
  const Node& na = nodes_[a];
  const Node& nb = nodes_[b];
  if (na.ndim != 1 || nb.ndim != 1 || na.rows != nb.rows) shape_error("dot", a, b);
  Node n;
  n.op = Op::Dot;
  n.ndim = 1;
  n.rows = 1;
  n.cols = 1;
  n.a = a;
  n.b = b;
  n.requires_grad = na.requires_grad || nb.requires_grad;
  n.voff = alloc_val(1);
  const double* pa = val_ptr(a);
  const double* pb = val_ptr(b);
  double s = 0.0;
  for (int i = 0; i < na.rows; ++i) s += pa[i] * pb[i];
  vbuf_[n.voff] = dtype_ == Dtype::F32 ? static_cast<double>(static_cast<float>(s)) : s;
  NodeRef r = push(n);
  check_node(r, "dot");
  return r;
}

NodeRef Graph::sum(NodeRef a) {
  const Node& na = nodes_[a];
  Node n;
  n.op = Op::Sum;
  n.ndim = 1;
  n.rows = 1;
  n.cols = 1;
  n.a = a;
  n.requires_grad = na.requires_grad;
  n.voff = alloc_val(1);
  const double* pa = val_ptr(a);
  const int sz = na.rows * na.cols;
  double s = 0.0;
  for (int i = 0; i < sz; ++i) s += pa[i];
  vbuf_[n.voff] = dtype_ == Dtype::F32 ? static_cast<double>(static_cast<float>(s)) : s;
  NodeRef r = push(n);
  check_node(r, "sum");
  return r;
}

namespace {
inline double sigmoid_scalar(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}  // namespace

NodeRef Graph::sigmoid(NodeRef a) {
  const Node& na = nodes_[a];
  Node n;
  n.op = Op::Sigmoid;
  n.ndim = na.ndim;
  n.rows = na.rows;
  n.cols = na.cols;
  n.a = a;
  n.requires_grad = na.requires_grad;
  const int sz = n.rows * n.cols;
  n.voff = alloc_val(sz);
  const double* pa = val_ptr(a);
  double* out = vbuf_.data() + n.voff;
  for (int i = 0; i < sz; ++i) out[i] = sigmoid_scalar(pa[i]);
  store(out, sz);
  NodeRef r = push(n);
  check_node(r, "sigmoid");
  return r;
}

NodeRef Graph::tanh(NodeRef a) {
  const Node& na = nodes_[a];
  Node n;
  n.op = Op::Tanh;
  n.ndim = na.ndim;
  n.rows = na.rows;
  n.cols = na.cols;
  n.a = a;
  n.requires_grad = na.requires_grad;
  const int sz = n.rows * n.cols;
  n.voff = alloc_val(sz);
  const double* pa = val_ptr(a);
  double* out = vbuf_.data() + n.voff;
  for (int i = 0; i < sz; ++i) out[i] = std::tanh(pa[i]);
  store(out, sz);
  NodeRef r = push(n);
  check_node(r, "tanh");
  return r;
}

NodeRef Graph::selu(NodeRef a) {
  const Node& na = nodes_[a];
  Node n;
  n.op = Op::Selu;
  n.ndim = na.ndim;
  n.rows = na.rows;
  n.cols = na.cols;
  n.a = a;
  n.requires_grad = na.requires_grad;
  const int sz = n.rows * n.cols;
  n.voff = alloc_val(sz);
  const double* pa = val_ptr(a);
  double* out = vbuf_.data() + n.voff;
  for (int i = 0; i < sz; ++i)
    out[i] = pa[i] > 0.0 ? kSeluLambda * pa[i]
                         : kSeluLambda * kSeluAlpha * (std::exp(pa[i]) - 1.0);
  store(out, sz);
  NodeRef r = push(n);
  check_node(r, "selu");
  return r;
}

NodeRef Graph::log(NodeRef a) {
  const Node& na = nodes_[a];
  Node n;
  n.op = Op::Log;
  n.ndim = na.ndim;
  n.rows = na.rows;
  n.cols = na.cols;
  n.a = a;
  n.requires_grad = na.requires_grad;
  const int sz = n.rows * n.cols;
  n.voff = alloc_val(sz);
  const double* pa = val_ptr(a);
  double* out = vbuf_.data() + n.voff;
  for (int i = 0; i < sz; ++i) out[i] = std::log(pa[i]);
  store(out, sz);
  NodeRef r = push(n);
  check_node(r, "log");
  return r;
}

NodeRef Graph::softmax(NodeRef a) {
  const Node& na = nodes_[a];
  if (na.ndim != 1) shape_error("softmax", a, kNoNode);
  Node n;
  n.op = Op::Softmax;
  n.ndim = 1;
  n.rows = na.rows;
  n.cols = 1;
  n.a = a;
  n.requires_grad = na.requires_grad;
  const int sz = n.rows;
  n.voff = alloc_val(sz);
  const double* pa = val_ptr(a);
  double* out = vbuf_.data() + n.voff;
  double mx = pa[0];
  for (int i = 1; i < sz; ++i) mx = std::max(mx, pa[i]);
  double z = 0.0;
  for (int i = 0; i < sz; ++i) {
    out[i] = std::exp(pa[i] - mx);
    z += out[i];
  }
  for (int i = 0; i < sz; ++i) out[i] /= z;
  store(out, sz);
  NodeRef r = push(n);
  check_node(r, "softmax");
  return r;
}

NodeRef Graph::scale_shift(NodeRef a, double k, double b) {
  const Node& na = nodes_[a];
  Node n;
  n.op = Op::ScaleShift;
  n.ndim = na.ndim;
  n.rows = na.rows;
  n.cols = na.cols;
  n.a = a;
  n.requires_grad = na.requires_grad;
  n.k0 = k;
  n.k1 = b;
  const int sz = n.rows * n.cols;
  n.voff = alloc_val(sz);
  const double* pa = val_ptr(a);
  double* out = vbuf_.data() + n.voff;
  for (int i = 0; i < sz; ++i) out[i] = k * pa[i] + b;
  store(out, sz);
  NodeRef r = push(n);
  check_node(r, "scale_shift");
  return r;
}

NodeRef Graph::scalar_mul(NodeRef s, NodeRef v) {
  const Node& ns = nodes_[s];
  const Node& nv = nodes_[v];
  if (ns.rows * ns.cols != 1) shape_error("scalar_mul", s, v);
  Node n;
  n.op = Op::ScalarMul;
  n.ndim = nv.ndim;
  n.rows = nv.rows;
  n.cols = nv.cols;
  n.a = s;
  n.b = v;
  n.requires_grad = ns.requires_grad || nv.requires_grad;
  const int sz = n.rows * n.cols;
  n.voff = alloc_val(sz);
  const double sc = *val_ptr(s);
  const double* pv = val_ptr(v);
  double* out = vbuf_.data() + n.voff;
  for (int i = 0; i < sz; ++i) out[i] = sc * pv[i];
  store(out, sz);
  NodeRef r = push(n);
  check_node(r, "scalar_mul");
  return r;
}

NodeRef Graph::pack(std::span<const NodeRef> scalars) {
  Node n;
  n.op = Op::Pack;
  n.ndim = 1;
  n.rows = static_cast<int>(scalars.size());
  n.cols = 1;
  n.aux_off = static_cast<std::uint32_t>(aux_.size());
  n.aux_len = static_cast<std::uint32_t>(scalars.size());
  for (NodeRef s : scalars) {
    if (size(s) != 1) shape_error("pack", s, kNoNode);
    n.requires_grad = n.requires_grad || nodes_[s].requires_grad;
    aux_.push_back(s);
  }
  n.voff = alloc_val(n.rows);
  double* out = vbuf_.data() + n.voff;
  for (int i = 0; i < n.rows; ++i) out[i] = *val_ptr(scalars[static_cast<size_t>(i)]);
  return push(n);
}

NodeRef Graph::row(NodeRef m, int r) {
  const Node& nm = nodes_[m];
  if (nm.ndim != 2 || r < 0 || r >= nm.rows)
    throw std::invalid_argument("row: index " + std::to_string(r) +
                                " out of range for " +
                                shape_str(nm.rows, nm.cols, nm.ndim));
  Node n;
  n.op = Op::Row;
  n.ndim = 1;
  n.rows = nm.cols;
  n.cols = 1;
  n.a = m;
  n.requires_grad = nm.requires_grad;
  n.k0 = static_cast<double>(r);
  // View into the parent's storage; no copy. Parent value memory is stable:
  // either external (param) or arena that only grows.
  if (nm.voff == kExt) {
    n.ext_val = nm.ext_val + static_cast<size_t>(r) * nm.cols;
  } else {
    n.voff = nm.voff + static_cast<std::uint32_t>(r) * nm.cols;
  }
  return push(n);
}

NodeRef Graph::rows_dot(NodeRef x, NodeRef m, std::span<const int> rows) {
  const Node& nx = nodes_[x];
  const Node& nm = nodes_[m];
  if (nx.ndim != 1 || nm.ndim != 2 || nx.rows != nm.cols) shape_error("rows_dot", x, m);
  for (int r : rows)
    if (r < 0 || r >= nm.rows)
      throw std::invalid_argument("rows_dot: row " + std::to_string(r) +
                                  " out of range for " +
                                  shape_str(nm.rows, nm.cols, 2));
  Node n;
  n.op = Op::RowsDot;
  n.ndim = 1;
  n.rows = static_cast<int>(rows.size());
  n.cols = 1;
  n.a = x;
  n.b = m;
  n.requires_grad = nx.requires_grad || nm.requires_grad;
  n.aux_off = static_cast<std::uint32_t>(aux_.size());
  n.aux_len = static_cast<std::uint32_t>(rows.size());
  for (int r : rows) aux_.push_back(static_cast<std::uint32_t>(r));
  n.voff = alloc_val(n.rows);
  const double* px = val_ptr(x);
  const double* pm = val_ptr(m);
  double* out = vbuf_.data() + n.voff;
  for (int i = 0; i < n.rows; ++i) {
    const double* mrow = pm + static_cast<size_t>(rows[static_cast<size_t>(i)]) * nm.cols;
    double s = 0.0;
    for (int j = 0; j < nm.cols; ++j) s += px[j] * mrow[j];
    out[i] = s;
  }
  store(out, n.rows);
  NodeRef r = push(n);
  check_node(r, "rows_dot");
  return r;
}

NodeRef Graph::weighted_rows_sum(NodeRef w, NodeRef m, std::span<const int> rows) {
  const Node& nw = nodes_[w];
  const Node& nm = nodes_[m];
  if (nw.ndim != 1 || nm.ndim != 2 || nw.rows != static_cast<int>(rows.size()))
    shape_error("weighted_rows_sum", w, m);
  Node n;
  n.op = Op::WeightedRowsSum;
  n.ndim = 1;
  n.rows = nm.cols;
  n.cols = 1;
  n.a = w;
  n.b = m;
  n.requires_grad = nw.requires_grad || nm.requires_grad;
  n.aux_off = static_cast<std::uint32_t>(aux_.size());
  n.aux_len = static_cast<std::uint32_t>(rows.size());
  for (int r : rows) {
    if (r < 0 || r >= nm.rows)
      throw std::invalid_argument("weighted_rows_sum: row " + std::to_string(r) +
                                  " out of range");
    aux_.push_back(static_cast<std::uint32_t>(r));
  }
  n.voff = alloc_val(n.rows);
  const double* pw = val_ptr(w);
  const double* pm = val_ptr(m);
  double* out = vbuf_.data() + n.voff;
  for (size_t e = 0; e < rows.size(); ++e) {
    const double we = pw[e];
    const double* mrow = pm + static_cast<size_t>(rows[e]) * nm.cols;
    for (int j = 0; j < nm.cols; ++j) out[j] += we * mrow[j];
  }
  store(out, n.rows);
  NodeRef r = push(n);
  check_node(r, "weighted_rows_sum");
  return r;
}

NodeRef Graph::add_at_indices(NodeRef v, NodeRef s, std::span<const int> idx) {
  const Node& nv = nodes_[v];
  const Node& ns = nodes_[s];
  if (nv.ndim != 1 || ns.rows * ns.cols != 1) shape_error("add_at_indices", v, s);
  Node n;
  n.op = Op::AddAtIndices;
  n.ndim = 1;
  n.rows = nv.rows;
  n.cols = 1;
  n.a = v;
  n.b = s;
  n.requires_grad = nv.requires_grad || ns.requires_grad;
  n.aux_off = static_cast<std::uint32_t>(aux_.size());
  n.aux_len = static_cast<std::uint32_t>(idx.size());
  for (int i : idx) {
    if (i < 0 || i >= nv.rows)
      throw std::invalid_argument("add_at_indices: index " + std::to_string(i) +
                                  " out of range for " + shape_str(nv.rows, 1, 1));
    aux_.push_back(static_cast<std::uint32_t>(i));
  }
  n.voff = alloc_val(n.rows);
  const double* pv = val_ptr(v);
  const double sc = *val_ptr(s);
  double* out = vbuf_.data() + n.voff;
  std::copy(pv, pv + n.rows, out);
  for (std::uint32_t k = 0; k < n.aux_len; ++k) out[aux_[n.aux_off + k]] += sc;
  store(out, n.rows);
  return push(n);
}

NodeRef Graph::clamp(NodeRef a, double lo, double hi) {
  const Node& na = nodes_[a];
  Node n;
  n.op = Op::Clamp;
  n.ndim = na.ndim;
  n.rows = na.rows;
  n.cols = na.cols;
  n.a = a;
  n.requires_grad = na.requires_grad;
  n.k0 = lo;
  n.k1 = hi;
  const int sz = n.rows * n.cols;
  n.voff = alloc_val(sz);
  const double* pa = val_ptr(a);
  double* out = vbuf_.data() + n.voff;
  for (int i = 0; i < sz; ++i) {
    double x = pa[i];
    if (x < lo) {
      x = lo;
      ++clamp_events;
    } else if (x > hi) {
      x = hi;
      ++clamp_events;
    }
    out[i] = x;
  }
  return push(n);
}

// ---------------------------------------------------------------------------
// backward

void Graph::backward(NodeRef loss) {
  if (size(loss) != 1)
    throw std::invalid_argument("backward: loss must be scalar-shaped, got " +
                                shape_str(rows(loss), cols(loss), ndim(loss)));
  // Grad slots for every grad-requiring node with arena storage.
  size_t need = 0;
  for (Node& n : nodes_) {
    n.goff = kExt;
    if (n.requires_grad && !n.ext_grad) need += static_cast<size_t>(n.rows) * n.cols;
  }
  gbuf_.assign(need, 0.0);
  size_t off = 0;
  for (Node& n : nodes_) {
    if (n.requires_grad && !n.ext_grad) {
      n.goff = static_cast<std::uint32_t>(off);
      off += static_cast<size_t>(n.rows) * n.cols;
    }
  }
  if (!nodes_[loss].requires_grad) return;  // nothing reachable
  grad_ptr(loss)[0] += 1.0;
  for (NodeRef i = static_cast<NodeRef>(nodes_.size()); i-- > 0;) {
    if (nodes_[i].requires_grad) backward_node(i);
  }
}

void Graph::backward_node(NodeRef i) {
  Node& n = nodes_[i];
  const double* g = grad_ptr(i);
  if (g == nullptr) return;
  const int sz = n.rows * n.cols;
  switch (n.op) {
    case Op::Leaf:
    case Op::Const:
      return;
    case Op::Row: {
      Node& pa = nodes_[n.a];
      if (!pa.requires_grad) return;
      double* pg = grad_ptr(n.a);
      const int r = static_cast<int>(n.k0);
      double* dst = pg + static_cast<size_t>(r) * pa.cols;
      for (int j = 0; j < sz; ++j) dst[j] += g[j];
      return;
    }
    case Op::MatMul: {
      const Node& na = nodes_[n.a];
      const Node& nb = nodes_[n.b];
      const int m = na.rows, k = na.cols, c = nb.cols;
      const double* pa = val_ptr(n.a);
      const double* pb = val_ptr(n.b);
      if (na.requires_grad) {
        double* ga = grad_ptr(n.a);
        for (int ii = 0; ii < m; ++ii)
          for (int p = 0; p < k; ++p) {
            const double* grow = g + static_cast<size_t>(ii) * c;
            const double* brow = pb + static_cast<size_t>(p) * c;
            double s = 0.0;
            for (int j = 0; j < c; ++j) s += grow[j] * brow[j];
            ga[static_cast<size_t>(ii) * k + p] += s;
          }
      }
      if (nb.requires_grad) {
        double* gb = grad_ptr(n.b);
        for (int p = 0; p < k; ++p)
          for (int ii = 0; ii < m; ++ii) {
            const double av = pa[static_cast<size_t>(ii) * k + p];
            const double* grow = g + static_cast<size_t>(ii) * c;
            double* brow = gb + static_cast<size_t>(p) * c;
            for (int j = 0; j < c; ++j) brow[j] += av * grow[j];
          }
      }
      return;
    }
    case Op::MatVec: {
      const Node& nm = nodes_[n.a];
      const Node& nx = nodes_[n.b];
      const double* pm = val_ptr(n.a);
      const double* px = val_ptr(n.b);
      const int rows = nm.rows, cols = nm.cols;
      if (nm.requires_grad) {
        double* gm = grad_ptr(n.a);
        for (int ii = 0; ii < rows; ++ii) {
          const double gi = g[ii];
          double* grow = gm + static_cast<size_t>(ii) * cols;
          for (int j = 0; j < cols; ++j) grow[j] += gi * px[j];
        }
      }
      if (nx.requires_grad) {
        double* gx = grad_ptr(n.b);
        for (int ii = 0; ii < rows; ++ii) {
          const double gi = g[ii];
          const double* wrow = pm + static_cast<size_t>(ii) * cols;
          for (int j = 0; j < cols; ++j) gx[j] += gi * wrow[j];
        }
      }
      return;
    }
    case Op::Add: {
      if (nodes_[n.a].requires_grad) {
        double* ga = grad_ptr(n.a);
        for (int j = 0; j < sz; ++j) ga[j] += g[j];
      }
      if (nodes_[n.b].requires_grad) {
        double* gb = grad_ptr(n.b);
        for (int j = 0; j < sz; ++j) gb[j] += g[j];
      }
      return;
    }
    case Op::Mul: {
      const double* pa = val_ptr(n.a);
      const double* pb = val_ptr(n.b);
      if (nodes_[n.a].requires_grad) {
        double* ga = grad_ptr(n.a);
        for (int j = 0; j < sz; ++j) ga[j] += g[j] * pb[j];
      }
      if (nodes_[n.b].requires_grad) {
        double* gb = grad_ptr(n.b);
        for (int j = 0; j < sz; ++j) gb[j] += g[j] * pa[j];
      }
      return;
    }
    case Op::Concat: {
      const Node& na = nodes_[n.a];
      const Node& nb = nodes_[n.b];
      if (na.requires_grad) {
        double* ga = grad_ptr(n.a);
        for (int j = 0; j < na.rows; ++j) ga[j] += g[j];
      }
      if (nb.requires_grad) {
        double* gb = grad_ptr(n.b);
        for (int j = 0; j < nb.rows; ++j) gb[j] += g[na.rows + j];
      }
      return;
    }
    case Op::Dot: {
      const Node& na = nodes_[n.a];
      const double* pa = val_ptr(n.a);
      const double* pb = val_ptr(n.b);
      const double gs = g[0];
      if (na.requires_grad) {
        double* ga = grad_ptr(n.a);
        for (int j = 0; j < na.rows; ++j) ga[j] += gs * pb[j];
      }
      if (nodes_[n.b].requires_grad) {
        double* gb = grad_ptr(n.b);
        for (int j = 0; j < na.rows; ++j) gb[j] += gs * pa[j];
      }
      return;
    }
    case Op::Sum: {
      const Node& na = nodes_[n.a];
      const double gs = g[0];
      double* ga = grad_ptr(n.a);
      const int asz = na.rows * na.cols;
      for (int j = 0; j < asz; ++j) ga[j] += gs;
      return;
    }
    case Op::Sigmoid: {
      const double* y = val_ptr(i);
      double* ga = grad_ptr(n.a);
      for (int j = 0; j < sz; ++j) ga[j] += g[j] * y[j] * (1.0 - y[j]);
      return;
    }
    case Op::Tanh: {
      const double* y = val_ptr(i);
      double* ga = grad_ptr(n.a);
      for (int j = 0; j < sz; ++j) ga[j] += g[j] * (1.0 - y[j] * y[j]);
      return;
    }
    case Op::Selu: {
      const double* x = val_ptr(n.a);
      double* ga = grad_ptr(n.a);
      for (int j = 0; j < sz; ++j)
        ga[j] += g[j] * (x[j] > 0.0 ? kSeluLambda
                                    : kSeluLambda * kSeluAlpha * std::exp(x[j]));
      return;
    }
    case Op::Log: {
      const double* x = val_ptr(n.a);
      double* ga = grad_ptr(n.a);
      for (int j = 0; j < sz; ++j) ga[j] += g[j] / x[j];
      return;
    }
    case Op::Softmax: {
      const double* y = val_ptr(i);
      double* ga = grad_ptr(n.a);
      double gy = 0.0;
      for (int j = 0; j < sz; ++j) gy += g[j] * y[j];
      for (int j = 0; j < sz; ++j) ga[j] += y[j] * (g[j] - gy);
      return;
    }
    case Op::ScaleShift: {
      double* ga = grad_ptr(n.a);
      const double k = n.k0;
      for (int j = 0; j < sz; ++j) ga[j] += k * g[j];
      return;
    }
    case Op::ScalarMul: {
      const double sc = *val_ptr(n.a);
      const double* pv = val_ptr(n.b);
      if (nodes_[n.a].requires_grad) {
        double s = 0.0;
        for (int j = 0; j < sz; ++j) s += g[j] * pv[j];
        grad_ptr(n.a)[0] += s;
      }
      if (nodes_[n.b].requires_grad) {
        double* gv = grad_ptr(n.b);
        for (int j = 0; j < sz; ++j) gv[j] += sc * g[j];
      }
      return;
    }
    case Op::Pack: {
      for (std::uint32_t k = 0; k < n.aux_len; ++k) {
        NodeRef p = aux_[n.aux_off + k];
        if (nodes_[p].requires_grad) grad_ptr(p)[0] += g[k];
      }
      return;
    }
    case Op::RowsDot: {
      const Node& nx = nodes_[n.a];
      const Node& nm = nodes_[n.b];
      const double* px = val_ptr(n.a);
      const double* pm = val_ptr(n.b);
      double* gx = nx.requires_grad ? grad_ptr(n.a) : nullptr;
      double* gm = nm.requires_grad ? grad_ptr(n.b) : nullptr;
      for (std::uint32_t e = 0; e < n.aux_len; ++e) {
        const size_t r = aux_[n.aux_off + e];
        const double ge = g[e];
        const double* mrow = pm + r * nm.cols;
        if (gx)
          for (int j = 0; j < nm.cols; ++j) gx[j] += ge * mrow[j];
        if (gm) {
          double* grow = gm + r * nm.cols;
          for (int j = 0; j < nm.cols; ++j) grow[j] += ge * px[j];
        }
      }
      return;
    }
    case Op::WeightedRowsSum: {
      const Node& nw = nodes_[n.a];
      const Node& nm = nodes_[n.b];
      const double* pw = val_ptr(n.a);
      const double* pm = val_ptr(n.b);
      double* gw = nw.requires_grad ? grad_ptr(n.a) : nullptr;
      double* gm = nm.requires_grad ? grad_ptr(n.b) : nullptr;
      for (std::uint32_t e = 0; e < n.aux_len; ++e) {
        const size_t r = aux_[n.aux_off + e];
        const double* mrow = pm + r * nm.cols;
        if (gw) {
          double s = 0.0;
          for (int j = 0; j < nm.cols; ++j) s += g[j] * mrow[j];
          gw[e] += s;
        }
        if (gm) {
          const double we = pw[e];
          double* grow = gm + r * nm.cols;
          for (int j = 0; j < nm.cols; ++j) grow[j] += we * g[j];
        }
      }
      return;
    }
    case Op::AddAtIndices: {
      if (nodes_[n.a].requires_grad) {
        double* gv = grad_ptr(n.a);
        for (int j = 0; j < sz; ++j) gv[j] += g[j];
      }
      if (nodes_[n.b].requires_grad) {
        double s = 0.0;
        for (std::uint32_t k = 0; k < n.aux_len; ++k) s += g[aux_[n.aux_off + k]];
        grad_ptr(n.b)[0] += s;
      }
      return;
    }
    case Op::Clamp: {
      const double* x = val_ptr(n.a);
      double* ga = grad_ptr(n.a);
      for (int j = 0; j < sz; ++j)
        if (x[j] > n.k0 && x[j] < n.k1) ga[j] += g[j];
      return;
    }
  }
}

std::span<const double> Graph::value(NodeRef n) const {
  return {val_ptr(n), static_cast<size_t>(size(n))};
}

std::span<const double> Graph::grad(NodeRef n) const {
  const Node& nd = nodes_[n];
  const double* p = nd.ext_grad;
  if (!p && nd.goff != kExt) p = gbuf_.data() + nd.goff;
  if (!p) return {};
  return {p, static_cast<size_t>(size(n))};
}

double Graph::scalar(NodeRef n) const {
  if (size(n) != 1)
    throw std::invalid_argument("scalar: node is not scalar-shaped");
  return *val_ptr(n);
}

}  // namespace enatt
