#include "enatt/array.hpp"

#include <cmath>
#include <stdexcept>

namespace enatt {

std::string shape_str(int rows, int cols, int ndim) {
  if (ndim == 1) return "(" + std::to_string(rows) + ")";
  return "(" + std::to_string(rows) + "," + std::to_string(cols) + ")";
}

Array::Array(int rows, int cols, int ndim, Dtype dt)
    : rows_(rows), cols_(cols), ndim_(ndim), dtype_(dt) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("Array: negative shape");
  v_.assign(static_cast<size_t>(rows) * cols, 0.0);
}

Array Array::zeros(int len, Dtype dt) { return Array(len, 1, 1, dt); }

Array Array::zeros(int rows, int cols, Dtype dt) {
  return Array(rows, cols, 2, dt);
}

Array Array::vec(std::vector<double> values, Dtype dt) {
  Array a(static_cast<int>(values.size()), 1, 1, dt);
  for (size_t i = 0; i < values.size(); ++i) a.v_[i] = a.round(values[i]);
  return a;
}

Array Array::mat(int rows, int cols, std::vector<double> values, Dtype dt) {
  if (values.size() != static_cast<size_t>(rows) * cols)
    throw std::invalid_argument("Array::mat: value count does not match shape " +
                                enatt::shape_str(rows, cols, 2));
  Array a(rows, cols, 2, dt);
  for (size_t i = 0; i < values.size(); ++i) a.v_[i] = a.round(values[i]);
  return a;
}

Array Array::full(int len, double v, Dtype dt) {
  Array a(len, 1, 1, dt);
  a.fill(v);
  return a;
}

std::string Array::shape_str() const {
  return enatt::shape_str(rows_, cols_, ndim_);
}

void Array::fill(double x) {
  double r = round(x);
  for (auto& v : v_) v = r;
}

bool Array::all_finite() const {
  for (double v : v_)
    if (!std::isfinite(v)) return false;
  return true;
}

void Array::check_finite(const std::string& what) const {
  if (!all_finite())
    throw std::runtime_error(what + ": non-finite value in array " + shape_str());
}

}  // namespace enatt
