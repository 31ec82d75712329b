#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace enatt {

// Storage precision. F32 keeps the double storage but rounds every stored
// value through float, so 32-bit value semantics are reproducible without a
// second code path.
enum class Dtype : std::uint8_t { F64, F32 };

// Dense 1-D or 2-D real array. Shape is fixed at construction; values are
// mutable (parameters are updated in place by the optimizer).
class Array {
 public:
  Array() = default;

  static Array zeros(int len, Dtype dt = Dtype::F64);
  static Array zeros(int rows, int cols, Dtype dt = Dtype::F64);
  static Array vec(std::vector<double> values, Dtype dt = Dtype::F64);
  static Array mat(int rows, int cols, std::vector<double> values,
                   Dtype dt = Dtype::F64);
  static Array full(int len, double v, Dtype dt = Dtype::F64);

  int ndim() const { return ndim_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int size() const { return rows_ * cols_; }
  Dtype dtype() const { return dtype_; }

  double operator[](int i) const { return v_[static_cast<size_t>(i)]; }
  double at(int r, int c) const { return v_[static_cast<size_t>(r) * cols_ + c]; }
  void set(int i, double x) { v_[static_cast<size_t>(i)] = round(x); }
  void set(int r, int c, double x) {
    v_[static_cast<size_t>(r) * cols_ + c] = round(x);
  }

  std::span<double> values() { return v_; }
  std::span<const double> values() const { return v_; }
  const double* data() const { return v_.data(); }
  double* data() { return v_.data(); }

  // Rounds x to this array's precision without storing it.
  double round(double x) const {
    return dtype_ == Dtype::F32 ? static_cast<double>(static_cast<float>(x)) : x;
  }

  bool same_shape(const Array& o) const {
    return ndim_ == o.ndim_ && rows_ == o.rows_ && cols_ == o.cols_;
  }
  std::string shape_str() const;

  void fill(double x);
  bool all_finite() const;
  // Throws std::runtime_error naming `what` if any value is NaN/Inf.
  void check_finite(const std::string& what) const;

 private:
  Array(int rows, int cols, int ndim, Dtype dt);

  int rows_ = 0;
  int cols_ = 0;
  int ndim_ = 0;
  Dtype dtype_ = Dtype::F64;
  std::vector<double> v_;
};

std::string shape_str(int rows, int cols, int ndim);

}  // namespace enatt
