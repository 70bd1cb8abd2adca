#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace bandalloc {

// Dense row-major matrix of doubles. Rows index bands, columns index users
// throughout the library.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  double row_sum(std::size_t r) const;
  double col_sum(std::size_t c) const;
  Matrix transposed() const;

  // Largest absolute entrywise difference; dimensions must agree.
  double max_abs_diff(const Matrix& other) const;

  std::vector<std::vector<double>> to_nested() const;
  static Matrix from_nested(const std::vector<std::vector<double>>& rows);

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace bandalloc
