#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stol {

using Vector = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);
// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);
Vector add(std::span<const double> a, std::span<const double> b);

// Dense row-major matrix. Sizes here stay in the tens, so nothing fancier.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  Vector apply(std::span<const double> x) const;
  Matrix multiply(const Matrix& other) const;
  Matrix transpose() const;

  // Grows a square matrix by one row and column, filled with zeros.
  void grow_square();

  bool is_symmetric(double tol = 0.0) const;
  bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace stol
