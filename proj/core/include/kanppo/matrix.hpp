#ifndef KANPPO_MATRIX_HPP_
#define KANPPO_MATRIX_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace kanppo {

using Vec = std::vector<double>;

// Dense row-major matrix, 64-bit precision throughout.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0);
  Matrix(int rows, int cols, Vec data);

  static Matrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& at(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  double at(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

  Vec& data() { return data_; }
  const Vec& data() const { return data_; }
  size_t size() const { return data_.size(); }

 private:
  int rows_ = 0;
  int cols_ = 0;
  Vec data_;
};

// Throws std::invalid_argument naming both shapes on inner-dimension mismatch.
Matrix matmul(const Matrix& a, const Matrix& b);

// y = A x; x.size() must equal A.cols().
Vec matvec(const Matrix& a, std::span<const double> x);

// y = A^T x; x.size() must equal A.rows().
Vec matvec_transposed(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace kanppo

#endif  // KANPPO_MATRIX_HPP_
