#include "kanppo/matrix.hpp"

#include <cassert>
#include <sstream>
#include <stdexcept>

namespace kanppo {

Matrix::Matrix(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {
  assert(rows >= 0 && cols >= 0);
}

Matrix::Matrix(int rows, int cols, Vec data) : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != static_cast<size_t>(rows) * cols) {
    throw std::invalid_argument("Matrix: data length does not match rows*cols");
  }
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    std::ostringstream msg;
    msg << "matmul: inner dimensions differ, lhs is " << a.rows() << "x" << a.cols()
        << ", rhs is " << b.rows() << "x" << b.cols();
    throw std::invalid_argument(msg.str());
  }
  Matrix c(a.rows(), b.cols());
  // i-k-j order keeps the inner loop contiguous in both b and c.
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a.at(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) {
        c.at(i, j) += aik * b.at(k, j);
      }
    }
  }
  return c;
}

Vec matvec(const Matrix& a, std::span<const double> x) {
  if (static_cast<int>(x.size()) != a.cols()) {
    std::ostringstream msg;
    msg << "matvec: matrix is " << a.rows() << "x" << a.cols() << ", vector has length "
        << x.size();
    throw std::invalid_argument(msg.str());
  }
  Vec y(a.rows(), 0.0);
  for (int i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (int j = 0; j < a.cols(); ++j) s += a.at(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

Vec matvec_transposed(const Matrix& a, std::span<const double> x) {
  if (static_cast<int>(x.size()) != a.rows()) {
    std::ostringstream msg;
    msg << "matvec_transposed: matrix is " << a.rows() << "x" << a.cols()
        << ", vector has length " << x.size();
    throw std::invalid_argument(msg.str());
  }
  Vec y(a.cols(), 0.0);
  for (int i = 0; i < a.rows(); ++i) {
    const double xi = x[i];
    for (int j = 0; j < a.cols(); ++j) y[j] += a.at(i, j) * xi;
  }
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace kanppo
