// SPDX-License-Identifier: Apache-2.0
//
// Small dense linear algebra: a row-major matrix, symmetric eigendecomposition
// by cyclic Jacobi rotations, the A Lambda^{1/2} square-root factor and
// standardization of Gaussian samples.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include "umm/errors.hpp"

namespace umm::linalg {

using Vector = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
      : rows_(rows), cols_(cols), data_(std::move(row_major)) {
    if (data_.size() != rows_ * cols_) throw config_error("matrix data size does not match its shape");
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  static Matrix diagonal(std::span<const double> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  const std::vector<double>& data() const noexcept { return data_; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  double frobenius_norm() const {
    return std::sqrt(std::inner_product(data_.begin(), data_.end(), data_.begin(), 0.0));
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw config_error("matrix product dimension mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

inline Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw config_error("matrix difference shape mismatch");
  Matrix out = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) -= b(i, j);
  return out;
}

inline Matrix scaled(const Matrix& a, double s) {
  Matrix out = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) *= s;
  return out;
}

inline Vector multiply(const Matrix& a, std::span<const double> v) {
  if (a.cols() != v.size()) throw config_error("matrix-vector dimension mismatch");
  Vector out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw config_error("dot product dimension mismatch");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double squared_norm(std::span<const double> v) { return dot(v, v); }
inline double norm(std::span<const double> v) { return std::sqrt(squared_norm(v)); }

inline Vector subtract(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw config_error("vector difference dimension mismatch");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

/// ||a - b||_F / ||b||_F
inline double relative_frobenius_error(const Matrix& a, const Matrix& b) {
  const double denom = b.frobenius_norm();
  const double num = (a - b).frobenius_norm();
  return denom == 0.0 ? num : num / denom;
}

/// Square matrix whose entries are symmetric within 1e-12 (relative to its size).
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0) throw domain_error("symmetric matrix must be square and non-empty");
    const double scale = std::max(1.0, m_.frobenius_norm());
    for (std::size_t i = 0; i < m_.rows(); ++i)
      for (std::size_t j = i + 1; j < m_.cols(); ++j) {
        if (std::fabs(m_(i, j) - m_(j, i)) > 1e-12 * scale) {
          std::ostringstream os;
          os << "matrix is not symmetric at (" << i << "," << j << ")";
          throw domain_error(os.str());
        }
      }
  }
  static SymMatrix identity(std::size_t n) { return SymMatrix(Matrix::identity(n)); }

  std::size_t dim() const noexcept { return m_.rows(); }
  double operator()(std::size_t r, std::size_t c) const { return m_(r, c); }
  const Matrix& matrix() const noexcept { return m_; }

 private:
  Matrix m_;
};

struct Eigen {
  Vector values;  // descending
  Matrix basis;   // columns are eigenvectors
};

/// Cyclic Jacobi eigendecomposition m = A diag(values) A^t.
/// Sweeps until the off-diagonal norm drops below 1e-14 ||m||_F (at most 100 sweeps).
inline Eigen sym_eig(const SymMatrix& sym) {
  const std::size_t n = sym.dim();
  Matrix a = sym.matrix();
  // exact symmetrization so rotations act on a symmetric array
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (a(i, j) + a(j, i));
  Matrix v = Matrix::identity(n);
  const double threshold = 1e-14 * a.frobenius_norm();

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 100 && off_norm() > threshold; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  Eigen out{Vector(n), Matrix(n, n)};
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = a(order[c], order[c]);
    for (std::size_t r = 0; r < n; ++r) out.basis(r, c) = v(r, order[c]);
  }
  return out;
}

/// Square-root factor F = A Lambda^{1/2} of a positive definite matrix, F F^t = m.
///
/// F is not symmetric in general. `transposed()` gives Lambda^{1/2} A^t, the
/// factor with G^t G = m, used to map parameter offsets into local coordinates.
class SqrtFactor {
 public:
  explicit SqrtFactor(const SymMatrix& m) : eig_(sym_eig(m)) {
    const std::size_t n = m.dim();
    const double largest = eig_.values.front();
    for (std::size_t i = 0; i < n; ++i) {
      const double lam = eig_.values[i];
      if (!(lam > 1e-12 * std::max(largest, 0.0)) || !(lam > 0.0)) {
        std::ostringstream os;
        os << "matrix is not positive definite: eigenvalue " << lam << " (largest " << largest << ")";
        throw singular_matrix_error(os.str(), lam);
      }
    }
    factor_ = Matrix(n, n);
    inverse_ = Matrix(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        factor_(r, c) = eig_.basis(r, c) * std::sqrt(eig_.values[c]);
        inverse_(c, r) = eig_.basis(r, c) / std::sqrt(eig_.values[c]);
      }
  }

  std::size_t dim() const noexcept { return factor_.rows(); }
  const Matrix& factor() const noexcept { return factor_; }
  /// F^{-1} = Lambda^{-1/2} A^t
  const Matrix& inverse() const noexcept { return inverse_; }
  Matrix transposed() const { return factor_.transpose(); }
  const Eigen& eigen() const noexcept { return eig_; }

  /// F F^t
  Matrix reconstruct() const { return factor_ * factor_.transpose(); }

 private:
  Eigen eig_;
  Matrix factor_;
  Matrix inverse_;
};

inline SqrtFactor sqrt_factor(const SymMatrix& m) { return SqrtFactor(m); }

/// F^{-1} (sample - mean) for every sample, with F = sqrt_factor(cov).factor().
inline std::vector<Vector> standardize(std::span<const Vector> samples, std::span<const double> mean,
                                       const SymMatrix& cov) {
  if (mean.size() != cov.dim()) throw config_error("mean and covariance dimensions disagree");
  const SqrtFactor f(cov);
  std::vector<Vector> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.size() != mean.size()) throw config_error("sample dimension does not match mean");
    out.push_back(multiply(f.inverse(), subtract(s, mean)));
  }
  return out;
}

/// Solves a x = b by Gaussian elimination with partial pivoting.
inline Vector solve(Matrix a, Vector b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw config_error("solve: dimension mismatch");
  const double scale = std::max(1.0, a.frobenius_norm());
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a(r, col)) > std::fabs(a(piv, col))) piv = r;
    if (std::fabs(a(piv, col)) <= 1e-14 * scale) throw singular_matrix_error("solve: matrix is singular", a(piv, col));
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(col, c), a(piv, c));
      std::swap(b[col], b[piv]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      b[r] -= f * b[col];
    }
  }
  Vector x(n);
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t c = i + 1; c < n; ++c) acc -= a(i, c) * x[c];
    x[i] = acc / a(i, i);
  }
  return x;
}

}  // namespace umm::linalg
