#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace embias::linalg {

using Vector = std::vector<double>;

// Dense row-major matrix. Every entry must be finite; construction and
// mutation through the public API enforce that.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols);
  static Matrix from_rows(const std::vector<Vector>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }

  void set_row(std::size_t r, std::span<const double> values);

  // Throws if any entry is non-finite; called by the numeric entry points.
  void check_finite(const std::string& what) const;

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

// cos(a,b) = a.b / (|a||b|). Throws std::invalid_argument on dimension
// mismatch, zero-length input, a zero vector, or non-finite entries.
double cosine(std::span<const double> a, std::span<const double> b);

// Returns v/|v|. Throws on zero or non-finite input.
Vector l2_normalize(std::span<const double> v);

// A (n x p) times g (p) -> n projections.
Vector project(const Matrix& a, std::span<const double> g);

// Orthonormal directions in row space, paired with singular values in
// nonincreasing order. Directions use the sign convention that the first
// component of non-negligible magnitude is positive.
struct OrthonormalBasis {
  std::vector<Vector> directions;
  Vector singular_values;
};

// Top-k right singular directions of M, computed through the Gram matrix on
// the smaller side (M Mᵀ when rows <= cols, else Mᵀ M) with a cyclic Jacobi
// eigensolver. Directions whose singular value falls below
// rank_tol * sigma_max are treated as numerical rank deficiency and dropped,
// so the result may hold fewer than k entries. Throws on k = 0,
// k > min(rows, cols), or an all-zero matrix.
OrthonormalBasis top_singular_directions(const Matrix& m, std::size_t k,
                                         double rank_tol = 1e-10);

// Symmetric eigendecomposition helper used by top_singular_directions and by
// tests; `a` must be symmetric. Returns eigenvalues in nonincreasing order
// and matching unit eigenvectors (rows of the second member).
struct SymmetricEigen {
  Vector values;
  std::vector<Vector> vectors;
};
SymmetricEigen jacobi_eigen_symmetric(const Matrix& a);

}  // namespace embias::linalg
