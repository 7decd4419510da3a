#include "embias/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace embias::linalg {

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
  if (rows.empty()) throw std::invalid_argument("matrix needs at least one row");
  const std::size_t cols = rows.front().size();
  if (cols == 0) throw std::invalid_argument("matrix rows must be non-empty");
  Matrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw std::invalid_argument("matrix rows have inconsistent lengths");
    }
    m.set_row(r, rows[r]);
  }
  m.check_finite("matrix");
  return m;
}

void Matrix::set_row(std::size_t r, std::span<const double> values) {
  if (values.size() != cols_) {
    throw std::invalid_argument("row length does not match matrix width");
  }
  std::copy(values.begin(), values.end(), data_.begin() + r * cols_);
}

void Matrix::check_finite(const std::string& what) const {
  for (double v : data_) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(what + " contains a non-finite entry");
    }
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("dot: dimension mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

namespace {
void check_finite_span(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument(std::string(what) +
                                  " contains a non-finite entry");
    }
  }
}
}  // namespace

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("cosine: empty vector");
  }
  if (a.size() != b.size()) {
    throw std::invalid_argument("cosine: dimension mismatch");
  }
  check_finite_span(a, "cosine input");
  check_finite_span(b, "cosine input");
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) {
    throw std::invalid_argument("cosine: zero vector has no direction");
  }
  return dot(a, b) / (na * nb);
}

Vector l2_normalize(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("l2_normalize: empty vector");
  check_finite_span(v, "l2_normalize input");
  const double n = norm(v);
  if (n == 0.0) {
    throw std::invalid_argument("l2_normalize: zero vector");
  }
  Vector out(v.begin(), v.end());
  for (double& x : out) x /= n;
  return out;
}

Vector project(const Matrix& a, std::span<const double> g) {
  if (a.empty()) throw std::invalid_argument("project: empty matrix");
  if (g.size() != a.cols()) {
    throw std::invalid_argument("project: direction length != matrix width");
  }
  a.check_finite("project matrix");
  check_finite_span(g, "project direction");
  Vector out(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) out[r] = dot(a.row(r), g);
  return out;
}

SymmetricEigen jacobi_eigen_symmetric(const Matrix& a) {
  if (a.rows() != a.cols() || a.empty()) {
    throw std::invalid_argument("jacobi: square matrix required");
  }
  const std::size_t n = a.rows();
  Matrix m = a;
  // v starts as identity; rows accumulate the eigenvectors.
  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) v.at(i, i) = 1.0;

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(m.at(i, j)));
  const double tol = (scale == 0.0) ? 0.0 : 1e-14 * scale;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off = std::max(off, std::abs(m.at(i, j)));
    if (off <= tol) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = m.at(p, q);
        if (std::abs(apq) <= tol) continue;
        const double app = m.at(p, p);
        const double aqq = m.at(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0)
                             ? 1.0 / (theta + std::sqrt(1.0 + theta * theta))
                             : 1.0 / (theta - std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double mkp = m.at(k, p);
          const double mkq = m.at(k, q);
          m.at(k, p) = c * mkp - s * mkq;
          m.at(k, q) = s * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double mpk = m.at(p, k);
          const double mqk = m.at(q, k);
          m.at(p, k) = c * mpk - s * mqk;
          m.at(q, k) = s * mpk + c * mqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vpk = v.at(p, k);
          const double vqk = v.at(q, k);
          v.at(p, k) = c * vpk - s * vqk;
          v.at(q, k) = s * vpk + c * vqk;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return m.at(x, x) > m.at(y, y);
  });

  SymmetricEigen out;
  out.values.reserve(n);
  out.vectors.reserve(n);
  for (std::size_t idx : order) {
    out.values.push_back(m.at(idx, idx));
    Vector vec(n);
    for (std::size_t k = 0; k < n; ++k) vec[k] = v.at(idx, k);
    out.vectors.push_back(std::move(vec));
  }
  return out;
}

namespace {

// Sign convention: flip so the first component of non-negligible magnitude
// is positive. Makes directions reproducible up to roundoff.
void fix_sign(Vector& v) {
  double mx = 0.0;
  for (double x : v) mx = std::max(mx, std::abs(x));
  if (mx == 0.0) return;
  for (double x : v) {
    if (std::abs(x) > 1e-12 * mx) {
      if (x < 0.0)
        for (double& y : v) y = -y;
      return;
    }
  }
}

}  // namespace

OrthonormalBasis top_singular_directions(const Matrix& m, std::size_t k,
                                         double rank_tol) {
  if (m.empty()) throw std::invalid_argument("svd: empty matrix");
  m.check_finite("svd input");
  const std::size_t n = m.rows(), p = m.cols();
  if (k == 0 || k > std::min(n, p)) {
    throw std::invalid_argument("svd: k must be in [1, min(rows, cols)]");
  }
  bool any_nonzero = false;
  for (std::size_t i = 0; i < n && !any_nonzero; ++i)
    for (double x : m.row(i))
      if (x != 0.0) {
        any_nonzero = true;
        break;
      }
  if (!any_nonzero) throw std::invalid_argument("svd: all-zero matrix");

  OrthonormalBasis out;
  if (n <= p) {
    // Gram route: eigenvectors u of M Mᵀ give right directions Mᵀu / sigma.
    Matrix gram(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const double g = dot(m.row(i), m.row(j));
        gram.at(i, j) = g;
        gram.at(j, i) = g;
      }
    }
    const SymmetricEigen eig = jacobi_eigen_symmetric(gram);
    const double sigma_max = std::sqrt(std::max(eig.values.front(), 0.0));
    for (std::size_t i = 0; i < k; ++i) {
      const double sigma = std::sqrt(std::max(eig.values[i], 0.0));
      if (sigma <= rank_tol * sigma_max) break;  // numerical rank reached
      Vector dir(p, 0.0);
      for (std::size_t r = 0; r < n; ++r) {
        const double u = eig.vectors[i][r];
        const auto row = m.row(r);
        for (std::size_t c = 0; c < p; ++c) dir[c] += u * row[c];
      }
      for (double& x : dir) x /= sigma;
      // Exact arithmetic gives ||M^T u|| / sigma = 1; a short reconstruction
      // means the eigenpair lives in roundoff below the true rank.
      if (!(norm(dir) > 0.5)) break;
      dir = l2_normalize(dir);  // absorb roundoff
      fix_sign(dir);
      out.directions.push_back(std::move(dir));
      out.singular_values.push_back(sigma);
    }
  } else {
    Matrix gram(p, p);
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = i; j < p; ++j) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += m.at(r, i) * m.at(r, j);
        gram.at(i, j) = s;
        gram.at(j, i) = s;
      }
    }
    const SymmetricEigen eig = jacobi_eigen_symmetric(gram);
    const double sigma_max = std::sqrt(std::max(eig.values.front(), 0.0));
    for (std::size_t i = 0; i < k; ++i) {
      const double sigma = std::sqrt(std::max(eig.values[i], 0.0));
      if (sigma <= rank_tol * sigma_max) break;
      Vector dir = l2_normalize(eig.vectors[i]);
      fix_sign(dir);
      out.directions.push_back(std::move(dir));
      out.singular_values.push_back(sigma);
    }
  }
  return out;
}

}  // namespace embias::linalg
