#include "ipmforge/linalg.hpp"

#include <cmath>
#include <string>

namespace ipmforge {

namespace kernels {

double dot_fold(const double* a, const double* b, int len) {
  double acc = 0.0;
  for (int i = 0; i < len; ++i) acc += a[i] * b[i];
  return acc;
}

void mat_mul(double* dst, const double* a, const double* b, int rows, int inner, int cols) {
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int k = 0; k < inner; ++k) acc += a[r * inner + k] * b[k * cols + c];
      dst[r * cols + c] = acc;
    }
  }
}

bool chol_factor(double* lower, const double* m, int dim, double pivot_floor) {
  for (int j = 0; j < dim; ++j) {
    double d = m[j * dim + j];
    for (int k = 0; k < j; ++k) d -= lower[j * dim + k] * lower[j * dim + k];
    if (!(d > pivot_floor)) return false;
    const double ljj = std::sqrt(d);
    lower[j * dim + j] = ljj;
    for (int i = j + 1; i < dim; ++i) {
      double s = m[i * dim + j];
      for (int k = 0; k < j; ++k) s -= lower[i * dim + k] * lower[j * dim + k];
      lower[i * dim + j] = s / ljj;
    }
    for (int i = 0; i < j; ++i) lower[i * dim + j] = 0.0;
  }
  return true;
}

void chol_solve(const double* lower, const double* rhs, double* out, int dim) {
  // forward: L y = rhs
  for (int i = 0; i < dim; ++i) {
    double s = rhs[i];
    for (int k = 0; k < i; ++k) s -= lower[i * dim + k] * out[k];
    out[i] = s / lower[i * dim + i];
  }
  // back: L^T x = y
  for (int i = dim - 1; i >= 0; --i) {
    double s = out[i];
    for (int k = i + 1; k < dim; ++k) s -= lower[k * dim + i] * out[k];
    out[i] = s / lower[i * dim + i];
  }
}

}  // namespace kernels

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw NotFiniteError(std::string(what) + ": non-finite entry");
}

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw NotFiniteError(std::string(what) + ": non-finite entry");
}

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError(std::string(op) + ": shapes " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
}

}  // namespace

Matrix mat_mul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw ShapeError("mat_mul: inner dimensions " + std::to_string(a.cols()) + " vs " +
                     std::to_string(b.rows()));
  require_finite(a, "mat_mul lhs");
  require_finite(b, "mat_mul rhs");
  Matrix r = a * b;
  require_finite(r, "mat_mul result");
  return r;
}

Matrix mat_add(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "mat_add");
  require_finite(a, "mat_add lhs");
  require_finite(b, "mat_add rhs");
  Matrix r = a + b;
  require_finite(r, "mat_add result");
  return r;
}

Matrix mat_scale(const Matrix& a, double s) {
  require_finite(a, "mat_scale operand");
  if (!std::isfinite(s)) throw NotFiniteError("mat_scale: non-finite scalar");
  Matrix r = a * s;
  require_finite(r, "mat_scale result");
  return r;
}

Matrix transpose(const Matrix& a) {
  require_finite(a, "transpose operand");
  return a.transpose();
}

double dot(const Vector& u, const Vector& v) {
  if (u.size() != v.size())
    throw ShapeError("dot: lengths " + std::to_string(u.size()) + " vs " +
                     std::to_string(v.size()));
  require_finite(u, "dot lhs");
  require_finite(v, "dot rhs");
  const double r = kernels::dot_fold(u.data(), v.data(), static_cast<int>(u.size()));
  if (!std::isfinite(r)) throw NotFiniteError("dot: non-finite result");
  return r;
}

CholFactor chol_factor(const Matrix& m) {
  if (m.rows() != m.cols()) throw ShapeError("chol_factor: matrix not square");
  if (m.rows() == 0) throw ShapeError("chol_factor: empty matrix");
  require_finite(m, "chol_factor operand");
  const int n = static_cast<int>(m.rows());
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - Matrix(m.transpose())).cwiseAbs().maxCoeff();
  if (asym > Tolerances::symmetry_rel * (1.0 + scale))
    throw ShapeError("chol_factor: matrix not symmetric");
  double max_diag = m(0, 0);
  for (int i = 1; i < n; ++i) max_diag = std::max(max_diag, m(i, i));
  const double pivot_floor = Tolerances::chol_pivot_rel * max_diag;
  CholFactor f;
  f.dim = n;
  f.lower = Matrix::Zero(n, n);
  if (!kernels::chol_factor(f.lower.data(), m.data(), n, pivot_floor))
    throw NotPositiveDefinite("chol_factor: pivot at or below " + std::to_string(pivot_floor));
  return f;
}

Vector chol_solve(const CholFactor& f, const Vector& rhs) {
  if (rhs.size() != f.dim)
    throw ShapeError("chol_solve: rhs length " + std::to_string(rhs.size()) + " vs dim " +
                     std::to_string(f.dim));
  require_finite(rhs, "chol_solve rhs");
  Vector out(f.dim);
  kernels::chol_solve(f.lower.data(), rhs.data(), out.data(), f.dim);
  require_finite(out, "chol_solve result");
  return out;
}

Matrix chol_solve(const CholFactor& f, const Matrix& rhs) {
  if (rhs.rows() != f.dim)
    throw ShapeError("chol_solve: rhs rows " + std::to_string(rhs.rows()) + " vs dim " +
                     std::to_string(f.dim));
  require_finite(rhs, "chol_solve rhs");
  Matrix out(rhs.rows(), rhs.cols());
  Vector col(f.dim), sol(f.dim);
  for (int c = 0; c < rhs.cols(); ++c) {
    for (int i = 0; i < f.dim; ++i) col[i] = rhs(i, c);
    kernels::chol_solve(f.lower.data(), col.data(), sol.data(), f.dim);
    for (int i = 0; i < f.dim; ++i) out(i, c) = sol[i];
  }
  require_finite(out, "chol_solve result");
  return out;
}

}  // namespace ipmforge
