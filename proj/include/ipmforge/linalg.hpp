#pragma once

#include <Eigen/Dense>

#include "ipmforge/errors.hpp"
#include "ipmforge/tolerances.hpp"

namespace ipmforge {

// Row-major dense storage so that .data() matches the flat layout used by the
// generated kernels.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Raw kernels with a pinned left-to-right evaluation order. The solver path,
// the kernel interpreter, and the emitted C text all perform these exact
// operation sequences, which is what makes differential runs agree to ~ulp.
namespace kernels {

double dot_fold(const double* a, const double* b, int len);

// dst = a*b, all row-major flat arrays; dst must not alias a or b.
void mat_mul(double* dst, const double* a, const double* b, int rows, int inner, int cols);

// Lower-triangular Cholesky of the row-major symmetric matrix m. Strict upper
// entries of the output are zeroed. Returns false when a pivot falls at or
// below pivot_floor.
bool chol_factor(double* lower, const double* m, int dim, double pivot_floor);

// Solves (L*L^T) out = rhs by forward/back substitution.
void chol_solve(const double* lower, const double* rhs, double* out, int dim);

}  // namespace kernels

struct CholFactor {
  int dim = 0;
  Matrix lower;  // lower triangular, strict upper zero
};

// Shape-checked operations. Every operand and result is required to be finite;
// a NaN/Inf raises NotFiniteError instead of propagating.
Matrix mat_mul(const Matrix& a, const Matrix& b);
Matrix mat_add(const Matrix& a, const Matrix& b);
Matrix mat_scale(const Matrix& a, double s);
Matrix transpose(const Matrix& a);
double dot(const Vector& u, const Vector& v);

// Requires a square matrix, symmetric within Tolerances::symmetry_rel.
// Raises NotPositiveDefinite when a pivot is <= chol_pivot_rel * max diagonal.
CholFactor chol_factor(const Matrix& m);

Vector chol_solve(const CholFactor& f, const Vector& rhs);
Matrix chol_solve(const CholFactor& f, const Matrix& rhs);

void require_finite(const Matrix& m, const char* what);
void require_finite(const Vector& v, const char* what);

}  // namespace ipmforge
