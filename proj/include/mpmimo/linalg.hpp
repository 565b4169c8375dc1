#pragma once

#include <vector>

#include "mpmimo/mat.hpp"

namespace mpmimo {

// Matrix product through the kernel layer (scalar or SIMD backend).
CMat operator*(const CMat& a, const CMat& b);

CMat transpose(const CMat& a);
CMat conjugate(const CMat& a);
CMat adjoint(const CMat& a);

cd trace(const CMat& a);
double fro_norm(const CMat& a);
double max_abs(const CMat& a);

// Kronecker product, (ra*rb) x (ca*cb).
CMat kron(const CMat& a, const CMat& b);

// Column-stacking vec operator and its inverse.
CMat vec(const CMat& a);
CMat unvec(const CMat& v, std::size_t rows, std::size_t cols);

CMat diag_matrix(const std::vector<cd>& d);
CMat diag_matrix(const std::vector<double>& d);
std::vector<cd> diag_of(const CMat& a);
// Zeroes everything off the main diagonal.
CMat diag_part(const CMat& a);

// (A + A^H) / 2. For matrices that are Hermitian in exact arithmetic this
// only strips rounding asymmetry.
CMat hermitian_part(const CMat& a);

// Cholesky factor L with A = L * L^H. Throws NotPositiveDefinite.
CMat cholesky_lower(const CMat& a);

// Solves A X = B for Hermitian positive definite A via Cholesky.
CMat hermitian_solve(const CMat& a, const CMat& b);

// Solves A X = B for general square A via LU with partial pivoting.
// Throws SingularMatrix on a zero pivot.
CMat solve(const CMat& a, const CMat& b);
CMat inverse(const CMat& a);

// Thin SVD a = u * diag(s) * v^H with s sorted descending,
// u: rows x r, v: cols x r, r = min(rows, cols). One-sided Jacobi.
struct SvdResult {
    CMat u;
    std::vector<double> s;
    CMat v;
};
SvdResult svd(const CMat& a);

double spectral_norm(const CMat& a);
double cond2(const CMat& a);  // sigma_max / sigma_min

// Eigendecomposition of a Hermitian matrix, eigenvalues ascending,
// eigenvectors as columns. Cyclic complex Jacobi.
struct EigResult {
    std::vector<double> w;
    CMat vectors;
};
EigResult hermitian_eig(const CMat& a);

// Principal square root / inverse square root of a Hermitian PSD matrix.
// Eigenvalues below -tol*max|w| raise NotPositiveDefinite; small negative
// noise is clamped to zero (sqrt) or rejected (inv_sqrt needs positive).
CMat herm_sqrt(const CMat& a);
CMat herm_inv_sqrt(const CMat& a);

}  // namespace mpmimo
