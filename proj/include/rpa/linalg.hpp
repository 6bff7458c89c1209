#pragma once

#include <vector>

#include "rpa/errors.hpp"
#include "rpa/types.hpp"

namespace rpa {

// Relative rank threshold: singular values sigma_i <= tol * sigma_1 count as zero.
// Negative tol arguments everywhere below select this default.
double default_rank_tol(Eigen::Index rows, Eigen::Index cols);

struct SvdResult {
    Matrix U;      // rows x rows
    Vector sigma;  // min(rows, cols), descending
    Matrix V;      // cols x cols
    int numerical_rank = 0;
};

struct CSvdResult {
    CMatrix U;
    Vector sigma;
    CMatrix V;
    int numerical_rank = 0;
};

SvdResult svd(const Matrix& M, double rank_tol = -1.0);
CSvdResult svd(const CMatrix& M, double rank_tol = -1.0);

int numerical_rank(const Matrix& M, double rank_tol = -1.0);
int numerical_rank(const CMatrix& M, double rank_tol = -1.0);

// B = [Q1 Q2] [R; 0] with [Q1 Q2] orthogonal and R m x m upper triangular,
// invertible by the full-column-rank precondition.
struct QrSplit {
    Matrix Q1;  // n x m
    Matrix Q2;  // n x (n-m)
    Matrix R;   // m x m
};

QrSplit qr_split(const Matrix& B, double rank_tol = -1.0);

// Orthonormal basis of the null space of M, one column per null direction.
// A 0 x q input has the whole space as null space and yields the identity.
Matrix null_basis(const Matrix& M, double rank_tol = -1.0);
CMatrix null_basis(const CMatrix& M, double rank_tol = -1.0);

// Plane rotation making two independent vectors orthogonal:
// [xt yt] = [x y] * [[c, s], [-s, c]], xt'yt = 0.
// Already-orthogonal inputs (|x'y| <= tol*|x||y|) return the identity rotation.
struct JacobiRotation {
    double c = 1.0;
    double s = 0.0;
    Vector xt;
    Vector yt;
};

JacobiRotation jacobi_orthogonalize(const Vector& x, const Vector& y, double tol = -1.0);

// For symmetric A, B the matrix H = [A B; B -A] anticommutes with
// J = [0 -I; I 0], so its spectrum is symmetric about zero. Returns the
// eigendecomposition H = U * diag(theta, -theta) * U' with theta descending,
// theta >= 0, U orthogonal, and the pairing U(:, n+j) = J * U(:, j) enforced
// exactly. The same U also gives [B -A; -A -B] = U * [0 -T; -T 0] * U'.
struct PairedEig {
    Matrix U;      // 2n x 2n
    Vector theta;  // n, descending, nonnegative
};

PairedEig hamiltonian_paired_eig(const Matrix& A, const Matrix& B, double sym_tol = 1e-10);

// Eigenvalues of a real matrix via its real Schur form; complex values appear
// in exactly conjugate pairs.
std::vector<Complex> real_schur_eigvals(const Matrix& M);

bool all_finite(const Matrix& M);
bool all_finite(const CMatrix& M);

}  // namespace rpa
