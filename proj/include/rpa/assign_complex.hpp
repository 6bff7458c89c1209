#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rpa/accumulator.hpp"
#include "rpa/diagnostics.hpp"
#include "rpa/linalg.hpp"
#include "rpa/types.hpp"

namespace rpa {

// Unit vector z in the span of an orthonormal complex basis S with z^T z = 0
// (unconjugated), so Re(z) and Im(z) are orthogonal with equal norms. When the
// bilinear Gram S^T S is nonzero this needs at least two basis columns; a
// single non-isotropic column raises UnsupportedConfiguration.
struct IsotropicVector {
    CVector z;      // unit
    CVector coeff;  // z = S * coeff
};

IsotropicVector isotropic_unit_vector(const CMatrix& S, double g_tol = 1e-12);

// First column pair of a leading complex group: orthonormal x1, x2 with
// x1 + i*x2 in span(S). The pair block is the delta = 1 rotation form.
struct InitialPair {
    Vector x1, x2;
};

InitialPair initial_complex_pair(const CMatrix& S, double g_tol = 1e-12);

// One placed conjugate-pair column pair plus its coupling columns.
struct PairPlacement {
    Vector x1, x2;  // n, unit, orthogonal to each other and the prefix
    Vector v1, v2;  // coupling to the first p columns
    double delta = 1.0;
    double objective = 0.0;  // |v1|^2 + |v2|^2
    std::string op;
    int s1_rank = 0;
    Vector eta;  // kernel coordinates [Re; Im] when the rank-one core optimized
};

// State-part rank >= 2: look for an isotropic direction in the dominant
// singular cluster of S1 (delta = 1 when found), otherwise fall back to the
// rank-one machinery applied to the top singular direction.
PairPlacement place_pair_case3(const CMatrix& S1, const CMatrix& S2, double rank_tol = -1.0,
                               double branch_tol = 1e-10, double route_tol = 1e-8);

// State-part rank 1: Jacobi-orthogonalize Re/Im of the single direction,
// delta from the norm ratio, free kernel directions minimize the coupling
// energy through a positive definite quadratic solved by Cholesky.
PairPlacement place_pair_case4(const CMatrix& S1, const CMatrix& S2, double rank_tol = -1.0,
                               double route_tol = 1e-8);

// Coupling-prefix restart: rebuild the constraint with the full prefix
// (coupling to every assigned column) and route by the rank of the new state
// part. Starts a fresh diagonal sub-block.
PairPlacement place_pair_case5(const Matrix& A, const Matrix& Q2, Complex lambda,
                               const Matrix& Xall, double rank_tol = -1.0,
                               double branch_tol = 1e-10, double route_tol = 1e-8);

// Appends all `mult` column pairs for the conjugate pair lambda (Im > 0).
void assign_complex_group(SchurAccumulator& acc, const Matrix& A, const Matrix& Q2, Complex lambda,
                          int mult, double rank_tol, double branch_tol, double route_tol,
                          int group_index, std::vector<StepDiagnostic>* diag);

}  // namespace rpa
