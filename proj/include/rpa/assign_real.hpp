#pragma once

#include <vector>

#include "rpa/accumulator.hpp"
#include "rpa/diagnostics.hpp"
#include "rpa/linalg.hpp"
#include "rpa/types.hpp"

namespace rpa {

// Stacked feasibility system for the next column(s) at eigenvalue lambda:
//
//   [ Q2'(A - lambda I)   -Q2'Xp ]
//   [ Xq'                  0     ]
//
// A null vector [x; v] gives a candidate column x orthogonal to the columns
// of Xq whose image A*x lands in span(Q1) + span(Xp v) + lambda*x. Xp is a
// leading subset of Xq (coupling prefix), possibly empty.
Matrix build_constraint_matrix(const Matrix& A, const Matrix& Q2, double lambda, const Matrix& Xp,
                               const Matrix& Xq);
CMatrix build_constraint_matrix(const Matrix& A, const Matrix& Q2, Complex lambda, const Matrix& Xp,
                                const Matrix& Xq);

// Best c orthonormal columns from the null-space split [S1; S2]: picks the c
// dominant singular directions of S1, scaled back to unit state columns.
// Xnew = S1 V_c diag(1/sigma), Vnew = S2 V_c diag(1/sigma); the coupling
// energy |Vnew|_F^2 = sum(1/sigma_j^2) - c is the minimum over all feasible
// choices with orthonormal state columns.
struct BlockSolution {
    Matrix Xnew;       // n x c, orthonormal
    Matrix Vnew;       // p x c
    double objective;  // |Vnew|_F^2
};

BlockSolution solve_block_optimization(const Matrix& S1, const Matrix& S2, int c,
                                       double rank_tol = -1.0);

// Appends all `mult` columns for the real eigenvalue lambda to the
// accumulator, in greedy blocks of size min(remaining, rank(S1)).
void assign_real_group(SchurAccumulator& acc, const Matrix& A, const Matrix& Q2, double lambda,
                       int mult, double rank_tol, int group_index,
                       std::vector<StepDiagnostic>* diag);

}  // namespace rpa
