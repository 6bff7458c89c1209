#pragma once

#include <vector>

#include "rpa/accumulator.hpp"
#include "rpa/diagnostics.hpp"
#include "rpa/linalg.hpp"
#include "rpa/poles.hpp"
#include "rpa/types.hpp"

namespace rpa {

struct SystemPair {
    Matrix A;  // n x n
    Matrix B;  // n x m, full column rank

    void validate() const;
};

struct AssignConfig {
    double rank_tol = -1.0;      // relative singular-value cutoff; < 0 selects the default
    double branch_tol = 1e-10;   // isotropy test on the dominant state direction
    double route_tol = 1e-8;     // Re/Im independence gate for rank-one pairs
    bool require_controllable = true;
};

struct AssignmentResult {
    Matrix F;  // m x n state feedback
    Matrix X;  // n x n orthogonal
    Matrix T;  // n x n upper quasi-triangular
    std::vector<DiagBlock> blocks;
    std::vector<GroupStructure> groups;
    std::vector<StepDiagnostic> steps;
    int krylov_rank = 0;
    double orth_residual = 0.0;        // |X'X - I|_F
    double constraint_residual = 0.0;  // |Q2'(A X - X T)|_F
    double schur_residual = 0.0;       // |A + B F - X T X'|_F
};

// Rank of the Krylov block matrix [B, AB, ..., A^{n-1}B]; the pair is
// controllable iff this is n.
int check_controllability(const Matrix& A, const Matrix& B, double rank_tol = -1.0);

// F = R^{-1} Q1' (X T X' - A) for B = Q1 R from qr_split.
Matrix recover_feedback(const Matrix& A, const Matrix& Q1, const Matrix& R, const Matrix& X,
                        const Matrix& T);

// Full assignment: places every group of `spec` in order and recovers the
// feedback. The closed loop A + B F equals X T X' up to rounding.
AssignmentResult assign(const SystemPair& sys, const PoleSpec& spec,
                        const AssignConfig& cfg = {});

}  // namespace rpa
