#include "rpa/assign_real.hpp"

#include <Eigen/SVD>
#include <algorithm>

namespace rpa {

namespace {

void check_constraint_inputs(const Matrix& A, const Matrix& Q2, const Matrix& Xp,
                             const Matrix& Xq) {
    const Eigen::Index n = A.rows();
    if (A.cols() != n) throw DimensionMismatch("build_constraint_matrix: A must be square");
    if (Q2.rows() != n && Q2.cols() != 0)
        throw DimensionMismatch("build_constraint_matrix: Q2 row mismatch");
    if ((Xp.cols() > 0 && Xp.rows() != n) || (Xq.cols() > 0 && Xq.rows() != n))
        throw DimensionMismatch("build_constraint_matrix: prefix row mismatch");
    if (Xp.cols() > Xq.cols())
        throw DimensionMismatch("build_constraint_matrix: coupling prefix exceeds orthogonality prefix");
}

}  // namespace

Matrix build_constraint_matrix(const Matrix& A, const Matrix& Q2, double lambda, const Matrix& Xp,
                               const Matrix& Xq) {
    check_constraint_inputs(A, Q2, Xp, Xq);
    const Eigen::Index n = A.rows(), nm = Q2.cols(), p = Xp.cols(), q = Xq.cols();
    Matrix M = Matrix::Zero(nm + q, n + p);
    Matrix shifted = A;
    shifted.diagonal().array() -= lambda;
    M.topLeftCorner(nm, n) = Q2.transpose() * shifted;
    if (p > 0) M.topRightCorner(nm, p) = -(Q2.transpose() * Xp);
    if (q > 0) M.bottomLeftCorner(q, n) = Xq.transpose();
    return M;
}

CMatrix build_constraint_matrix(const Matrix& A, const Matrix& Q2, Complex lambda, const Matrix& Xp,
                                const Matrix& Xq) {
    check_constraint_inputs(A, Q2, Xp, Xq);
    const Eigen::Index n = A.rows(), nm = Q2.cols(), p = Xp.cols(), q = Xq.cols();
    CMatrix M = CMatrix::Zero(nm + q, n + p);
    CMatrix shifted = A.cast<Complex>();
    shifted.diagonal().array() -= lambda;
    M.topLeftCorner(nm, n) = Q2.transpose().cast<Complex>() * shifted;
    if (p > 0) M.topRightCorner(nm, p) = (-(Q2.transpose() * Xp)).cast<Complex>();
    if (q > 0) M.bottomLeftCorner(q, n) = Xq.transpose().cast<Complex>();
    return M;
}

BlockSolution solve_block_optimization(const Matrix& S1, const Matrix& S2, int c,
                                       double rank_tol) {
    if (S1.cols() != S2.cols() && S2.cols() != 0)
        throw DimensionMismatch("solve_block_optimization: column mismatch");
    if (c < 1) throw InvalidInput("solve_block_optimization: need c >= 1");
    SvdResult dec = svd(S1, rank_tol);
    if (c > dec.numerical_rank)
        throw InsufficientRank("solve_block_optimization: requested more columns than rank allows");

    BlockSolution out;
    out.Xnew = dec.U.leftCols(c);
    const Matrix Vc = dec.V.leftCols(c);
    Vector inv_sigma(c);
    for (int j = 0; j < c; ++j) inv_sigma(j) = 1.0 / dec.sigma(j);
    if (S2.cols() > 0)
        out.Vnew = S2 * Vc * inv_sigma.asDiagonal();
    else
        out.Vnew = Matrix::Zero(S2.rows(), c);
    out.objective = out.Vnew.squaredNorm();
    return out;
}

void assign_real_group(SchurAccumulator& acc, const Matrix& A, const Matrix& Q2, double lambda,
                       int mult, double rank_tol, int group_index,
                       std::vector<StepDiagnostic>* diag) {
    const Eigen::Index n = A.rows();
    int q = 0;
    while (q < mult) {
        const Matrix Xq = acc.X();
        const Matrix M = build_constraint_matrix(A, Q2, lambda, Xq, Xq);
        SvdResult dec = svd(M, rank_tol);
        const int d = static_cast<int>(M.cols()) - dec.numerical_rank;
        if (d <= 0)
            throw FeasibilityBreakdown("assign_real_group: constraint system has no null space");
        const Matrix S = dec.V.rightCols(d);
        const Matrix S1 = S.topRows(n);
        const Matrix S2 = S.bottomRows(Xq.cols());
        const int r1 = numerical_rank(S1, rank_tol);
        if (r1 == 0)
            throw FeasibilityBreakdown("assign_real_group: null space carries no state directions");

        const int c = std::min(mult - q, r1);
        BlockSolution sol = solve_block_optimization(S1, S2, c, rank_tol);
        acc.append_real_block(lambda, sol.Xnew, sol.Vnew);

        if (diag) {
            StepDiagnostic sd;
            sd.group = group_index;
            sd.pole = Complex(lambda, 0.0);
            sd.op = "real-block";
            sd.rows = static_cast<int>(M.rows());
            sd.cols = static_cast<int>(M.cols());
            sd.rank = dec.numerical_rank;
            sd.null_dim = d;
            sd.s1_rank = r1;
            sd.full_row_rank = dec.numerical_rank == static_cast<int>(M.rows());
            sd.appended = c;
            sd.coupling2 = sol.objective;
            diag->push_back(sd);
        }
        q += c;
    }
}

}  // namespace rpa
