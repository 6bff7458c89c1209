#include "rpa/driver.hpp"

#include <algorithm>
#include <cmath>

#include "rpa/assign_complex.hpp"
#include "rpa/assign_real.hpp"

namespace rpa {

void SystemPair::validate() const {
    const Eigen::Index n = A.rows();
    if (A.cols() != n || n < 1) throw DimensionMismatch("SystemPair: A must be square");
    if (B.rows() != n || B.cols() < 1 || B.cols() > n)
        throw DimensionMismatch("SystemPair: B must be n x m with 1 <= m <= n");
    if (!all_finite(A) || !all_finite(B))
        throw InvalidInput("SystemPair: non-finite entries");
}

int check_controllability(const Matrix& A, const Matrix& B, double rank_tol) {
    const Eigen::Index n = A.rows(), m = B.cols();
    if (A.cols() != n || B.rows() != n)
        throw DimensionMismatch("check_controllability: shape mismatch");
    // Powers of a scaled copy keep the Krylov column spans while avoiding
    // overflow; per-block scaling does not change rank.
    const Matrix As = A / std::max(1.0, A.norm());
    Matrix K(n, n * m);
    Matrix block = B;
    for (Eigen::Index k = 0; k < n; ++k) {
        K.middleCols(k * m, m) = block;
        if (k + 1 < n) block = As * block;
    }
    return numerical_rank(K, rank_tol);
}

Matrix recover_feedback(const Matrix& A, const Matrix& Q1, const Matrix& R, const Matrix& X,
                        const Matrix& T) {
    const Eigen::Index n = A.rows(), m = Q1.cols();
    if (R.rows() != m || R.cols() != m || X.rows() != n || X.cols() != n || T.rows() != n)
        throw DimensionMismatch("recover_feedback: shape mismatch");
    const double rmin = R.diagonal().cwiseAbs().minCoeff();
    if (rmin <= static_cast<double>(m) * kEps * R.norm())
        throw SingularR("recover_feedback: triangular factor is numerically singular");
    const Matrix gap = X * (T * X.transpose()) - A;
    return R.triangularView<Eigen::Upper>().solve(Q1.transpose() * gap);
}

AssignmentResult assign(const SystemPair& sys, const PoleSpec& spec, const AssignConfig& cfg) {
    sys.validate();
    const Eigen::Index n = sys.A.rows();
    if (spec.n != static_cast<int>(n))
        throw DimensionMismatch("assign: pole spec dimension differs from system order");

    QrSplit qr = qr_split(sys.B, cfg.rank_tol);

    AssignmentResult out;
    out.krylov_rank = check_controllability(sys.A, sys.B, cfg.rank_tol);
    if (cfg.require_controllable && out.krylov_rank < static_cast<int>(n))
        throw Uncontrollable("assign: Krylov rank " + std::to_string(out.krylov_rank) +
                             " < system order " + std::to_string(n));

    SchurAccumulator acc(static_cast<int>(n));
    for (size_t gi = 0; gi < spec.groups.size(); ++gi) {
        const PoleGroup& g = spec.groups[gi];
        acc.begin_group(g);
        if (g.is_complex())
            assign_complex_group(acc, sys.A, qr.Q2, g.value, g.mult, cfg.rank_tol, cfg.branch_tol,
                                 cfg.route_tol, static_cast<int>(gi), &out.steps);
        else
            assign_real_group(acc, sys.A, qr.Q2, g.value.real(), g.mult, cfg.rank_tol,
                              static_cast<int>(gi), &out.steps);
        acc.end_group();
    }

    out.X = acc.X();
    out.T = acc.T();
    out.blocks = acc.blocks();
    out.groups = acc.groups();
    out.orth_residual = acc.orthogonality_residual();
    out.constraint_residual =
        qr.Q2.cols() > 0 ? (qr.Q2.transpose() * (sys.A * out.X - out.X * out.T)).norm() : 0.0;
    out.F = recover_feedback(sys.A, qr.Q1, qr.R, out.X, out.T);
    out.schur_residual = (sys.A + sys.B * out.F - out.X * out.T * out.X.transpose()).norm();
    return out;
}

}  // namespace rpa
