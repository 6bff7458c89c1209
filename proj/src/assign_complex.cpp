#include "rpa/assign_complex.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

#include "rpa/assign_real.hpp"

namespace rpa {

namespace {

constexpr double kClusterTol = 1e-8;  // relative width of the top singular cluster

bool parts_independent(const CVector& z, double route_tol) {
    const double n1 = z.real().norm(), n2 = z.imag().norm();
    if (n1 == 0.0 || n2 == 0.0) return false;
    const double cosang = std::min(1.0, std::abs(z.real().dot(z.imag())) / (n1 * n2));
    return std::sqrt(std::max(0.0, 1.0 - cosang * cosang)) > route_tol;
}

// Turns one complex null-space pair (z; w) into a placed column pair: a phase
// rotation makes Re(z) and Im(z) orthogonal, then each part is scaled to unit
// norm, which fixes delta and the coupling columns.
PairPlacement finish_pair(const CVector& z, const CVector& w, const char* op) {
    JacobiRotation rot = jacobi_orthogonalize(z.real(), z.imag(), 1e-12);
    const double m1 = rot.xt.norm();
    const double m2 = rot.yt.norm();
    PairPlacement out;
    out.x1 = rot.xt / m1;
    out.x2 = rot.yt / m2;
    const Vector wr = rot.c * w.real() - rot.s * w.imag();
    const Vector wi = rot.s * w.real() + rot.c * w.imag();
    out.v1 = wr / m1;
    out.v2 = wi / m2;
    out.delta = m1 / m2;
    if (std::abs(out.delta - 1.0) <= 1e-12) out.delta = 1.0;
    out.objective = out.v1.squaredNorm() + out.v2.squaredNorm();
    out.op = op;
    return out;
}

// Rank-one core: state direction fixed to u (unit), coupling w1/sigma1 plus a
// free combination of the zero-singular-value kernel directions Wfree chosen
// to minimize the coupling energy after the delta scaling.
PairPlacement case4_core(const CVector& u, double sigma1, const CVector& w1, const CMatrix& Wfree,
                         double route_tol, const char* op) {
    if (!parts_independent(u, route_tol))
        throw DependentRealImag("case4: real and imaginary parts are numerically dependent");
    JacobiRotation rot = jacobi_orthogonalize(u.real(), u.imag(), 1e-12);
    const double m1 = rot.xt.norm();
    const double m2 = rot.yt.norm();
    const Eigen::Index p = w1.size();
    const Eigen::Index f = Wfree.cols();

    CVector w;
    Vector eta_coords;
    if (p == 0) {
        w = CVector(0);
    } else if (f == 0) {
        w = w1 / sigma1;
    } else {
        const double c = rot.c, s = rot.s;
        const double i1 = 1.0 / (m1 * m1), i2 = 1.0 / (m2 * m2);
        Matrix Y1(p, 2 * f), Y2(p, 2 * f);
        Y1 << Wfree.real(), -Wfree.imag();
        Y2 << Wfree.imag(), Wfree.real();
        const Matrix P1 = c * Y1 - s * Y2;
        const Matrix P2 = s * Y1 + c * Y2;
        const Matrix H = i1 * (P1.transpose() * P1) + i2 * (P2.transpose() * P2);
        const Vector rw = w1.real(), iw = w1.imag();
        const Vector g = (2.0 / sigma1) * ((c * c * i1 + s * s * i2) * (Y1.transpose() * rw) +
                                           (s * s * i1 + c * c * i2) * (Y2.transpose() * iw) +
                                           (c * s * (i2 - i1)) *
                                               (Y2.transpose() * rw + Y1.transpose() * iw));
        Eigen::LLT<Matrix> llt(H);
        if (llt.info() != Eigen::Success)
            throw NumericalDegeneracy("case4: quadratic form lost positive definiteness");
        const Vector yt = llt.solve(-0.5 * g);
        CVector eta(f);
        for (Eigen::Index j = 0; j < f; ++j) eta(j) = Complex(yt(j), yt(f + j));
        w = w1 / sigma1 + Wfree * eta;
        eta_coords = yt;
    }

    PairPlacement out = finish_pair(u, w, op);
    out.eta = eta_coords;
    return out;
}

PairPlacement case3_core(const CSvdResult& sdec, const CMatrix& S2, double branch_tol,
                         double route_tol) {
    const Eigen::Index d = sdec.V.cols();
    const int r1 = sdec.numerical_rank;
    const Vector& sig = sdec.sigma;

    int cluster = 1;
    while (cluster < r1 && sig(cluster) >= sig(0) * (1.0 - kClusterTol)) ++cluster;

    if (cluster >= 2) {
        // Dominant singular subspace is degenerate: an isotropic direction
        // inside it realizes the delta = 1 rotation block exactly.
        try {
            IsotropicVector iso = isotropic_unit_vector(sdec.U.leftCols(cluster));
            CVector vcoef = CVector::Zero(d);
            for (int j = 0; j < cluster; ++j) vcoef += (iso.coeff(j) / sig(j)) * sdec.V.col(j);
            const CVector w = S2.rows() > 0 ? CVector(S2 * vcoef) : CVector(0);
            PairPlacement out = finish_pair(iso.z, w, "pair-iso");
            out.s1_rank = r1;
            return out;
        } catch (const UnsupportedConfiguration&) {
            // fall through to the top-direction checks
        }
    }

    const CVector u1 = sdec.U.col(0);
    const Complex selfdot = (u1.transpose() * u1)(0);
    if (std::abs(selfdot) <= branch_tol) {
        const CVector w = S2.rows() > 0 ? CVector(S2 * (sdec.V.col(0) / sig(0))) : CVector(0);
        PairPlacement out = finish_pair(u1, w, "pair-direct");
        out.s1_rank = r1;
        return out;
    }

    const CVector w1 = S2.rows() > 0 ? CVector(S2 * sdec.V.col(0)) : CVector(0);
    const CMatrix Wfree = S2.rows() > 0 ? CMatrix(S2 * sdec.V.rightCols(d - r1)) : CMatrix(0, 0);
    PairPlacement out = case4_core(u1, sig(0), w1, Wfree, route_tol, "pair-fallback");
    out.s1_rank = r1;
    return out;
}

PairPlacement case4_entry(const CSvdResult& sdec, const CMatrix& S2, double route_tol) {
    const Eigen::Index d = sdec.V.cols();
    const CVector u = sdec.U.col(0);
    const CVector w1 = S2.rows() > 0 ? CVector(S2 * sdec.V.col(0)) : CVector(0);
    const CMatrix Wfree = S2.rows() > 0 ? CMatrix(S2 * sdec.V.rightCols(d - 1)) : CMatrix(0, 0);
    PairPlacement out = case4_core(u, sdec.sigma(0), w1, Wfree, route_tol, "pair-rank1");
    out.s1_rank = 1;
    return out;
}

struct RouteResult {
    std::optional<PairPlacement> placement;
    int rows = 0, cols = 0, rank = 0, null_dim = 0, s1_rank = 0;
};

RouteResult route_pair(const Matrix& A, const Matrix& Q2, Complex lambda, const Matrix& Xp,
                       const Matrix& Xq, double rank_tol, double branch_tol, double route_tol) {
    const Eigen::Index n = A.rows();
    const CMatrix M = build_constraint_matrix(A, Q2, lambda, Xp, Xq);
    CSvdResult dec = svd(M, rank_tol);
    RouteResult rr;
    rr.rows = static_cast<int>(M.rows());
    rr.cols = static_cast<int>(M.cols());
    rr.rank = dec.numerical_rank;
    rr.null_dim = static_cast<int>(M.cols()) - dec.numerical_rank;
    if (rr.null_dim <= 0) return rr;

    const CMatrix S = dec.V.rightCols(rr.null_dim);
    const CMatrix S1 = S.topRows(n);
    const CMatrix S2 = S.bottomRows(Xp.cols());
    CSvdResult sdec = svd(S1, rank_tol);
    rr.s1_rank = sdec.numerical_rank;
    if (rr.s1_rank == 0) return rr;

    try {
        if (rr.s1_rank >= 2) {
            rr.placement = case3_core(sdec, S2, branch_tol, route_tol);
        } else if (parts_independent(sdec.U.col(0), route_tol)) {
            rr.placement = case4_entry(sdec, S2, route_tol);
        }
    } catch (const DependentRealImag&) {
    } catch (const DependentVectors&) {
    }
    return rr;
}

}  // namespace

IsotropicVector isotropic_unit_vector(const CMatrix& S, double g_tol) {
    const Eigen::Index k = S.cols();
    if (k < 1) throw InvalidInput("isotropic_unit_vector: empty basis");
    const CMatrix G = S.transpose() * S;  // unconjugated bilinear Gram

    CVector coeff;
    if (G.norm() <= g_tol * static_cast<double>(k)) {
        // Every direction is isotropic to tolerance; any unit coefficient works.
        coeff = CVector::Zero(k);
        if (k >= 2) {
            coeff(0) = Complex(M_SQRT1_2, 0.0);
            coeff(1) = Complex(0.0, M_SQRT1_2);
        } else {
            coeff(0) = Complex(1.0, 0.0);
        }
    } else {
        if (k < 2)
            throw UnsupportedConfiguration(
                "isotropic_unit_vector: one non-isotropic direction cannot be balanced");
        // Zeroing the bilinear form z^T z means zeroing two real quadratic
        // forms in (Re coeff, Im coeff); their paired eigendecomposition gives
        // a closed-form root.
        PairedEig pe = hamiltonian_paired_eig(G.imag(), G.real());
        if (!(pe.theta(0) > 0.0))
            throw NumericalDegeneracy("isotropic_unit_vector: vanishing leading curvature");
        const double mu = std::sqrt(pe.theta(1) / pe.theta(0));
        const Vector y = mu * pe.U.col(0) + pe.U.col(1) - mu * pe.U.col(k) + pe.U.col(k + 1);
        coeff.resize(k);
        for (Eigen::Index j = 0; j < k; ++j) coeff(j) = Complex(y(j), y(k + j));
    }

    CVector z = S * coeff;
    const double nz = z.norm();
    if (!(nz > 0.0)) throw NumericalDegeneracy("isotropic_unit_vector: degenerate combination");
    IsotropicVector out;
    out.z = z / nz;
    out.coeff = coeff / nz;
    return out;
}

InitialPair initial_complex_pair(const CMatrix& S, double g_tol) {
    IsotropicVector iso = isotropic_unit_vector(S, g_tol);
    JacobiRotation rot = jacobi_orthogonalize(iso.z.real(), iso.z.imag(), 1e-12);
    InitialPair out;
    out.x1 = rot.xt.normalized();
    out.x2 = rot.yt.normalized();
    return out;
}

PairPlacement place_pair_case3(const CMatrix& S1, const CMatrix& S2, double rank_tol,
                               double branch_tol, double route_tol) {
    if (S2.cols() != 0 && S1.cols() != S2.cols())
        throw DimensionMismatch("place_pair_case3: column mismatch");
    CSvdResult sdec = svd(S1, rank_tol);
    if (sdec.numerical_rank < 2)
        throw InsufficientRank("place_pair_case3: state part has rank < 2");
    return case3_core(sdec, S2, branch_tol, route_tol);
}

PairPlacement place_pair_case4(const CMatrix& S1, const CMatrix& S2, double rank_tol,
                               double route_tol) {
    if (S2.cols() != 0 && S1.cols() != S2.cols())
        throw DimensionMismatch("place_pair_case4: column mismatch");
    CSvdResult sdec = svd(S1, rank_tol);
    if (sdec.numerical_rank != 1)
        throw InsufficientRank("place_pair_case4: state part must have rank 1");
    return case4_entry(sdec, S2, route_tol);
}

PairPlacement place_pair_case5(const Matrix& A, const Matrix& Q2, Complex lambda,
                               const Matrix& Xall, double rank_tol, double branch_tol,
                               double route_tol) {
    RouteResult rr = route_pair(A, Q2, lambda, Xall, Xall, rank_tol, branch_tol, route_tol);
    if (!rr.placement)
        throw FeasibilityBreakdown("place_pair_case5: full-prefix system yields no usable pair");
    rr.placement->op = "pair-restart";
    return *rr.placement;
}

void assign_complex_group(SchurAccumulator& acc, const Matrix& A, const Matrix& Q2, Complex lambda,
                          int mult, double rank_tol, double branch_tol, double route_tol,
                          int group_index, std::vector<StepDiagnostic>* diag) {
    const Eigen::Index n = A.rows();
    if (!(lambda.imag() > 0.0))
        throw InvalidInput("assign_complex_group: eigenvalue must have positive imaginary part");
    const int r0 = acc.cols();
    int q = 0;
    int p = r0;  // start of the current diagonal sub-block

    const auto record = [&](const char* op, int rows, int cols, int rank, int null_dim,
                            int s1_rank, const PairPlacement* pl) {
        if (!diag) return;
        StepDiagnostic sd;
        sd.group = group_index;
        sd.pole = lambda;
        sd.op = pl ? pl->op : op;
        sd.rows = rows;
        sd.cols = cols;
        sd.rank = rank;
        sd.null_dim = null_dim;
        sd.s1_rank = s1_rank;
        sd.full_row_rank = rank == rows;
        sd.appended = 2;
        if (pl) {
            sd.coupling2 = pl->objective;
            sd.delta = pl->delta;
        }
        diag->push_back(sd);
    };

    if (r0 == 0) {
        const Matrix empty(n, 0);
        const CMatrix M1 = build_constraint_matrix(A, Q2, lambda, empty, empty);
        CSvdResult dec = svd(M1, rank_tol);
        const int d = static_cast<int>(M1.cols()) - dec.numerical_rank;
        if (d <= 0)
            throw FeasibilityBreakdown("assign_complex_group: shifted system has no null space");
        InitialPair ip = initial_complex_pair(dec.V.rightCols(d));
        acc.append_complex_pair(lambda, ip.x1, ip.x2, Vector(0), Vector(0), 1.0, true);
        record("pair-initial", static_cast<int>(M1.rows()), static_cast<int>(M1.cols()),
               dec.numerical_rank, d, d, nullptr);
        q = 1;
        p = 0;
    }

    while (q < mult) {
        const int orth = acc.cols();
        const Matrix Xall = acc.X();
        RouteResult rr =
            route_pair(A, Q2, lambda, Xall.leftCols(p), Xall, rank_tol, branch_tol, route_tol);
        bool new_block = false;
        if (!rr.placement && p < orth) {
            // Coupling restart: allow coupling to every assigned column and
            // open a fresh diagonal sub-block.
            rr = route_pair(A, Q2, lambda, Xall, Xall, rank_tol, branch_tol, route_tol);
            if (rr.placement) {
                p = orth;
                new_block = true;
                rr.placement->op = "pair-restart";
            }
        }
        if (!rr.placement)
            throw FeasibilityBreakdown("assign_complex_group: no feasible column pair");

        acc.append_complex_pair(lambda, rr.placement->x1, rr.placement->x2, rr.placement->v1,
                                rr.placement->v2, rr.placement->delta, new_block);
        record(nullptr, rr.rows, rr.cols, rr.rank, rr.null_dim, rr.s1_rank, &*rr.placement);
        ++q;
    }
}

}  // namespace rpa
