#include "rpa/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace rpa {

double default_rank_tol(Eigen::Index rows, Eigen::Index cols) {
    return static_cast<double>(std::max<Eigen::Index>(std::max(rows, cols), 1)) * kEps;
}

namespace {

template <typename Mat>
int rank_from_sigma(const Vector& sigma, const Mat& M, double rank_tol) {
    if (sigma.size() == 0) return 0;
    const double tol = rank_tol < 0.0 ? default_rank_tol(M.rows(), M.cols()) : rank_tol;
    const double cut = tol * sigma(0);
    int r = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        if (sigma(i) > cut) ++r;
    return r;
}

}  // namespace

SvdResult svd(const Matrix& M, double rank_tol) {
    SvdResult out;
    // A matrix with no rows or no columns has rank 0 and a trivial factor pair;
    // identity V keeps the nullspace convention V.rightCols(cols - rank) valid.
    if (M.rows() == 0 || M.cols() == 0) {
        out.U = Matrix::Identity(M.rows(), M.rows());
        out.V = Matrix::Identity(M.cols(), M.cols());
        out.sigma = Vector(0);
        out.numerical_rank = 0;
        return out;
    }
    Eigen::JacobiSVD<Matrix> dec(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    out.U = dec.matrixU();
    out.V = dec.matrixV();
    out.sigma = dec.singularValues();
    out.numerical_rank = rank_from_sigma(out.sigma, M, rank_tol);
    return out;
}

CSvdResult svd(const CMatrix& M, double rank_tol) {
    CSvdResult out;
    if (M.rows() == 0 || M.cols() == 0) {
        out.U = CMatrix::Identity(M.rows(), M.rows());
        out.V = CMatrix::Identity(M.cols(), M.cols());
        out.sigma = Vector(0);
        out.numerical_rank = 0;
        return out;
    }
    Eigen::JacobiSVD<CMatrix> dec(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    out.U = dec.matrixU();
    out.V = dec.matrixV();
    out.sigma = dec.singularValues();
    out.numerical_rank = rank_from_sigma(out.sigma, M, rank_tol);
    return out;
}

int numerical_rank(const Matrix& M, double rank_tol) {
    if (M.rows() == 0 || M.cols() == 0) return 0;
    Eigen::JacobiSVD<Matrix> dec(M);
    return rank_from_sigma(dec.singularValues(), M, rank_tol);
}

int numerical_rank(const CMatrix& M, double rank_tol) {
    if (M.rows() == 0 || M.cols() == 0) return 0;
    Eigen::JacobiSVD<CMatrix> dec(M);
    return rank_from_sigma(dec.singularValues(), M, rank_tol);
}

QrSplit qr_split(const Matrix& B, double rank_tol) {
    const Eigen::Index n = B.rows(), m = B.cols();
    if (m < 1 || n < m)
        throw DimensionMismatch("qr_split: need n x m input with 1 <= m <= n");
    if (!all_finite(B)) throw InvalidInput("qr_split: non-finite entries");

    Eigen::JacobiSVD<Matrix> dec(B);
    const Vector& sigma = dec.singularValues();
    const double tol = rank_tol < 0.0 ? default_rank_tol(n, m) : rank_tol;
    if (sigma(0) == 0.0 || sigma(m - 1) <= tol * sigma(0))
        throw RankDeficientInput("qr_split: input does not have full column rank");

    Eigen::HouseholderQR<Matrix> qr(B);
    Matrix Q = qr.householderQ() * Matrix::Identity(n, n);
    QrSplit out;
    out.Q1 = Q.leftCols(m);
    out.Q2 = Q.rightCols(n - m);
    out.R = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
    return out;
}

namespace {

template <typename Mat>
Mat null_basis_impl(const Mat& M, double rank_tol) {
    const Eigen::Index q = M.cols();
    if (M.rows() == 0) return Mat::Identity(q, q);
    if (q == 0) return Mat(0, 0);
    Eigen::JacobiSVD<Mat> dec(M, Eigen::ComputeFullV);
    const int r = rank_from_sigma(dec.singularValues(), M, rank_tol);
    return dec.matrixV().rightCols(q - r);
}

}  // namespace

Matrix null_basis(const Matrix& M, double rank_tol) { return null_basis_impl(M, rank_tol); }
CMatrix null_basis(const CMatrix& M, double rank_tol) { return null_basis_impl(M, rank_tol); }

JacobiRotation jacobi_orthogonalize(const Vector& x, const Vector& y, double tol) {
    if (x.size() != y.size() || x.size() == 0)
        throw DimensionMismatch("jacobi_orthogonalize: length mismatch");
    const double rho1 = x.squaredNorm();
    const double rho2 = y.squaredNorm();
    const double gamma = x.dot(y);
    const double scale = std::sqrt(rho1 * rho2);
    if (scale == 0.0) throw DependentVectors("jacobi_orthogonalize: zero input vector");

    // sin of the angle between x and y, from the Gram determinant
    const double sin2 = std::max(0.0, 1.0 - (gamma / scale) * (gamma / scale));
    const double dep_tol = default_rank_tol(x.size(), 2);
    if (std::sqrt(sin2) <= dep_tol)
        throw DependentVectors("jacobi_orthogonalize: inputs are numerically parallel");

    JacobiRotation rot;
    const double ortho_tol = tol < 0.0 ? kEps : tol;
    if (std::abs(gamma) <= ortho_tol * scale) {
        rot.xt = x;
        rot.yt = y;
        return rot;
    }
    const double tau = (rho2 - rho1) / (2.0 * gamma);
    const double t = tau >= 0.0 ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
    rot.c = 1.0 / std::sqrt(1.0 + t * t);
    rot.s = t * rot.c;
    rot.xt = rot.c * x - rot.s * y;
    rot.yt = rot.s * x + rot.c * y;
    return rot;
}

PairedEig hamiltonian_paired_eig(const Matrix& A, const Matrix& B, double sym_tol) {
    const Eigen::Index n = A.rows();
    if (A.cols() != n || B.rows() != n || B.cols() != n)
        throw DimensionMismatch("hamiltonian_paired_eig: A, B must be square and same size");
    const double a_scale = std::max(1.0, A.norm());
    const double b_scale = std::max(1.0, B.norm());
    if ((A - A.transpose()).norm() > sym_tol * a_scale ||
        (B - B.transpose()).norm() > sym_tol * b_scale)
        throw NotSymmetric("hamiltonian_paired_eig: inputs must be symmetric");

    const Matrix As = 0.5 * (A + A.transpose());
    const Matrix Bs = 0.5 * (B + B.transpose());
    Matrix H(2 * n, 2 * n);
    H << As, Bs, Bs, -As;

    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    if (es.info() != Eigen::Success)
        throw ConvergenceFailure("hamiltonian_paired_eig: eigensolver failed");

    // Ascending from the solver; the top n are the nonnegative half.
    const Vector evals = es.eigenvalues();
    const Matrix evecs = es.eigenvectors();

    // J*[a; b] = [-b; a]
    const auto apply_j = [n](const Matrix& cols) {
        Matrix out(2 * n, cols.cols());
        out.topRows(n) = -cols.bottomRows(n);
        out.bottomRows(n) = cols.topRows(n);
        return out;
    };

    Vector theta(n);
    Matrix Upos(2 * n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        theta(j) = std::max(0.0, evals(2 * n - 1 - j));
        Upos.col(j) = evecs.col(2 * n - 1 - j);
    }

    // Within the numerically-zero eigenspace the solver's basis need not split
    // into J-paired halves. Rebuild that part greedily: pick z, keep it, remove
    // span{z, Jz}, repeat. The zero space is J-invariant and even-dimensional,
    // so this terminates with an exactly paired orthonormal choice.
    const double theta_max = theta.size() > 0 ? theta(0) : 0.0;
    const double z_tol = 100.0 * static_cast<double>(2 * n) * kEps * theta_max;
    int n_zero = 0;
    for (Eigen::Index j = 0; j < n; ++j)
        if (theta(j) <= z_tol) ++n_zero;
    if (n_zero > 0) {
        std::vector<Eigen::Index> zero_idx;
        for (Eigen::Index j = 0; j < 2 * n; ++j)
            if (std::abs(evals(j)) <= z_tol) zero_idx.push_back(j);
        Matrix W(2 * n, static_cast<Eigen::Index>(zero_idx.size()));
        for (size_t k = 0; k < zero_idx.size(); ++k) W.col(static_cast<Eigen::Index>(k)) = evecs.col(zero_idx[k]);
        for (int k = 0; k < n_zero; ++k) {
            Vector z = W.col(0);
            z.normalize();
            Upos.col(n - n_zero + k) = z;
            theta(n - n_zero + k) = 0.0;
            if (W.cols() <= 2) break;
            Vector jz = apply_j(z).col(0);
            Matrix rest = W.rightCols(W.cols() - 1);
            rest -= z * (z.transpose() * rest);
            rest -= jz * (jz.transpose() * rest);
            Eigen::JacobiSVD<Matrix> trim(rest, Eigen::ComputeThinU);
            W = trim.matrixU().leftCols(W.cols() - 2);
        }
    }

    PairedEig out;
    out.theta = theta;
    out.U.resize(2 * n, 2 * n);
    out.U.leftCols(n) = Upos;
    out.U.rightCols(n) = apply_j(Upos);
    return out;
}

namespace {

// Parlett-Reinsch balancing: diagonal similarity by powers of two, so the
// scaling itself is exact and the spectrum is unchanged, while the QR
// iteration's backward error drops on badly scaled rows and columns.
void balance_inplace(Matrix& A) {
    const double radix = 2.0, sqrdx = radix * radix;
    const Eigen::Index n = A.rows();
    bool done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double c = 0.0, r = 0.0;
            for (Eigen::Index j = 0; j < n; ++j)
                if (j != i) {
                    c += std::abs(A(j, i));
                    r += std::abs(A(i, j));
                }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix, f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                A.row(i) *= 1.0 / f;
                A.col(i) *= f;
            }
        }
    }
}

}  // namespace

std::vector<Complex> real_schur_eigvals(const Matrix& M) {
    if (M.rows() != M.cols()) throw DimensionMismatch("real_schur_eigvals: matrix must be square");
    if (M.rows() == 0) return {};
    Matrix balanced = M;
    balance_inplace(balanced);
    Eigen::EigenSolver<Matrix> es(balanced, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw ConvergenceFailure("real_schur_eigvals: QR iteration failed");
    std::vector<Complex> out(static_cast<size_t>(M.rows()));
    for (Eigen::Index i = 0; i < M.rows(); ++i) out[static_cast<size_t>(i)] = es.eigenvalues()(i);
    return out;
}

bool all_finite(const Matrix& M) { return M.allFinite(); }
bool all_finite(const CMatrix& M) {
    return M.real().allFinite() && M.imag().allFinite();
}

}  // namespace rpa
