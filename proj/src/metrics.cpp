#include "rpa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rpa/linalg.hpp"

namespace rpa {

double departure_from_normality(const Matrix& Ac, const PoleSpec& spec) {
    if (Ac.rows() != Ac.cols()) throw DimensionMismatch("departure_from_normality: Ac not square");
    if (spec.n != static_cast<int>(Ac.rows()))
        throw DimensionMismatch("departure_from_normality: spectrum size mismatch");
    double sq = Ac.squaredNorm();
    for (const Complex& lam : spec.expand()) sq -= std::norm(lam);
    return std::sqrt(std::max(0.0, sq));
}

double departure_from_schur(const Matrix& T, const std::vector<DiagBlock>& blocks) {
    if (T.rows() != T.cols()) throw DimensionMismatch("departure_from_schur: T not square");
    Matrix N = T;
    double block_sq = 0.0;
    for (const DiagBlock& b : blocks) {
        if (b.start < 0 || b.start + b.size > static_cast<int>(T.rows()))
            throw DimensionMismatch("departure_from_schur: block out of range");
        N.block(b.start, b.start, b.size, b.size).setZero();
        if (b.size == 2) {
            const double beta = b.pole.imag();
            const double dev = b.delta - 1.0 / b.delta;
            block_sq += dev * dev * beta * beta;
        }
    }
    return std::sqrt(N.squaredNorm() + block_sq);
}

std::vector<int> min_cost_assignment(const Matrix& cost) {
    const int n = static_cast<int>(cost.rows());
    if (cost.cols() != n || n < 1) throw DimensionMismatch("min_cost_assignment: square matrix required");
    const double inf = std::numeric_limits<double>::infinity();
    // Potential-based shortest augmenting path; p[j] is the row matched to
    // column j, column 0 is the virtual unmatched slot.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> match(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) match[p[j] - 1] = j - 1;
    return match;
}

PrecsResult precs(const PoleSpec& target, const Matrix& Ac, double zero_tol) {
    if (Ac.rows() != Ac.cols()) throw DimensionMismatch("precs: Ac not square");
    const std::vector<Complex> want = target.expand();
    const int n = static_cast<int>(want.size());
    if (n != static_cast<int>(Ac.rows()))
        throw DimensionMismatch("precs: spectrum size mismatch");

    PrecsResult out;
    out.computed = real_schur_eigvals(Ac);

    Matrix cost(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cost(i, j) = std::abs(want[i] - out.computed[j]);
    out.matching = min_cost_assignment(cost);

    out.errors.resize(n);
    out.max_error = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dist = cost(i, out.matching[i]);
        const double scale = std::abs(want[i]);
        out.errors[i] = scale > zero_tol ? dist / scale : dist;
        out.max_error = std::max(out.max_error, out.errors[i]);
    }
    out.exact = out.max_error == 0.0;
    out.precs = out.exact ? std::numeric_limits<int>::min()
                          : static_cast<int>(std::ceil(std::log10(out.max_error)));
    return out;
}

int geometric_multiplicity(const Matrix& Ac, Complex lambda, double tol) {
    const Eigen::Index n = Ac.rows();
    if (Ac.cols() != n) throw DimensionMismatch("geometric_multiplicity: Ac not square");
    CMatrix shifted = Ac.cast<Complex>();
    shifted.diagonal().array() -= lambda;
    const CSvdResult dec = svd(shifted, tol);
    return static_cast<int>(n) - dec.numerical_rank;
}

EigvecCondition eigvec_condition(const Matrix& Ac) {
    if (Ac.rows() != Ac.cols()) throw DimensionMismatch("eigvec_condition: Ac not square");
    Eigen::EigenSolver<Matrix> es(Ac, true);
    if (es.info() != Eigen::Success)
        throw ConvergenceFailure("eigvec_condition: eigendecomposition failed");
    CMatrix V = es.eigenvectors();
    for (Eigen::Index j = 0; j < V.cols(); ++j) {
        const double nrm = V.col(j).norm();
        if (nrm > 0.0) V.col(j) /= nrm;
    }
    Eigen::JacobiSVD<CMatrix> dec(V);
    const Vector& s = dec.singularValues();

    EigvecCondition out;
    if (s.size() == 0 || s(s.size() - 1) == 0.0) {
        out.kappa = std::numeric_limits<double>::infinity();
        out.defective = true;
        return out;
    }
    double inv_sq = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) inv_sq += 1.0 / (s(i) * s(i));
    out.kappa = std::sqrt(s.squaredNorm()) * std::sqrt(inv_sq);
    out.defective = !(out.kappa <= 1.0 / kEps);
    return out;
}

RobustnessReport evaluate(const Matrix& A, const Matrix& B, const Matrix& F,
                          const PoleSpec& spec, double gmult_tol, double zero_tol) {
    if (A.rows() != A.cols() || B.rows() != A.rows() || F.rows() != B.cols() ||
        F.cols() != A.cols())
        throw DimensionMismatch("evaluate: inconsistent shapes");
    const Matrix Ac = A + B * F;

    RobustnessReport rep;
    rep.dep = departure_from_normality(Ac, spec);
    const EigvecCondition cond = eigvec_condition(Ac);
    rep.kappa_f = cond.kappa;
    rep.defective = cond.defective;
    rep.f_norm = F.norm();
    rep.accuracy = precs(spec, Ac, zero_tol);
    rep.g_multi.reserve(spec.groups.size());
    for (const PoleGroup& g : spec.groups)
        rep.g_multi.emplace_back(g.value, geometric_multiplicity(Ac, g.value, gmult_tol));
    return rep;
}

}  // namespace rpa
