#pragma once

#include <utility>
#include <vector>

#include "rpa/accumulator.hpp"
#include "rpa/poles.hpp"
#include "rpa/types.hpp"

namespace rpa {

// Departure from normality of the closed-loop matrix, measured against the
// intended spectrum: sqrt(max(0, |Ac|_F^2 - sum |lambda_j|^2)). Meaningful
// only when Ac actually carries that spectrum.
double departure_from_normality(const Matrix& Ac, const PoleSpec& spec);

// Same quantity evaluated on the quasi-triangular factor: the Frobenius mass
// of T outside its diagonal blocks plus (delta - 1/delta)^2 beta^2 for every
// 2x2 block. Agrees with departure_from_normality(X T X^T, spec) up to
// rounding whenever X is orthogonal.
double departure_from_schur(const Matrix& T, const std::vector<DiagBlock>& blocks);

// Minimum-cost perfect matching on a square cost matrix; returns match with
// match[row] = assigned column.
std::vector<int> min_cost_assignment(const Matrix& cost);

struct PrecsResult {
    bool exact = false;       // every matched error is exactly zero
    int precs = 0;            // ceil(log10(max matched error)); meaningless when exact
    double max_error = 0.0;
    std::vector<double> errors;   // per target pole, expand() order
    std::vector<int> matching;    // target index -> computed eigenvalue index
    std::vector<Complex> computed;
};

// Matches eigenvalues of Ac to the expanded targets by minimum-cost perfect
// matching on |target - computed| and reports the worst matched error as a
// base-10 exponent. Errors are relative, or absolute for targets with
// |lambda| <= zero_tol.
PrecsResult precs(const PoleSpec& target, const Matrix& Ac, double zero_tol = 1e-12);

// n - rank(Ac - lambda I) with relative rank cutoff tol * sigma_1.
int geometric_multiplicity(const Matrix& Ac, Complex lambda, double tol = 1e-8);

struct EigvecCondition {
    double kappa = 0.0;       // |X|_F * |Xinv|_F over unit-column eigenvectors
    bool defective = false;   // singular eigenvector matrix, or kappa > 1/eps
};

EigvecCondition eigvec_condition(const Matrix& Ac);

struct RobustnessReport {
    double dep = 0.0;
    double kappa_f = 0.0;
    bool defective = false;
    double f_norm = 0.0;
    PrecsResult accuracy;
    std::vector<std::pair<Complex, int>> g_multi;  // group value -> eigenspace dim
    double residual = 0.0;  // caller-supplied reconstruction residual
};

// Full report for closed loop A + BF against the target spectrum.
RobustnessReport evaluate(const Matrix& A, const Matrix& B, const Matrix& F,
                          const PoleSpec& spec, double gmult_tol = 1e-8,
                          double zero_tol = 1e-12);

}  // namespace rpa
