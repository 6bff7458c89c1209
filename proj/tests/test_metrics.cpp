#include <algorithm>
#include <climits>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "rpa/bench.hpp"
#include "rpa/metrics.hpp"

using namespace rpa;

TEST_CASE("departure from normality on hand values") {
    SUBCASE("diagonal matrix is normal") {
        const Matrix Ac = Eigen::Vector3d{1, 2, 3}.asDiagonal();
        const PoleSpec spec = build_pole_spec({{1}, {2}, {3}}, 3);
        CHECK(departure_from_normality(Ac, spec) == 0.0);
    }
    SUBCASE("single Jordan coupling") {
        Matrix Ac(2, 2);
        Ac << 1, 1, 0, 2;
        const PoleSpec spec = build_pole_spec({{1}, {2}}, 2);
        CHECK(departure_from_normality(Ac, spec) == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("unbalanced rotation block, both forms") {
        Matrix T(2, 2);
        T << 0.7, 2.0, -0.5, 0.7;  // alpha 0.7, beta 1, delta 2
        const PoleSpec spec = build_pole_spec({{0.7, 1, 1}}, 2, PoleOrder::Ascending, true);
        CHECK(departure_from_normality(T, spec) == doctest::Approx(1.5).epsilon(1e-14));
        const std::vector<DiagBlock> blocks{{0, 2, Complex(0.7, 1.0), 2.0}};
        CHECK(departure_from_schur(T, blocks) == doctest::Approx(1.5).epsilon(1e-14));
    }
    SUBCASE("off-block mass") {
        Matrix T(3, 3);
        T << 1, 5, 1, 0, 1, 0, 0, 0, 2;
        const std::vector<DiagBlock> blocks{{0, 1, Complex(1, 0), 1.0},
                                            {1, 1, Complex(1, 0), 1.0},
                                            {2, 1, Complex(2, 0), 1.0}};
        CHECK(departure_from_schur(T, blocks) == doctest::Approx(std::sqrt(26.0)).epsilon(1e-14));
        const PoleSpec spec = build_pole_spec({{1, 0, 2}, {2}}, 3);
        CHECK(departure_from_normality(T, spec) ==
              doctest::Approx(std::sqrt(26.0)).epsilon(1e-14));
    }
}

TEST_CASE("assignment matching is optimal") {
    GaussianStream g(2718);
    for (int rep = 0; rep < 20; ++rep) {
        Matrix cost(6, 6);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) cost(i, j) = std::abs(g.next());
        const std::vector<int> match = min_cost_assignment(cost);

        std::vector<bool> used(6, false);
        double total = 0.0;
        for (int i = 0; i < 6; ++i) {
            REQUIRE(match[i] >= 0);
            REQUIRE(match[i] < 6);
            CHECK_FALSE(used[match[i]]);
            used[match[i]] = true;
            total += cost(i, match[i]);
        }

        std::vector<int> perm(6);
        std::iota(perm.begin(), perm.end(), 0);
        double best = 1e300;
        do {
            double s = 0.0;
            for (int i = 0; i < 6; ++i) s += cost(i, perm[i]);
            best = std::min(best, s);
        } while (std::next_permutation(perm.begin(), perm.end()));
        CHECK(total == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("placement accuracy exponent") {
    SUBCASE("known perturbation") {
        // 2.5e-11 survives the representation gap at 1.0 (spacing 2.2e-16),
        // so the relative error rounds into the (-11, -10] digit bucket.
        const Matrix Ac = Eigen::Vector2d{1.0 + 2.5e-11, 2.0}.asDiagonal();
        const PoleSpec spec = build_pole_spec({{1}, {2}}, 2);
        const PrecsResult pr = precs(spec, Ac);
        CHECK_FALSE(pr.exact);
        CHECK(pr.precs == -10);
        CHECK(pr.max_error == doctest::Approx(2.5e-11).epsilon(1e-3));
    }
    SUBCASE("exact diagonal") {
        const Matrix Ac = Eigen::Vector2d{1.0, 2.0}.asDiagonal();
        const PoleSpec spec = build_pole_spec({{1}, {2}}, 2);
        const PrecsResult pr = precs(spec, Ac);
        CHECK((pr.exact || pr.precs <= -15));
        if (pr.exact) CHECK(pr.precs == INT_MIN);
    }
    SUBCASE("absolute error at a zero target") {
        const Matrix Ac = Eigen::Vector2d{3.4e-17, 1.0}.asDiagonal();
        const PoleSpec spec = build_pole_spec({{0}, {1}}, 2);
        const PrecsResult pr = precs(spec, Ac);
        CHECK_FALSE(pr.exact);
        CHECK(pr.precs == -16);
    }
    SUBCASE("matching beats random permutations") {
        GaussianStream g(11);
        std::vector<RawPole> raw;
        Matrix Ac = Matrix::Zero(6, 6);
        for (int i = 0; i < 6; ++i) {
            const double v = g.next();
            raw.push_back({v, 0, 1});
            Ac(i, i) = v + 1e-9 * g.next();
        }
        const PoleSpec spec = build_pole_spec(raw, 6);
        const PrecsResult pr = precs(spec, Ac);
        const std::vector<Complex> want = spec.expand();

        std::mt19937 rng(7);
        std::vector<int> perm(6);
        std::iota(perm.begin(), perm.end(), 0);
        for (int rep = 0; rep < 1000; ++rep) {
            std::shuffle(perm.begin(), perm.end(), rng);
            double worst = 0.0;
            for (int i = 0; i < 6; ++i) {
                double e = std::abs(want[i] - pr.computed[perm[i]]);
                if (std::abs(want[i]) > 1e-12) e /= std::abs(want[i]);
                worst = std::max(worst, e);
            }
            CHECK(pr.max_error <= worst + 1e-15);
        }
    }
}

TEST_CASE("geometric multiplicity") {
    CHECK(geometric_multiplicity(5.0 * Matrix::Identity(3, 3), Complex(5, 0)) == 3);
    Matrix J(2, 2);
    J << 1, 1, 0, 1;
    CHECK(geometric_multiplicity(J, Complex(1, 0)) == 1);
    Matrix R(2, 2);
    R << 0, 1, -1, 0;
    CHECK(geometric_multiplicity(R, Complex(0, 1)) == 1);
    CHECK(geometric_multiplicity(R, Complex(0, -1)) == 1);
    CHECK(geometric_multiplicity(R, Complex(3, 0)) == 0);
}

TEST_CASE("eigenvector conditioning") {
    SUBCASE("diagonal") {
        const EigvecCondition c = eigvec_condition(Eigen::Vector2d{1.0, 2.0}.asDiagonal());
        CHECK(c.kappa == doctest::Approx(2.0).epsilon(1e-12));
        CHECK_FALSE(c.defective);
    }
    SUBCASE("symmetric has kappa n") {
        GaussianStream g(5);
        const Matrix M = g.matrix(5, 5);
        const Matrix S = 0.5 * (M + M.transpose());
        const EigvecCondition c = eigvec_condition(S);
        CHECK(c.kappa == doctest::Approx(5.0).epsilon(1e-8));
        CHECK_FALSE(c.defective);
    }
    SUBCASE("nilpotent shift is defective") {
        // Strictly triangular input: the Schur pass leaves the double zero
        // exact, so the parallel eigenvectors are detected.
        Matrix N(2, 2);
        N << 0, 1, 0, 0;
        const EigvecCondition c = eigvec_condition(N);
        CHECK(c.defective);
        CHECK((std::isinf(c.kappa) || c.kappa > 1e12));
    }
    SUBCASE("perturbed Jordan block has large kappa") {
        Matrix J(2, 2);
        J << 1, 1, 0, 1;
        const EigvecCondition c = eigvec_condition(J);
        CHECK(c.kappa > 1e6);
    }
}

TEST_CASE("full report on the closed companion loop") {
    Matrix A(2, 2);
    A << 0, 1, 0, 0;
    Matrix B(2, 1);
    B << 0, 1;
    Matrix F(1, 2);
    F << -1, 2;
    const PoleSpec spec = build_pole_spec({{1, 0, 2}}, 2);
    const RobustnessReport rep = evaluate(A, B, F, spec);

    CHECK(rep.dep == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rep.f_norm == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
    REQUIRE(rep.g_multi.size() == 1);
    CHECK(rep.g_multi[0].first == Complex(1, 0));
    CHECK(rep.g_multi[0].second == 1);  // one input, one eigenvector
    CHECK((rep.defective || rep.kappa_f > 1e6));
    CHECK((rep.accuracy.exact || rep.accuracy.max_error <= 1e-7));
    CHECK(rep.residual == 0.0);
}
