#include "rpa/bench.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

#include "json.hpp"
#include "rpa/linalg.hpp"
#include "rpa/metrics.hpp"

namespace rpa {

std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t SplitMix64::next() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix64(state_);
}

double GaussianStream::next() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = (static_cast<double>(rng_.next() >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
    const double u2 = static_cast<double>(rng_.next() >> 11) * 0x1.0p-53;          // [0,1)
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925287 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

Matrix GaussianStream::matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix M(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = next();
    return M;
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t n, std::uint64_t m,
                             std::uint64_t a_max, std::uint64_t trial, std::uint64_t retry) {
    std::uint64_t s = mix64(seed + 0x9e3779b97f4a7c15ull);
    s = mix64(s ^ (n + 0x9e3779b97f4a7c15ull));
    s = mix64(s ^ (m + 0x9e3779b97f4a7c15ull));
    s = mix64(s ^ (a_max + 0x9e3779b97f4a7c15ull));
    s = mix64(s ^ (trial + 0x9e3779b97f4a7c15ull));
    s = mix64(s ^ (retry + 0x9e3779b97f4a7c15ull));
    return s;
}

namespace {

// Diagonal layout shared by both recipes: a_max leading 2x2 rotation blocks
// [[al, be], [-be, al]] for the complex kind, then the remaining real values.
void stamp_spectrum(Matrix& R, BenchKind kind, double al, double be,
                    const std::vector<double>& reals, int a_max) {
    Eigen::Index k = 0;
    if (kind == BenchKind::ComplexRepeated) {
        for (int b = 0; b < a_max; ++b, k += 2) {
            R(k, k) = al;
            R(k, k + 1) = be;
            R(k + 1, k) = -be;
            R(k + 1, k + 1) = al;
        }
    } else {
        for (int b = 0; b < a_max; ++b, ++k) R(k, k) = al;
    }
    for (double v : reals) R(k, k) = v, ++k;
}

struct Attempt {
    bool ok = false;
    GeneratedCase out;
};

Attempt try_generate(BenchKind kind, int n, int m, int a_max, GenRecipe recipe,
                     std::uint64_t stream_seed) {
    GaussianStream g(stream_seed);
    Attempt at;

    double al = 0.0, be = 0.0;
    std::vector<RawPole> entries;
    std::vector<double> reals;
    if (kind == BenchKind::ComplexRepeated) {
        al = g.next();
        be = g.next();
        if (be == 0.0) return at;
        reals.resize(static_cast<size_t>(n - 2 * a_max));
        for (double& v : reals) v = g.next();
        entries.push_back({al, be, a_max});
    } else {
        al = g.next();
        reals.resize(static_cast<size_t>(n - a_max));
        for (double& v : reals) v = g.next();
        entries.push_back({al, 0.0, a_max});
    }
    for (double v : reals) entries.push_back({v, 0.0, 1});

    const Matrix Y = g.matrix(n, n);
    const Matrix B = g.matrix(n, m);
    const Matrix F0 = g.matrix(m, n);

    Matrix M;
    if (recipe == GenRecipe::Qr) {
        Eigen::HouseholderQR<Matrix> qr(Y);
        const Matrix Qy = qr.householderQ();
        Matrix Ry = qr.matrixQR().triangularView<Eigen::Upper>();
        stamp_spectrum(Ry, kind, al, be, reals, a_max);
        M = Qy * Ry * Qy.transpose();
    } else {
        if (numerical_rank(Y) < n) return at;
        Matrix L = Matrix::Zero(n, n);
        stamp_spectrum(L, kind, al, be, reals, a_max);
        Eigen::PartialPivLU<Matrix> lu(Y.transpose());
        M = lu.solve(L.transpose() * Y.transpose()).transpose();
    }
    Matrix A = M - B * F0;

    if (numerical_rank(B) < m) return at;
    if (check_controllability(A, B) < n) return at;

    at.ok = true;
    at.out.sys = SystemPair{std::move(A), B};
    at.out.spec = build_pole_spec(entries, n, PoleOrder::Ascending,
                                  kind == BenchKind::ComplexRepeated);
    at.out.repeated = kind == BenchKind::ComplexRepeated ? Complex(al, std::abs(be))
                                                         : Complex(al, 0.0);
    return at;
}

}  // namespace

GeneratedCase generate_case(BenchKind kind, int n, int m, int a_max, GenRecipe recipe,
                            std::uint64_t seed, std::uint64_t trial) {
    std::string why;
    if (!grid_point_valid(kind, n, m, a_max, &why))
        throw InvalidInput("generate_case: " + why);
    for (int retry = 0; retry <= 10; ++retry) {
        Attempt at = try_generate(kind, n, m, a_max, recipe,
                                  substream_seed(seed, static_cast<std::uint64_t>(n),
                                                 static_cast<std::uint64_t>(m),
                                                 static_cast<std::uint64_t>(a_max), trial,
                                                 static_cast<std::uint64_t>(retry)));
        if (at.ok) {
            at.out.retries = retry;
            return at.out;
        }
    }
    throw GenerationFailure("generate_case: no controllable draw after retries at n=" +
                            std::to_string(n) + " m=" + std::to_string(m) +
                            " a_max=" + std::to_string(a_max) +
                            " trial=" + std::to_string(trial));
}

bool grid_point_valid(BenchKind kind, int n, int m, int a_max, std::string* why) {
    auto reject = [&](const char* msg) {
        if (why) *why = msg;
        return false;
    };
    if (n < 1) return reject("n must be positive");
    if (m < 1 || m > n) return reject("m outside 1..n");
    if (kind == BenchKind::RealRepeated) {
        if (n < 2) return reject("real kind needs n >= 2");
        if (a_max < 1 || a_max > n - 1) return reject("real a_max outside 1..n-1");
    } else {
        if (a_max < 2 || 2 * a_max > n) return reject("complex a_max outside 2..n/2");
    }
    return true;
}

namespace {

struct TrialOut {
    bool ok = false;
    bool defective = false;
    double dep = 0.0;
    double fnorm = 0.0;
    double kappa = 0.0;
    double precs_val = 0.0;
    double gmulti = 0.0;
    std::string error;
};

TrialOut one_trial(BenchKind kind, int n, int m, int a_max, GenRecipe recipe,
                   std::uint64_t seed, std::uint64_t trial) {
    TrialOut t;
    try {
        GeneratedCase c = generate_case(kind, n, m, a_max, recipe, seed, trial);
        AssignmentResult r = assign(c.sys, c.spec);
        const Matrix Ac = c.sys.A + c.sys.B * r.F;
        t.dep = departure_from_normality(Ac, c.spec);
        t.fnorm = r.F.norm();
        const EigvecCondition cond = eigvec_condition(Ac);
        t.kappa = cond.kappa;
        t.defective = cond.defective;
        const PrecsResult pr = precs(c.spec, Ac);
        // Exact placement has no representable digit count; the smallest
        // subnormal's exponent stands in so means stay finite.
        t.precs_val = pr.exact ? -323.0 : static_cast<double>(pr.precs);
        t.gmulti = static_cast<double>(geometric_multiplicity(Ac, c.repeated));
        t.ok = true;
    } catch (const std::exception& e) {
        t.error = e.what();
    }
    return t;
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchConfig& cfg, std::vector<std::string>* notes) {
    if (cfg.trials < 1) throw InvalidInput("run_bench: trials must be positive");

    struct Point {
        int n, m, a_max;
    };
    std::vector<Point> grid;
    for (int n : cfg.n_list)
        for (int m : cfg.m_list)
            for (int a : cfg.amax_list) {
                std::string why;
                if (grid_point_valid(cfg.kind, n, m, a, &why)) {
                    grid.push_back({n, m, a});
                } else if (notes) {
                    notes->push_back("skip n=" + std::to_string(n) + " m=" + std::to_string(m) +
                                     " a_max=" + std::to_string(a) + ": " + why);
                }
            }

    std::vector<std::vector<TrialOut>> slots(grid.size());
    for (auto& s : slots) s.resize(static_cast<size_t>(cfg.trials));

    const size_t total = grid.size() * static_cast<size_t>(cfg.trials);
    auto work = [&](size_t flat) {
        const size_t gi = flat / static_cast<size_t>(cfg.trials);
        const size_t ti = flat % static_cast<size_t>(cfg.trials);
        const Point& p = grid[gi];
        slots[gi][ti] = one_trial(cfg.kind, p.n, p.m, p.a_max, cfg.recipe, cfg.seed, ti);
    };

    const int jobs = std::max(1, cfg.jobs);
    if (jobs == 1 || total <= 1) {
        for (size_t i = 0; i < total; ++i) work(i);
    } else {
        std::atomic<size_t> cursor{0};
        std::vector<std::thread> pool;
        const size_t nthreads = std::min<size_t>(static_cast<size_t>(jobs), total);
        pool.reserve(nthreads);
        for (size_t t = 0; t < nthreads; ++t)
            pool.emplace_back([&] {
                for (size_t i = cursor.fetch_add(1); i < total; i = cursor.fetch_add(1)) work(i);
            });
        for (auto& th : pool) th.join();
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<BenchRow> rows;
    rows.reserve(grid.size());
    for (size_t gi = 0; gi < grid.size(); ++gi) {
        BenchRow row;
        row.n = grid[gi].n;
        row.m = grid[gi].m;
        row.a_max = grid[gi].a_max;
        row.trials = cfg.trials;
        double dep = 0, fnorm = 0, kappa = 0, prec = 0, gm = 0;
        int ok = 0, kap_ok = 0;
        for (int ti = 0; ti < cfg.trials; ++ti) {
            const TrialOut& t = slots[gi][static_cast<size_t>(ti)];
            if (!t.ok) {
                ++row.failures;
                if (notes)
                    notes->push_back("n=" + std::to_string(row.n) + " m=" + std::to_string(row.m) +
                                     " a_max=" + std::to_string(row.a_max) +
                                     " trial=" + std::to_string(ti) + ": " + t.error);
                continue;
            }
            ++ok;
            dep += t.dep;
            fnorm += t.fnorm;
            prec += t.precs_val;
            gm += t.gmulti;
            if (t.defective) {
                ++row.defective_count;
            } else {
                kappa += t.kappa;
                ++kap_ok;
            }
        }
        row.dep_mean = ok ? dep / ok : nan;
        row.fnorm_mean = ok ? fnorm / ok : nan;
        row.kappa_mean = kap_ok ? kappa / kap_ok : nan;
        row.precs_mean = ok ? prec / ok : nan;
        row.gmulti_mean = ok ? gm / ok : nan;
        rows.push_back(row);
    }
    return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::string out =
        "n,m,a_max,trials,dep_mean,fnorm_mean,kappa_mean,defective_count,precs_mean,"
        "gmulti_mean,failures\n";
    char buf[512];
    for (const BenchRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%d,%d,%d,%.17g,%.17g,%.17g,%d,%.17g,%.17g,%d\n", r.n,
                      r.m, r.a_max, r.trials, r.dep_mean, r.fnorm_mean, r.kappa_mean,
                      r.defective_count, r.precs_mean, r.gmulti_mean, r.failures);
        out += buf;
    }
    return out;
}

std::string bench_json(const std::vector<BenchRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const BenchRow& r : rows) {
        arr.push_back({{"n", r.n},
                       {"m", r.m},
                       {"a_max", r.a_max},
                       {"trials", r.trials},
                       {"dep_mean", r.dep_mean},
                       {"fnorm_mean", r.fnorm_mean},
                       {"kappa_mean", r.kappa_mean},
                       {"defective_count", r.defective_count},
                       {"precs_mean", r.precs_mean},
                       {"gmulti_mean", r.gmulti_mean},
                       {"failures", r.failures}});
    }
    return arr.dump(2) + "\n";
}

}  // namespace rpa
