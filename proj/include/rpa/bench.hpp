#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rpa/driver.hpp"
#include "rpa/poles.hpp"
#include "rpa/types.hpp"

namespace rpa {

// Stateless 64-bit mixing step (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

// Counter-free splitmix64 stream.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();

  private:
    std::uint64_t state_;
};

// Standard-normal draws via Box-Muller over splitmix64. A stream seeded the
// same way always yields the same sequence, which the bench goldens rely on.
class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}
    double next();
    Matrix matrix(Eigen::Index rows, Eigen::Index cols);  // column-major fill

  private:
    SplitMix64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Stream seed for one generation attempt. Depends only on the listed values,
// so a grid point's trials are reproducible regardless of what other grid
// points run alongside.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t n, std::uint64_t m,
                             std::uint64_t a_max, std::uint64_t trial, std::uint64_t retry);

enum class BenchKind { RealRepeated, ComplexRepeated };
enum class GenRecipe { Qr, Dense };

struct BenchConfig {
    BenchKind kind = BenchKind::RealRepeated;
    std::vector<int> n_list;
    std::vector<int> m_list;
    std::vector<int> amax_list;
    int trials = 20;
    std::uint64_t seed = 1;
    GenRecipe recipe = GenRecipe::Qr;
    int jobs = 1;
};

struct GeneratedCase {
    SystemPair sys;
    PoleSpec spec;
    Complex repeated;  // the value carrying multiplicity a_max
    int retries = 0;
};

// One random test case. Draw order per attempt: pole values, then Y (n*n,
// column-major), then B (n*m), then F (m*n). Attempts whose B loses column
// rank or whose pair is uncontrollable are redrawn from the next retry
// substream, at most 10 times, then GenerationFailure.
GeneratedCase generate_case(BenchKind kind, int n, int m, int a_max, GenRecipe recipe,
                            std::uint64_t seed, std::uint64_t trial);

struct BenchRow {
    int n = 0;
    int m = 0;
    int a_max = 0;
    int trials = 0;
    double dep_mean = 0.0;
    double fnorm_mean = 0.0;
    double kappa_mean = 0.0;  // over non-defective successes
    int defective_count = 0;
    double precs_mean = 0.0;
    double gmulti_mean = 0.0;  // eigenspace dimension of the repeated value
    int failures = 0;
};

// Full grid sweep: every (n, m, a_max) combination that satisfies the kind's
// bounds, one row each, in list order. Invalid combinations are skipped with
// a note. Rows are reduced in grid order from per-trial slots, so jobs > 1
// never changes the output.
std::vector<BenchRow> run_bench(const BenchConfig& cfg,
                                std::vector<std::string>* notes = nullptr);

bool grid_point_valid(BenchKind kind, int n, int m, int a_max, std::string* why = nullptr);

std::string bench_csv(const std::vector<BenchRow>& rows);
std::string bench_json(const std::vector<BenchRow>& rows);

}  // namespace rpa
