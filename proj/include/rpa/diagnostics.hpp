#pragma once

#include <string>
#include <vector>

#include "rpa/types.hpp"

namespace rpa {

// Per-step trace of the column construction, mainly for tests and tuning.
struct StepDiagnostic {
    int group = 0;
    Complex pole;
    std::string op;  // "real-block", "pair-initial", "pair-iso", "pair-direct",
                     // "pair-fallback", "pair-rank1", "pair-restart"
    int rows = 0;
    int cols = 0;
    int rank = 0;
    int null_dim = 0;
    int s1_rank = 0;
    bool full_row_rank = false;
    int appended = 0;        // columns added by the step
    double coupling2 = 0.0;  // squared norm of the added coupling columns
    double delta = 1.0;
};

}  // namespace rpa
