#pragma once

#include <vector>

#include "rpa/errors.hpp"
#include "rpa/types.hpp"

namespace rpa {

enum class PoleOrder { Ascending, AsGiven };

// One entry of a user-supplied pole list, before validation.
struct RawPole {
    double re = 0.0;
    double im = 0.0;
    int mult = 1;
};

// A maximal set of equal target eigenvalues. Complex groups are stored by the
// upper-half representative (im > 0) and stand for the conjugate pair, so they
// occupy 2*mult columns of the closed-loop spectrum.
struct PoleGroup {
    Complex value;
    int mult = 1;

    bool is_complex() const { return value.imag() > 0.0; }
    int dim() const { return is_complex() ? 2 * mult : mult; }
};

struct PoleSpec {
    std::vector<PoleGroup> groups;
    int n = 0;

    // Full n-element target multiset, conjugates included, in group order.
    std::vector<Complex> expand() const;
};

// Validates and canonicalizes a raw pole list against state dimension n.
//
// Entries with |im| <= imag_tol are treated as real. Without conjugate_pairs,
// every complex value must be listed together with its conjugate at equal
// total multiplicity; with the flag, each complex entry stands for the pair
// and the sign of its imaginary part is ignored. Equal values merge into one
// group; under AsGiven, equal values separated by a different value raise
// DuplicateSplitGroup. Ascending orders groups by re, then |im|.
PoleSpec build_pole_spec(const std::vector<RawPole>& entries, int n,
                         PoleOrder order = PoleOrder::Ascending,
                         bool conjugate_pairs = false, double imag_tol = 0.0);

}  // namespace rpa
