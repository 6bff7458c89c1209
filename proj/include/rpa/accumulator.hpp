#pragma once

#include <vector>

#include "rpa/errors.hpp"
#include "rpa/poles.hpp"
#include "rpa/types.hpp"

namespace rpa {

// One 1x1 or 2x2 diagonal atom of the accumulated quasi-triangular T.
// A 2x2 atom holds the pair lambda = alpha + i*beta as
// [[alpha, delta*beta], [-beta/delta, alpha]].
struct DiagBlock {
    int start = 0;
    int size = 1;
    Complex pole;
    double delta = 1.0;
};

// Realized coupling structure of one pole group: block_sizes lists the
// diagonal sub-block sizes n_1..n_l (columns for real groups, pairs for
// complex groups); their sum is the group multiplicity.
struct GroupStructure {
    Complex pole;
    int mult = 0;
    bool is_complex = false;
    std::vector<int> block_sizes;
};

// Column-by-column builder of the orthogonal/quasi-triangular pair (X, T).
// X gains orthonormal columns; T gains matching columns whose strictly-lower
// part below the recorded diagonal atoms stays exactly zero.
class SchurAccumulator {
public:
    explicit SchurAccumulator(int n);

    int dim() const { return n_; }
    int cols() const { return r_; }
    bool complete() const { return r_ == n_; }

    Matrix X() const { return X_.leftCols(r_); }
    Matrix T() const { return T_.topLeftCorner(r_, r_); }

    void begin_group(const PoleGroup& g);
    void end_group();

    // Appends c = Xnew.cols() columns for a real eigenvalue block lambda*I_c.
    // Vnew has one coupling column per new column, covering all prior columns.
    void append_real_block(double lambda, const Matrix& Xnew, const Matrix& Vnew);

    // Appends one conjugate-pair column pair. v1, v2 couple the new columns to
    // the first p prior columns only; rows p..r-1 of the new T columns stay
    // zero so the current diagonal block remains block-diagonal. new_block
    // starts a fresh sub-block in the group structure.
    void append_complex_pair(Complex lambda, const Vector& x1, const Vector& x2,
                             const Vector& v1, const Vector& v2, double delta, bool new_block);

    const std::vector<DiagBlock>& blocks() const { return blocks_; }
    const std::vector<GroupStructure>& groups() const { return groups_; }

    double orthogonality_residual() const;  // |X'X - I|_F over current columns

private:
    int n_;
    int r_ = 0;
    Matrix X_;
    Matrix T_;
    std::vector<DiagBlock> blocks_;
    std::vector<GroupStructure> groups_;
    bool in_group_ = false;
};

}  // namespace rpa
