#include "rpa/accumulator.hpp"

namespace rpa {

SchurAccumulator::SchurAccumulator(int n) : n_(n) {
    if (n < 1) throw InvalidInput("SchurAccumulator: dimension must be positive");
    X_ = Matrix::Zero(n, n);
    T_ = Matrix::Zero(n, n);
}

void SchurAccumulator::begin_group(const PoleGroup& g) {
    if (in_group_) throw InvalidInput("SchurAccumulator: group already open");
    GroupStructure gs;
    gs.pole = g.value;
    gs.mult = g.mult;
    gs.is_complex = g.is_complex();
    groups_.push_back(gs);
    in_group_ = true;
}

void SchurAccumulator::end_group() {
    if (!in_group_) throw InvalidInput("SchurAccumulator: no open group");
    in_group_ = false;
}

void SchurAccumulator::append_real_block(double lambda, const Matrix& Xnew, const Matrix& Vnew) {
    const int c = static_cast<int>(Xnew.cols());
    if (!in_group_) throw InvalidInput("SchurAccumulator: no open group");
    if (c < 1 || Xnew.rows() != n_ || Vnew.cols() != c || Vnew.rows() != r_)
        throw DimensionMismatch("SchurAccumulator: bad real block shape");
    if (r_ + c > n_) throw DimensionMismatch("SchurAccumulator: block exceeds dimension");

    X_.middleCols(r_, c) = Xnew;
    T_.block(0, r_, r_, c) = Vnew;
    for (int j = 0; j < c; ++j) {
        T_(r_ + j, r_ + j) = lambda;
        blocks_.push_back({r_ + j, 1, Complex(lambda, 0.0), 1.0});
    }
    groups_.back().block_sizes.push_back(c);
    r_ += c;
}

void SchurAccumulator::append_complex_pair(Complex lambda, const Vector& x1, const Vector& x2,
                                           const Vector& v1, const Vector& v2, double delta,
                                           bool new_block) {
    if (!in_group_) throw InvalidInput("SchurAccumulator: no open group");
    const int p = static_cast<int>(v1.size());
    if (x1.size() != n_ || x2.size() != n_ || v2.size() != p)
        throw DimensionMismatch("SchurAccumulator: bad pair shape");
    if (p > r_ || r_ + 2 > n_) throw DimensionMismatch("SchurAccumulator: pair exceeds dimension");
    if (!(delta > 0.0) || !(lambda.imag() > 0.0))
        throw InvalidInput("SchurAccumulator: pair needs delta > 0 and Im(lambda) > 0");

    X_.col(r_) = x1;
    X_.col(r_ + 1) = x2;
    T_.block(0, r_, p, 1) = v1;
    T_.block(0, r_ + 1, p, 1) = v2;
    const double a = lambda.real(), b = lambda.imag();
    T_(r_, r_) = a;
    T_(r_, r_ + 1) = delta * b;
    T_(r_ + 1, r_) = -b / delta;
    T_(r_ + 1, r_ + 1) = a;
    blocks_.push_back({r_, 2, lambda, delta});

    auto& sizes = groups_.back().block_sizes;
    if (new_block || sizes.empty())
        sizes.push_back(1);
    else
        sizes.back() += 1;
    r_ += 2;
}

double SchurAccumulator::orthogonality_residual() const {
    if (r_ == 0) return 0.0;
    const Matrix Xr = X_.leftCols(r_);
    return (Xr.transpose() * Xr - Matrix::Identity(r_, r_)).norm();
}

}  // namespace rpa
