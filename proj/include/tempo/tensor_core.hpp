#pragma once

#include <functional>

#include <Eigen/Core>
#include <Eigen/Dense>

#include "tempo/errors.hpp"

namespace tempo {

// All factor math runs in double precision; Gram accumulation over many
// events is not reliable in 32 bit.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

struct SpdSystem {
    Matrix lhs;  // square, symmetric
    Matrix rhs;  // one or more columns
};

// Exact solve of a symmetric positive-definite system via Cholesky.
// Throws NotPositiveDefinite when a non-positive pivot is hit, which in
// practice means the ridge term was too small or an accumulator was corrupted.
Matrix solve_spd(const SpdSystem& system);
Matrix solve_spd(const Matrix& lhs, const Matrix& rhs);

using LinearOp = std::function<Matrix(const Matrix&)>;

struct CgResult {
    Matrix x;
    int iterations = 0;
    bool converged = false;
};

// Conjugate gradient over a matrix-free SPD operator. Iterates live in the
// same shape as rhs and inner products are Frobenius. The residual is
// measured relative to |rhs|. Starting from `warm_start` (when given) the
// quadratic objective never increases, which the ALS sweeps rely on.
CgResult solve_cg(const LinearOp& apply_lhs, const Matrix& rhs, double tol = 1e-8,
                  int max_iter = 200, const Matrix* warm_start = nullptr);

// m^T m with a mirrored lower triangle so the result is bitwise symmetric.
Matrix gram(const Matrix& m);

// Element-wise product.
Matrix hadamard(const Matrix& a, const Matrix& b);

}  // namespace tempo
