#include "tempo/tensor_core.hpp"

#include <cmath>

#include <Eigen/Cholesky>

namespace tempo {

namespace {

void check_square_symmetric(const Matrix& lhs) {
    if (lhs.rows() != lhs.cols()) {
        throw NotPositiveDefinite("solve_spd: lhs is not square");
    }
    const double scale = 1.0 + lhs.cwiseAbs().maxCoeff();
    const double asym = (lhs - lhs.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10 * scale) {
        throw NotPositiveDefinite("solve_spd: lhs is not symmetric");
    }
}

}  // namespace

Matrix solve_spd(const Matrix& lhs, const Matrix& rhs) {
    check_square_symmetric(lhs);
    if (lhs.rows() != rhs.rows()) {
        throw NotPositiveDefinite("solve_spd: rhs dimension mismatch");
    }
    Eigen::LLT<Matrix> chol(lhs);
    if (chol.info() != Eigen::Success) {
        throw NotPositiveDefinite("solve_spd: non-positive pivot in Cholesky factorization");
    }
    return chol.solve(rhs);
}

Matrix solve_spd(const SpdSystem& system) { return solve_spd(system.lhs, system.rhs); }

CgResult solve_cg(const LinearOp& apply_lhs, const Matrix& rhs, double tol, int max_iter,
                  const Matrix* warm_start) {
    CgResult result;
    const double rhs_norm = rhs.norm();
    if (rhs_norm == 0.0 && warm_start == nullptr) {
        result.x = Matrix::Zero(rhs.rows(), rhs.cols());
        result.converged = true;
        return result;
    }

    Matrix x = warm_start != nullptr ? *warm_start : Matrix::Zero(rhs.rows(), rhs.cols());
    Matrix r = rhs - apply_lhs(x);
    const double target = tol * std::max(rhs_norm, 1e-300);
    double rs = r.squaredNorm();
    const double initial_res = std::sqrt(rs);
    if (initial_res <= target) {
        result.x = std::move(x);
        result.converged = true;
        return result;
    }

    Matrix p = r;
    for (int it = 1; it <= max_iter; ++it) {
        Matrix ap = apply_lhs(p);
        const double curvature = (p.array() * ap.array()).sum();
        if (!(curvature > 0.0)) {
            throw Diverged("solve_cg: non-positive curvature, operator is not SPD");
        }
        const double alpha = rs / curvature;
        x += alpha * p;
        r -= alpha * ap;
        const double rs_next = r.squaredNorm();
        const double res = std::sqrt(rs_next);
        if (res > 1e6 * initial_res) {
            throw Diverged("solve_cg: residual grew by more than 1e6x");
        }
        if (res <= target) {
            result.x = std::move(x);
            result.iterations = it;
            result.converged = true;
            return result;
        }
        p = r + (rs_next / rs) * p;
        rs = rs_next;
    }

    result.x = std::move(x);
    result.iterations = max_iter;
    result.converged = false;
    return result;
}

Matrix gram(const Matrix& m) {
    const Eigen::Index c = m.cols();
    Matrix g(c, c);
    for (Eigen::Index j = 0; j < c; ++j) {
        for (Eigen::Index i = j; i < c; ++i) {
            const double v = m.col(i).dot(m.col(j));
            g(i, j) = v;
            g(j, i) = v;
        }
    }
    return g;
}

Matrix hadamard(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b); }

}  // namespace tempo
