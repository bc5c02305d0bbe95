#pragma once

#include "tempo/tensor_core.hpp"

namespace tempo {

// Legendre polynomial basis of degrees 0..order-1, orthogonal over [-1, 1].
struct LegendreBasis {
    explicit LegendreBasis(int order_arg);
    int order;
};

// Basis functions evaluated at t via the three-term recurrence. t may lie
// outside [-1, 1]; polynomials extrapolate.
Vector eval_row(const LegendreBasis& basis, double t);

// The r x r matrix of pairwise basis-function integrals over [-1, 1].
// Orthogonality makes it diagonal with entries 2 / (2i + 1).
Matrix gram_limit(const LegendreBasis& basis);
Vector gram_limit_diagonal(const LegendreBasis& basis);

struct KernelMoments {
    double t = 0.0;
    double sigma = 0.0;
    double k2 = 0.0;  // mean of K(t - t')^2 over t' in [-1, 1]
    Vector kc;        // mean of K(t - t') * C_{t'} over t' in [-1, 1]
};

// Gaussian kernel exp(-((t - t') / sigma)^2).
double gaussian_kernel(double dt, double sigma);

// Midpoint-rule averages of the kernel against itself and against the basis
// row, on a uniform grid over [-1, 1].
KernelMoments kernel_moments(const LegendreBasis& basis, double t, double sigma,
                             int samples = 1000);

}  // namespace tempo
