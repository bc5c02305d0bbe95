#include "tempo/legendre.hpp"

#include <cmath>

namespace tempo {

LegendreBasis::LegendreBasis(int order_arg) : order(order_arg) {
    if (order < 1) {
        throw ConfigError("LegendreBasis: order must be >= 1");
    }
}

Vector eval_row(const LegendreBasis& basis, double t) {
    Vector row(basis.order);
    row[0] = 1.0;
    if (basis.order == 1) return row;
    row[1] = t;
    for (int d = 1; d + 1 < basis.order; ++d) {
        // (d + 1) P_{d+1} = (2d + 1) t P_d - d P_{d-1}
        row[d + 1] = ((2.0 * d + 1.0) * t * row[d] - d * row[d - 1]) / (d + 1.0);
    }
    return row;
}

Vector gram_limit_diagonal(const LegendreBasis& basis) {
    Vector diag(basis.order);
    for (int i = 0; i < basis.order; ++i) {
        diag[i] = 2.0 / (2.0 * i + 1.0);
    }
    return diag;
}

Matrix gram_limit(const LegendreBasis& basis) {
    return gram_limit_diagonal(basis).asDiagonal();
}

double gaussian_kernel(double dt, double sigma) {
    const double z = dt / sigma;
    return std::exp(-z * z);
}

KernelMoments kernel_moments(const LegendreBasis& basis, double t, double sigma, int samples) {
    if (!(sigma > 0.0)) {
        throw InvalidKernelWidth("kernel_moments: sigma must be > 0");
    }
    if (samples < 2) {
        throw ConfigError("kernel_moments: need at least 2 sample points");
    }
    KernelMoments moments;
    moments.t = t;
    moments.sigma = sigma;
    moments.kc = Vector::Zero(basis.order);
    const double step = 2.0 / samples;
    double k2 = 0.0;
    for (int j = 0; j < samples; ++j) {
        const double tp = -1.0 + (j + 0.5) * step;
        const double k = gaussian_kernel(t - tp, sigma);
        k2 += k * k;
        moments.kc += k * eval_row(basis, tp);
    }
    moments.k2 = k2 / samples;
    moments.kc /= static_cast<double>(samples);
    return moments;
}

}  // namespace tempo
