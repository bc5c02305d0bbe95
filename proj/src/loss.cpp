#include "model_internal.hpp"

namespace tempo {

using detail::Cell;

namespace {

double squared(double x) { return x * x; }

// Sum over rows of |target - row|^2 where target is the zero or the all-ones
// vector.
double ridge_term(const Matrix& factors, bool toward_ones) {
    if (!toward_ones) return factors.squaredNorm();
    return (factors.array() - 1.0).matrix().squaredNorm();
}

double wmf_loss(const FactorModel& model, const EventLog& log) {
    const Vector weights = event_weights(log, model.cfg.alpha, model.cfg.half_life_days);
    const detail::MatrixCells cells = detail::build_matrix_cells(log, weights);
    double pos = 0.0;
    for (int u = 0; u < log.n_users(); ++u) {
        for (const Cell& c : cells.by_user[u]) {
            pos += c.w * squared(1.0 - model.P.row(u).dot(model.Q.row(c.other)));
        }
    }
    const double implicit = hadamard(gram(model.P), gram(model.Q)).sum();
    const double reg = model.cfg.lambda * (model.P.squaredNorm() + model.Q.squaredNorm());
    return pos + implicit + reg;
}

double itals_loss(const FactorModel& model, const EventLog& log) {
    const Vector weights = event_weights(log, model.cfg.alpha, model.cfg.half_life_days);
    const BinnedLog binned = bin_events(log, model.cfg.bin_days);
    const detail::TensorCells cells = detail::build_tensor_cells(log, binned, weights);
    double pos = 0.0;
    for (int u = 0; u < log.n_users(); ++u) {
        for (const Cell& c : cells.by_user[u]) {
            const double pred =
                model.P.row(u).cwiseProduct(model.Q.row(c.other)).dot(model.B.row(c.aux));
            pos += c.w * squared(1.0 - pred);
        }
    }
    const double implicit =
        hadamard(hadamard(gram(model.P), gram(model.Q)), gram(model.B)).sum() / binned.n_bins;
    const double reg = model.cfg.lambda * (ridge_term(model.P, model.cfg.default_user) +
                                           ridge_term(model.Q, model.cfg.default_item) +
                                           ridge_term(model.B, model.cfg.default_time));
    return pos + implicit + reg;
}

double italsx_loss(const FactorModel& model, const EventLog& log) {
    const Vector weights = event_weights(log, model.cfg.alpha, model.cfg.half_life_days);
    const BinnedLog binned = bin_events(log, model.cfg.bin_days);
    const detail::TensorCells cells = detail::build_tensor_cells(log, binned, weights);
    double pos = 0.0;
    for (int u = 0; u < log.n_users(); ++u) {
        for (const Cell& c : cells.by_user[u]) {
            const double pred = model.P.row(u).dot(model.Q.row(c.other)) +
                                model.P.row(u).dot(model.B.row(c.aux)) +
                                model.Q.row(c.other).dot(model.B.row(c.aux));
            pos += c.w * squared(1.0 - pred);
        }
    }
    const Matrix gp = gram(model.P);
    const Matrix gq = gram(model.Q);
    const Matrix gb = gram(model.B);
    const Vector sp = model.P.colwise().sum().transpose();
    const Vector sq = model.Q.colwise().sum().transpose();
    const Vector sb = model.B.colwise().sum().transpose();
    const double m = static_cast<double>(model.P.rows());
    const double n = static_cast<double>(model.Q.rows());
    const double l = static_cast<double>(model.B.rows());
    double implicit = l * hadamard(gp, gq).sum() + n * hadamard(gp, gb).sum() +
                      m * hadamard(gq, gb).sum();
    implicit += 2.0 * (sq.dot(gp * sb) + sp.dot(gq * sb) + sp.dot(gb * sq));
    implicit /= l;
    const double reg = model.cfg.lambda * (model.P.squaredNorm() + model.Q.squaredNorm() +
                                           model.B.squaredNorm());
    return pos + implicit + reg;
}

double fit_loss(const FactorModel& model, const EventLog& log) {
    const bool kernel = model.kind == ModelKind::DTF_KERNEL;
    const LegendreBasis basis(model.cfg.r);
    const Vector g_diag = gram_limit_diagonal(basis);
    const Vector weights = event_weights(log, model.cfg.alpha, model.cfg.half_life_days);
    const detail::ContinuousCells cells = detail::build_continuous_cells(log, basis, weights);
    const Matrix a_gram = model.A.transpose() * g_diag.asDiagonal() * model.A;

    double pos = 0.0;
    for (int u = 0; u < log.n_users(); ++u) {
        for (const Cell& c : cells.by_user[u]) {
            const RowVector v = model.P.row(u).cwiseProduct(model.Q.row(c.other));
            const Vector vt = v.transpose();
            if (kernel) {
                const KernelMoments mo = kernel_moments(basis, cells.times[c.aux],
                                                        model.cfg.sigma,
                                                        model.cfg.kernel_samples);
                const Vector av = model.A * vt;
                // Integral form of int (K - pred)^2 dt': means scale by 2.
                pos += c.w * (2.0 * mo.k2 - 2.0 * (2.0 * mo.kc).dot(av) + vt.dot(a_gram * vt));
            } else {
                const double pred = (cells.basis_rows.row(c.aux) * model.A).dot(v);
                pos += c.w * squared(1.0 - pred);
            }
        }
    }
    const double implicit = hadamard(hadamard(gram(model.P), gram(model.Q)), a_gram).sum();
    double fit_reg = 0.0;
    for (int d = 0; d < model.cfg.r; ++d) {
        fit_reg += g_diag[d] * model.A.row(d).squaredNorm();
    }
    const double reg =
        model.cfg.lambda * (model.P.squaredNorm() + model.Q.squaredNorm() + fit_reg) +
        model.cfg.lambda_a * model.A.squaredNorm();
    return pos + implicit + reg;
}

double dmf_loss(const FactorModel& model, const EventLog& log) {
    const LegendreBasis basis(model.cfg.r);
    const Vector g_diag = gram_limit_diagonal(basis);
    const Vector weights = event_weights(log, model.cfg.alpha, model.cfg.half_life_days);
    const detail::ContinuousCells cells = detail::build_continuous_cells(log, basis, weights);

    double pos = 0.0;
    for (int u = 0; u < log.n_users(); ++u) {
        for (const Cell& c : cells.by_user[u]) {
            const RowVector qt = cells.basis_rows.row(c.aux) * model.item_fits[c.other];
            pos += c.w * squared(1.0 - model.P.row(u).dot(qt));
        }
    }
    const Matrix gp = gram(model.P);
    double implicit = 0.0;
    double fit_reg = 0.0;
    double fit_sq = 0.0;
    for (const Matrix& a : model.item_fits) {
        const Matrix ag = a.transpose() * g_diag.asDiagonal() * a;
        implicit += hadamard(gp, ag).sum();
        fit_reg += ag.trace();
        fit_sq += a.squaredNorm();
    }
    const double reg = model.cfg.lambda * (model.P.squaredNorm() + fit_reg) +
                       model.cfg.lambda_a * fit_sq;
    return pos + implicit + reg;
}

}  // namespace

double training_loss(const FactorModel& model, const EventLog& log) {
    switch (model.kind) {
        case ModelKind::WMF: return wmf_loss(model, log);
        case ModelKind::ITALS: return itals_loss(model, log);
        case ModelKind::ITALSX: return italsx_loss(model, log);
        case ModelKind::DTF:
        case ModelKind::DTF_KERNEL: return fit_loss(model, log);
        case ModelKind::DMF: return dmf_loss(model, log);
        default:
            throw ConfigError("training_loss: " + to_string(model.kind) +
                              " has no iterative training objective");
    }
}

}  // namespace tempo
