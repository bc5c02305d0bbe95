#include "model_internal.hpp"
#include "tempo/parallel.hpp"

namespace tempo {

using detail::Cell;

FactorModel train_dmf(const EventLog& log, const TrainConfig& cfg, const BlockCallback& on_block,
                      const FactorModel* init) {
    cfg.validate();
    const std::int64_t fit_elements =
        static_cast<std::int64_t>(log.n_items()) * cfg.r * cfg.k;
    if (fit_elements > cfg.dmf_max_elements) {
        throw MemoryBudgetExceeded("train_dmf: n*r*k = " + std::to_string(fit_elements) +
                                   " exceeds the budget of " +
                                   std::to_string(cfg.dmf_max_elements));
    }

    FactorModel model;
    model.kind = ModelKind::DMF;
    model.cfg = cfg;
    model.t_min = log.t_min();
    model.t_max = log.t_max();

    const LegendreBasis basis(cfg.r);
    const Vector g_diag = gram_limit_diagonal(basis);
    const Vector weights = event_weights(log, cfg.alpha, cfg.half_life_days);
    const detail::ContinuousCells cells = detail::build_continuous_cells(log, basis, weights);

    std::mt19937_64 rng(cfg.seed);
    if (init != nullptr) {
        model.P = init->P;
        model.item_fits = init->item_fits;
    } else {
        model.P = detail::gaussian_init(log.n_users(), cfg.k, rng);
        model.item_fits.reserve(log.n_items());
        for (int i = 0; i < log.n_items(); ++i) {
            model.item_fits.push_back(detail::fit_init(cfg.r, cfg.k, rng));
        }
    }

    for (int it = 0; it < cfg.iterations; ++it) {
        // User block. The implicit regularizer sums the G-weighted fit
        // Gramians over all items.
        Matrix fit_gram_sum = Matrix::Zero(cfg.k, cfg.k);
        for (const Matrix& a : model.item_fits) {
            fit_gram_sum.noalias() += a.transpose() * g_diag.asDiagonal() * a;
        }
        const Matrix base = fit_gram_sum + cfg.lambda * Matrix::Identity(cfg.k, cfg.k);
        parallel_for(model.P.rows(), cfg.threads, [&](long u) {
            Matrix lhs = base;
            Vector rhs = Vector::Zero(cfg.k);
            for (const Cell& c : cells.by_user[u]) {
                const RowVector z = cells.basis_rows.row(c.aux) * model.item_fits[c.other];
                lhs.noalias() += c.w * z.transpose() * z;
                rhs.noalias() += c.w * z.transpose();
            }
            model.P.row(u) = solve_spd(lhs, rhs).transpose();
        });
        if (on_block) on_block(Block::Users, it, model);

        // Item block: one r*k Sylvester-style system per item, solved by
        // warm-started CG like the DTF fit update.
        const Matrix p_reg =
            gram(model.P) + cfg.lambda * Matrix::Identity(cfg.k, cfg.k);
        parallel_for(static_cast<long>(model.item_fits.size()), cfg.threads, [&](long i) {
            Matrix rhs = Matrix::Zero(cfg.r, cfg.k);
            for (const Cell& c : cells.by_item[i]) {
                rhs.noalias() +=
                    c.w * cells.basis_rows.row(c.aux).transpose() * model.P.row(c.other);
            }
            const LinearOp op = [&](const Matrix& x) -> Matrix {
                Matrix y = g_diag.asDiagonal() * x * p_reg;
                y += cfg.lambda_a * x;
                for (const Cell& c : cells.by_item[i]) {
                    const RowVector pu = model.P.row(c.other);
                    const RowVector ct = cells.basis_rows.row(c.aux);
                    const double proj = (ct * x).dot(pu);
                    y.noalias() += (c.w * proj) * ct.transpose() * pu;
                }
                return y;
            };
            model.item_fits[i] = solve_cg(op, rhs, cfg.cg_tol, cfg.cg_max_iter,
                                          &model.item_fits[i]).x;
        });
        if (on_block) on_block(Block::Fit, it, model);
    }
    return model;
}

}  // namespace tempo
