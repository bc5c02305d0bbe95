#include "model_internal.hpp"
#include "tempo/parallel.hpp"

namespace tempo {

using detail::Cell;
using detail::CellLists;

namespace {

struct BinnedSetup {
    detail::TensorCells cells;
    int n_bins = 0;
};

BinnedSetup prepare_binned(const EventLog& log, const TrainConfig& cfg, FactorModel& model,
                           const FactorModel* init) {
    model.t_min = log.t_min();
    model.t_max = log.t_max();

    const BinnedLog binned = bin_events(log, cfg.bin_days);
    model.bin_seconds = binned.bin_seconds;
    model.n_bins = binned.n_bins;

    std::mt19937_64 rng(cfg.seed);
    if (init != nullptr) {
        model.P = init->P;
        model.Q = init->Q;
        model.B = init->B;
    } else {
        model.P = detail::gaussian_init(log.n_users(), cfg.k, rng);
        model.Q = detail::gaussian_init(log.n_items(), cfg.k, rng);
        model.B = detail::gaussian_init(binned.n_bins, cfg.k, rng);
    }

    const Vector weights = event_weights(log, cfg.alpha, cfg.half_life_days);
    BinnedSetup setup;
    setup.cells = detail::build_tensor_cells(log, binned, weights);
    setup.n_bins = binned.n_bins;
    return setup;
}

// iTALS block update. The implicit regularizer contributes the 1/l-scaled
// Hadamard product of the two fixed Gramians; the ridge pulls toward the
// dimension's default factor (zeros or ones).
void itals_block(Matrix& target, const Matrix& f1, const Matrix& f2, const CellLists& cells,
                 double inv_l, double lambda, const Vector& reg_target, int threads) {
    const int k = static_cast<int>(target.cols());
    const Matrix base =
        inv_l * hadamard(gram(f1), gram(f2)) + lambda * Matrix::Identity(k, k);
    parallel_for(target.rows(), threads, [&](long row) {
        Matrix lhs = base;
        Vector rhs = reg_target;
        for (const Cell& c : cells[row]) {
            const RowVector z = f1.row(c.other).cwiseProduct(f2.row(c.aux));
            lhs.noalias() += c.w * z.transpose() * z;
            rhs.noalias() += c.w * z.transpose();
        }
        target.row(row) = solve_spd(lhs, rhs).transpose();
    });
}

// iTALSx block update for the additive prediction form. `sum1`/`sum2` are
// column sums of the fixed factors; the closed-form implicit terms follow
// from expanding sums of (f1_a + f2_b) over all index pairs.
void italsx_block(Matrix& target, const Matrix& f1, const Matrix& f2, const CellLists& cells,
                  double inv_l, double lambda, int threads) {
    const int k = static_cast<int>(target.cols());
    const Matrix g1 = gram(f1);
    const Matrix g2 = gram(f2);
    const Vector sum1 = f1.colwise().sum().transpose();
    const Vector sum2 = f2.colwise().sum().transpose();
    const double n1 = static_cast<double>(f1.rows());
    const double n2 = static_cast<double>(f2.rows());

    Matrix base = inv_l * (n2 * g1 + n1 * g2);
    base.noalias() += inv_l * (sum1 * sum2.transpose() + sum2 * sum1.transpose());
    base += lambda * Matrix::Identity(k, k);
    const Vector rhs_base = -inv_l * (g1 * sum2 + g2 * sum1);

    parallel_for(target.rows(), threads, [&](long row) {
        Matrix lhs = base;
        Vector rhs = rhs_base;
        for (const Cell& c : cells[row]) {
            const RowVector s = f1.row(c.other) + f2.row(c.aux);
            const double cross = f1.row(c.other).dot(f2.row(c.aux));
            lhs.noalias() += c.w * s.transpose() * s;
            rhs.noalias() += c.w * (1.0 - cross) * s.transpose();
        }
        target.row(row) = solve_spd(lhs, rhs).transpose();
    });
}

}  // namespace

FactorModel train_itals(const EventLog& log, const TrainConfig& cfg, const BlockCallback& on_block,
                        const FactorModel* init) {
    cfg.validate();
    FactorModel model;
    model.kind = ModelKind::ITALS;
    model.cfg = cfg;
    BinnedSetup setup = prepare_binned(log, cfg, model, init);

    const double inv_l = 1.0 / static_cast<double>(setup.n_bins);
    const Vector reg_user = detail::default_target(cfg.default_user, cfg.k, cfg.lambda);
    const Vector reg_item = detail::default_target(cfg.default_item, cfg.k, cfg.lambda);
    const Vector reg_time = detail::default_target(cfg.default_time, cfg.k, cfg.lambda);

    for (int it = 0; it < cfg.iterations; ++it) {
        itals_block(model.P, model.Q, model.B, setup.cells.by_user, inv_l, cfg.lambda, reg_user,
                    cfg.threads);
        if (on_block) on_block(Block::Users, it, model);
        itals_block(model.Q, model.P, model.B, setup.cells.by_item, inv_l, cfg.lambda, reg_item,
                    cfg.threads);
        if (on_block) on_block(Block::Items, it, model);
        itals_block(model.B, model.P, model.Q, setup.cells.by_bin, inv_l, cfg.lambda, reg_time,
                    cfg.threads);
        if (on_block) on_block(Block::Time, it, model);
    }
    return model;
}

FactorModel train_italsx(const EventLog& log, const TrainConfig& cfg,
                         const BlockCallback& on_block, const FactorModel* init) {
    cfg.validate();
    FactorModel model;
    model.kind = ModelKind::ITALSX;
    model.cfg = cfg;
    BinnedSetup setup = prepare_binned(log, cfg, model, init);

    const double inv_l = 1.0 / static_cast<double>(setup.n_bins);
    for (int it = 0; it < cfg.iterations; ++it) {
        italsx_block(model.P, model.Q, model.B, setup.cells.by_user, inv_l, cfg.lambda,
                     cfg.threads);
        if (on_block) on_block(Block::Users, it, model);
        italsx_block(model.Q, model.P, model.B, setup.cells.by_item, inv_l, cfg.lambda,
                     cfg.threads);
        if (on_block) on_block(Block::Items, it, model);
        italsx_block(model.B, model.P, model.Q, setup.cells.by_bin, inv_l, cfg.lambda,
                     cfg.threads);
        if (on_block) on_block(Block::Time, it, model);
    }
    return model;
}

}  // namespace tempo
