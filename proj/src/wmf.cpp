#include "model_internal.hpp"
#include "tempo/parallel.hpp"

namespace tempo {

using detail::Cell;
using detail::CellLists;

namespace {

// One half-sweep: re-solves every row of `factors` against `other` fixed.
// lhs = other^T other + sum_cells w q q^T + lambda I, rhs = sum_cells w q.
void wmf_half_sweep(Matrix& factors, const Matrix& other, const CellLists& cells,
                    double lambda, int threads) {
    const int k = static_cast<int>(factors.cols());
    const Matrix base = gram(other) + lambda * Matrix::Identity(k, k);
    parallel_for(factors.rows(), threads, [&](long row) {
        Matrix lhs = base;
        Vector rhs = Vector::Zero(k);
        for (const Cell& c : cells[row]) {
            const RowVector q = other.row(c.other);
            lhs.noalias() += c.w * q.transpose() * q;
            rhs.noalias() += c.w * q.transpose();
        }
        factors.row(row) = solve_spd(lhs, rhs).transpose();
    });
}

}  // namespace

FactorModel train_wmf(const EventLog& log, const TrainConfig& cfg, const BlockCallback& on_block,
                      const FactorModel* init) {
    cfg.validate();
    FactorModel model;
    model.kind = ModelKind::WMF;
    model.cfg = cfg;
    model.t_min = log.t_min();
    model.t_max = log.t_max();

    std::mt19937_64 rng(cfg.seed);
    if (init != nullptr) {
        model.P = init->P;
        model.Q = init->Q;
    } else {
        model.P = detail::gaussian_init(log.n_users(), cfg.k, rng);
        model.Q = detail::gaussian_init(log.n_items(), cfg.k, rng);
    }

    const Vector weights = event_weights(log, cfg.alpha, cfg.half_life_days);
    const detail::MatrixCells cells = detail::build_matrix_cells(log, weights);

    for (int it = 0; it < cfg.iterations; ++it) {
        wmf_half_sweep(model.P, model.Q, cells.by_user, cfg.lambda, cfg.threads);
        if (on_block) on_block(Block::Users, it, model);
        wmf_half_sweep(model.Q, model.P, cells.by_item, cfg.lambda, cfg.threads);
        if (on_block) on_block(Block::Items, it, model);
    }
    return model;
}

}  // namespace tempo
