#include "model_internal.hpp"
#include "tempo/parallel.hpp"

namespace tempo {

using detail::Cell;
using detail::ContinuousCells;

namespace {

// Shared skeleton of DTF and DTFKernel. The two differ only in how a positive
// event enters the normal equations:
//   DTF     targets 1 at the event's own timestamp,
//   DTFKernel targets the kernel curve over all of [-1, 1],
// so the event-local basis Gram is C_t^T C_t for DTF and the analytic basis
// Gram G for DTFKernel, and the right-hand sides use C_t vs. the integrated
// kernel-basis moments.
struct FitTrainer {
    const EventLog& log;
    const TrainConfig& cfg;
    bool kernel = false;

    LegendreBasis basis{1};
    Vector g_diag;              // analytic Gram diagonal
    ContinuousCells cells;
    Matrix kernel_rows;         // events x r, integral of K * C_{t'}
    Vector kernel_sq;           // events, integral of K^2 (unused by updates)

    FitTrainer(const EventLog& log_arg, const TrainConfig& cfg_arg, bool kernel_arg)
        : log(log_arg), cfg(cfg_arg), kernel(kernel_arg), basis(cfg_arg.r) {
        g_diag = gram_limit_diagonal(basis);
        const Vector weights = event_weights(log, cfg.alpha, cfg.half_life_days);
        cells = detail::build_continuous_cells(log, basis, weights);
        if (kernel) {
            const int p = static_cast<int>(log.events().size());
            kernel_rows.resize(p, cfg.r);
            kernel_sq.resize(p);
            for (int e = 0; e < p; ++e) {
                const KernelMoments m =
                    kernel_moments(basis, cells.times[e], cfg.sigma, cfg.kernel_samples);
                // Moments are means over [-1, 1]; the loss integrates, hence x2.
                kernel_rows.row(e) = 2.0 * m.kc.transpose();
                kernel_sq[e] = 2.0 * m.k2;
            }
        }
    }

    // Re-solves each row of `target` (P or Q) with the other side and A fixed.
    void embedding_block(Matrix& target, const Matrix& other, const detail::CellLists& lists,
                         const Matrix& a) const {
        const int k = cfg.k;
        const Matrix a_gram = a.transpose() * g_diag.asDiagonal() * a;
        const Matrix base =
            hadamard(gram(other), a_gram) + cfg.lambda * Matrix::Identity(k, k);
        parallel_for(target.rows(), cfg.threads, [&](long row) {
            Matrix lhs = base;
            Vector rhs = Vector::Zero(k);
            for (const Cell& c : lists[row]) {
                const RowVector q = other.row(c.other);
                if (kernel) {
                    lhs.array() += c.w * (q.transpose() * q).array() * a_gram.array();
                    const Vector bt = a.transpose() * kernel_rows.row(c.aux).transpose();
                    rhs.noalias() += c.w * q.transpose().cwiseProduct(bt);
                } else {
                    const RowVector bt = cells.basis_rows.row(c.aux) * a;
                    const RowVector z = q.cwiseProduct(bt);
                    lhs.noalias() += c.w * z.transpose() * z;
                    rhs.noalias() += c.w * z.transpose();
                }
            }
            target.row(row) = solve_spd(lhs, rhs).transpose();
        });
    }

    // The A system is a generalized Sylvester equation; solved matrix-free by
    // CG, warm-started from the current A so the objective cannot increase.
    Matrix fit_block(const Matrix& p, const Matrix& q, const Matrix& a_current) const {
        const int k = cfg.k;
        const int r = cfg.r;
        const Matrix s =
            hadamard(gram(p), gram(q)) + cfg.lambda * Matrix::Identity(k, k);

        Matrix rhs = Matrix::Zero(r, k);
        Matrix event_outer;  // sum_ev w v v^T, only needed for the kernel form
        if (kernel) event_outer = Matrix::Zero(k, k);
        for (int u = 0; u < static_cast<int>(cells.by_user.size()); ++u) {
            const RowVector pu = p.row(u);
            for (const Cell& c : cells.by_user[u]) {
                const RowVector v = pu.cwiseProduct(q.row(c.other));
                if (kernel) {
                    rhs.noalias() += c.w * kernel_rows.row(c.aux).transpose() * v;
                    event_outer.noalias() += c.w * v.transpose() * v;
                } else {
                    rhs.noalias() += c.w * cells.basis_rows.row(c.aux).transpose() * v;
                }
            }
        }

        LinearOp op;
        if (kernel) {
            const Matrix right = s + event_outer;
            op = [&, right](const Matrix& x) -> Matrix {
                Matrix y = g_diag.asDiagonal() * x * right;
                y += cfg.lambda_a * x;
                return y;
            };
        } else {
            op = [&](const Matrix& x) -> Matrix {
                Matrix y = g_diag.asDiagonal() * x * s;
                y += cfg.lambda_a * x;
                for (int u = 0; u < static_cast<int>(cells.by_user.size()); ++u) {
                    const RowVector pu = p.row(u);
                    for (const Cell& c : cells.by_user[u]) {
                        const RowVector v = pu.cwiseProduct(q.row(c.other));
                        const RowVector ct = cells.basis_rows.row(c.aux);
                        const double proj = (ct * x).dot(v);
                        y.noalias() += (c.w * proj) * ct.transpose() * v;
                    }
                }
                return y;
            };
        }

        const CgResult res = solve_cg(op, rhs, cfg.cg_tol, cfg.cg_max_iter, &a_current);
        return res.x;
    }

    FactorModel run(ModelKind kind, const BlockCallback& on_block, const FactorModel* init) {
        FactorModel model;
        model.kind = kind;
        model.cfg = cfg;
        model.t_min = log.t_min();
        model.t_max = log.t_max();

        std::mt19937_64 rng(cfg.seed);
        if (init != nullptr) {
            model.P = init->P;
            model.Q = init->Q;
            model.A = init->A;
        } else {
            model.P = detail::gaussian_init(log.n_users(), cfg.k, rng);
            model.Q = detail::gaussian_init(log.n_items(), cfg.k, rng);
            model.A = detail::fit_init(cfg.r, cfg.k, rng);
        }

        for (int it = 0; it < cfg.iterations; ++it) {
            embedding_block(model.P, model.Q, cells.by_user, model.A);
            if (on_block) on_block(Block::Users, it, model);
            embedding_block(model.Q, model.P, cells.by_item, model.A);
            if (on_block) on_block(Block::Items, it, model);
            model.A = fit_block(model.P, model.Q, model.A);
            if (on_block) on_block(Block::Fit, it, model);
        }
        return model;
    }
};

}  // namespace

FactorModel train_dtf(const EventLog& log, const TrainConfig& cfg, const BlockCallback& on_block,
                      const FactorModel* init) {
    cfg.validate();
    FitTrainer trainer(log, cfg, /*kernel=*/false);
    return trainer.run(ModelKind::DTF, on_block, init);
}

FactorModel train_dtf_kernel(const EventLog& log, const TrainConfig& cfg,
                             const BlockCallback& on_block, const FactorModel* init) {
    cfg.validate();
    if (!(cfg.sigma > 0.0)) {
        throw InvalidKernelWidth("train_dtf_kernel: sigma must be > 0");
    }
    FitTrainer trainer(log, cfg, /*kernel=*/true);
    return trainer.run(ModelKind::DTF_KERNEL, on_block, init);
}

}  // namespace tempo
