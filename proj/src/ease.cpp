#include <Eigen/Cholesky>
#include <Eigen/SparseCore>

#include "model_internal.hpp"

namespace tempo {

FactorModel train_ease(const EventLog& log, double lambda, int item_cap) {
    if (!(lambda > 0.0)) throw ConfigError("train_ease: lambda must be > 0");
    const int n = log.n_items();
    if (n > item_cap) {
        throw ItemCountTooLarge("train_ease: " + std::to_string(n) +
                                " items exceed the dense-solve cap of " +
                                std::to_string(item_cap));
    }

    FactorModel model;
    model.kind = ModelKind::EASE;
    model.cfg.lambda = lambda;
    model.cfg.ease_item_cap = item_cap;
    model.t_min = log.t_min();
    model.t_max = log.t_max();

    // Binary interaction matrix; repeat events collapse to one entry.
    model.ease_histories.resize(log.n_users());
    for (int u = 0; u < log.n_users(); ++u) {
        std::vector<int>& items = model.ease_histories[u];
        for (int idx : log.user_histories()[u]) {
            items.push_back(log.events()[idx].item);
        }
        std::sort(items.begin(), items.end());
        items.erase(std::unique(items.begin(), items.end()), items.end());
    }

    std::vector<Eigen::Triplet<double>> triplets;
    for (int u = 0; u < log.n_users(); ++u) {
        for (int i : model.ease_histories[u]) {
            triplets.emplace_back(u, i, 1.0);
        }
    }
    Eigen::SparseMatrix<double> x(log.n_users(), n);
    x.setFromTriplets(triplets.begin(), triplets.end());

    Matrix gram_x = Matrix(x.transpose() * x);
    gram_x.diagonal().array() += lambda;

    Eigen::LLT<Matrix> chol(gram_x);
    if (chol.info() != Eigen::Success) {
        throw NotPositiveDefinite("train_ease: X^T X + lambda I is not positive definite");
    }
    const Matrix p_hat = chol.solve(Matrix::Identity(n, n));

    model.ease_b = Matrix::Identity(n, n) - p_hat * p_hat.diagonal().cwiseInverse().asDiagonal();
    model.ease_b.diagonal().setZero();
    return model;
}

FactorModel train_trending(const EventLog& log, double window_days) {
    if (!(window_days > 0.0)) throw ConfigError("train_trending: window must be > 0");
    FactorModel model;
    model.kind = ModelKind::TRENDING;
    model.cfg.trending_window_days = window_days;
    model.t_min = log.t_min();
    model.t_max = log.t_max();

    const auto window = static_cast<std::int64_t>(window_days * kSecondsPerDay);
    const std::int64_t start = log.t_max() - window;
    model.trending_counts = popularity(log, start, log.t_max());
    return model;
}

}  // namespace tempo
