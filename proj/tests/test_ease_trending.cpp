#include <doctest.h>

#include "oracles.hpp"
#include "tempo/models.hpp"

using namespace tempo;

namespace {

// Equality-constrained ridge regression per column: minimizes
// |x_j - X b|^2 + lambda |b|^2 subject to b_j = 0, via the bordered KKT
// system. Independent of the inverse-diagonal closed form.
Matrix ease_kkt_oracle(const Matrix& x, double lambda) {
    const int n = static_cast<int>(x.cols());
    const Matrix gram_x = oracle::naive_gram(x);
    Matrix b = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        Matrix kkt = Matrix::Zero(n + 1, n + 1);
        kkt.topLeftCorner(n, n) = gram_x + lambda * Matrix::Identity(n, n);
        kkt(j, n) = 1.0;
        kkt(n, j) = 1.0;
        Vector rhs = Vector::Zero(n + 1);
        rhs.head(n) = x.transpose() * x.col(j);
        const Vector sol = oracle::lu_solve(kkt, rhs);
        b.col(j) = sol.head(n);
    }
    return b;
}

Matrix binary_matrix(const EventLog& log) {
    Matrix x = Matrix::Zero(log.n_users(), log.n_items());
    for (const Event& e : log.events()) x(e.user, e.item) = 1.0;
    return x;
}

}  // namespace

TEST_CASE("EASE diagonal is exactly zero") {
    const EventLog log = oracle::toy_log(15, 8, 120, 51);
    const FactorModel model = train_ease(log, 2.0);
    for (int i = 0; i < log.n_items(); ++i) {
        CHECK(model.ease_b(i, i) == 0.0);
    }
}

TEST_CASE("EASE closed form matches the constrained KKT minimizer") {
    // three items, two of them with identical interaction columns
    const EventLog log = EventLog::build({
        Event{0, 0, 100}, Event{0, 1, 110},
        Event{1, 0, 120}, Event{1, 1, 130},
        Event{2, 0, 140}, Event{2, 1, 150}, Event{2, 2, 160},
        Event{3, 2, 170},
        Event{4, 0, 180}, Event{4, 1, 190},
    });
    const double lambda = 0.1;
    const FactorModel model = train_ease(log, lambda);
    const Matrix expected = ease_kkt_oracle(binary_matrix(log), lambda);
    CHECK((model.ease_b - expected).cwiseAbs().maxCoeff() <= 1e-6);
    // the twin item dominates its sibling's column
    CHECK(model.ease_b(0, 1) > 0.5);
    CHECK(model.ease_b(0, 1) > std::abs(model.ease_b(2, 1)));
}

TEST_CASE("huge lambda drives EASE weights to zero") {
    const EventLog log = oracle::toy_log(10, 6, 80, 52);
    const FactorModel model = train_ease(log, 1e9);
    CHECK(model.ease_b.cwiseAbs().maxCoeff() <= 1e-6);
    for (int i = 0; i < log.n_items(); ++i) CHECK(model.ease_b(i, i) == 0.0);
}

TEST_CASE("EASE enforces the dense-solve item cap") {
    const EventLog log = oracle::toy_log(10, 6, 80, 53);
    CHECK_THROWS_AS(train_ease(log, 1.0, /*item_cap=*/5), ItemCountTooLarge);
}

TEST_CASE("EASE scores route through the training histories") {
    const EventLog log = oracle::toy_log(12, 7, 90, 54);
    const FactorModel model = train_ease(log, 1.0);
    const Matrix x = binary_matrix(log);
    for (int u = 0; u < log.n_users(); ++u) {
        const Vector expected = model.ease_b.transpose() * x.row(u).transpose();
        const Vector got = score_all_items(model, u, 0.0);
        CHECK((got - expected).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("trending over the full range uses global counts") {
    const EventLog log = oracle::toy_log(10, 8, 150, 55);
    const double full_days =
        static_cast<double>(log.t_max() - log.t_min()) / 86400.0 + 1.0;
    const FactorModel model = train_trending(log, full_days);
    const Vector global = popularity(log, log.t_min(), log.t_max());
    CHECK((model.trending_counts - global).cwiseAbs().maxCoeff() == 0.0);
    // user-independent
    CHECK(score(model, 0, 3, 0.0) == score(model, 7, 3, 0.9));
}

TEST_CASE("an empty popularity window scores every item at zero") {
    const EventLog log = oracle::toy_log(10, 8, 150, 56);
    FactorModel model = train_trending(log, 7.0);
    model.trending_counts = popularity(log, log.t_min() - 100, log.t_min() - 100);
    for (int i = 0; i < log.n_items(); ++i) CHECK(score(model, 0, i, 0.0) == 0.0);
}

TEST_CASE("trending top item matches a brute-force count") {
    const EventLog log = oracle::toy_log(25, 12, 600, 57);
    const FactorModel model = train_trending(log, 7.0);
    const std::int64_t start = log.t_max() - 7 * std::int64_t{86400};
    std::vector<double> counts(log.n_items(), 0.0);
    for (const Event& e : log.events()) {
        if (e.ts >= start && e.ts <= log.t_max()) counts[e.item] += 1.0;
    }
    int best = 0;
    for (int i = 1; i < log.n_items(); ++i) {
        if (counts[i] > counts[best]) best = i;
    }
    int got = 0;
    for (int i = 1; i < log.n_items(); ++i) {
        if (model.trending_counts[i] > model.trending_counts[got]) got = i;
    }
    CHECK(got == best);
    CHECK(model.trending_counts[best] == doctest::Approx(counts[best]));
}
