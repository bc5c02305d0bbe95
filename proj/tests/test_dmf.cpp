#include <doctest.h>

#include "oracles.hpp"
#include "tempo/models.hpp"

using namespace tempo;

namespace {

Vector dmf_user_oracle(const EventLog& log, const FactorModel& state, int user, double alpha,
                       double lambda) {
    const int k = state.cfg.k;
    const int r = state.cfg.r;
    Matrix lhs = lambda * Matrix::Identity(k, k);
    for (const Matrix& a : state.item_fits) {
        lhs += oracle::analytic_fit_gram(a);
    }
    Vector rhs = Vector::Zero(k);
    const auto times = oracle::normalized_times(log);
    for (std::size_t e = 0; e < log.events().size(); ++e) {
        const Event& ev = log.events()[e];
        if (ev.user != user) continue;
        const Vector z =
            state.item_fits[ev.item].transpose() * oracle::basis_row_closed(r, times[e]);
        lhs += alpha * z * z.transpose();
        rhs += alpha * z;
    }
    return oracle::lu_solve(lhs, rhs);
}

}  // namespace

TEST_CASE("r = 1 gives exactly constant effective item factors") {
    const EventLog log = oracle::toy_log(6, 4, 50, 81);
    TrainConfig cfg;
    cfg.k = 2;
    cfg.r = 1;
    cfg.iterations = 4;
    const FactorModel model = train_dmf(log, cfg);
    for (int i = 0; i < log.n_items(); ++i) {
        double lo = 1e300, hi = -1e300;
        for (int g = 0; g <= 100; ++g) {
            const double s = score(model, 1, i, -1.0 + 0.02 * g);
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        CHECK(hi - lo < 1e-10);
    }
}

TEST_CASE("per-item fit solves match the vectorized dense oracle") {
    const EventLog log = oracle::toy_log(6, 4, 36, 82);
    TrainConfig cfg;
    cfg.k = 2;
    cfg.r = 3;
    cfg.alpha = 6.0;
    cfg.lambda = 0.4;
    cfg.lambda_a = 0.05;
    cfg.iterations = 2;

    const auto times = oracle::normalized_times(log);
    FactorModel prev;
    bool checked = false;
    const BlockCallback capture = [&](Block block, int iteration, const FactorModel& state) {
        if (block == Block::Fit && iteration == 1) {
            // P is the one the update saw (refreshed in the user block)
            const Matrix m_right =
                oracle::naive_gram(state.P) + cfg.lambda * Matrix::Identity(cfg.k, cfg.k);
            for (int i = 0; i < log.n_items(); ++i) {
                std::vector<oracle::FitSystemEvent> events;
                Matrix rhs = Matrix::Zero(cfg.r, cfg.k);
                for (std::size_t e = 0; e < log.events().size(); ++e) {
                    const Event& ev = log.events()[e];
                    if (ev.item != i) continue;
                    oracle::FitSystemEvent fe;
                    fe.c = oracle::basis_row_closed(cfg.r, times[e]);
                    fe.v = state.P.row(ev.user).transpose();
                    fe.w = cfg.alpha;
                    fe.c_is_rank_one = true;
                    rhs += fe.w * fe.c * fe.v.transpose();
                    events.push_back(std::move(fe));
                }
                const Matrix expected =
                    oracle::fit_solve_vectorized(m_right, events, rhs, cfg.lambda_a, cfg.r,
                                                 cfg.k);
                CHECK((state.item_fits[i] - expected).norm() <=
                      1e-6 * (1.0 + expected.norm()));
            }
            checked = true;
        }
        prev = state;
    };
    train_dmf(log, cfg, capture);
    CHECK(checked);
}

TEST_CASE("user blocks match the dense oracle") {
    const EventLog log = oracle::toy_log(5, 4, 32, 83);
    TrainConfig cfg;
    cfg.k = 2;
    cfg.r = 3;
    cfg.alpha = 4.0;
    cfg.lambda = 0.3;
    cfg.iterations = 2;

    FactorModel prev;
    bool checked = false;
    const BlockCallback capture = [&](Block block, int iteration, const FactorModel& state) {
        if (block == Block::Users && iteration == 1) {
            for (int u = 0; u < log.n_users(); ++u) {
                // prev holds the item fits the user update saw
                FactorModel reference = prev;
                const Vector expected =
                    dmf_user_oracle(log, reference, u, cfg.alpha, cfg.lambda);
                CHECK((state.P.row(u).transpose() - expected).norm() <=
                      1e-6 * (1.0 + expected.norm()));
            }
            checked = true;
        }
        prev = state;
    };
    train_dmf(log, cfg, capture);
    CHECK(checked);
}

TEST_CASE("items with identical histories learn identical fits") {
    // items 2 and 3 see exactly the same (user, time) events
    std::vector<Event> events;
    const std::int64_t t0 = 1700000000;
    events.push_back(Event{0, 0, t0});
    events.push_back(Event{1, 1, t0 + 86400 * 30});
    events.push_back(Event{2, 0, t0 + 86400 * 60});
    for (int u = 0; u < 3; ++u) {
        for (int rep = 0; rep < 3; ++rep) {
            const std::int64_t ts = t0 + 86400 * (5 + 7 * rep + 11 * u);
            events.push_back(Event{u, 2, ts});
            events.push_back(Event{u, 3, ts});
        }
    }
    const EventLog log = EventLog::build(events);

    TrainConfig cfg;
    cfg.k = 2;
    cfg.r = 3;
    cfg.iterations = 0;
    FactorModel init = train_dmf(log, cfg);
    init.item_fits[3] = init.item_fits[2];  // identical starting point

    cfg.iterations = 5;
    const FactorModel model = train_dmf(log, cfg, {}, &init);
    CHECK((model.item_fits[2] - model.item_fits[3]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("DMF dense loss is non-increasing over 10 block updates") {
    const EventLog log = oracle::toy_log(6, 4, 40, 84);
    TrainConfig cfg;
    cfg.k = 2;
    cfg.r = 3;
    cfg.alpha = 5.0;
    cfg.lambda = 0.25;
    cfg.lambda_a = 0.1;
    cfg.iterations = 5;
    std::vector<double> losses;
    const FactorModel model = train_dmf(log, cfg, [&](Block, int, const FactorModel& state) {
        losses.push_back(oracle::dmf_dense_loss(state, log));
    });
    REQUIRE(losses.size() == 10);
    for (std::size_t i = 1; i < losses.size(); ++i) CHECK(losses[i] <= losses[i - 1] + 1e-9);
    CHECK(training_loss(model, log) ==
          doctest::Approx(oracle::dmf_dense_loss(model, log)).epsilon(1e-9));
}

TEST_CASE("the fit-tensor memory budget is enforced") {
    const EventLog log = oracle::toy_log(5, 10, 60, 85);
    TrainConfig cfg;
    cfg.k = 4;
    cfg.r = 4;
    cfg.dmf_max_elements = 100;  // 10 * 4 * 4 = 160 > 100
    CHECK_THROWS_AS(train_dmf(log, cfg), MemoryBudgetExceeded);
}
