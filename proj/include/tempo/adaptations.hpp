#pragma once

#include <string>

#include "tempo/dataset.hpp"
#include "tempo/models.hpp"

namespace tempo {

// Post-hoc rescaling of item scores by (local / global popularity)^nu.
// Add-one smoothing keeps the ratio finite for zero-count items.
struct PopularityScaler {
    double nu = 0.0;
    double eps = 1.0;
    Vector global_pop;
    Vector local_pop;
};

// Global counts over the full training range, local counts over the trailing
// window of `local_window_days`.
PopularityScaler make_popularity_scaler(const EventLog& train, double nu,
                                        double local_window_days, double eps = 1.0);

void apply_popularity_scaling(Vector& scores, const PopularityScaler& scaler);

struct TimeStrategy {
    enum class Kind { LastFactor, LastN, DropTime, Extrapolate };
    Kind kind = Kind::LastFactor;
    int n = 1;  // LastN window

    static TimeStrategy parse(const std::string& name, int n = 1);
    std::string name() const;
};

// The basis row a strategy evaluates a polynomial fit at: C at t=1 for the
// last factor, the all-time mean [1, 0, ...] for drop-time, the mean over a
// trailing 1-day virtual grid for last-n, and C at the actual prediction
// time for extrapolation.
Vector effective_basis_row(const FactorModel& model, const TimeStrategy& strategy, double t);

// The k-vector that replaces B_t at prediction time. Defined for binned and
// single-fit models; DMF applies strategies per item through its basis row
// and time-free models have nothing to resolve, both raise
// StrategyUnsupported here.
Vector effective_time_factor(const FactorModel& model, const TimeStrategy& strategy, double t);

}  // namespace tempo
