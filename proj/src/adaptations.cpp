#include "tempo/adaptations.hpp"

#include <cmath>

namespace tempo {

PopularityScaler make_popularity_scaler(const EventLog& train, double nu,
                                        double local_window_days, double eps) {
    if (nu < 0.0) throw ConfigError("popularity scaling: nu must be >= 0");
    if (!(local_window_days > 0.0)) throw ConfigError("popularity scaling: window must be > 0");
    PopularityScaler scaler;
    scaler.nu = nu;
    scaler.eps = eps;
    scaler.global_pop = popularity(train, train.t_min(), train.t_max());
    const auto window = static_cast<std::int64_t>(local_window_days * kSecondsPerDay);
    scaler.local_pop = popularity(train, train.t_max() - window, train.t_max());
    return scaler;
}

void apply_popularity_scaling(Vector& scores, const PopularityScaler& scaler) {
    if (scores.size() != scaler.global_pop.size()) {
        throw IndexOutOfRange("apply_popularity_scaling: score length mismatch");
    }
    if (scaler.nu == 0.0) return;
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        const double ratio =
            (scaler.local_pop[i] + scaler.eps) / (scaler.global_pop[i] + scaler.eps);
        scores[i] *= std::pow(ratio, scaler.nu);
    }
}

TimeStrategy TimeStrategy::parse(const std::string& name, int n) {
    TimeStrategy s;
    s.n = n;
    if (name == "last") {
        s.kind = Kind::LastFactor;
    } else if (name == "last-n") {
        s.kind = Kind::LastN;
        if (n < 1) throw ConfigError("strategy last-n requires n >= 1");
    } else if (name == "drop-time") {
        s.kind = Kind::DropTime;
    } else if (name == "extrapolate") {
        s.kind = Kind::Extrapolate;
    } else {
        throw ConfigError("unknown time strategy: " + name);
    }
    return s;
}

std::string TimeStrategy::name() const {
    switch (kind) {
        case Kind::LastFactor: return "last";
        case Kind::LastN: return "last-n";
        case Kind::DropTime: return "drop-time";
        case Kind::Extrapolate: return "extrapolate";
    }
    return "unknown";
}

Vector effective_basis_row(const FactorModel& model, const TimeStrategy& strategy, double t) {
    if (!has_fit_representation(model.kind)) {
        throw StrategyUnsupported("effective_basis_row: model has no polynomial fit");
    }
    const LegendreBasis basis(model.cfg.r);
    switch (strategy.kind) {
        case TimeStrategy::Kind::LastFactor:
            return eval_row(basis, 1.0);
        case TimeStrategy::Kind::LastN: {
            // Trailing bin centers of a virtual 1-day grid ending at t=1.
            const double day = 2.0 * static_cast<double>(kSecondsPerDay) /
                               static_cast<double>(model.t_max - model.t_min);
            Vector row = Vector::Zero(basis.order);
            for (int j = 0; j < strategy.n; ++j) {
                row += eval_row(basis, 1.0 - (j + 0.5) * day);
            }
            return row / static_cast<double>(strategy.n);
        }
        case TimeStrategy::Kind::DropTime: {
            // Basis functions of degree > 0 average to zero over [-1, 1].
            Vector row = Vector::Zero(basis.order);
            row[0] = 1.0;
            return row;
        }
        case TimeStrategy::Kind::Extrapolate:
            return eval_row(basis, t);
    }
    throw ConfigError("effective_basis_row: unknown strategy");
}

Vector effective_time_factor(const FactorModel& model, const TimeStrategy& strategy, double t) {
    if (model.kind == ModelKind::ITALS || model.kind == ModelKind::ITALSX) {
        const int l = model.n_bins;
        switch (strategy.kind) {
            case TimeStrategy::Kind::LastFactor:
                return model.B.row(l - 1).transpose();
            case TimeStrategy::Kind::LastN: {
                const int n = std::min(strategy.n, l);
                return model.B.bottomRows(n).colwise().mean().transpose();
            }
            case TimeStrategy::Kind::DropTime:
                return model.B.colwise().mean().transpose();
            case TimeStrategy::Kind::Extrapolate:
                throw StrategyUnsupported(
                    "effective_time_factor: binned factors cannot extrapolate");
        }
    }
    if (model.kind == ModelKind::DTF || model.kind == ModelKind::DTF_KERNEL) {
        return model.A.transpose() * effective_basis_row(model, strategy, t);
    }
    if (model.kind == ModelKind::DMF) {
        throw StrategyUnsupported(
            "effective_time_factor: per-item fits have no single time factor");
    }
    throw StrategyUnsupported("effective_time_factor: model has no time representation");
}

}  // namespace tempo
