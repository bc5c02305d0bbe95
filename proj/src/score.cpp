#include "tempo/models.hpp"

namespace tempo {

namespace {

void check_item(const FactorModel& model, int item) {
    if (item < 0 || item >= model.n_items()) {
        throw IndexOutOfRange("score: item index " + std::to_string(item) + " out of range");
    }
}

void check_user(const FactorModel& model, int user) {
    if (model.kind == ModelKind::TRENDING) {
        if (user < 0) throw IndexOutOfRange("score: negative user index");
        return;
    }
    const int m = model.kind == ModelKind::EASE ? static_cast<int>(model.ease_histories.size())
                                                : static_cast<int>(model.P.rows());
    if (user < 0 || user >= m) {
        throw IndexOutOfRange("score: user index " + std::to_string(user) + " out of range");
    }
}

}  // namespace

double score(const FactorModel& model, int user, int item, double t) {
    check_user(model, user);
    check_item(model, item);
    switch (model.kind) {
        case ModelKind::WMF:
            return model.P.row(user).dot(model.Q.row(item));
        case ModelKind::ITALS: {
            const int b = model.bin_index(t);
            return model.P.row(user).cwiseProduct(model.Q.row(item)).dot(model.B.row(b));
        }
        case ModelKind::ITALSX: {
            const int b = model.bin_index(t);
            return model.P.row(user).dot(model.Q.row(item)) +
                   model.P.row(user).dot(model.B.row(b)) +
                   model.Q.row(item).dot(model.B.row(b));
        }
        case ModelKind::EASE: {
            double s = 0.0;
            for (int j : model.ease_histories[user]) {
                s += model.ease_b(j, item);
            }
            return s;
        }
        case ModelKind::TRENDING:
            return model.trending_counts[item];
        case ModelKind::DTF:
        case ModelKind::DTF_KERNEL: {
            const Vector bt = model.A.transpose() *
                              eval_row(LegendreBasis(static_cast<int>(model.A.rows())), t);
            return model.P.row(user).cwiseProduct(model.Q.row(item)).dot(bt.transpose());
        }
        case ModelKind::DMF: {
            const Vector row = eval_row(LegendreBasis(static_cast<int>(model.item_fits[item].rows())), t);
            const RowVector qt = row.transpose() * model.item_fits[item];
            return model.P.row(user).dot(qt);
        }
    }
    throw ConfigError("score: unknown model kind");
}

Vector score_all_items(const FactorModel& model, int user, double t) {
    check_user(model, user);
    switch (model.kind) {
        case ModelKind::WMF:
            return model.Q * model.P.row(user).transpose();
        case ModelKind::ITALS:
            return score_all_items_with_factor(model, user, model.B.row(model.bin_index(t)).transpose());
        case ModelKind::ITALSX:
            return score_all_items_with_factor(model, user, model.B.row(model.bin_index(t)).transpose());
        case ModelKind::EASE: {
            Vector s = Vector::Zero(model.ease_b.cols());
            for (int j : model.ease_histories[user]) {
                s += model.ease_b.row(j).transpose();
            }
            return s;
        }
        case ModelKind::TRENDING:
            return model.trending_counts;
        case ModelKind::DTF:
        case ModelKind::DTF_KERNEL:
        case ModelKind::DMF: {
            const LegendreBasis basis(model.kind == ModelKind::DMF
                                          ? static_cast<int>(model.item_fits[0].rows())
                                          : static_cast<int>(model.A.rows()));
            return score_all_items_with_row(model, user, eval_row(basis, t));
        }
    }
    throw ConfigError("score_all_items: unknown model kind");
}

Vector score_all_items_with_row(const FactorModel& model, int user, const Vector& basis_row) {
    check_user(model, user);
    switch (model.kind) {
        case ModelKind::DTF:
        case ModelKind::DTF_KERNEL: {
            const Vector bt = model.A.transpose() * basis_row;
            return model.Q * model.P.row(user).transpose().cwiseProduct(bt);
        }
        case ModelKind::DMF: {
            Vector s(static_cast<Eigen::Index>(model.item_fits.size()));
            const Vector pu = model.P.row(user).transpose();
            for (std::size_t i = 0; i < model.item_fits.size(); ++i) {
                s[static_cast<Eigen::Index>(i)] =
                    (basis_row.transpose() * model.item_fits[i]).dot(pu);
            }
            return s;
        }
        default:
            throw StrategyUnsupported("score_all_items_with_row: model has no polynomial fit");
    }
}

Vector score_all_items_with_factor(const FactorModel& model, int user, const Vector& time_factor) {
    check_user(model, user);
    switch (model.kind) {
        case ModelKind::ITALS:
            return model.Q * model.P.row(user).transpose().cwiseProduct(time_factor);
        case ModelKind::ITALSX: {
            const Vector pu = model.P.row(user).transpose();
            const double offset = pu.dot(time_factor);
            return (model.Q * (pu + time_factor)).array() + offset;
        }
        case ModelKind::DTF:
        case ModelKind::DTF_KERNEL:
            return model.Q * model.P.row(user).transpose().cwiseProduct(time_factor);
        default:
            throw StrategyUnsupported("score_all_items_with_factor: model has no time factors");
    }
}

}  // namespace tempo
