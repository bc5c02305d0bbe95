#include "tempo/models.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "model_internal.hpp"

namespace tempo {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::WMF: return "wmf";
        case ModelKind::ITALS: return "itals";
        case ModelKind::ITALSX: return "italsx";
        case ModelKind::EASE: return "ease";
        case ModelKind::TRENDING: return "trending";
        case ModelKind::DTF: return "dtf";
        case ModelKind::DTF_KERNEL: return "dtf-kernel";
        case ModelKind::DMF: return "dmf";
    }
    return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "wmf") return ModelKind::WMF;
    if (name == "itals") return ModelKind::ITALS;
    if (name == "italsx") return ModelKind::ITALSX;
    if (name == "ease") return ModelKind::EASE;
    if (name == "trending") return ModelKind::TRENDING;
    if (name == "dtf") return ModelKind::DTF;
    if (name == "dtf-kernel" || name == "dtfkernel") return ModelKind::DTF_KERNEL;
    if (name == "dmf") return ModelKind::DMF;
    throw ConfigError("unknown model kind: " + name);
}

bool has_time_representation(ModelKind kind) {
    return kind == ModelKind::ITALS || kind == ModelKind::ITALSX || kind == ModelKind::DTF ||
           kind == ModelKind::DTF_KERNEL || kind == ModelKind::DMF;
}

bool has_fit_representation(ModelKind kind) {
    return kind == ModelKind::DTF || kind == ModelKind::DTF_KERNEL || kind == ModelKind::DMF;
}

void TrainConfig::validate() const {
    if (k < 1) throw ConfigError("k must be >= 1");
    if (r < 1) throw ConfigError("r must be >= 1");
    if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
    if (!(lambda > 0.0)) throw ConfigError("lambda must be > 0");
    if (lambda_a < 0.0) throw ConfigError("lambda_a must be >= 0");
    if (iterations < 0) throw ConfigError("iterations must be >= 0");
    if (!(bin_days > 0.0)) throw ConfigError("bin_days must be > 0");
    if (half_life_days && !(*half_life_days > 0.0)) throw ConfigError("half_life must be > 0");
    if (cg_max_iter < 1) throw ConfigError("cg_max_iter must be >= 1");
    if (kernel_samples < 2) throw ConfigError("kernel_samples must be >= 2");
}

int FactorModel::n_users() const {
    if (kind == ModelKind::EASE) return static_cast<int>(ease_histories.size());
    if (kind == ModelKind::TRENDING) return -1;  // user-independent
    return static_cast<int>(P.rows());
}

int FactorModel::n_items() const {
    switch (kind) {
        case ModelKind::EASE: return static_cast<int>(ease_b.rows());
        case ModelKind::TRENDING: return static_cast<int>(trending_counts.size());
        case ModelKind::DMF: return static_cast<int>(item_fits.size());
        default: return static_cast<int>(Q.rows());
    }
}

int FactorModel::bin_index(double t) const {
    // Invert the affine normalization, then clamp to the trained bins.
    const double raw = (t + 1.0) * 0.5 * static_cast<double>(t_max - t_min);
    const auto b = static_cast<long>(std::floor(raw / static_cast<double>(bin_seconds)));
    return static_cast<int>(std::clamp<long>(b, 0, n_bins - 1));
}

Vector event_weights(const EventLog& log, double alpha, std::optional<double> half_life_days) {
    if (!(alpha > 0.0)) throw ConfigError("event_weights: alpha must be > 0");
    const auto n = static_cast<Eigen::Index>(log.events().size());
    if (!half_life_days) {
        return Vector::Constant(n, alpha);
    }
    if (!(*half_life_days > 0.0)) throw ConfigError("event_weights: half_life must be > 0");
    const double half_life = *half_life_days * kSecondsPerDay;
    Vector w(n);
    for (Eigen::Index e = 0; e < n; ++e) {
        const double age = static_cast<double>(log.t_max() - log.events()[e].ts);
        w[e] = alpha * std::pow(0.5, age / half_life);
    }
    return w;
}

namespace detail {

Matrix gaussian_init(int rows, int cols, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(static_cast<double>(cols)));
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            m(i, j) = dist(rng);
        }
    }
    return m;
}

Matrix fit_init(int r, int k, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(static_cast<double>(k)));
    Matrix a = Matrix::Zero(r, k);
    for (int j = 0; j < k; ++j) {
        a(0, j) = dist(rng);
    }
    return a;
}

namespace {

// Deduplicates cells keyed by (row, other, aux); the latest event wins, which
// the sorted event order makes an overwrite.
CellLists dedup_cells(int n_rows,
                      const std::vector<std::tuple<int, int, int, double>>& entries) {
    std::vector<std::unordered_map<long, int>> slots(n_rows);
    CellLists lists(n_rows);
    for (const auto& [row, other, aux, w] : entries) {
        const long key = static_cast<long>(other) * 1000003L + aux;
        auto [it, inserted] = slots[row].try_emplace(key, static_cast<int>(lists[row].size()));
        if (inserted) {
            lists[row].push_back(Cell{other, aux, w});
        } else {
            lists[row][it->second].w = w;
        }
    }
    return lists;
}

}  // namespace

MatrixCells build_matrix_cells(const EventLog& log, const Vector& weights) {
    std::vector<std::tuple<int, int, int, double>> by_user;
    std::vector<std::tuple<int, int, int, double>> by_item;
    by_user.reserve(log.events().size());
    by_item.reserve(log.events().size());
    for (int e = 0; e < static_cast<int>(log.events().size()); ++e) {
        const Event& ev = log.events()[e];
        by_user.emplace_back(ev.user, ev.item, 0, weights[e]);
        by_item.emplace_back(ev.item, ev.user, 0, weights[e]);
    }
    MatrixCells cells;
    cells.by_user = dedup_cells(log.n_users(), by_user);
    cells.by_item = dedup_cells(log.n_items(), by_item);
    return cells;
}

TensorCells build_tensor_cells(const EventLog& log, const BinnedLog& binned,
                               const Vector& weights) {
    std::vector<std::tuple<int, int, int, double>> by_user;
    std::vector<std::tuple<int, int, int, double>> by_item;
    std::vector<std::tuple<int, int, int, double>> by_bin;
    for (int e = 0; e < static_cast<int>(log.events().size()); ++e) {
        const Event& ev = log.events()[e];
        const int b = binned.bins[e];
        by_user.emplace_back(ev.user, ev.item, b, weights[e]);
        by_item.emplace_back(ev.item, ev.user, b, weights[e]);
        by_bin.emplace_back(b, ev.user, ev.item, weights[e]);
    }
    TensorCells cells;
    cells.by_user = dedup_cells(log.n_users(), by_user);
    cells.by_item = dedup_cells(log.n_items(), by_item);
    cells.by_bin = dedup_cells(binned.n_bins, by_bin);
    return cells;
}

ContinuousCells build_continuous_cells(const EventLog& log, const LegendreBasis& basis,
                                       const Vector& weights) {
    ContinuousCells cells;
    const int p = static_cast<int>(log.events().size());
    cells.times.resize(p);
    cells.basis_rows.resize(p, basis.order);
    cells.weights = weights;
    cells.by_user.resize(log.n_users());
    cells.by_item.resize(log.n_items());
    for (int e = 0; e < p; ++e) {
        const Event& ev = log.events()[e];
        cells.times[e] = normalize_time(log, ev.ts);
        cells.basis_rows.row(e) = eval_row(basis, cells.times[e]).transpose();
        cells.by_user[ev.user].push_back(Cell{ev.item, e, weights[e]});
        cells.by_item[ev.item].push_back(Cell{ev.user, e, weights[e]});
    }
    return cells;
}

}  // namespace detail

FactorModel train_model(ModelKind kind, const EventLog& log, const TrainConfig& cfg,
                        const BlockCallback& on_block) {
    switch (kind) {
        case ModelKind::WMF: return train_wmf(log, cfg, on_block);
        case ModelKind::ITALS: return train_itals(log, cfg, on_block);
        case ModelKind::ITALSX: return train_italsx(log, cfg, on_block);
        case ModelKind::EASE: return train_ease(log, cfg.lambda, cfg.ease_item_cap);
        case ModelKind::TRENDING: return train_trending(log, cfg.trending_window_days);
        case ModelKind::DTF: return train_dtf(log, cfg, on_block);
        case ModelKind::DTF_KERNEL: return train_dtf_kernel(log, cfg, on_block);
        case ModelKind::DMF: return train_dmf(log, cfg, on_block);
    }
    throw ConfigError("train_model: unknown kind");
}

}  // namespace tempo
