#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tempo/dataset.hpp"
#include "tempo/legendre.hpp"
#include "tempo/tensor_core.hpp"

namespace tempo {

enum class ModelKind { WMF, ITALS, ITALSX, EASE, TRENDING, DTF, DTF_KERNEL, DMF };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);
bool has_time_representation(ModelKind kind);
bool has_fit_representation(ModelKind kind);

struct TrainConfig {
    int k = 8;               // embedding dimension
    int r = 4;               // number of basis functions (fit degree r-1)
    double alpha = 10.0;     // positive-event weight
    double lambda = 1.0;     // ridge strength
    double lambda_a = 0.0;   // extra ridge on fit coefficients
    double sigma = 0.1;      // kernel width in normalized time units
    double bin_days = 1.0;   // bin length for binned models
    double trending_window_days = 7.0;
    int iterations = 10;
    std::uint64_t seed = 42;
    // Per tensor dimension: regularize factors toward ones instead of zeros.
    bool default_user = false;
    bool default_item = false;
    bool default_time = false;
    std::optional<double> half_life_days;  // decay weighting when set
    int threads = 1;                       // 0 = hardware concurrency
    double cg_tol = 1e-8;
    int cg_max_iter = 200;
    int kernel_samples = 1000;
    int ease_item_cap = 40000;
    std::int64_t dmf_max_elements = std::int64_t{1} << 28;

    void validate() const;  // throws ConfigError
};

// A trained model: embeddings plus whatever the kind needs to score, and the
// time-normalization anchors it was trained with.
struct FactorModel {
    ModelKind kind = ModelKind::WMF;
    TrainConfig cfg;
    std::int64_t t_min = 0;
    std::int64_t t_max = 0;

    Matrix P;  // users x k
    Matrix Q;  // items x k
    Matrix B;  // binned time factors, n_bins x k (iTALS / iTALSx)
    Matrix A;  // fit coefficients, r x k (DTF / DTFKernel)
    std::vector<Matrix> item_fits;  // one r x k per item (DMF)
    Matrix ease_b;                  // items x items (EASE)
    Vector trending_counts;
    std::vector<std::vector<int>> ease_histories;  // per-user trained items (EASE)

    std::int64_t bin_seconds = 0;
    int n_bins = 0;

    int n_users() const;
    int n_items() const;
    double normalize(std::int64_t ts) const { return normalize_time(t_min, t_max, ts); }
    int bin_index(double t) const;  // normalized time -> clamped bin
};

enum class Block { Users, Items, Time, Fit };

// Invoked after every block update; `iteration` counts sweeps from 0.
using BlockCallback = std::function<void(Block, int iteration, const FactorModel&)>;

// Per-event positive weights, aligned with log.events(). Uniform alpha, or
// alpha halved every half_life when a half-life is given.
Vector event_weights(const EventLog& log, double alpha, std::optional<double> half_life_days);

FactorModel train_wmf(const EventLog& log, const TrainConfig& cfg,
                      const BlockCallback& on_block = {}, const FactorModel* init = nullptr);
FactorModel train_itals(const EventLog& log, const TrainConfig& cfg,
                        const BlockCallback& on_block = {}, const FactorModel* init = nullptr);
FactorModel train_italsx(const EventLog& log, const TrainConfig& cfg,
                         const BlockCallback& on_block = {}, const FactorModel* init = nullptr);
FactorModel train_ease(const EventLog& log, double lambda, int item_cap = 40000);
FactorModel train_trending(const EventLog& log, double window_days);
FactorModel train_dtf(const EventLog& log, const TrainConfig& cfg,
                      const BlockCallback& on_block = {}, const FactorModel* init = nullptr);
FactorModel train_dtf_kernel(const EventLog& log, const TrainConfig& cfg,
                             const BlockCallback& on_block = {}, const FactorModel* init = nullptr);
FactorModel train_dmf(const EventLog& log, const TrainConfig& cfg,
                      const BlockCallback& on_block = {}, const FactorModel* init = nullptr);

FactorModel train_model(ModelKind kind, const EventLog& log, const TrainConfig& cfg,
                        const BlockCallback& on_block = {});

// Prediction for one (user, item) at normalized time t. Time-free kinds
// ignore t; binned kinds clamp t to the training bins.
double score(const FactorModel& model, int user, int item, double t);

// Scores for all items of one user at once; identical values to score().
Vector score_all_items(const FactorModel& model, int user, double t);

// Scores with the time representation overridden: basis_row replaces C_t for
// fit models, time_factor replaces B_t for binned models.
Vector score_all_items_with_row(const FactorModel& model, int user, const Vector& basis_row);
Vector score_all_items_with_factor(const FactorModel& model, int user, const Vector& time_factor);

// The exact training objective of the model on `log`, evaluated in closed
// form (implicit terms via Gram identities, limit terms via the analytic
// basis Gram). Used for convergence logging and the monotonicity tests.
double training_loss(const FactorModel& model, const EventLog& log);

void save_checkpoint(const FactorModel& model, const std::string& path);
FactorModel load_checkpoint(const std::string& path);

}  // namespace tempo
