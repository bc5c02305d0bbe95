#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tempo/adaptations.hpp"
#include "tempo/dataset.hpp"
#include "tempo/models.hpp"

namespace tempo {

struct RankedList {
    int user = 0;
    std::vector<int> ranked_items;  // descending score, ties by ascending index
};

// Prediction-time settings applied on top of a trained model.
struct AdaptationSettings {
    std::optional<TimeStrategy> strategy;  // none: score at the raw time t
    std::optional<PopularityScaler> scaler;
};

// Scores every candidate item for one user, applies the strategy and the
// popularity scaling, sorts. Items from the user's training history are
// removed when exclude_seen is set.
RankedList rank_items(const FactorModel& model, const AdaptationSettings& adaptations,
                      const EventLog& train, int user, double t, bool exclude_seen = true);

// 1-based rank of `item`, or 0 when not present.
int rank_of(const RankedList& list, int item);

// Single-relevant-item metrics; ranks are 1-based and IDCG is 1.
double ndcg_at_k(const RankedList& list, int heldout, int k);
double mrr_at_k(const RankedList& list, int heldout, int k);
double recall_at_k(const RankedList& list, int heldout, int k);

struct MetricKs {
    int ndcg = 50;
    int mrr = 20;
    int recall = 20;
};

struct EvalReport {
    MetricKs ks;
    std::vector<int> users;  // testable users, ascending
    std::vector<double> ndcg;
    std::vector<double> mrr;
    std::vector<double> recall;
    double ndcg_mean = 0.0, mrr_mean = 0.0, recall_mean = 0.0;
    double ndcg_ci = 0.0, mrr_ci = 0.0, recall_ci = 0.0;  // t-based 95% half-widths
};

// Half-width of the 95% Student-t confidence interval on the mean.
double student_t_ci_halfwidth(const std::vector<double>& values);

// Fills the aggregate fields from the per-user arrays.
void aggregate_report(EvalReport& report);

// Leave-one-out evaluation over all testable users of the split.
EvalReport evaluate(const FactorModel& model, const AdaptationSettings& adaptations,
                    const TemporalSplit& split, const MetricKs& ks = {},
                    bool exclude_seen = true, int threads = 1);

struct ReportRow {
    std::string name;
    EvalReport report;
};

void write_report_csv(const std::vector<ReportRow>& rows, const std::string& path);
void write_report_json(const std::vector<ReportRow>& rows, const std::string& path,
                       bool include_per_user = false);

}  // namespace tempo
