#include "tempo/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

#include "tempo/parallel.hpp"

namespace tempo {

namespace {

Vector scores_for(const FactorModel& model, const AdaptationSettings& adaptations, int user,
                  double t) {
    if (!adaptations.strategy || !has_time_representation(model.kind)) {
        return score_all_items(model, user, t);
    }
    const TimeStrategy& strategy = *adaptations.strategy;
    if (model.kind == ModelKind::DMF) {
        return score_all_items_with_row(model, user, effective_basis_row(model, strategy, t));
    }
    return score_all_items_with_factor(model, user,
                                       effective_time_factor(model, strategy, t));
}

}  // namespace

RankedList rank_items(const FactorModel& model, const AdaptationSettings& adaptations,
                      const EventLog& train, int user, double t, bool exclude_seen) {
    Vector scores = scores_for(model, adaptations, user, t);
    if (adaptations.scaler) {
        apply_popularity_scaling(scores, *adaptations.scaler);
    }

    std::vector<char> skip(scores.size(), 0);
    if (exclude_seen && user < train.n_users()) {
        for (int idx : train.user_histories()[user]) {
            skip[train.events()[idx].item] = 1;
        }
    }

    RankedList list;
    list.user = user;
    list.ranked_items.reserve(scores.size());
    for (int i = 0; i < static_cast<int>(scores.size()); ++i) {
        if (!skip[i]) list.ranked_items.push_back(i);
    }
    std::stable_sort(list.ranked_items.begin(), list.ranked_items.end(), [&](int a, int b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    return list;
}

int rank_of(const RankedList& list, int item) {
    for (int pos = 0; pos < static_cast<int>(list.ranked_items.size()); ++pos) {
        if (list.ranked_items[pos] == item) return pos + 1;
    }
    return 0;
}

double ndcg_at_k(const RankedList& list, int heldout, int k) {
    const int rank = rank_of(list, heldout);
    if (rank == 0 || rank > k) return 0.0;
    return 1.0 / std::log2(rank + 1.0);
}

double mrr_at_k(const RankedList& list, int heldout, int k) {
    const int rank = rank_of(list, heldout);
    if (rank == 0 || rank > k) return 0.0;
    return 1.0 / rank;
}

double recall_at_k(const RankedList& list, int heldout, int k) {
    const int rank = rank_of(list, heldout);
    return (rank != 0 && rank <= k) ? 1.0 : 0.0;
}

double student_t_ci_halfwidth(const std::vector<double>& values) {
    const auto n = static_cast<double>(values.size());
    if (values.size() < 2) return 0.0;
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    if (sd == 0.0) return 0.0;
    const boost::math::students_t dist(n - 1.0);
    return boost::math::quantile(dist, 0.975) * sd / std::sqrt(n);
}

void aggregate_report(EvalReport& report) {
    auto mean = [](const std::vector<double>& v) {
        return v.empty() ? 0.0
                         : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    report.ndcg_mean = mean(report.ndcg);
    report.mrr_mean = mean(report.mrr);
    report.recall_mean = mean(report.recall);
    report.ndcg_ci = student_t_ci_halfwidth(report.ndcg);
    report.mrr_ci = student_t_ci_halfwidth(report.mrr);
    report.recall_ci = student_t_ci_halfwidth(report.recall);
}

EvalReport evaluate(const FactorModel& model, const AdaptationSettings& adaptations,
                    const TemporalSplit& split, const MetricKs& ks, bool exclude_seen,
                    int threads) {
    EvalReport report;
    report.ks = ks;
    for (int u = 0; u < static_cast<int>(split.heldout.size()); ++u) {
        if (split.heldout[u]) report.users.push_back(u);
    }
    if (report.users.empty()) {
        throw NoTestableUsers("evaluate: split has no testable users");
    }
    const auto n = report.users.size();
    report.ndcg.resize(n);
    report.mrr.resize(n);
    report.recall.resize(n);

    // Per-user work is independent; results land in fixed slots so the
    // aggregation below is order-independent by construction.
    parallel_for(static_cast<long>(n), threads, [&](long idx) {
        const int u = report.users[idx];
        const Event& held = *split.heldout[u];
        const double t = model.normalize(held.ts);
        const RankedList list =
            rank_items(model, adaptations, split.train, u, t, exclude_seen);
        report.ndcg[idx] = ndcg_at_k(list, held.item, ks.ndcg);
        report.mrr[idx] = mrr_at_k(list, held.item, ks.mrr);
        report.recall[idx] = recall_at_k(list, held.item, ks.recall);
    });

    aggregate_report(report);
    return report;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

void write_report_csv(const std::vector<ReportRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("write_report_csv: cannot write " + path);
    if (rows.empty()) {
        out << "Name\n";
        return;
    }
    const MetricKs& ks = rows.front().report.ks;
    out << "Name,NDCG@" << ks.ndcg << ",NDCG@" << ks.ndcg << "_err,MRR@" << ks.mrr << ",MRR@"
        << ks.mrr << "_err,Recall@" << ks.recall << ",Recall@" << ks.recall << "_err,n_users\n";
    for (const ReportRow& row : rows) {
        const EvalReport& r = row.report;
        out << row.name << ',' << fmt(r.ndcg_mean) << ',' << fmt(r.ndcg_ci) << ','
            << fmt(r.mrr_mean) << ',' << fmt(r.mrr_ci) << ',' << fmt(r.recall_mean) << ','
            << fmt(r.recall_ci) << ',' << r.users.size() << '\n';
    }
}

void write_report_json(const std::vector<ReportRow>& rows, const std::string& path,
                       bool include_per_user) {
    nlohmann::json j = nlohmann::json::array();
    for (const ReportRow& row : rows) {
        const EvalReport& r = row.report;
        nlohmann::json entry;
        entry["name"] = row.name;
        entry["n_users"] = r.users.size();
        entry["metrics"]["ndcg@" + std::to_string(r.ks.ndcg)] = {{"mean", r.ndcg_mean},
                                                                 {"ci", r.ndcg_ci}};
        entry["metrics"]["mrr@" + std::to_string(r.ks.mrr)] = {{"mean", r.mrr_mean},
                                                               {"ci", r.mrr_ci}};
        entry["metrics"]["recall@" + std::to_string(r.ks.recall)] = {{"mean", r.recall_mean},
                                                                     {"ci", r.recall_ci}};
        if (include_per_user) {
            entry["per_user"]["user"] = r.users;
            entry["per_user"]["ndcg"] = r.ndcg;
            entry["per_user"]["mrr"] = r.mrr;
            entry["per_user"]["recall"] = r.recall;
        }
        j.push_back(entry);
    }
    std::ofstream out(path);
    if (!out) throw IoError("write_report_json: cannot write " + path);
    out << j.dump(2) << '\n';
}

}  // namespace tempo
