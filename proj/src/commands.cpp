#include "tempo/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>

#include <json.hpp>

namespace tempo {

namespace fs = std::filesystem;

namespace {

std::string out_path(const RunConfig& config, const std::string& name) {
    fs::create_directories(config.output_dir);
    return (fs::path(config.output_dir) / name).string();
}

EventLog load_dataset(const RunConfig& config) {
    if (config.dataset.empty()) throw ConfigError("no dataset given");
    return ingest_csv(config.dataset);
}

EventLog restrict_to_cutoff(const EventLog& log, std::int64_t cutoff) {
    std::vector<Event> kept;
    for (const Event& e : log.events()) {
        if (e.ts <= cutoff) kept.push_back(e);
    }
    if (kept.empty()) throw EmptyDataset("no events at or before the cutoff");
    return EventLog::build(std::move(kept), log.user_ids(), log.item_ids());
}

std::string run_label(const RunConfig& config, const FactorModel& model) {
    std::string label = to_string(model.kind);
    if (config.strategy != "raw" && has_time_representation(model.kind)) {
        label += "+" + config.strategy;
    }
    if (config.nu) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", *config.nu);
        label += "+pop(nu=" + std::string(buf) + ")";
    }
    return label;
}

// Loss logging is worthwhile at desk scale; the kernel variant recomputes
// per-event moments, so skip it for large logs.
bool loss_loggable(const FactorModel& model, const EventLog& log) {
    if (model.kind == ModelKind::EASE || model.kind == ModelKind::TRENDING) return false;
    return log.events().size() <= 1000000;
}

FactorModel train_with_logging(const RunConfig& config, const EventLog& train_log,
                               std::ostream& out) {
    const ModelKind kind = model_kind_from_string(config.model);
    using clock = std::chrono::steady_clock;
    auto iter_start = clock::now();
    int last_iteration = -1;

    const Block final_block = [&] {
        switch (kind) {
            case ModelKind::WMF: return Block::Items;
            case ModelKind::ITALS:
            case ModelKind::ITALSX: return Block::Time;
            default: return Block::Fit;
        }
    }();

    BlockCallback logger = [&](Block block, int iteration, const FactorModel& model) {
        if (block != final_block) return;
        const double ms =
            std::chrono::duration<double, std::milli>(clock::now() - iter_start).count();
        out << "iteration " << iteration + 1 << "/" << config.train.iterations << "  "
            << ms << " ms";
        if (loss_loggable(model, train_log)) {
            out << "  loss " << training_loss(model, train_log);
        }
        out << '\n';
        last_iteration = iteration;
        iter_start = clock::now();
    };

    return train_model(kind, train_log, config.train, logger);
}

}  // namespace

void cmd_ingest(const RunConfig& config, std::ostream& out) {
    EventLog log = load_dataset(config);
    const std::size_t raw_events = log.events().size();
    if (config.min_user_count > 1 || config.min_item_count > 1) {
        log = filter_min_counts(log, config.min_user_count, config.min_item_count);
    }
    export_csv(log, out_path(config, "events.csv"));
    export_id_mapping_csv(log, out_path(config, "mapping.csv"));

    nlohmann::json stats;
    stats["events"] = log.events().size();
    stats["events_before_filter"] = raw_events;
    stats["users"] = log.n_users();
    stats["items"] = log.n_items();
    stats["t_min"] = log.t_min();
    stats["t_max"] = log.t_max();
    std::ofstream stats_out(out_path(config, "stats.json"));
    stats_out << stats.dump(2) << '\n';

    out << "ingested " << log.events().size() << " events, " << log.n_users() << " users, "
        << log.n_items() << " items\n";
}

void cmd_split(const RunConfig& config, std::ostream& out) {
    if (!config.cutoff) throw ConfigError("split requires a cutoff");
    const EventLog log = load_dataset(config);
    const TemporalSplit split = temporal_split(log, *config.cutoff);

    nlohmann::json manifest;
    manifest["cutoff"] = split.cutoff;
    manifest["train_events"] = split.train.events().size();
    manifest["train_users"] = split.train.n_users();
    manifest["train_items"] = split.train.n_items();
    manifest["testable_users"] = split.n_testable;
    std::ofstream manifest_out(out_path(config, "split.json"));
    manifest_out << manifest.dump(2) << '\n';

    out << "split at " << split.cutoff << ": " << split.train.events().size()
        << " train events, " << split.n_testable << " testable users\n";
}

void cmd_synth(const RunConfig& config, std::ostream& out) {
    const SynthResult result = generate(config.synth);
    export_csv(result.log, out_path(config, "events.csv"));
    write_ground_truth_json(result, out_path(config, "ground_truth.json"));
    out << "generated " << result.log.events().size() << " events over "
        << result.log.n_items() << " items\n";
}

void cmd_train(const RunConfig& config, std::ostream& out) {
    config.validate_cutoffs();
    config.train.validate();
    EventLog log = load_dataset(config);
    if (config.cutoff) {
        if (!(*config.cutoff > log.t_min())) {
            throw ConfigError("training cutoff precedes all data");
        }
        log = restrict_to_cutoff(log, *config.cutoff);
    }

    const auto start = std::chrono::steady_clock::now();
    const FactorModel model = train_with_logging(config, log, out);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const std::string path = out_path(config, "model.ckpt");
    save_checkpoint(model, path);
    out << "trained " << to_string(model.kind) << " in " << seconds << " s, checkpoint at "
        << path << '\n';
}

void cmd_evaluate(const RunConfig& config, std::ostream& out) {
    if (config.checkpoint.empty()) throw ConfigError("evaluate requires a checkpoint");
    if (!config.cutoff) throw ConfigError("evaluate requires a cutoff");
    const FactorModel model = load_checkpoint(config.checkpoint);
    if (model.t_max > *config.cutoff) {
        throw CutoffMismatch("checkpoint was trained on events after the evaluation cutoff");
    }

    const EventLog log = load_dataset(config);
    const TemporalSplit split = temporal_split(log, *config.cutoff);
    if (model.n_items() != split.train.n_items()) {
        throw DataError("checkpoint item count does not match the training split");
    }

    const AdaptationSettings adaptations = config.adaptations(split.train);
    const EvalReport report = evaluate(model, adaptations, split, config.metrics,
                                       config.exclude_seen, config.train.threads);

    std::vector<ReportRow> rows = {{run_label(config, model), report}};
    write_report_csv(rows, out_path(config, "report.csv"));
    write_report_json(rows, out_path(config, "report.json"), /*include_per_user=*/true);

    out << rows[0].name << ": NDCG@" << config.metrics.ndcg << " = " << report.ndcg_mean
        << " +- " << report.ndcg_ci << " (" << report.users.size() << " users)\n";
}

namespace {

struct GridPoint {
    std::vector<std::pair<std::string, std::string>> assignments;
};

std::vector<GridPoint> build_grid(const RunConfig& config) {
    std::vector<GridPoint> grid = {GridPoint{}};
    for (const auto& [key, values] : config.sweep) {
        if (values.empty()) throw ConfigError("sweep grid for '" + key + "' is empty");
        std::vector<GridPoint> next;
        next.reserve(grid.size() * values.size());
        for (const GridPoint& point : grid) {
            for (const std::string& value : values) {
                GridPoint extended = point;
                extended.assignments.emplace_back(key, value);
                next.push_back(std::move(extended));
            }
        }
        grid = std::move(next);
    }
    return grid;
}

std::string grid_point_label(const GridPoint& point) {
    std::string label;
    for (const auto& [key, value] : point.assignments) {
        if (!label.empty()) label += ' ';
        label += key + "=" + value;
    }
    return label.empty() ? "(default)" : label;
}

}  // namespace

void cmd_sweep(const RunConfig& config, std::ostream& out) {
    if (config.sweep.empty()) throw ConfigError("sweep requires at least one sweep.<key> grid");
    if (!config.validation_cutoff || !config.test_cutoff) {
        throw ConfigError("sweep requires validation_cutoff and test_cutoff");
    }
    config.validate_cutoffs();

    const EventLog log = load_dataset(config);
    std::vector<GridPoint> grid = build_grid(config);
    if (config.sweep_samples && *config.sweep_samples < static_cast<int>(grid.size())) {
        std::mt19937_64 rng(config.train.seed);
        std::shuffle(grid.begin(), grid.end(), rng);
        grid.resize(*config.sweep_samples);
    }

    const TemporalSplit val_split = temporal_split(log, *config.validation_cutoff);

    struct Entry {
        std::string label;
        EvalReport report;
        RunConfig config;
    };
    std::vector<Entry> entries;
    for (const GridPoint& point : grid) {
        RunConfig point_config = config;
        for (const auto& [key, value] : point.assignments) {
            apply_config_key(point_config, key, value);
        }
        point_config.train.validate();
        const ModelKind kind = model_kind_from_string(point_config.model);
        const FactorModel model = train_model(kind, val_split.train, point_config.train);
        const AdaptationSettings adaptations = point_config.adaptations(val_split.train);
        const EvalReport report = evaluate(model, adaptations, val_split, config.metrics,
                                           config.exclude_seen, config.train.threads);
        out << grid_point_label(point) << ": val NDCG@" << config.metrics.ndcg << " = "
            << report.ndcg_mean << '\n';
        entries.push_back(Entry{grid_point_label(point), report, std::move(point_config)});
    }

    std::vector<int> order(entries.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return entries[a].report.ndcg_mean > entries[b].report.ndcg_mean;
    });

    {
        std::ofstream board(out_path(config, "leaderboard.csv"));
        board << "rank,params,NDCG@" << config.metrics.ndcg << ",MRR@" << config.metrics.mrr
              << ",Recall@" << config.metrics.recall << '\n';
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            const Entry& entry = entries[order[pos]];
            board << pos + 1 << ",\"" << entry.label << "\"," << entry.report.ndcg_mean << ','
                  << entry.report.mrr_mean << ',' << entry.report.recall_mean << '\n';
        }
    }

    // Retrain the winner on everything before the test cutoff.
    const Entry& best = entries[order.front()];
    out << "winner: " << best.label << '\n';
    const TemporalSplit test_split = temporal_split(log, *config.test_cutoff);
    const ModelKind kind = model_kind_from_string(best.config.model);
    const FactorModel final_model = train_model(kind, test_split.train, best.config.train);
    const AdaptationSettings adaptations = best.config.adaptations(test_split.train);
    const EvalReport test_report = evaluate(final_model, adaptations, test_split, config.metrics,
                                            config.exclude_seen, config.train.threads);

    save_checkpoint(final_model, out_path(config, "best.ckpt"));
    std::vector<ReportRow> rows = {{best.label, test_report}};
    write_report_csv(rows, out_path(config, "test_result.csv"));
    out << "test NDCG@" << config.metrics.ndcg << " = " << test_report.ndcg_mean << " +- "
        << test_report.ndcg_ci << '\n';
}

void cmd_export_curves(const RunConfig& config, std::ostream& out) {
    if (config.checkpoint.empty()) throw ConfigError("export-curves requires a checkpoint");
    if (config.grid_points < 2) throw ConfigError("export-curves needs at least 2 grid points");
    const FactorModel model = load_checkpoint(config.checkpoint);
    if (!has_time_representation(model.kind)) {
        throw StrategyUnsupported("export-curves: " + to_string(model.kind) +
                                  " has no time representation");
    }

    std::vector<int> items = config.curve_items;
    if (items.empty()) {
        for (int i = 0; i < model.n_items(); ++i) items.push_back(i);
    }

    const std::string path = out_path(config, "curves.csv");
    std::ofstream curves(path);
    curves << "t";
    for (int i : items) curves << ",item_" << i;
    curves << '\n';
    char buf[32];
    for (int g = 0; g < config.grid_points; ++g) {
        const double t = -1.0 + 2.0 * g / (config.grid_points - 1.0);
        std::snprintf(buf, sizeof(buf), "%.10g", t);
        curves << buf;
        for (int i : items) {
            std::snprintf(buf, sizeof(buf), "%.17g", score(model, config.curve_user, i, t));
            curves << ',' << buf;
        }
        curves << '\n';
    }
    out << "wrote " << path << " (" << config.grid_points << " points, " << items.size()
        << " items)\n";
}

}  // namespace tempo
