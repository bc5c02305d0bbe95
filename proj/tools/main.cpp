#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tempo/commands.hpp"

namespace {

// Flag values collected as strings and replayed through the config layer, so
// flags and file keys share one parser and flags win.
struct FlagSet {
    std::vector<std::pair<std::string, std::string>> overrides;

    void add(CLI::App* cmd, const std::string& flag, const std::string& key,
             const std::string& help) {
        cmd->add_option_function<std::string>(
            flag, [this, key](const std::string& value) { overrides.emplace_back(key, value); },
            help);
    }
};

void add_common_flags(CLI::App* cmd, FlagSet& flags) {
    flags.add(cmd, "--dataset", "dataset", "event CSV (user_id,item_id,timestamp)");
    flags.add(cmd, "--output-dir", "output_dir", "directory for generated files");
    flags.add(cmd, "--seed", "seed", "RNG seed");
    flags.add(cmd, "--threads", "threads", "worker threads (0 = hardware)");
}

void add_train_flags(CLI::App* cmd, FlagSet& flags) {
    flags.add(cmd, "--model", "model",
              "wmf | itals | italsx | ease | trending | dtf | dtf-kernel | dmf");
    flags.add(cmd, "--k", "k", "embedding dimension");
    flags.add(cmd, "--r", "r", "basis order (fit degree r-1)");
    flags.add(cmd, "--alpha", "alpha", "positive-event weight");
    flags.add(cmd, "--lambda", "lambda", "ridge strength");
    flags.add(cmd, "--lambda-a", "lambda_a", "fit-coefficient ridge");
    flags.add(cmd, "--sigma", "sigma", "kernel width (normalized time)");
    flags.add(cmd, "--bin-days", "bin_days", "bin length in days");
    flags.add(cmd, "--iterations", "iterations", "ALS sweeps");
    flags.add(cmd, "--half-life", "half_life", "decay half-life in days");
    flags.add(cmd, "--trending-window", "trending_window", "trending window in days");
    flags.add(cmd, "--cutoff", "cutoff", "training cutoff (epoch seconds or ISO date)");
}

void add_adaptation_flags(CLI::App* cmd, FlagSet& flags) {
    flags.add(cmd, "--nu", "nu", "popularity-scaling exponent");
    flags.add(cmd, "--local-window", "local_window", "local popularity window in days");
    flags.add(cmd, "--strategy", "strategy", "last | last-n | drop-time | extrapolate | raw");
    flags.add(cmd, "--last-n", "last_n", "window for the last-n strategy");
    flags.add(cmd, "--exclude-seen", "exclude_seen", "drop training items from rankings");
    flags.add(cmd, "--metrics", "metrics", "e.g. ndcg@50,mrr@20,recall@20");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"temporal factorization engine for implicit-feedback event logs"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "flat key = value config file")
        ->expected(1);

    FlagSet flags;

    CLI::App* ingest = app.add_subcommand("ingest", "read, filter and re-export an event log");
    add_common_flags(ingest, flags);
    flags.add(ingest, "--min-user", "min_user_count", "minimum events per user");
    flags.add(ingest, "--min-item", "min_item_count", "minimum events per item");

    CLI::App* split = app.add_subcommand("split", "write a temporal split manifest");
    add_common_flags(split, flags);
    flags.add(split, "--cutoff", "cutoff", "split cutoff (epoch seconds or ISO date)");

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic event log");
    add_common_flags(synth, flags);
    flags.add(synth, "--users", "synth.users", "number of users");
    flags.add(synth, "--items", "synth.items", "number of items");
    flags.add(synth, "--clusters", "synth.clusters", "number of user/item clusters");
    flags.add(synth, "--events", "synth.events", "number of events");
    flags.add(synth, "--duration-days", "synth.duration_days", "time span in days");
    flags.add(synth, "--synth-seed", "synth.seed", "generator seed");

    CLI::App* train = app.add_subcommand("train", "train a model and write a checkpoint");
    add_common_flags(train, flags);
    add_train_flags(train, flags);

    CLI::App* evaluate = app.add_subcommand("evaluate", "evaluate a checkpoint on a split");
    add_common_flags(evaluate, flags);
    add_adaptation_flags(evaluate, flags);
    flags.add(evaluate, "--checkpoint", "checkpoint", "model checkpoint path");
    flags.add(evaluate, "--cutoff", "cutoff", "evaluation cutoff");

    CLI::App* sweep = app.add_subcommand("sweep", "grid search, then retrain the winner");
    add_common_flags(sweep, flags);
    add_train_flags(sweep, flags);
    add_adaptation_flags(sweep, flags);
    flags.add(sweep, "--validation-cutoff", "validation_cutoff", "validation cutoff");
    flags.add(sweep, "--test-cutoff", "test_cutoff", "test cutoff");
    flags.add(sweep, "--sweep-samples", "sweep_samples", "random subsample of the grid");

    CLI::App* curves = app.add_subcommand("export-curves", "score-vs-time CSV for a checkpoint");
    add_common_flags(curves, flags);
    flags.add(curves, "--checkpoint", "checkpoint", "model checkpoint path");
    flags.add(curves, "--user", "user", "user index to score");
    flags.add(curves, "--items", "items", "comma-separated item indices (default: all)");
    flags.add(curves, "--grid-points", "grid_points", "number of time samples");

    CLI11_PARSE(app, argc, argv);

    try {
        tempo::RunConfig config;
        if (!config_path.empty()) {
            config = tempo::load_config_file(config_path);
        }
        for (const auto& [key, value] : flags.overrides) {
            tempo::apply_config_key(config, key, value);
        }

        if (ingest->parsed()) tempo::cmd_ingest(config, std::cout);
        else if (split->parsed()) tempo::cmd_split(config, std::cout);
        else if (synth->parsed()) tempo::cmd_synth(config, std::cout);
        else if (train->parsed()) tempo::cmd_train(config, std::cout);
        else if (evaluate->parsed()) tempo::cmd_evaluate(config, std::cout);
        else if (sweep->parsed()) tempo::cmd_sweep(config, std::cout);
        else if (curves->parsed()) tempo::cmd_export_curves(config, std::cout);
    } catch (const tempo::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const tempo::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const tempo::SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
