#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tempo/evaluation.hpp"
#include "tempo/models.hpp"
#include "tempo/synth.hpp"

namespace tempo {

// Everything a run needs, assembled from a flat `key = value` config file
// with CLI flags layered on top.
struct RunConfig {
    std::string dataset;
    std::string output_dir = ".";
    std::string checkpoint;
    std::string model = "wmf";

    std::optional<std::int64_t> cutoff;
    std::optional<std::int64_t> validation_cutoff;
    std::optional<std::int64_t> test_cutoff;

    TrainConfig train;

    // Prediction-time adaptations.
    std::optional<double> nu;  // popularity scaling enabled when set
    double local_window_days = 7.0;
    std::string strategy = "last";  // last | last-n | drop-time | extrapolate | raw
    int last_n = 1;
    bool exclude_seen = true;

    MetricKs metrics;

    // Ingest filters.
    int min_user_count = 1;
    int min_item_count = 1;

    // Sweep grids: hyperparameter name -> candidate values.
    std::map<std::string, std::vector<std::string>> sweep;
    std::optional<int> sweep_samples;

    SynthSpec synth;

    // export-curves
    int curve_user = 0;
    std::vector<int> curve_items;
    int grid_points = 200;

    void validate_cutoffs() const;  // throws ConfigError on bad ordering
    AdaptationSettings adaptations(const EventLog& train_log) const;
};

// Parses `key = value` lines; '#' starts a comment, blank lines are skipped.
RunConfig load_config_file(const std::string& path);

// Applies one key/value pair; shared by the file parser and flag overrides.
void apply_config_key(RunConfig& config, const std::string& key, const std::string& value);

// Epoch seconds, or an ISO date (YYYY-MM-DD[THH:MM:SS], UTC).
std::int64_t parse_timestamp(const std::string& text);

std::vector<std::string> split_csv_list(const std::string& text);

}  // namespace tempo
