#include "tempo/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

namespace tempo {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

long long to_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' expects an integer, got '" + value + "'");
    }
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' expects a number, got '" + value + "'");
    }
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
    if (value == "0" || value == "false" || value == "no" || value == "off") return false;
    throw ConfigError("config: key '" + key + "' expects a boolean, got '" + value + "'");
}

// Days-from-civil conversion (proleptic Gregorian), UTC.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

}  // namespace

std::int64_t parse_timestamp(const std::string& text) {
    const std::string s = trim(text);
    if (s.empty()) throw ConfigError("empty timestamp");
    // Plain integer: epoch seconds.
    if (s.find_first_not_of("0123456789-") == std::string::npos &&
        s.find('-', 1) == std::string::npos) {
        return to_int("timestamp", s);
    }
    // ISO date: YYYY-MM-DD with optional THH:MM:SS.
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    char t_sep = 0;
    const int got =
        std::sscanf(s.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &t_sep, &h, &mi, &sec);
    if (got != 3 && got != 7) {
        throw ConfigError("cannot parse timestamp '" + s + "' (epoch seconds or ISO date)");
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31) {
        throw ConfigError("invalid calendar date '" + s + "'");
    }
    return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + sec;
}

std::vector<std::string> split_csv_list(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const std::string piece =
            trim(text.substr(start, comma == std::string::npos ? std::string::npos
                                                               : comma - start));
        if (!piece.empty()) out.push_back(piece);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

void apply_config_key(RunConfig& config, const std::string& key, const std::string& value) {
    if (key == "dataset") config.dataset = value;
    else if (key == "output_dir") config.output_dir = value;
    else if (key == "checkpoint") config.checkpoint = value;
    else if (key == "model") config.model = value;
    else if (key == "cutoff") config.cutoff = parse_timestamp(value);
    else if (key == "validation_cutoff") config.validation_cutoff = parse_timestamp(value);
    else if (key == "test_cutoff") config.test_cutoff = parse_timestamp(value);
    else if (key == "k") config.train.k = static_cast<int>(to_int(key, value));
    else if (key == "r") config.train.r = static_cast<int>(to_int(key, value));
    else if (key == "alpha") config.train.alpha = to_double(key, value);
    else if (key == "lambda") config.train.lambda = to_double(key, value);
    else if (key == "lambda_a") config.train.lambda_a = to_double(key, value);
    else if (key == "sigma") config.train.sigma = to_double(key, value);
    else if (key == "bin_days") config.train.bin_days = to_double(key, value);
    else if (key == "iterations") config.train.iterations = static_cast<int>(to_int(key, value));
    else if (key == "seed") config.train.seed = static_cast<std::uint64_t>(to_int(key, value));
    else if (key == "threads") config.train.threads = static_cast<int>(to_int(key, value));
    else if (key == "default_user") config.train.default_user = to_bool(key, value);
    else if (key == "default_item") config.train.default_item = to_bool(key, value);
    else if (key == "default_time") config.train.default_time = to_bool(key, value);
    else if (key == "half_life") config.train.half_life_days = to_double(key, value);
    else if (key == "trending_window") config.train.trending_window_days = to_double(key, value);
    else if (key == "cg_tol") config.train.cg_tol = to_double(key, value);
    else if (key == "cg_max_iter") config.train.cg_max_iter = static_cast<int>(to_int(key, value));
    else if (key == "kernel_samples")
        config.train.kernel_samples = static_cast<int>(to_int(key, value));
    else if (key == "ease_cap") config.train.ease_item_cap = static_cast<int>(to_int(key, value));
    else if (key == "dmf_max_elements") config.train.dmf_max_elements = to_int(key, value);
    else if (key == "nu") config.nu = to_double(key, value);
    else if (key == "local_window") config.local_window_days = to_double(key, value);
    else if (key == "strategy") config.strategy = value;
    else if (key == "last_n") config.last_n = static_cast<int>(to_int(key, value));
    else if (key == "exclude_seen") config.exclude_seen = to_bool(key, value);
    else if (key == "min_user_count") config.min_user_count = static_cast<int>(to_int(key, value));
    else if (key == "min_item_count") config.min_item_count = static_cast<int>(to_int(key, value));
    else if (key == "sweep_samples") config.sweep_samples = static_cast<int>(to_int(key, value));
    else if (key == "metrics") {
        for (const std::string& metric : split_csv_list(value)) {
            const auto at = metric.find('@');
            if (at == std::string::npos) throw ConfigError("metrics: expected name@k");
            const std::string name = metric.substr(0, at);
            const int at_k = static_cast<int>(to_int("metrics", metric.substr(at + 1)));
            if (name == "ndcg") config.metrics.ndcg = at_k;
            else if (name == "mrr") config.metrics.mrr = at_k;
            else if (name == "recall") config.metrics.recall = at_k;
            else throw ConfigError("metrics: unknown metric '" + name + "'");
        }
    } else if (key.rfind("sweep.", 0) == 0) {
        config.sweep[key.substr(6)] = split_csv_list(value);
    } else if (key == "synth.users") config.synth.n_users = static_cast<int>(to_int(key, value));
    else if (key == "synth.items") config.synth.n_items = static_cast<int>(to_int(key, value));
    else if (key == "synth.clusters")
        config.synth.n_clusters = static_cast<int>(to_int(key, value));
    else if (key == "synth.events") config.synth.events_total = to_int(key, value);
    else if (key == "synth.affinity") config.synth.in_cluster_affinity = to_double(key, value);
    else if (key == "synth.seed") config.synth.seed = static_cast<std::uint64_t>(to_int(key, value));
    else if (key == "synth.t_start") config.synth.t_start = parse_timestamp(value);
    else if (key == "synth.duration_days") config.synth.duration_days = to_double(key, value);
    else if (key == "synth.width") config.synth.auto_width = to_double(key, value);
    else if (key == "synth.height") config.synth.auto_height = to_double(key, value);
    else if (key == "synth.baseline") config.synth.auto_baseline = to_double(key, value);
    else if (key == "user") config.curve_user = static_cast<int>(to_int(key, value));
    else if (key == "items") {
        config.curve_items.clear();
        for (const std::string& item : split_csv_list(value)) {
            config.curve_items.push_back(static_cast<int>(to_int(key, item)));
        }
    } else if (key == "grid_points") config.grid_points = static_cast<int>(to_int(key, value));
    else throw ConfigError("config: unknown key '" + key + "'");
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    RunConfig config;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: expected 'key = value' at line " +
                              std::to_string(line_no));
        }
        apply_config_key(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return config;
}

void RunConfig::validate_cutoffs() const {
    if (validation_cutoff && test_cutoff && !(*validation_cutoff < *test_cutoff)) {
        throw ConfigError("validation_cutoff must be earlier than test_cutoff");
    }
}

AdaptationSettings RunConfig::adaptations(const EventLog& train_log) const {
    AdaptationSettings settings;
    if (strategy != "raw") {
        settings.strategy = TimeStrategy::parse(strategy, last_n);
    }
    if (nu) {
        settings.scaler = make_popularity_scaler(train_log, *nu, local_window_days);
    }
    return settings;
}

}  // namespace tempo
