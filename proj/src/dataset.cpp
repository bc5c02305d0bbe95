#include "tempo/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

namespace tempo {

namespace {

bool event_order(const Event& a, const Event& b) {
    if (a.ts != b.ts) return a.ts < b.ts;
    if (a.user != b.user) return a.user < b.user;
    return a.item < b.item;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

EventLog EventLog::build(std::vector<Event> events, std::vector<std::string> user_ids,
                         std::vector<std::string> item_ids) {
    std::sort(events.begin(), events.end(), event_order);
    events.erase(std::unique(events.begin(), events.end()), events.end());
    if (events.empty()) {
        throw EmptyDataset("EventLog: no events");
    }

    EventLog log;
    log.events_ = std::move(events);
    log.t_min_ = log.events_.front().ts;
    log.t_max_ = log.events_.back().ts;
    int max_user = 0;
    int max_item = 0;
    for (const Event& e : log.events_) {
        if (e.user < 0 || e.item < 0) {
            throw DataError("EventLog: negative index");
        }
        max_user = std::max(max_user, e.user);
        max_item = std::max(max_item, e.item);
    }
    log.n_users_ = max_user + 1;
    log.n_items_ = max_item + 1;
    log.user_histories_.resize(log.n_users_);
    for (int idx = 0; idx < static_cast<int>(log.events_.size()); ++idx) {
        log.user_histories_[log.events_[idx].user].push_back(idx);
    }
    log.user_ids_ = std::move(user_ids);
    log.item_ids_ = std::move(item_ids);
    return log;
}

const std::string& EventLog::user_id(int u) const {
    static thread_local std::string fallback;
    if (u >= 0 && u < static_cast<int>(user_ids_.size())) return user_ids_[u];
    fallback = std::to_string(u);
    return fallback;
}

const std::string& EventLog::item_id(int i) const {
    static thread_local std::string fallback;
    if (i >= 0 && i < static_cast<int>(item_ids_.size())) return item_ids_[i];
    fallback = std::to_string(i);
    return fallback;
}

EventLog ingest_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("ingest_csv: cannot open " + path);
    }

    std::string line;
    long line_no = 0;
    if (!std::getline(in, line)) {
        throw EmptyDataset("ingest_csv: empty file " + path);
    }
    line_no = 1;  // header consumed

    std::vector<Event> events;
    std::vector<std::string> user_ids;
    std::vector<std::string> item_ids;
    std::unordered_map<std::string, int> user_index;
    std::unordered_map<std::string, int> item_index;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos ||
            line.find(',', c2 + 1) != std::string::npos) {
            throw ParseError("ingest_csv: expected user_id,item_id,timestamp", line_no);
        }
        const std::string user_field = trim(line.substr(0, c1));
        const std::string item_field = trim(line.substr(c1 + 1, c2 - c1 - 1));
        const std::string ts_field = trim(line.substr(c2 + 1));
        if (user_field.empty() || item_field.empty()) {
            throw ParseError("ingest_csv: empty id field", line_no);
        }

        std::int64_t ts = 0;
        try {
            std::size_t consumed = 0;
            ts = std::stoll(ts_field, &consumed);
            if (consumed != ts_field.size()) throw std::invalid_argument(ts_field);
        } catch (const std::exception&) {
            throw ParseError("ingest_csv: timestamp is not an integer", line_no);
        }

        auto [uit, u_new] = user_index.try_emplace(user_field, static_cast<int>(user_ids.size()));
        if (u_new) user_ids.push_back(user_field);
        auto [iit, i_new] = item_index.try_emplace(item_field, static_cast<int>(item_ids.size()));
        if (i_new) item_ids.push_back(item_field);
        events.push_back(Event{uit->second, iit->second, ts});
    }

    if (events.empty()) {
        throw EmptyDataset("ingest_csv: no event rows in " + path);
    }
    return EventLog::build(std::move(events), std::move(user_ids), std::move(item_ids));
}

void export_csv(const EventLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("export_csv: cannot write " + path);
    }
    out << "user_id,item_id,timestamp\n";
    for (const Event& e : log.events()) {
        out << log.user_id(e.user) << ',' << log.item_id(e.item) << ',' << e.ts << '\n';
    }
}

void export_id_mapping_csv(const EventLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("export_id_mapping_csv: cannot write " + path);
    }
    out << "kind,internal_id,external_id\n";
    for (int u = 0; u < log.n_users(); ++u) {
        out << "user," << u << ',' << log.user_id(u) << '\n';
    }
    for (int i = 0; i < log.n_items(); ++i) {
        out << "item," << i << ',' << log.item_id(i) << '\n';
    }
}

EventLog filter_min_counts(const EventLog& log, int min_user, int min_item) {
    std::vector<long> item_counts(log.n_items(), 0);
    for (const Event& e : log.events()) item_counts[e.item]++;

    std::vector<long> user_counts(log.n_users(), 0);
    for (const Event& e : log.events()) {
        if (item_counts[e.item] >= min_item) user_counts[e.user]++;
    }

    std::vector<int> user_map(log.n_users(), -1);
    std::vector<int> item_map(log.n_items(), -1);
    std::vector<std::string> user_ids;
    std::vector<std::string> item_ids;
    const bool has_ids = !log.user_ids().empty();
    int next_user = 0;
    for (int u = 0; u < log.n_users(); ++u) {
        if (user_counts[u] >= min_user) {
            user_map[u] = next_user++;
            if (has_ids) user_ids.push_back(log.user_id(u));
        }
    }
    int next_item = 0;
    for (int i = 0; i < log.n_items(); ++i) {
        if (item_counts[i] >= min_item) {
            item_map[i] = next_item++;
            if (has_ids) item_ids.push_back(log.item_id(i));
        }
    }

    std::vector<Event> kept;
    kept.reserve(log.events().size());
    for (const Event& e : log.events()) {
        if (item_map[e.item] >= 0 && user_map[e.user] >= 0) {
            kept.push_back(Event{user_map[e.user], item_map[e.item], e.ts});
        }
    }
    if (kept.empty()) {
        throw EmptyDataset("filter_min_counts: no events survive the thresholds");
    }
    return EventLog::build(std::move(kept), std::move(user_ids), std::move(item_ids));
}

TemporalSplit temporal_split(const EventLog& log, std::int64_t cutoff) {
    if (!(log.t_min() < cutoff && cutoff < log.t_max())) {
        throw ConfigError("temporal_split: cutoff must lie strictly inside the data time range");
    }

    std::vector<Event> train_events;
    train_events.reserve(log.events().size());
    std::vector<char> item_seen(log.n_items(), 0);
    for (const Event& e : log.events()) {
        if (e.ts <= cutoff) {
            train_events.push_back(e);
            item_seen[e.item] = 1;
        }
    }

    TemporalSplit split;
    split.cutoff = cutoff;
    split.train = EventLog::build(std::move(train_events), log.user_ids(), log.item_ids());
    split.heldout.assign(split.train.n_users(), std::nullopt);

    // First post-cutoff event per user; users whose first future item was
    // never seen in training cannot be ranked and are dropped.
    for (int u = 0; u < log.n_users(); ++u) {
        bool has_train = false;
        const Event* first_future = nullptr;
        for (int idx : log.user_histories()[u]) {
            const Event& e = log.events()[idx];
            if (e.ts <= cutoff) {
                has_train = true;
            } else {
                first_future = &e;
                break;
            }
        }
        if (!has_train || first_future == nullptr) continue;
        if (u >= split.train.n_users()) continue;
        if (first_future->item >= split.train.n_items() || !item_seen[first_future->item]) {
            continue;
        }
        split.heldout[u] = *first_future;
        split.n_testable++;
    }

    if (split.n_testable == 0) {
        throw NoTestableUsers("temporal_split: no user has a rankable post-cutoff event");
    }
    return split;
}

double normalize_time(std::int64_t t_min, std::int64_t t_max, std::int64_t ts) {
    if (t_min >= t_max) {
        throw DegenerateTimeRange("normalize_time: t_min must be < t_max");
    }
    return -1.0 + 2.0 * static_cast<double>(ts - t_min) / static_cast<double>(t_max - t_min);
}

double normalize_time(const EventLog& log, std::int64_t ts) {
    return normalize_time(log.t_min(), log.t_max(), ts);
}

BinnedLog bin_events(const EventLog& log, double bin_days) {
    if (!(bin_days > 0.0)) {
        throw ConfigError("bin_events: bin length must be > 0");
    }
    BinnedLog binned;
    binned.t_min = log.t_min();
    binned.bin_seconds = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::llround(bin_days * kSecondsPerDay)));
    binned.bins.reserve(log.events().size());
    for (const Event& e : log.events()) {
        binned.bins.push_back(binned.bin_of(e.ts));
    }
    binned.n_bins = binned.bin_of(log.t_max()) + 1;
    return binned;
}

Vector popularity(const EventLog& log, std::int64_t window_start, std::int64_t window_end) {
    if (window_start > window_end) {
        throw ConfigError("popularity: window_start must be <= window_end");
    }
    Vector counts = Vector::Zero(log.n_items());
    for (const Event& e : log.events()) {
        if (e.ts >= window_start && e.ts <= window_end) {
            counts[e.item] += 1.0;
        }
    }
    return counts;
}

}  // namespace tempo
