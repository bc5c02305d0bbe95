#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tempo/errors.hpp"
#include "tempo/tensor_core.hpp"

namespace tempo {

struct Event {
    int user = 0;
    int item = 0;
    std::int64_t ts = 0;  // epoch seconds

    friend bool operator==(const Event& a, const Event& b) {
        return a.user == b.user && a.item == b.item && a.ts == b.ts;
    }
};

// Immutable set of (user, item, timestamp) events with dense indices.
// Events are deduplicated, sorted by (ts, user, item), and indexed per user.
class EventLog {
  public:
    static EventLog build(std::vector<Event> events, std::vector<std::string> user_ids = {},
                          std::vector<std::string> item_ids = {});

    const std::vector<Event>& events() const { return events_; }
    int n_users() const { return n_users_; }
    int n_items() const { return n_items_; }
    std::int64_t t_min() const { return t_min_; }
    std::int64_t t_max() const { return t_max_; }

    // Per-user lists of indices into events(), in time order.
    const std::vector<std::vector<int>>& user_histories() const { return user_histories_; }

    // External id of a dense index; falls back to the decimal index when the
    // log was built without a mapping.
    const std::string& user_id(int u) const;
    const std::string& item_id(int i) const;
    const std::vector<std::string>& user_ids() const { return user_ids_; }
    const std::vector<std::string>& item_ids() const { return item_ids_; }

  private:
    std::vector<Event> events_;
    int n_users_ = 0;
    int n_items_ = 0;
    std::int64_t t_min_ = 0;
    std::int64_t t_max_ = 0;
    std::vector<std::vector<int>> user_histories_;
    std::vector<std::string> user_ids_;
    std::vector<std::string> item_ids_;
};

// Reads `user_id,item_id,timestamp` CSV with a header line. External ids are
// remapped to dense indices in order of first appearance; exact duplicate
// rows collapse to one event.
EventLog ingest_csv(const std::string& path);

// Inverse of ingest_csv: one row per event, external ids, sorted order.
void export_csv(const EventLog& log, const std::string& path);

// Sidecar mapping table: kind,internal_id,external_id.
void export_id_mapping_csv(const EventLog& log, const std::string& path);

// Drops items with fewer than min_item events, then users with fewer than
// min_user events among the surviving rows. One pass each, then a dense
// reindex. Not iterated to a fixpoint.
EventLog filter_min_counts(const EventLog& log, int min_user, int min_item);

struct TemporalSplit {
    EventLog train;
    // Indexed by the train log's user index; the user's first event strictly
    // after the cutoff, when testable.
    std::vector<std::optional<Event>> heldout;
    std::int64_t cutoff = 0;
    int n_testable = 0;
};

// Global-time leave-one-out split. Train keeps events at or before the
// cutoff. A user is testable when they have at least one training event and
// their first post-cutoff event is an item seen in training.
TemporalSplit temporal_split(const EventLog& log, std::int64_t cutoff);

// Affine map of the training range [t_min, t_max] onto [-1, 1]. Timestamps
// outside the range extrapolate linearly.
double normalize_time(std::int64_t t_min, std::int64_t t_max, std::int64_t ts);
double normalize_time(const EventLog& log, std::int64_t ts);

struct BinnedLog {
    std::vector<int> bins;  // aligned with log.events()
    int n_bins = 0;
    std::int64_t bin_seconds = 0;
    std::int64_t t_min = 0;

    int bin_of(std::int64_t ts) const {
        return static_cast<int>((ts - t_min) / bin_seconds);
    }
};

constexpr std::int64_t kSecondsPerDay = 86400;

// Fixed-length binning from t_min. Empty bins are retained; n_bins covers
// the full training range.
BinnedLog bin_events(const EventLog& log, double bin_days);

// Per-item event counts within [window_start, window_end], bounds inclusive.
Vector popularity(const EventLog& log, std::int64_t window_start, std::int64_t window_end);

}  // namespace tempo
