#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tempo/dataset.hpp"

namespace tempo {

// Planted per-item relevance: a Gaussian bump over normalized time plus a
// flat baseline.
struct ItemCurve {
    double center = 0.0;  // in [-1, 1]
    double width = 0.1;
    double height = 1.0;
    double baseline = 0.0;
};

double curve_value(const ItemCurve& curve, double t);

struct SynthSpec {
    int n_users = 50;
    int n_items = 20;
    int n_clusters = 1;
    long events_total = 10000;
    double in_cluster_affinity = 3.0;
    std::uint64_t seed = 1;
    std::int64_t t_start = 1500000000;
    double duration_days = 100.0;
    // Explicit curves, or auto-generated bumps when left empty.
    std::vector<ItemCurve> curves;
    double auto_width = 0.12;
    double auto_height = 1.0;
    double auto_baseline = 0.02;

    void validate() const;
};

struct SynthResult {
    EventLog log;
    std::vector<ItemCurve> curves;  // the planted ground truth
    std::int64_t t_start = 0;
    std::int64_t t_end = 0;
};

// Independent event draws: time uniform over the range, user uniform, item
// categorical with weight affinity(user, item) * curve_i(time).
SynthResult generate(const SynthSpec& spec);

void write_ground_truth_json(const SynthResult& result, const std::string& path);

}  // namespace tempo
