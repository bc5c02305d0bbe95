#include "tempo/synth.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

namespace tempo {

double curve_value(const ItemCurve& curve, double t) {
    const double z = (t - curve.center) / curve.width;
    return curve.baseline + curve.height * std::exp(-0.5 * z * z);
}

void SynthSpec::validate() const {
    if (n_users < 1 || n_items < 1) throw ConfigError("synth: need users and items");
    if (n_clusters < 1) throw ConfigError("synth: n_clusters must be >= 1");
    if (events_total < 1) throw ConfigError("synth: events_total must be >= 1");
    if (!(duration_days > 0.0)) throw ConfigError("synth: duration must be > 0");
    if (!(in_cluster_affinity > 0.0)) throw ConfigError("synth: affinity must be > 0");
    if (!curves.empty() && static_cast<int>(curves.size()) != n_items) {
        throw ConfigError("synth: curve list must match n_items");
    }
    for (const ItemCurve& c : curves) {
        if (!(c.width > 0.0) || c.height < 0.0) throw ConfigError("synth: invalid curve");
    }
}

SynthResult generate(const SynthSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    SynthResult result;
    result.curves = spec.curves;
    if (result.curves.empty()) {
        result.curves.reserve(spec.n_items);
        for (int i = 0; i < spec.n_items; ++i) {
            ItemCurve c;
            c.center = -0.8 + 1.6 * unit(rng);
            c.width = spec.auto_width;
            c.height = spec.auto_height;
            c.baseline = spec.auto_baseline;
            result.curves.push_back(c);
        }
    }

    const double duration_seconds = spec.duration_days * kSecondsPerDay;
    result.t_start = spec.t_start;
    result.t_end = spec.t_start + static_cast<std::int64_t>(duration_seconds);

    // Rejection sampling: uniform time proposals accepted in proportion to
    // the total relevance at that time, so event density follows the planted
    // curves. The same draw that accepts also selects the item, since the
    // acceptance bound dominates every per-item weight sum.
    const double affinity_max = std::max(1.0, spec.in_cluster_affinity);
    double bound = 0.0;
    for (const ItemCurve& c : result.curves) {
        bound += affinity_max * (c.baseline + c.height);
    }
    if (!(bound > 0.0)) throw ConfigError("synth: all relevance curves are zero");

    std::vector<Event> events;
    events.reserve(spec.events_total);
    std::vector<double> weights(spec.n_items);
    const long max_attempts = 10000 * spec.events_total;
    long attempts = 0;
    while (static_cast<long>(events.size()) < spec.events_total) {
        if (++attempts > max_attempts) {
            throw ConfigError("synth: acceptance rate too low; raise baselines or heights");
        }
        const double t = -1.0 + 2.0 * unit(rng);
        const int user = static_cast<int>(
            std::min<double>(spec.n_users - 1, unit(rng) * spec.n_users));
        const int user_cluster = user % spec.n_clusters;

        double total = 0.0;
        for (int i = 0; i < spec.n_items; ++i) {
            const double affinity =
                (i % spec.n_clusters == user_cluster) ? spec.in_cluster_affinity : 1.0;
            weights[i] = affinity * curve_value(result.curves[i], t);
            total += weights[i];
        }
        const double threshold = unit(rng) * bound;
        if (threshold > total) continue;

        int item = spec.n_items - 1;
        double acc = 0.0;
        for (int i = 0; i < spec.n_items; ++i) {
            acc += weights[i];
            if (threshold <= acc) {
                item = i;
                break;
            }
        }

        const auto ts = spec.t_start +
                        static_cast<std::int64_t>(std::llround((t + 1.0) * 0.5 * duration_seconds));
        events.push_back(Event{user, item, ts});
    }

    result.log = EventLog::build(std::move(events));
    return result;
}

void write_ground_truth_json(const SynthResult& result, const std::string& path) {
    nlohmann::json j;
    j["t_start"] = result.t_start;
    j["t_end"] = result.t_end;
    j["items"] = nlohmann::json::array();
    for (const ItemCurve& c : result.curves) {
        j["items"].push_back({{"center", c.center},
                              {"width", c.width},
                              {"height", c.height},
                              {"baseline", c.baseline}});
    }
    std::ofstream out(path);
    if (!out) throw IoError("write_ground_truth_json: cannot write " + path);
    out << j.dump(2) << '\n';
}

}  // namespace tempo
