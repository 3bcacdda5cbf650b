#include "inferedge/oracle.hpp"

#include <algorithm>

#include "inferedge/csv.hpp"
#include "inferedge/error.hpp"

namespace inferedge {
namespace {

std::vector<int> versions_to_scan(const ModelFamily& fam, const VersionFilter& filter) {
    std::vector<int> out;
    if (!filter) {
        for (int v = 0; v < static_cast<int>(fam.versions.size()); ++v) out.push_back(v);
        return out;
    }
    if (filter->empty()) throw ConfigError("version filter for '" + fam.name + "' is empty");
    for (int v : *filter) {
        if (v < 0 || v >= static_cast<int>(fam.versions.size()))
            throw LookupError("family '" + fam.name + "': version index " + std::to_string(v) +
                              " out of range");
        out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

RankedProfile score_profile(const ModelFamily& family, ExecutionProfile profile,
                            const ChannelState& channel, const ServerState& server,
                            const RewardConfig& cfg) {
    if (profile.version_index < 0 ||
        profile.version_index >= static_cast<int>(family.versions.size()))
        throw LookupError("family '" + family.name + "': version index out of range");
    const VersionProfile& v = family.versions[profile.version_index];
    if (profile.cut_index < 0 || profile.cut_index >= static_cast<int>(v.cut_points.size()))
        throw LookupError("version '" + v.name + "': cut index out of range");
    const CutPointProfile& cut = v.cut_points[profile.cut_index];

    RankedProfile r;
    r.profile = profile;
    r.version_name = v.name;
    r.cut_layer = cut.layer_id;
    r.breakdown = evaluate_profile(cut, channel, server);
    r.scores.accuracy_score = accuracy_score(v.top1_accuracy, cfg);
    r.scores.latency_score = latency_score(r.breakdown.total_latency_ms, v.full_local_latency_ms);
    r.scores.energy_score = energy_score(r.breakdown.total_energy_j, v.full_local_energy_j);
    r.score = weighted_score(r.scores, cfg);
    return r;
}

std::vector<RankedProfile> rank_all(const ProfileStore& store, std::string_view family,
                                    const ChannelState& channel, const ServerState& server,
                                    const RewardConfig& cfg, const VersionFilter& filter) {
    const ModelFamily& fam = store.family(family);
    std::vector<RankedProfile> out;
    for (int v : versions_to_scan(fam, filter)) {
        const int cuts = static_cast<int>(fam.versions[v].cut_points.size());
        for (int c = 0; c < cuts; ++c) out.push_back(score_profile(fam, {v, c}, channel, server, cfg));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const RankedProfile& a, const RankedProfile& b) { return a.score > b.score; });
    return out;
}

RankedProfile best_profile(const ProfileStore& store, std::string_view family,
                           const ChannelState& channel, const ServerState& server,
                           const RewardConfig& cfg, const VersionFilter& filter) {
    const ModelFamily& fam = store.family(family);
    std::optional<RankedProfile> best;
    for (int v : versions_to_scan(fam, filter)) {
        const int cuts = static_cast<int>(fam.versions[v].cut_points.size());
        for (int c = 0; c < cuts; ++c) {
            RankedProfile r = score_profile(fam, {v, c}, channel, server, cfg);
            if (!best || r.score > best->score) best = std::move(r);
        }
    }
    return *best;
}

WeightAxis parse_axis(std::string_view name) {
    if (name == "accuracy") return WeightAxis::Accuracy;
    if (name == "latency") return WeightAxis::Latency;
    if (name == "energy") return WeightAxis::Energy;
    throw ConfigError("unknown weight axis '" + std::string(name) +
                      "' (expected accuracy, latency or energy)");
}

std::string_view axis_name(WeightAxis axis) {
    switch (axis) {
        case WeightAxis::Accuracy: return "accuracy";
        case WeightAxis::Latency: return "latency";
        case WeightAxis::Energy: return "energy";
    }
    return "?";
}

RewardConfig sweep_weights(const RewardConfig& base, WeightAxis axis, double value) {
    if (!(value >= 0.0 && value <= 1.0))
        throw ConfigError("sweep weight " + format_number(value) + " outside [0, 1]");
    double* slots[3];
    RewardConfig out = base;
    slots[0] = &out.w_accuracy;
    slots[1] = &out.w_latency;
    slots[2] = &out.w_energy;
    const int swept = static_cast<int>(axis);
    double other_sum = 0.0;
    for (int i = 0; i < 3; ++i)
        if (i != swept) other_sum += *slots[i];
    const double rest = 1.0 - value;
    for (int i = 0; i < 3; ++i) {
        if (i == swept) continue;
        *slots[i] = other_sum > 0.0 ? rest * (*slots[i] / other_sum) : rest / 2.0;
    }
    *slots[swept] = value;
    return out;
}

std::vector<SweepPoint> weight_sweep(const ProfileStore& store, std::string_view family,
                                     const ChannelState& channel, const ServerState& server,
                                     WeightAxis axis, const std::vector<double>& grid,
                                     const RewardConfig& base, const VersionFilter& filter) {
    if (grid.empty()) throw ConfigError("weight sweep grid is empty");
    std::vector<SweepPoint> out;
    out.reserve(grid.size());
    for (double w : grid) {
        SweepPoint p;
        p.weight = w;
        p.cfg = sweep_weights(base, axis, w);
        p.best = best_profile(store, family, channel, server, p.cfg, filter);
        out.push_back(std::move(p));
    }
    return out;
}

const std::vector<std::string>& ranked_csv_header() {
    static const std::vector<std::string> header{
        "family",    "version",      "cut_layer",    "latency_ms",    "energy_j",
        "acc_score", "lat_score",    "energy_score", "weighted_score"};
    return header;
}

std::vector<std::string> ranked_csv_row(std::string_view family, const RankedProfile& r) {
    return {std::string(family),
            r.version_name,
            std::to_string(r.cut_layer),
            format_number(r.breakdown.total_latency_ms),
            format_number(r.breakdown.total_energy_j),
            format_number(r.scores.accuracy_score),
            format_number(r.scores.latency_score),
            format_number(r.scores.energy_score),
            format_number(r.score)};
}

void write_ranked_csv(std::ostream& out, std::string_view family,
                      const std::vector<RankedProfile>& rows) {
    out << join(ranked_csv_header()) << '\n';
    for (const auto& r : rows) out << join(ranked_csv_row(family, r)) << '\n';
}

}  // namespace inferedge
