#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "inferedge/cost.hpp"
#include "inferedge/profiles.hpp"
#include "inferedge/reward.hpp"

namespace inferedge {

/// The per-device decision: which version of the task's model family to run
/// and at which of that version's candidate cut points to split it.
struct ExecutionProfile {
    int version_index = 0;
    int cut_index = 0;

    auto operator<=>(const ExecutionProfile&) const = default;
};

struct RankedProfile {
    ExecutionProfile profile;
    double score = 0.0;
    CostBreakdown breakdown;
    ScoreTriple scores;
    std::string version_name;
    int cut_layer = 0;
};

/// Restricts enumeration to the listed version indices. Empty optional means all.
using VersionFilter = std::optional<std::vector<int>>;

/// Scores one profile; throws LookupError on bad indices.
RankedProfile score_profile(const ModelFamily& family, ExecutionProfile profile,
                            const ChannelState& channel, const ServerState& server,
                            const RewardConfig& cfg);

/// Every (version, cut) pair of the family, best first. Equal scores keep
/// enumeration order: lower version index, then lower layer.
std::vector<RankedProfile> rank_all(const ProfileStore& store, std::string_view family,
                                    const ChannelState& channel, const ServerState& server,
                                    const RewardConfig& cfg, const VersionFilter& filter = {});

RankedProfile best_profile(const ProfileStore& store, std::string_view family,
                           const ChannelState& channel, const ServerState& server,
                           const RewardConfig& cfg, const VersionFilter& filter = {});

enum class WeightAxis { Accuracy, Latency, Energy };

WeightAxis parse_axis(std::string_view name);
std::string_view axis_name(WeightAxis axis);

/// Puts `value` on the swept axis and splits 1 - value over the other two in
/// proportion to their weights in `base` (evenly if both are zero).
RewardConfig sweep_weights(const RewardConfig& base, WeightAxis axis, double value);

struct SweepPoint {
    double weight = 0.0;
    RewardConfig cfg;
    RankedProfile best;
};

std::vector<SweepPoint> weight_sweep(const ProfileStore& store, std::string_view family,
                                     const ChannelState& channel, const ServerState& server,
                                     WeightAxis axis, const std::vector<double>& grid,
                                     const RewardConfig& base = RewardConfig::multi_objective(),
                                     const VersionFilter& filter = {});

/// Column names of the ranked-profile CSV.
const std::vector<std::string>& ranked_csv_header();
std::vector<std::string> ranked_csv_row(std::string_view family, const RankedProfile& r);
void write_ranked_csv(std::ostream& out, std::string_view family,
                      const std::vector<RankedProfile>& rows);

}  // namespace inferedge
