#include "inferedge/reward.hpp"

#include <cmath>
#include <string>

#include "inferedge/error.hpp"

namespace inferedge {

void RewardConfig::validate() const {
    if (w_accuracy < 0.0 || w_latency < 0.0 || w_energy < 0.0)
        throw ConfigError("reward weights must be non-negative");
    if (std::abs(w_accuracy + w_latency + w_energy - 1.0) > 1e-9)
        throw ConfigError("reward weights must sum to 1");
    if (!(sigmoid_p > 0.0)) throw ConfigError("sigmoid_p must be > 0");
    if (!(sigmoid_q > 0.0 && sigmoid_q < 1.0)) throw ConfigError("sigmoid_q must lie in (0, 1)");
}

RewardConfig RewardConfig::normalized() const {
    const double sum = w_accuracy + w_latency + w_energy;
    if (!(sum > 0.0)) throw ConfigError("reward weights must have a positive sum");
    RewardConfig out = *this;
    out.w_accuracy /= sum;
    out.w_latency /= sum;
    out.w_energy /= sum;
    return out;
}

RewardConfig RewardConfig::accuracy_only() { return {1.0, 0.0, 0.0}; }
RewardConfig RewardConfig::latency_only() { return {0.0, 1.0, 0.0}; }
RewardConfig RewardConfig::energy_only() { return {0.0, 0.0, 1.0}; }
RewardConfig RewardConfig::multi_objective() { return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}; }

RewardConfig RewardConfig::preset(std::string_view name) {
    if (name == "AO") return accuracy_only();
    if (name == "LO") return latency_only();
    if (name == "EO") return energy_only();
    if (name == "MO") return multi_objective();
    throw ConfigError("unknown weight preset '" + std::string(name) + "'");
}

double accuracy_score(double top1_accuracy, const RewardConfig& cfg) {
    return 1.0 / (1.0 + std::exp(-cfg.sigmoid_p * (top1_accuracy - cfg.sigmoid_q)));
}

double latency_score(double total_latency_ms, double full_local_latency_ms) {
    if (!(full_local_latency_ms > 0.0))
        throw ConfigError("latency_score: full-local latency must be positive");
    return 1.0 - total_latency_ms / full_local_latency_ms;
}

double energy_score(double total_energy_j, double full_local_energy_j) {
    if (!(full_local_energy_j > 0.0))
        throw ConfigError("energy_score: full-local energy must be positive");
    return 1.0 - total_energy_j / full_local_energy_j;
}

double weighted_score(const ScoreTriple& s, const RewardConfig& cfg) {
    return cfg.w_accuracy * s.accuracy_score + cfg.w_latency * s.latency_score +
           cfg.w_energy * s.energy_score;
}

double fleet_reward(std::span<const ScoreTriple> per_device_scores, const RewardConfig& cfg) {
    if (per_device_scores.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& s : per_device_scores) sum += weighted_score(s, cfg);
    return sum / static_cast<double>(per_device_scores.size());
}

}  // namespace inferedge
