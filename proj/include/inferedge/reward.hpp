#pragma once

#include <span>
#include <string_view>

namespace inferedge {

struct RewardConfig {
    double w_accuracy = 1.0 / 3.0;
    double w_latency = 1.0 / 3.0;
    double w_energy = 1.0 / 3.0;
    /// Steepness and midpoint of the accuracy sigmoid.
    double sigmoid_p = 30.0;
    double sigmoid_q = 0.72;

    /// Throws ConfigError unless weights are >= 0 and sum to 1 (within 1e-9),
    /// p > 0 and q in (0, 1).
    void validate() const;

    /// Same sigmoid parameters, weights divided by their sum.
    [[nodiscard]] RewardConfig normalized() const;

    static RewardConfig accuracy_only();
    static RewardConfig latency_only();
    static RewardConfig energy_only();
    static RewardConfig multi_objective();
    /// "AO", "LO", "EO" or "MO".
    static RewardConfig preset(std::string_view name);
};

struct ScoreTriple {
    double accuracy_score = 0.0;
    double latency_score = 0.0;
    double energy_score = 0.0;
};

double accuracy_score(double top1_accuracy, const RewardConfig& cfg);
/// 1 - total / full_local. Negative when collaboration is slower than running locally.
double latency_score(double total_latency_ms, double full_local_latency_ms);
double energy_score(double total_energy_j, double full_local_energy_j);

double weighted_score(const ScoreTriple& s, const RewardConfig& cfg);

/// Mean weighted score over the devices that ran a task this slot; 0 when none did.
double fleet_reward(std::span<const ScoreTriple> per_device_scores, const RewardConfig& cfg);

}  // namespace inferedge
