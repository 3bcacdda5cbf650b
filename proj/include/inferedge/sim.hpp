#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "inferedge/cost.hpp"
#include "inferedge/oracle.hpp"
#include "inferedge/profiles.hpp"
#include "inferedge/reward.hpp"

namespace inferedge {

/// Share of a slot spent in forward flight, vertical motion and rotation; the
/// remainder is hovering.
struct ActivityProfile {
    double forward_frac = 0.0;
    double vertical_frac = 0.0;
    double rotational_frac = 0.0;

    [[nodiscard]] double hover_frac() const {
        return 1.0 - forward_frac - vertical_frac - rotational_frac;
    }
    void validate() const;

    static ActivityProfile high() { return {0.8, 0.1, 0.1}; }
    static ActivityProfile moderate() { return {0.5, 0.25, 0.25}; }
    static ActivityProfile low() { return {0.2, 0.4, 0.4}; }
    /// "High", "Moderate" or "Low".
    static ActivityProfile preset(std::string_view level);

    bool operator==(const ActivityProfile&) const = default;
};

/// Power draw per motion in watts. Defaults follow the ordering vertical >
/// forward > hover > rotational and are not measured values.
struct KineticPowerModel {
    double forward_w = 150.0;
    double vertical_w = 300.0;
    double rotational_w = 80.0;
    double hover_w = 100.0;

    void validate() const;
    [[nodiscard]] double min_power() const;
};

struct UavSpec {
    std::string id;
    std::string build;
    double battery_capacity_j = 500'000.0;
    ActivityProfile activity = ActivityProfile::moderate();
    KineticPowerModel kinetics;
    /// Compute power of the board. Per-cut compute energy is read from the
    /// profiles; this is the rate implied by them (0.79 J over 130.45 ms).
    double compute_power_w = 6.056;
    double tx_power_w = 0.5;

    void validate() const;
};

struct DeviceState {
    double battery_j = 0.0;
    int battery_level = 0;
    bool task_active = false;
    ChannelState channel;
    std::string family;
    ActivityProfile activity_now;

    [[nodiscard]] bool alive() const { return battery_j > 0.0; }
};

struct EnvState {
    std::vector<DeviceState> devices;
    double server_queue_ms = 0.0;
    int slot_index = 0;
};

struct ScenarioConfig {
    double slot_seconds = 30.0;
    double task_probability = 0.9;
    std::vector<ChannelState> channel_set{{"LTE", 8e6, 0.5}, {"WiFi", 20e6, 0.5}};
    std::vector<std::string> family_set{"VGG", "ResNet", "DenseNet"};
    /// External jobs arriving at the server per slot (Poisson mean).
    double server_arrival_rate = 4.0;
    double server_service_ms = 100.0;
    /// Divisor applied to the queue time in the encoded state.
    double queue_scale_ms = 1000.0;
    /// Dirichlet concentration of the per-slot activity draw around each
    /// UAV's profile. 0 keeps the profile fixed.
    double activity_concentration = 0.0;
    std::uint64_t rng_seed = 0;
    std::optional<double> latency_threshold_ms;
    std::optional<double> accuracy_threshold;

    void validate() const;
    /// Also checks that every family exists in the store.
    void validate(const ProfileStore& store) const;
};

struct DeviceOutcome {
    enum class Status { Dead, Idle, Invalid, Executed };
    Status status = Status::Dead;
    std::optional<ExecutionProfile> profile;
    std::optional<CostBreakdown> breakdown;
    std::optional<ScoreTriple> scores;
    std::string family;
    std::string channel;
    std::string version_name;
    int cut_layer = 0;
    double top1_accuracy = 0.0;
    double kinetic_energy_j = 0.0;
    /// Energy actually removed from the battery this slot.
    double drained_j = 0.0;
    double battery_before_j = 0.0;
    double battery_after_j = 0.0;
    bool latency_violation = false;
    bool accuracy_violation = false;
};

struct StepOutcome {
    EnvState next_state;
    double reward = 0.0;
    bool done = false;
    std::vector<DeviceOutcome> per_device;
};

/// Battery accounting grid (2^-20 J). Every energy entering the battery is
/// rounded to it, which keeps the per-step balance exact in double precision.
inline constexpr double kEnergyQuantumJ = 0x1p-20;
double quantize_energy(double joules);

/// ceil(10 * battery / capacity) clamped to [0, 10].
int battery_level(double battery_j, double capacity_j);

double kinetic_energy_j(const UavSpec& spec, const ActivityProfile& activity, double slot_seconds);

/// Length of the encoded state for a fleet of `devices` over `families`.
int encoded_state_size(int devices, int families);

std::vector<double> encode_state(const EnvState& state, const ScenarioConfig& config);

/// The time-slotted fleet environment. Single owner; independent instances
/// may run concurrently.
class Environment {
public:
    Environment(ScenarioConfig config, std::vector<UavSpec> uavs, const ProfileStore& store,
                RewardConfig reward);

    /// Full batteries, fresh exogenous draws. Deterministic given the seed.
    const EnvState& reset(std::uint64_t seed);

    /// Executes one slot. Actions of idle or dead devices are ignored; an
    /// action outside the current family's ranges is skipped and the device
    /// contributes no score.
    StepOutcome step(std::span<const ExecutionProfile> actions);

    [[nodiscard]] const EnvState& state() const noexcept { return state_; }
    [[nodiscard]] std::vector<double> encode() const { return encode_state(state_, config_); }
    [[nodiscard]] int state_size() const;
    [[nodiscard]] bool done() const;

    [[nodiscard]] const ScenarioConfig& config() const noexcept { return config_; }
    [[nodiscard]] const std::vector<UavSpec>& uavs() const noexcept { return uavs_; }
    [[nodiscard]] const ProfileStore& store() const noexcept { return *store_; }
    [[nodiscard]] const RewardConfig& reward_config() const noexcept { return reward_; }
    void set_reward_config(const RewardConfig& reward);

    /// Upper bound on the number of slots before every battery is empty.
    [[nodiscard]] int max_episode_slots() const;

private:
    void draw_exogenous();

    ScenarioConfig config_;
    std::vector<UavSpec> uavs_;
    const ProfileStore* store_;
    RewardConfig reward_;
    std::mt19937_64 rng_;
    EnvState state_;
};

/// Scenario file contents: config, fleet and optional extras.
struct ScenarioFile {
    ScenarioConfig config;
    std::vector<UavSpec> uavs;
    std::optional<std::filesystem::path> profiles_path;
    std::optional<RewardConfig> reward;
};

ScenarioFile parse_scenario(const nlohmann::json& doc,
                            const std::filesystem::path& base_dir = {});
ScenarioFile load_scenario(const std::filesystem::path& path);

/// Trajectory CSV: one row per (slot, device).
const std::vector<std::string>& trajectory_csv_header();
std::vector<std::vector<std::string>> trajectory_csv_rows(int episode, const EnvState& before,
                                                          const StepOutcome& outcome);

}  // namespace inferedge
