#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "inferedge/agent.hpp"
#include "inferedge/sim.hpp"

namespace inferedge {

/// A scenario file resolved together with its profile store and reward weights.
struct Scenario {
    ScenarioFile file;
    std::shared_ptr<const ProfileStore> store;
    RewardConfig reward;

    [[nodiscard]] Environment make_env() const;
};

/// Profiles come from `profiles_override` when given, otherwise from the
/// scenario's own "profiles" entry. `weights_override` replaces its reward weights.
Scenario load_scenario_bundle(const std::filesystem::path& config,
                              const std::optional<std::filesystem::path>& profiles_override = {},
                              const std::optional<RewardConfig>& weights_override = {});

enum class StrategyKind { AO, LO, EO, MO, LocalOnly, Oracle, Trained };

struct StrategySpec {
    StrategyKind kind = StrategyKind::MO;
    /// Planning weights; for ORACLE these are the scenario weights.
    RewardConfig weights;
    std::optional<std::filesystem::path> checkpoint;

    [[nodiscard]] std::string name() const;
    /// AO, LO, EO, MO, LOCAL_ONLY, ORACLE or TRAINED (case-insensitive).
    static StrategySpec parse(std::string_view name,
                              std::optional<std::filesystem::path> checkpoint = {});
};

/// Decides the profiles of every device for the environment's current slot.
using Policy = std::function<std::vector<ExecutionProfile>(const Environment&)>;

Policy oracle_policy(const RewardConfig& weights);
Policy local_only_policy();
Policy greedy_policy(std::shared_ptr<const ActorNetwork> actor);
/// ORACLE picks up the environment's own weights.
Policy make_policy(const StrategySpec& spec, const Environment& env);

struct EvalStats {
    int episodes = 0;
    long slots = 0;
    long tasks = 0;
    double reward_sum = 0.0;
    double accuracy_sum = 0.0;
    double latency_sum_ms = 0.0;
    double energy_sum_j = 0.0;

    [[nodiscard]] double mean_reward() const;  ///< per slot
    [[nodiscard]] double mean_accuracy() const;  ///< per executed task
    [[nodiscard]] double mean_latency_ms() const;
    [[nodiscard]] double mean_energy_j() const;
    [[nodiscard]] double battery_life_slots() const;  ///< mean episode length

    EvalStats& operator+=(const EvalStats& other);
};

/// Seed of the `episode`-th evaluation episode under `seed`; disjoint from training seeds.
std::uint64_t eval_episode_seed(std::uint64_t seed, int episode);

/// Runs `episodes` episodes. Trajectory rows are appended when `trajectory` is set.
EvalStats evaluate_policy(Environment& env, const Policy& policy, std::uint64_t seed,
                          int episodes, std::vector<std::vector<std::string>>* trajectory = nullptr);

struct StrategyResult {
    std::string strategy;
    EvalStats stats;
    double latency_improvement = 0.0;  ///< 1 - latency / local-only latency
    double energy_improvement = 0.0;
};

struct ExperimentReport {
    std::vector<StrategyResult> results;
    [[nodiscard]] const StrategyResult& find(std::string_view strategy) const;
};

const std::vector<std::string>& summary_csv_header();
void write_summary_csv(const std::filesystem::path& path, const ExperimentReport& report);
ExperimentReport read_summary_csv(const std::filesystem::path& path);

double improvement(double value, double baseline);

struct ExperimentOptions {
    int seeds = 20;
    int episodes_per_seed = 5;
    std::uint64_t base_seed = 0;
    std::optional<std::filesystem::path> out_dir;
    bool write_trajectories = false;
};

/// Evaluates each strategy plus LOCAL_ONLY (always added as the baseline).
ExperimentReport run_experiment(const Scenario& scenario, const std::vector<StrategySpec>& strategies,
                                const ExperimentOptions& opts);

struct TrainingOptions {
    TrainerConfig trainer;
    std::filesystem::path out_dir;
    int checkpoint_every = 500;  ///< 0 disables periodic checkpoints
    int report_every = 100;
    std::ostream* progress = nullptr;
};

const std::vector<std::string>& training_log_header();
std::vector<std::string> training_log_row(const EpisodeRecord& r);
TrainingLog read_training_log(const std::filesystem::path& path);

/// Trailing moving average of `window` values ending at each index.
std::vector<double> moving_average(const std::vector<double>& values, int window);

/// Trains and writes training_log.csv, periodic checkpoints and final_checkpoint.json.
A2CAgent run_training(const Scenario& scenario, const TrainingOptions& opts,
                      TrainingLog* log_out = nullptr);

enum class SweepMode { Fast, Full };

struct SensitivityOptions {
    WeightAxis axis = WeightAxis::Energy;
    std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
    SweepMode mode = SweepMode::Fast;
    /// Fast mode: families to sweep (empty means the scenario's family set).
    std::vector<std::string> families;
    /// Fast mode: channels to sweep (empty means the scenario's channel set).
    std::vector<std::string> channels;
    VersionFilter versions;
    double queue_ms = 0.0;
    /// Full mode.
    TrainerConfig trainer;
    int eval_seeds = 4;
    int eval_episodes_per_seed = 5;
    std::optional<std::filesystem::path> out_dir;
};

struct FastSweepRow {
    std::string family;
    std::string channel;
    SweepPoint point;
};

struct FullSweepRow {
    double weight = 0.0;
    EvalStats stats;
};

struct SensitivityResult {
    std::vector<FastSweepRow> fast;
    std::vector<FullSweepRow> full;
};

const std::vector<std::string>& fast_sweep_csv_header();
const std::vector<std::string>& full_sweep_csv_header();

SensitivityResult run_sensitivity(const Scenario& scenario, const SensitivityOptions& opts);

struct BatteryOptions {
    std::vector<std::string> levels{"High", "Moderate", "Low"};
    int runs = 50;
    std::uint64_t base_seed = 0;
    /// Dirichlet concentration used when the scenario keeps activity fixed.
    double activity_concentration = 100.0;
    StrategySpec strategy;
    std::optional<std::filesystem::path> out_dir;
};

struct BatteryLevelResult {
    std::string level;
    std::vector<double> depletion_slots;  ///< per (run, device)
    [[nodiscard]] double mean() const;
};

/// Every UAV flies the level's activity profile; depletion is the slot at
/// which a device's battery first reaches zero.
std::vector<BatteryLevelResult> run_battery_study(const Scenario& scenario,
                                                  const BatteryOptions& opts);

}  // namespace inferedge
