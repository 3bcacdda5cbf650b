#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "inferedge/neural/adam.hpp"
#include "inferedge/neural/mlp.hpp"
#include "inferedge/oracle.hpp"
#include "inferedge/sim.hpp"

namespace inferedge {

struct ActorShape {
    int state_size = 0;
    int devices = 0;
    int versions = 0;  ///< width of each version head
    int cuts = 0;      ///< width of each cut head
    std::vector<int> trunk_hidden{512, 256};
    int device_hidden = 128;
};

/// Shared trunk, then one 128-wide layer per device feeding that device's
/// version and cut heads. The two heads of a device are stored as one linear
/// layer whose first `versions` outputs are version logits and the rest cut
/// logits.
class ActorNetwork {
public:
    ActorNetwork() = default;
    ActorNetwork(ActorShape shape, std::mt19937_64& rng);

    [[nodiscard]] const ActorShape& shape() const noexcept { return shape_; }

    /// Per-device probabilities for one state.
    struct Policy {
        std::vector<std::vector<double>> version_probs;
        std::vector<std::vector<double>> cut_probs;
    };
    [[nodiscard]] Policy policy(std::span<const double> state) const;

    Mlp trunk;
    std::vector<Mlp> device_layers;
    std::vector<Mlp> heads;

    [[nodiscard]] nlohmann::json to_json() const;
    static ActorNetwork from_json(const nlohmann::json& doc);

private:
    ActorShape shape_;
};

struct ActionSample {
    std::vector<ExecutionProfile> actions;
    /// Sum over devices of log p(version) + log p(cut).
    double log_prob = 0.0;
    double entropy = 0.0;
};

ActionSample select_action(const ActorNetwork& actor, std::span<const double> state,
                           std::mt19937_64& rng);
/// Argmax of every head.
ActionSample greedy_action(const ActorNetwork& actor, std::span<const double> state);

struct Transition {
    std::vector<double> state;
    std::vector<ExecutionProfile> actions;
    double log_prob = 0.0;
    double reward = 0.0;
    double value_estimate = 0.0;
};

/// R_t = r_t + discount * R_{t+1}, with nothing beyond the last step.
std::vector<double> compute_returns(std::span<const double> rewards, double discount);
std::vector<double> compute_advantages(std::span<const double> returns,
                                       std::span<const double> values);

struct TrainerConfig {
    int episodes = 5000;
    double discount = 0.99;
    double learning_rate = 5e-5;
    double entropy_coef = 0.01;
    double value_loss_coef = 0.5;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Gradients of the actor loss, one flat buffer per sub-network.
struct ActorGradients {
    std::vector<double> trunk;
    std::vector<std::vector<double>> device_layers;
    std::vector<std::vector<double>> heads;
    double loss = 0.0;
    double mean_entropy = 0.0;
};

/// Gradient of -mean(log_prob * advantage) - entropy_coef * mean(entropy).
/// Advantages are constants here.
ActorGradients compute_actor_gradients(const ActorNetwork& actor,
                                       const std::vector<Transition>& buffer,
                                       std::span<const double> advantages, double entropy_coef);

struct LossReport {
    double actor_loss = 0.0;
    double critic_loss = 0.0;
    double entropy = 0.0;
    std::size_t transitions = 0;
};

struct EpisodeRecord {
    int episode = 0;
    int steps = 0;
    double total_reward = 0.0;
    double mean_reward = 0.0;
    double actor_loss = 0.0;
    double critic_loss = 0.0;
    double entropy = 0.0;
    /// Transitions consumed by this episode's update.
    std::size_t updated_transitions = 0;
};

using TrainingLog = std::vector<EpisodeRecord>;

/// Actor, critic and their optimizer state.
class A2CAgent {
public:
    A2CAgent() = default;
    A2CAgent(ActorShape shape, const TrainerConfig& cfg);
    /// Sizes the actor from an environment and its profile store.
    static A2CAgent for_environment(const Environment& env, const TrainerConfig& cfg,
                                    std::vector<int> trunk_hidden = {512, 256},
                                    int device_hidden = 128);

    ActorNetwork actor;
    Mlp critic;

    /// Critic outputs for a batch of transitions' states.
    [[nodiscard]] std::vector<double> values(const std::vector<Transition>& buffer) const;

    /// One synchronous update over an episode buffer: fills value estimates,
    /// computes returns and advantages, steps both optimizers once.
    LossReport update(std::vector<Transition>& buffer, const TrainerConfig& cfg);

    void save(const std::filesystem::path& path) const;
    static A2CAgent load(const std::filesystem::path& path);

    [[nodiscard]] nlohmann::json to_json() const;
    static A2CAgent from_json(const nlohmann::json& doc);

private:
    AdamOptimizer trunk_opt_;
    std::vector<AdamOptimizer> device_opts_;
    std::vector<AdamOptimizer> head_opts_;
    AdamOptimizer critic_opt_;
};

using EpisodeCallback = std::function<void(const EpisodeRecord&, const A2CAgent&)>;

/// Seed of the environment reset for a given training episode.
std::uint64_t episode_seed(std::uint64_t base, int episode);

/// Rolls out one episode per iteration until every battery is empty and
/// updates once at the end of each episode.
TrainingLog train(Environment& env, A2CAgent& agent, const TrainerConfig& cfg,
                  const EpisodeCallback& on_episode = {});

}  // namespace inferedge
