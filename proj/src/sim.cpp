#include "inferedge/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "inferedge/csv.hpp"
#include "inferedge/error.hpp"

namespace inferedge {

void ActivityProfile::validate() const {
    for (double f : {forward_frac, vertical_frac, rotational_frac})
        if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("activity fractions must lie in [0, 1]");
    if (forward_frac + vertical_frac + rotational_frac > 1.0 + 1e-12)
        throw ConfigError("activity fractions must sum to at most 1");
}

ActivityProfile ActivityProfile::preset(std::string_view level) {
    if (level == "High") return high();
    if (level == "Moderate") return moderate();
    if (level == "Low") return low();
    throw ConfigError("unknown activity level '" + std::string(level) +
                      "' (expected High, Moderate or Low)");
}

void KineticPowerModel::validate() const {
    for (double p : {forward_w, vertical_w, rotational_w, hover_w})
        if (!(p > 0.0)) throw ConfigError("kinetic powers must be positive");
}

double KineticPowerModel::min_power() const {
    return std::min({forward_w, vertical_w, rotational_w, hover_w});
}

void UavSpec::validate() const {
    const std::string where = "uav '" + id + "': ";
    if (!(battery_capacity_j > 0.0)) throw ConfigError(where + "battery_capacity_j must be > 0");
    if (!(compute_power_w > 0.0)) throw ConfigError(where + "compute_power_w must be > 0");
    if (!(tx_power_w >= 0.0)) throw ConfigError(where + "tx_power_w must be >= 0");
    activity.validate();
    kinetics.validate();
}

void ScenarioConfig::validate() const {
    if (!(slot_seconds > 0.0)) throw ConfigError("slot_seconds must be > 0");
    if (!(task_probability >= 0.0 && task_probability <= 1.0))
        throw ConfigError("task_probability must lie in [0, 1]");
    if (channel_set.empty()) throw ConfigError("channel_set must not be empty");
    for (const auto& c : channel_set) c.validate();
    if (family_set.empty()) throw ConfigError("family_set must not be empty");
    if (!(server_arrival_rate >= 0.0)) throw ConfigError("server_arrival_rate must be >= 0");
    if (!(server_service_ms >= 0.0)) throw ConfigError("server_service_ms must be >= 0");
    if (!(queue_scale_ms > 0.0)) throw ConfigError("queue_scale_ms must be > 0");
    if (!(activity_concentration >= 0.0)) throw ConfigError("activity_concentration must be >= 0");
}

void ScenarioConfig::validate(const ProfileStore& store) const {
    validate();
    for (const auto& f : family_set)
        if (!store.contains(f)) throw ConfigError("scenario family '" + f + "' not in profiles");
}

double quantize_energy(double joules) {
    return std::round(joules / kEnergyQuantumJ) * kEnergyQuantumJ;
}

int battery_level(double battery_j, double capacity_j) {
    if (battery_j <= 0.0) return 0;
    const double level = std::ceil(10.0 * battery_j / capacity_j);
    return static_cast<int>(std::clamp(level, 0.0, 10.0));
}

double kinetic_energy_j(const UavSpec& spec, const ActivityProfile& a, double slot_seconds) {
    const auto& k = spec.kinetics;
    return slot_seconds * (a.forward_frac * k.forward_w + a.vertical_frac * k.vertical_w +
                           a.rotational_frac * k.rotational_w + a.hover_frac() * k.hover_w);
}

int encoded_state_size(int devices, int families) { return devices * (3 + families + 3) + 1; }

std::vector<double> encode_state(const EnvState& state, const ScenarioConfig& config) {
    const int nfam = static_cast<int>(config.family_set.size());
    double max_bw = 0.0;
    for (const auto& c : config.channel_set) max_bw = std::max(max_bw, c.bandwidth_bps);

    std::vector<double> out;
    out.reserve(encoded_state_size(static_cast<int>(state.devices.size()), nfam));
    for (const auto& d : state.devices) {
        out.push_back(d.battery_level / 10.0);
        out.push_back(d.task_active ? 1.0 : 0.0);
        out.push_back(d.alive() ? d.channel.bandwidth_bps / max_bw : 0.0);
        for (int f = 0; f < nfam; ++f) out.push_back(config.family_set[f] == d.family ? 1.0 : 0.0);
        out.push_back(d.activity_now.forward_frac);
        out.push_back(d.activity_now.vertical_frac);
        out.push_back(d.activity_now.rotational_frac);
    }
    out.push_back(state.server_queue_ms / config.queue_scale_ms);
    return out;
}

Environment::Environment(ScenarioConfig config, std::vector<UavSpec> uavs,
                         const ProfileStore& store, RewardConfig reward)
    : config_(std::move(config)), uavs_(std::move(uavs)), store_(&store), reward_(reward) {
    if (uavs_.empty()) throw ConfigError("scenario needs at least one UAV");
    config_.validate(store);
    for (const auto& u : uavs_) u.validate();
    reward_.validate();
    reset(config_.rng_seed);
}

void Environment::set_reward_config(const RewardConfig& reward) {
    reward.validate();
    reward_ = reward;
}

int Environment::state_size() const {
    return encoded_state_size(static_cast<int>(uavs_.size()),
                              static_cast<int>(config_.family_set.size()));
}

bool Environment::done() const {
    return std::none_of(state_.devices.begin(), state_.devices.end(),
                        [](const DeviceState& d) { return d.alive(); });
}

int Environment::max_episode_slots() const {
    double worst = 0.0;
    for (const auto& u : uavs_)
        worst = std::max(worst, u.battery_capacity_j / (u.kinetics.min_power() * config_.slot_seconds));
    return static_cast<int>(std::ceil(worst));
}

const EnvState& Environment::reset(std::uint64_t seed) {
    rng_.seed(seed);
    state_ = EnvState{};
    state_.devices.resize(uavs_.size());
    for (std::size_t k = 0; k < uavs_.size(); ++k) {
        auto& d = state_.devices[k];
        d.battery_j = quantize_energy(uavs_[k].battery_capacity_j);
        d.battery_level = battery_level(d.battery_j, uavs_[k].battery_capacity_j);
    }
    draw_exogenous();
    return state_;
}

// Every device gets the same number of draws each slot, alive or not, so the
// exogenous sequence does not depend on the actions taken.
void Environment::draw_exogenous() {
    std::bernoulli_distribution task(config_.task_probability);
    std::uniform_int_distribution<std::size_t> pick_channel(0, config_.channel_set.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_family(0, config_.family_set.size() - 1);

    for (std::size_t k = 0; k < uavs_.size(); ++k) {
        auto& d = state_.devices[k];
        const UavSpec& spec = uavs_[k];
        const bool has_task = task(rng_);
        const ChannelState& ch = config_.channel_set[pick_channel(rng_)];
        const std::string& fam = config_.family_set[pick_family(rng_)];

        ActivityProfile act = spec.activity;
        if (config_.activity_concentration > 0.0) {
            const double mean[4] = {act.forward_frac, act.vertical_frac, act.rotational_frac,
                                    std::max(0.0, act.hover_frac())};
            double draw[4] = {0.0, 0.0, 0.0, 0.0};
            double sum = 0.0;
            for (int i = 0; i < 4; ++i) {
                if (mean[i] <= 0.0) continue;
                std::gamma_distribution<double> g(config_.activity_concentration * mean[i], 1.0);
                draw[i] = g(rng_);
                sum += draw[i];
            }
            if (sum > 0.0) act = {draw[0] / sum, draw[1] / sum, draw[2] / sum};
        }

        d.channel = ChannelState{ch.name, ch.bandwidth_bps, spec.tx_power_w};
        d.family = fam;
        d.activity_now = act;
        d.task_active = d.alive() && has_task;
    }

    const double mean_jobs = config_.server_arrival_rate;
    int jobs = 0;
    if (mean_jobs > 0.0) {
        std::poisson_distribution<int> arrivals(mean_jobs);
        jobs = arrivals(rng_);
    }
    state_.server_queue_ms = jobs * config_.server_service_ms;
}

StepOutcome Environment::step(std::span<const ExecutionProfile> actions) {
    if (actions.size() != state_.devices.size())
        throw ConfigError("step: got " + std::to_string(actions.size()) + " actions for " +
                          std::to_string(state_.devices.size()) + " devices");

    StepOutcome out;
    out.per_device.resize(state_.devices.size());
    if (done()) {
        for (std::size_t k = 0; k < state_.devices.size(); ++k) out.per_device[k].family = state_.devices[k].family;
        out.next_state = state_;
        out.done = true;
        return out;
    }

    const ServerState server{state_.server_queue_ms};
    std::vector<ScoreTriple> scored;
    for (std::size_t k = 0; k < state_.devices.size(); ++k) {
        auto& d = state_.devices[k];
        auto& o = out.per_device[k];
        const UavSpec& spec = uavs_[k];
        o.family = d.family;
        o.channel = d.channel.name;
        o.battery_before_j = d.battery_j;
        o.battery_after_j = d.battery_j;
        if (!d.alive()) {
            o.status = DeviceOutcome::Status::Dead;
            continue;
        }

        o.kinetic_energy_j = quantize_energy(kinetic_energy_j(spec, d.activity_now, config_.slot_seconds));
        double inference_j = 0.0;
        if (!d.task_active) {
            o.status = DeviceOutcome::Status::Idle;
        } else {
            const ExecutionProfile a = actions[k];
            const ModelFamily& fam = store_->family(d.family);
            const bool valid = a.version_index >= 0 &&
                               a.version_index < static_cast<int>(fam.versions.size()) &&
                               a.cut_index >= 0 &&
                               a.cut_index < static_cast<int>(fam.versions[a.version_index].cut_points.size());
            if (!valid) {
                o.status = DeviceOutcome::Status::Invalid;
            } else {
                RankedProfile r = score_profile(fam, a, d.channel, server, reward_);
                CostBreakdown b = r.breakdown;
                b.comp_energy_j = quantize_energy(b.comp_energy_j);
                b.trans_energy_j = quantize_energy(b.trans_energy_j);
                b.total_energy_j = b.comp_energy_j + b.trans_energy_j;
                const VersionProfile& v = fam.versions[a.version_index];
                ScoreTriple s = r.scores;
                s.energy_score = energy_score(b.total_energy_j, v.full_local_energy_j);

                o.status = DeviceOutcome::Status::Executed;
                o.profile = a;
                o.breakdown = b;
                o.scores = s;
                o.version_name = v.name;
                o.cut_layer = r.cut_layer;
                o.top1_accuracy = v.top1_accuracy;
                if (config_.latency_threshold_ms)
                    o.latency_violation = b.total_latency_ms > *config_.latency_threshold_ms;
                if (config_.accuracy_threshold)
                    o.accuracy_violation = v.top1_accuracy < *config_.accuracy_threshold;
                inference_j = b.total_energy_j;
                scored.push_back(s);
            }
        }

        const double demand = o.kinetic_energy_j + inference_j;
        const double before = d.battery_j;
        d.battery_j = demand >= before ? 0.0 : before - demand;
        d.battery_level = battery_level(d.battery_j, spec.battery_capacity_j);
        o.drained_j = before - d.battery_j;
        o.battery_after_j = d.battery_j;
    }

    out.reward = fleet_reward(scored, reward_);
    draw_exogenous();
    ++state_.slot_index;
    out.done = done();
    out.next_state = state_;
    return out;
}

namespace {

using nlohmann::json;

double opt_number(const json& j, const char* key, double fallback) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    if (!it->is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
    return it->get<double>();
}

ActivityProfile parse_activity(const json& j) {
    if (j.is_string()) return ActivityProfile::preset(j.get<std::string>());
    if (!j.is_object()) throw ConfigError("activity must be a level name or an object");
    return {opt_number(j, "forward", 0.0), opt_number(j, "vertical", 0.0),
            opt_number(j, "rotational", 0.0)};
}

UavSpec parse_uav(const json& j, std::size_t index) {
    if (!j.is_object()) throw ConfigError("uav entries must be objects");
    UavSpec u;
    u.id = j.value("id", "uav" + std::to_string(index));
    u.build = j.value("build", std::string("generic"));
    u.battery_capacity_j = opt_number(j, "battery_capacity_j", u.battery_capacity_j);
    if (j.contains("activity")) u.activity = parse_activity(j["activity"]);
    if (j.contains("kinetics")) {
        const json& k = j["kinetics"];
        u.kinetics.forward_w = opt_number(k, "forward_w", u.kinetics.forward_w);
        u.kinetics.vertical_w = opt_number(k, "vertical_w", u.kinetics.vertical_w);
        u.kinetics.rotational_w = opt_number(k, "rotational_w", u.kinetics.rotational_w);
        u.kinetics.hover_w = opt_number(k, "hover_w", u.kinetics.hover_w);
    }
    u.compute_power_w = opt_number(j, "compute_power_w", u.compute_power_w);
    u.tx_power_w = opt_number(j, "tx_power_w", u.tx_power_w);
    u.validate();
    return u;
}

}  // namespace

ScenarioFile parse_scenario(const json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) throw ConfigError("scenario must be a JSON object");
    ScenarioFile out;
    ScenarioConfig& c = out.config;
    try {
        c.slot_seconds = opt_number(doc, "slot_seconds", c.slot_seconds);
        c.task_probability = opt_number(doc, "task_probability", c.task_probability);
        if (doc.contains("channels")) {
            c.channel_set.clear();
            for (const json& ch : doc["channels"])
                c.channel_set.push_back(ChannelState{ch.at("name").get<std::string>(),
                                                     ch.at("bandwidth_bps").get<double>(),
                                                     opt_number(ch, "tx_power_w", 0.5)});
        }
        if (doc.contains("families")) c.family_set = doc["families"].get<std::vector<std::string>>();
        c.server_arrival_rate = opt_number(doc, "server_arrival_rate", c.server_arrival_rate);
        c.server_service_ms = opt_number(doc, "server_service_ms", c.server_service_ms);
        c.queue_scale_ms = opt_number(doc, "queue_scale_ms", c.queue_scale_ms);
        c.activity_concentration = opt_number(doc, "activity_concentration", c.activity_concentration);
        c.rng_seed = doc.value("rng_seed", std::uint64_t{0});
        if (doc.contains("latency_threshold_ms") && !doc["latency_threshold_ms"].is_null())
            c.latency_threshold_ms = doc["latency_threshold_ms"].get<double>();
        if (doc.contains("accuracy_threshold") && !doc["accuracy_threshold"].is_null())
            c.accuracy_threshold = doc["accuracy_threshold"].get<double>();

        if (!doc.contains("uavs") || !doc["uavs"].is_array())
            throw ConfigError("scenario needs a 'uavs' array");
        for (std::size_t i = 0; i < doc["uavs"].size(); ++i)
            out.uavs.push_back(parse_uav(doc["uavs"][i], i));

        if (doc.contains("profiles")) {
            std::filesystem::path p = doc["profiles"].get<std::string>();
            out.profiles_path = p.is_absolute() ? p : base_dir / p;
        }
        if (doc.contains("reward")) {
            const json& r = doc["reward"];
            RewardConfig rc;
            if (r.contains("preset")) rc = RewardConfig::preset(r["preset"].get<std::string>());
            rc.w_accuracy = opt_number(r, "w_accuracy", rc.w_accuracy);
            rc.w_latency = opt_number(r, "w_latency", rc.w_latency);
            rc.w_energy = opt_number(r, "w_energy", rc.w_energy);
            rc.sigmoid_p = opt_number(r, "sigmoid_p", rc.sigmoid_p);
            rc.sigmoid_q = opt_number(r, "sigmoid_q", rc.sigmoid_q);
            rc.validate();
            out.reward = rc;
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    if (out.uavs.empty()) throw ConfigError("scenario needs at least one UAV");
    c.validate();
    return out;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path.string() + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError("'" + path.string() + "': " + e.what());
    }
    return parse_scenario(doc, path.parent_path());
}

const std::vector<std::string>& trajectory_csv_header() {
    static const std::vector<std::string> header{
        "episode",     "slot",          "device",       "battery_j",     "battery_level",
        "task_active", "family",        "channel",      "queue_ms",      "status",
        "version",     "cut_layer",     "latency_ms",   "energy_j",      "kinetic_j",
        "acc_score",   "lat_score",     "energy_score", "reward"};
    return header;
}

std::vector<std::vector<std::string>> trajectory_csv_rows(int episode, const EnvState& before,
                                                          const StepOutcome& outcome) {
    static constexpr const char* kStatus[] = {"dead", "idle", "invalid", "executed"};
    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k < outcome.per_device.size(); ++k) {
        const auto& d = before.devices[k];
        const auto& o = outcome.per_device[k];
        const bool ran = o.status == DeviceOutcome::Status::Executed;
        rows.push_back({std::to_string(episode),
                        std::to_string(before.slot_index),
                        std::to_string(k),
                        format_number(d.battery_j),
                        std::to_string(d.battery_level),
                        d.task_active ? "1" : "0",
                        d.family,
                        d.channel.name,
                        format_number(before.server_queue_ms),
                        kStatus[static_cast<int>(o.status)],
                        ran ? o.version_name : "",
                        ran ? std::to_string(o.cut_layer) : "",
                        ran ? format_number(o.breakdown->total_latency_ms) : "",
                        ran ? format_number(o.breakdown->total_energy_j) : "",
                        format_number(o.kinetic_energy_j),
                        ran ? format_number(o.scores->accuracy_score) : "",
                        ran ? format_number(o.scores->latency_score) : "",
                        ran ? format_number(o.scores->energy_score) : "",
                        format_number(outcome.reward)});
    }
    return rows;
}

}  // namespace inferedge
