#include "inferedge/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "inferedge/csv.hpp"
#include "inferedge/error.hpp"

namespace inferedge {
namespace {

std::string upper(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

double ratio_or_zero(double num, double den) { return den > 0.0 ? num / den : 0.0; }

}  // namespace

Environment Scenario::make_env() const {
    return Environment(file.config, file.uavs, *store, reward);
}

Scenario load_scenario_bundle(const std::filesystem::path& config,
                              const std::optional<std::filesystem::path>& profiles_override,
                              const std::optional<RewardConfig>& weights_override) {
    Scenario s;
    s.file = load_scenario(config);
    std::filesystem::path profiles;
    if (profiles_override)
        profiles = *profiles_override;
    else if (s.file.profiles_path)
        profiles = *s.file.profiles_path;
    else
        throw ConfigError("scenario '" + config.string() +
                          "' names no profiles file; pass --profiles");
    s.store = std::make_shared<const ProfileStore>(load_profiles(profiles));
    s.reward = weights_override ? *weights_override : s.file.reward.value_or(RewardConfig{});
    s.reward.validate();
    s.file.config.validate(*s.store);
    return s;
}

std::string StrategySpec::name() const {
    switch (kind) {
        case StrategyKind::AO: return "AO";
        case StrategyKind::LO: return "LO";
        case StrategyKind::EO: return "EO";
        case StrategyKind::MO: return "MO";
        case StrategyKind::LocalOnly: return "LOCAL_ONLY";
        case StrategyKind::Oracle: return "ORACLE";
        case StrategyKind::Trained: return "TRAINED";
    }
    return "?";
}

StrategySpec StrategySpec::parse(std::string_view name, std::optional<std::filesystem::path> checkpoint) {
    const std::string n = upper(name);
    StrategySpec s;
    if (n == "AO" || n == "LO" || n == "EO" || n == "MO") {
        s.kind = n == "AO" ? StrategyKind::AO
               : n == "LO" ? StrategyKind::LO
               : n == "EO" ? StrategyKind::EO
                           : StrategyKind::MO;
        s.weights = RewardConfig::preset(n);
    } else if (n == "LOCAL_ONLY" || n == "LOCAL") {
        s.kind = StrategyKind::LocalOnly;
    } else if (n == "ORACLE") {
        s.kind = StrategyKind::Oracle;
    } else if (n == "TRAINED") {
        s.kind = StrategyKind::Trained;
        if (!checkpoint) throw ConfigError("strategy TRAINED needs a checkpoint");
    } else {
        throw ConfigError("unknown strategy '" + std::string(name) +
                          "' (expected AO, LO, EO, MO, LOCAL_ONLY, ORACLE or TRAINED)");
    }
    s.checkpoint = std::move(checkpoint);
    return s;
}

Policy oracle_policy(const RewardConfig& weights) {
    return [weights](const Environment& env) {
        const EnvState& st = env.state();
        std::vector<ExecutionProfile> out(st.devices.size());
        const ServerState server{st.server_queue_ms};
        for (std::size_t k = 0; k < st.devices.size(); ++k) {
            const auto& d = st.devices[k];
            if (!d.alive() || !d.task_active) continue;
            out[k] = best_profile(env.store(), d.family, d.channel, server, weights).profile;
        }
        return out;
    };
}

Policy local_only_policy() {
    return [](const Environment& env) {
        const EnvState& st = env.state();
        std::vector<ExecutionProfile> out(st.devices.size());
        for (std::size_t k = 0; k < st.devices.size(); ++k) {
            const auto& d = st.devices[k];
            if (!d.alive() || !d.task_active) continue;
            const ModelFamily& fam = env.store().family(d.family);
            const int v = fam.heaviest_version();
            out[k] = {v, static_cast<int>(fam.versions[v].cut_points.size()) - 1};
        }
        return out;
    };
}

Policy greedy_policy(std::shared_ptr<const ActorNetwork> actor) {
    return [actor = std::move(actor)](const Environment& env) {
        return greedy_action(*actor, env.encode()).actions;
    };
}

Policy make_policy(const StrategySpec& spec, const Environment& env) {
    switch (spec.kind) {
        case StrategyKind::LocalOnly: return local_only_policy();
        case StrategyKind::Oracle: return oracle_policy(env.reward_config());
        case StrategyKind::Trained: {
            auto agent = A2CAgent::load(*spec.checkpoint);
            if (agent.actor.shape().state_size != env.state_size() ||
                agent.actor.shape().devices != static_cast<int>(env.uavs().size()))
                throw ConfigError("checkpoint '" + spec.checkpoint->string() +
                                  "' was trained for a different fleet or state layout");
            return greedy_policy(std::make_shared<const ActorNetwork>(std::move(agent.actor)));
        }
        default: return oracle_policy(spec.weights);
    }
}

double EvalStats::mean_reward() const { return slots > 0 ? reward_sum / static_cast<double>(slots) : 0.0; }
double EvalStats::mean_accuracy() const { return ratio_or_zero(accuracy_sum, static_cast<double>(tasks)); }
double EvalStats::mean_latency_ms() const { return ratio_or_zero(latency_sum_ms, static_cast<double>(tasks)); }
double EvalStats::mean_energy_j() const { return ratio_or_zero(energy_sum_j, static_cast<double>(tasks)); }
double EvalStats::battery_life_slots() const {
    return episodes > 0 ? static_cast<double>(slots) / episodes : 0.0;
}

EvalStats& EvalStats::operator+=(const EvalStats& o) {
    episodes += o.episodes;
    slots += o.slots;
    tasks += o.tasks;
    reward_sum += o.reward_sum;
    accuracy_sum += o.accuracy_sum;
    latency_sum_ms += o.latency_sum_ms;
    energy_sum_j += o.energy_sum_j;
    return *this;
}

std::uint64_t eval_episode_seed(std::uint64_t seed, int episode) {
    return episode_seed(seed ^ 0xe7a1'0000'0000'0000ULL, episode);
}

EvalStats evaluate_policy(Environment& env, const Policy& policy, std::uint64_t seed, int episodes,
                          std::vector<std::vector<std::string>>* trajectory) {
    EvalStats s;
    const int limit = env.max_episode_slots() + 1;
    for (int ep = 0; ep < episodes; ++ep) {
        env.reset(eval_episode_seed(seed, ep));
        int steps = 0;
        while (!env.done()) {
            if (++steps > limit) throw Error("evaluation episode exceeded its slot bound");
            const EnvState before = env.state();
            const StepOutcome out = env.step(policy(env));
            s.reward_sum += out.reward;
            ++s.slots;
            for (const auto& d : out.per_device) {
                if (d.status != DeviceOutcome::Status::Executed) continue;
                ++s.tasks;
                s.accuracy_sum += d.top1_accuracy;
                s.latency_sum_ms += d.breakdown->total_latency_ms;
                s.energy_sum_j += d.breakdown->total_energy_j;
            }
            if (trajectory) {
                auto rows = trajectory_csv_rows(ep, before, out);
                for (auto& r : rows) trajectory->push_back(std::move(r));
            }
        }
        ++s.episodes;
    }
    return s;
}

const StrategyResult& ExperimentReport::find(std::string_view strategy) const {
    for (const auto& r : results)
        if (r.strategy == strategy) return r;
    throw LookupError("no result for strategy '" + std::string(strategy) + "'");
}

double improvement(double value, double baseline) {
    if (!(baseline > 0.0)) throw NumericError("improvement: baseline must be > 0");
    return 1.0 - value / baseline;
}

const std::vector<std::string>& summary_csv_header() {
    static const std::vector<std::string> h{
        "strategy",        "episodes",       "slots",           "tasks",
        "mean_reward",     "mean_accuracy",  "mean_latency_ms", "mean_energy_j",
        "battery_life_slots", "latency_improvement", "energy_improvement"};
    return h;
}

void write_summary_csv(const std::filesystem::path& path, const ExperimentReport& report) {
    CsvWriter w(path, summary_csv_header());
    for (const auto& r : report.results) {
        const auto& s = r.stats;
        w.row({r.strategy, std::to_string(s.episodes), std::to_string(s.slots), std::to_string(s.tasks),
               format_number(s.mean_reward()), format_number(s.mean_accuracy()),
               format_number(s.mean_latency_ms()), format_number(s.mean_energy_j()),
               format_number(s.battery_life_slots()), format_number(r.latency_improvement),
               format_number(r.energy_improvement)});
    }
}

ExperimentReport read_summary_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    if (t.header != summary_csv_header())
        throw Error("'" + path.string() + "' does not have the summary header");
    ExperimentReport rep;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        StrategyResult r;
        r.strategy = t.text(i, "strategy");
        r.stats.episodes = static_cast<int>(t.number(i, "episodes"));
        r.stats.slots = static_cast<long>(t.number(i, "slots"));
        r.stats.tasks = static_cast<long>(t.number(i, "tasks"));
        const double slots = static_cast<double>(r.stats.slots);
        const double tasks = static_cast<double>(r.stats.tasks);
        r.stats.reward_sum = t.number(i, "mean_reward") * slots;
        r.stats.accuracy_sum = t.number(i, "mean_accuracy") * tasks;
        r.stats.latency_sum_ms = t.number(i, "mean_latency_ms") * tasks;
        r.stats.energy_sum_j = t.number(i, "mean_energy_j") * tasks;
        r.latency_improvement = t.number(i, "latency_improvement");
        r.energy_improvement = t.number(i, "energy_improvement");
        rep.results.push_back(std::move(r));
    }
    return rep;
}

ExperimentReport run_experiment(const Scenario& scenario, const std::vector<StrategySpec>& strategies,
                                const ExperimentOptions& opts) {
    if (opts.seeds <= 0 || opts.episodes_per_seed <= 0)
        throw ConfigError("evaluation needs at least one seed and one episode");
    std::vector<StrategySpec> all = strategies;
    if (std::none_of(all.begin(), all.end(),
                     [](const StrategySpec& s) { return s.kind == StrategyKind::LocalOnly; }))
        all.push_back(StrategySpec::parse("LOCAL_ONLY"));

    const Environment proto = scenario.make_env();
    std::vector<Policy> policies;
    for (const auto& s : all) policies.push_back(make_policy(s, proto));

    const int runs = static_cast<int>(all.size()) * opts.seeds;
    std::vector<EvalStats> stats(runs);
    std::vector<std::vector<std::vector<std::string>>> traj(runs);
    std::string first_error;

#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < runs; ++i) {
        try {
            const int strat = i / opts.seeds;
            const auto seed = opts.base_seed + static_cast<std::uint64_t>(i % opts.seeds);
            Environment env = proto;
            stats[i] = evaluate_policy(env, policies[strat], seed, opts.episodes_per_seed,
                                       opts.write_trajectories ? &traj[i] : nullptr);
        } catch (const std::exception& e) {
#pragma omp critical(inferedge_eval_error)
            if (first_error.empty()) first_error = e.what();
        }
    }
    if (!first_error.empty()) throw Error(first_error);

    ExperimentReport rep;
    for (std::size_t s = 0; s < all.size(); ++s) {
        StrategyResult r;
        r.strategy = all[s].name();
        for (int k = 0; k < opts.seeds; ++k) r.stats += stats[s * opts.seeds + k];
        rep.results.push_back(std::move(r));
    }
    const StrategyResult& base = rep.find("LOCAL_ONLY");
    const double base_lat = base.stats.mean_latency_ms();
    const double base_energy = base.stats.mean_energy_j();
    for (auto& r : rep.results) {
        if (base.stats.tasks == 0) break;
        r.latency_improvement = improvement(r.stats.mean_latency_ms(), base_lat);
        r.energy_improvement = improvement(r.stats.mean_energy_j(), base_energy);
    }

    if (opts.out_dir) {
        std::filesystem::create_directories(*opts.out_dir);
        write_summary_csv(*opts.out_dir / "summary.csv", rep);
        if (opts.write_trajectories) {
            for (std::size_t s = 0; s < all.size(); ++s) {
                auto header = trajectory_csv_header();
                header.insert(header.begin(), "seed");
                CsvWriter w(*opts.out_dir / ("trajectory_" + all[s].name() + ".csv"), header);
                for (int k = 0; k < opts.seeds; ++k)
                    for (auto& row : traj[s * opts.seeds + k]) {
                        row.insert(row.begin(), std::to_string(opts.base_seed + k));
                        w.row(row);
                    }
            }
        }
    }
    return rep;
}

const std::vector<std::string>& training_log_header() {
    static const std::vector<std::string> h{"episode",     "steps",       "total_reward", "mean_reward",
                                            "actor_loss", "critic_loss", "entropy"};
    return h;
}

std::vector<std::string> training_log_row(const EpisodeRecord& r) {
    return {std::to_string(r.episode),     std::to_string(r.steps),
            format_number(r.total_reward), format_number(r.mean_reward),
            format_number(r.actor_loss),   format_number(r.critic_loss),
            format_number(r.entropy)};
}

TrainingLog read_training_log(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    if (t.header != training_log_header())
        throw Error("'" + path.string() + "' does not have the training-log header");
    TrainingLog log;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        EpisodeRecord r;
        r.episode = static_cast<int>(t.number(i, "episode"));
        r.steps = static_cast<int>(t.number(i, "steps"));
        r.total_reward = t.number(i, "total_reward");
        r.mean_reward = t.number(i, "mean_reward");
        r.actor_loss = t.number(i, "actor_loss");
        r.critic_loss = t.number(i, "critic_loss");
        r.entropy = t.number(i, "entropy");
        log.push_back(r);
    }
    return log;
}

std::vector<double> moving_average(const std::vector<double>& values, int window) {
    if (window <= 0) throw ConfigError("moving average window must be > 0");
    std::vector<double> out(values.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        sum += values[i];
        if (i >= static_cast<std::size_t>(window)) sum -= values[i - window];
        out[i] = sum / static_cast<double>(std::min<std::size_t>(i + 1, window));
    }
    return out;
}

A2CAgent run_training(const Scenario& scenario, const TrainingOptions& opts, TrainingLog* log_out) {
    std::filesystem::create_directories(opts.out_dir);
    Environment env = scenario.make_env();
    A2CAgent agent = A2CAgent::for_environment(env, opts.trainer);
    CsvWriter log_csv(opts.out_dir / "training_log.csv", training_log_header());
    std::vector<double> rewards;
    double window_sum = 0.0;
    const int window = 100;

    auto on_episode = [&](const EpisodeRecord& r, const A2CAgent& a) {
        log_csv.row(training_log_row(r));
        rewards.push_back(r.mean_reward);
        window_sum += r.mean_reward;
        if (rewards.size() > static_cast<std::size_t>(window)) window_sum -= rewards[rewards.size() - 1 - window];
        const int done = r.episode + 1;
        if (opts.checkpoint_every > 0 && done % opts.checkpoint_every == 0)
            a.save(opts.out_dir / ("checkpoint_" + std::to_string(done) + ".json"));
        if (opts.progress && opts.report_every > 0 && done % opts.report_every == 0) {
            const double n = static_cast<double>(std::min<std::size_t>(rewards.size(), window));
            *opts.progress << "episode " << done << "  moving-average reward " << window_sum / n << '\n';
        }
    };
    TrainingLog log = train(env, agent, opts.trainer, on_episode);
    agent.save(opts.out_dir / "final_checkpoint.json");
    if (log_out) *log_out = std::move(log);
    return agent;
}

const std::vector<std::string>& fast_sweep_csv_header() {
    static const std::vector<std::string> h{"axis",        "weight",     "family",    "channel",
                                            "version",     "cut_layer",  "latency_ms", "energy_j",
                                            "acc_score",   "lat_score",  "energy_score", "weighted_score"};
    return h;
}

const std::vector<std::string>& full_sweep_csv_header() {
    static const std::vector<std::string> h{"axis",          "weight",          "episodes",
                                            "mean_reward",   "mean_accuracy",   "mean_latency_ms",
                                            "mean_energy_j", "battery_life_slots"};
    return h;
}

SensitivityResult run_sensitivity(const Scenario& scenario, const SensitivityOptions& opts) {
    if (opts.grid.empty()) throw ConfigError("sensitivity grid is empty");
    for (double w : opts.grid)
        if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("sensitivity grid values must lie in [0, 1]");
    SensitivityResult res;
    const std::string axis(axis_name(opts.axis));

    if (opts.mode == SweepMode::Fast) {
        const auto& families = opts.families.empty() ? scenario.file.config.family_set : opts.families;
        std::vector<ChannelState> channels;
        for (const auto& c : scenario.file.config.channel_set)
            if (opts.channels.empty() ||
                std::find(opts.channels.begin(), opts.channels.end(), c.name) != opts.channels.end())
                channels.push_back(c);
        if (channels.empty()) throw ConfigError("no channel of the scenario matches the requested names");
        for (const auto& fam : families)
            for (const auto& ch : channels)
                for (auto& p : weight_sweep(*scenario.store, fam, ch, ServerState{opts.queue_ms}, opts.axis,
                                            opts.grid, scenario.reward, opts.versions))
                    res.fast.push_back({fam, ch.name, std::move(p)});
        if (opts.out_dir) {
            std::filesystem::create_directories(*opts.out_dir);
            CsvWriter w(*opts.out_dir / ("sweep_" + axis + ".csv"), fast_sweep_csv_header());
            for (const auto& r : res.fast) {
                const auto& b = r.point.best;
                w.row({axis, format_number(r.point.weight), r.family, r.channel, b.version_name,
                       std::to_string(b.cut_layer), format_number(b.breakdown.total_latency_ms),
                       format_number(b.breakdown.total_energy_j), format_number(b.scores.accuracy_score),
                       format_number(b.scores.latency_score), format_number(b.scores.energy_score),
                       format_number(b.score)});
            }
        }
        return res;
    }

    for (double weight : opts.grid) {
        Scenario sc = scenario;
        sc.reward = sweep_weights(scenario.reward, opts.axis, weight);
        Environment env = sc.make_env();
        A2CAgent agent = A2CAgent::for_environment(env, opts.trainer);
        train(env, agent, opts.trainer);
        const Policy policy = greedy_policy(std::make_shared<const ActorNetwork>(agent.actor));
        FullSweepRow row{weight, {}};
        for (int k = 0; k < opts.eval_seeds; ++k)
            row.stats += evaluate_policy(env, policy, opts.trainer.seed + static_cast<std::uint64_t>(k),
                                         opts.eval_episodes_per_seed);
        res.full.push_back(row);
    }
    if (opts.out_dir) {
        std::filesystem::create_directories(*opts.out_dir);
        CsvWriter w(*opts.out_dir / ("sweep_" + axis + "_full.csv"), full_sweep_csv_header());
        for (const auto& r : res.full)
            w.row({axis, format_number(r.weight), std::to_string(opts.trainer.episodes),
                   format_number(r.stats.mean_reward()), format_number(r.stats.mean_accuracy()),
                   format_number(r.stats.mean_latency_ms()), format_number(r.stats.mean_energy_j()),
                   format_number(r.stats.battery_life_slots())});
    }
    return res;
}

double BatteryLevelResult::mean() const {
    if (depletion_slots.empty()) return 0.0;
    return std::accumulate(depletion_slots.begin(), depletion_slots.end(), 0.0) /
           static_cast<double>(depletion_slots.size());
}

std::vector<BatteryLevelResult> run_battery_study(const Scenario& scenario, const BatteryOptions& opts) {
    if (opts.runs <= 0) throw ConfigError("battery study needs at least one run");
    if (opts.levels.empty()) throw ConfigError("battery study needs at least one activity level");

    struct Run {
        std::vector<std::vector<std::string>> trace;
        std::vector<double> depletion;
    };
    const int n_levels = static_cast<int>(opts.levels.size());
    std::vector<Scenario> per_level;
    for (const auto& level : opts.levels) {
        Scenario sc = scenario;
        const ActivityProfile act = ActivityProfile::preset(level);
        for (auto& u : sc.file.uavs) u.activity = act;
        if (sc.file.config.activity_concentration <= 0.0)
            sc.file.config.activity_concentration = opts.activity_concentration;
        sc.file.config.validate(*sc.store);
        per_level.push_back(std::move(sc));
    }

    const int total = n_levels * opts.runs;
    std::vector<Run> runs(total);
    std::string first_error;

#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < total; ++i) {
        try {
            const int li = i / opts.runs;
            const int run = i % opts.runs;
            Environment env = per_level[li].make_env();
            const Policy policy = make_policy(opts.strategy, env);
            env.reset(eval_episode_seed(opts.base_seed + static_cast<std::uint64_t>(run), 0));
            const int n = static_cast<int>(env.uavs().size());
            std::vector<double> depleted(n, -1.0);
            const int limit = env.max_episode_slots() + 1;
            auto record = [&](const EnvState& st) {
                for (int k = 0; k < n; ++k)
                    runs[i].trace.push_back({opts.levels[li], std::to_string(run), std::to_string(st.slot_index),
                                             env.uavs()[k].id, format_number(st.devices[k].battery_j),
                                             std::to_string(st.devices[k].battery_level)});
            };
            record(env.state());
            while (!env.done()) {
                if (env.state().slot_index > limit) throw Error("battery study run exceeded its slot bound");
                const StepOutcome out = env.step(policy(env));
                for (int k = 0; k < n; ++k)
                    if (depleted[k] < 0.0 && out.per_device[k].battery_before_j > 0.0 &&
                        out.per_device[k].battery_after_j <= 0.0)
                        depleted[k] = out.next_state.slot_index;
                record(out.next_state);
            }
            runs[i].depletion = std::move(depleted);
        } catch (const std::exception& e) {
#pragma omp critical(inferedge_battery_error)
            if (first_error.empty()) first_error = e.what();
        }
    }
    if (!first_error.empty()) throw Error(first_error);

    std::vector<BatteryLevelResult> out;
    for (int li = 0; li < n_levels; ++li) {
        BatteryLevelResult r{opts.levels[li], {}};
        for (int run = 0; run < opts.runs; ++run) {
            const auto& d = runs[li * opts.runs + run].depletion;
            r.depletion_slots.insert(r.depletion_slots.end(), d.begin(), d.end());
        }
        out.push_back(std::move(r));
    }

    if (opts.out_dir) {
        std::filesystem::create_directories(*opts.out_dir);
        CsvWriter trace(*opts.out_dir / "battery_trace.csv",
                        {"level", "run", "slot", "device", "battery_j", "battery_level"});
        for (auto& r : runs)
            for (const auto& row : r.trace) trace.row(row);
        CsvWriter dep(*opts.out_dir / "battery_depletion.csv", {"level", "run", "device", "depletion_slot"});
        for (int li = 0; li < n_levels; ++li)
            for (int run = 0; run < opts.runs; ++run) {
                const auto& d = runs[li * opts.runs + run].depletion;
                for (std::size_t k = 0; k < d.size(); ++k)
                    dep.row({opts.levels[li], std::to_string(run), scenario.file.uavs[k].id, format_number(d[k])});
            }
        CsvWriter sum(*opts.out_dir / "battery_summary.csv", {"level", "runs", "mean_depletion_slots"});
        for (const auto& r : out) sum.row({r.level, std::to_string(opts.runs), format_number(r.mean())});
    }
    return out;
}

}  // namespace inferedge
