// inferedge: command-line driver for the simulator, planner and trainer.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "inferedge/csv.hpp"
#include "inferedge/error.hpp"
#include "inferedge/harness.hpp"

namespace fs = std::filesystem;
using namespace inferedge;

namespace {

struct Common {
    std::string config = "configs/default.json";
    std::string profiles;
    std::string out = "out";
    std::string weights;
    std::uint64_t seed = 0;
};

std::optional<RewardConfig> parse_weights(const std::string& text) {
    if (text.empty()) return std::nullopt;
    const auto parts = split(text);
    if (parts.size() != 3) throw ConfigError("--weights expects three comma-separated values a,l,e");
    RewardConfig cfg;
    try {
        cfg.w_accuracy = std::stod(parts[0]);
        cfg.w_latency = std::stod(parts[1]);
        cfg.w_energy = std::stod(parts[2]);
    } catch (const std::exception&) {
        throw ConfigError("--weights: '" + text + "' is not three numbers");
    }
    cfg.validate();
    return cfg;
}

Scenario load(const Common& c) {
    std::optional<fs::path> profiles;
    if (!c.profiles.empty()) profiles = c.profiles;
    return load_scenario_bundle(c.config, profiles, parse_weights(c.weights));
}

void add_common(CLI::App* cmd, Common& c, bool with_profiles = true) {
    cmd->add_option("--config", c.config, "Scenario JSON")->capture_default_str();
    if (with_profiles) cmd->add_option("--profiles", c.profiles, "Profile JSON (overrides the scenario's)");
    cmd->add_option("--seed", c.seed, "Base seed")->capture_default_str();
    cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
    cmd->add_option("--weights", c.weights, "Reward weights a,l,e");
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    for (const auto& p : split(text)) {
        try {
            out.push_back(std::stod(p));
        } catch (const std::exception&) {
            throw ConfigError("--grid: '" + p + "' is not a number");
        }
    }
    return out;
}

void print_report(const ExperimentReport& rep) {
    std::cout << "strategy     reward    accuracy  latency_ms  energy_j  life_slots  lat_impr  energy_impr\n";
    for (const auto& r : rep.results) {
        const auto& s = r.stats;
        std::printf("%-11s  %8.4f  %8.4f  %10.2f  %8.4f  %10.2f  %7.1f%%  %10.1f%%\n", r.strategy.c_str(),
                    s.mean_reward(), s.mean_accuracy(), s.mean_latency_ms(), s.mean_energy_j(),
                    s.battery_life_slots(), 100.0 * r.latency_improvement, 100.0 * r.energy_improvement);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collaborative-inference simulator, oracle planner and A2C trainer"};
    app.require_subcommand(1);

    Common c;

    TrainerConfig tcfg;
    int checkpoint_every = 500;
    auto* train_cmd = app.add_subcommand("train", "Train an A2C policy");
    add_common(train_cmd, c);
    train_cmd->add_option("--episodes", tcfg.episodes, "Training episodes")->capture_default_str();
    train_cmd->add_option("--lr", tcfg.learning_rate, "Learning rate")->capture_default_str();
    train_cmd->add_option("--discount", tcfg.discount, "Discount factor")->capture_default_str();
    train_cmd->add_option("--entropy-coef", tcfg.entropy_coef, "Entropy bonus")->capture_default_str();
    train_cmd->add_option("--checkpoint-every", checkpoint_every, "Episodes between checkpoints (0: off)")
        ->capture_default_str();

    std::vector<std::string> strategies{"ORACLE", "MO", "AO", "LO", "EO", "LOCAL_ONLY"};
    std::string checkpoint;
    ExperimentOptions eopts;
    bool trajectories = false;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate strategies against the local-only baseline");
    add_common(eval_cmd, c);
    eval_cmd->add_option("--strategy", strategies, "Strategies to evaluate")->capture_default_str();
    eval_cmd->add_option("--checkpoint", checkpoint, "Checkpoint for TRAINED");
    eval_cmd->add_option("--seeds", eopts.seeds, "Evaluation seeds")->capture_default_str();
    eval_cmd->add_option("--episodes", eopts.episodes_per_seed, "Episodes per seed")->capture_default_str();
    eval_cmd->add_flag("--trajectories", trajectories, "Also write per-slot trajectory CSVs");

    std::string family;
    std::string channel;
    std::vector<int> versions;
    double queue_ms = 0.0;
    auto* oracle_cmd = app.add_subcommand("oracle", "Rank every execution profile of a family");
    add_common(oracle_cmd, c);
    oracle_cmd->add_option("--family", family, "Model family")->required();
    oracle_cmd->add_option("--channel", channel, "Channel name from the scenario")->required();
    oracle_cmd->add_option("--versions", versions, "Restrict to these version indices");
    oracle_cmd->add_option("--queue-ms", queue_ms, "Server queue time")->capture_default_str();

    std::string axis = "energy";
    std::string grid = "0,0.25,0.5,0.75,1";
    std::string mode = "fast";
    std::vector<std::string> families;
    std::vector<std::string> channels;
    int sweep_episodes = 500;
    auto* sweep_cmd = app.add_subcommand("sweep", "Reward-weight sensitivity sweep");
    add_common(sweep_cmd, c);
    sweep_cmd->add_option("--axis", axis, "accuracy, latency or energy")->capture_default_str();
    sweep_cmd->add_option("--grid", grid, "Comma-separated weights in [0, 1]")->capture_default_str();
    sweep_cmd->add_option("--mode", mode, "fast (oracle) or full (training)")->capture_default_str();
    sweep_cmd->add_option("--family", families, "Families (fast mode)");
    sweep_cmd->add_option("--channel", channels, "Channels (fast mode)");
    sweep_cmd->add_option("--versions", versions, "Version indices (fast mode)");
    sweep_cmd->add_option("--queue-ms", queue_ms, "Server queue time (fast mode)")->capture_default_str();
    sweep_cmd->add_option("--episodes", sweep_episodes, "Training episodes per point (full mode)")
        ->capture_default_str();

    BatteryOptions bopts;
    std::string battery_strategy = "MO";
    auto* battery_cmd = app.add_subcommand("battery", "Battery-life study per activity level");
    add_common(battery_cmd, c);
    battery_cmd->add_option("--levels", bopts.levels, "Activity levels")->capture_default_str();
    battery_cmd->add_option("--runs", bopts.runs, "Seeded runs per level")->capture_default_str();
    battery_cmd->add_option("--strategy", battery_strategy, "Planning strategy")->capture_default_str();
    battery_cmd->add_option("--checkpoint", checkpoint, "Checkpoint for TRAINED");

    std::string profiles_path;
    auto* validate_cmd = app.add_subcommand("validate-profiles", "Check a profile file and print a summary");
    validate_cmd->add_option("--profiles", profiles_path, "Profile JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train_cmd) {
            tcfg.seed = c.seed;
            const Scenario sc = load(c);
            TrainingOptions opts{tcfg, c.out, checkpoint_every, 100, &std::cout};
            TrainingLog log;
            run_training(sc, opts, &log);
            std::cout << "wrote " << (fs::path(c.out) / "training_log.csv").string() << " and "
                      << (fs::path(c.out) / "final_checkpoint.json").string() << '\n';
        } else if (*eval_cmd) {
            const Scenario sc = load(c);
            std::vector<StrategySpec> specs;
            std::optional<fs::path> ckpt;
            if (!checkpoint.empty()) ckpt = checkpoint;
            for (const auto& s : strategies) specs.push_back(StrategySpec::parse(s, ckpt));
            eopts.base_seed = c.seed;
            eopts.out_dir = c.out;
            eopts.write_trajectories = trajectories;
            print_report(run_experiment(sc, specs, eopts));
        } else if (*oracle_cmd) {
            const Scenario sc = load(c);
            const ChannelState* ch = nullptr;
            for (const auto& x : sc.file.config.channel_set)
                if (x.name == channel) ch = &x;
            if (!ch) throw ConfigError("channel '" + channel + "' is not in the scenario");
            VersionFilter filter;
            if (!versions.empty()) filter = versions;
            const auto ranked = rank_all(*sc.store, family, *ch, ServerState{queue_ms}, sc.reward, filter);
            fs::create_directories(c.out);
            const fs::path path = fs::path(c.out) / ("oracle_" + family + "_" + channel + ".csv");
            {
                std::ofstream out(path);
                write_ranked_csv(out, family, ranked);
            }
            write_ranked_csv(std::cout, family, ranked);
        } else if (*sweep_cmd) {
            const Scenario sc = load(c);
            SensitivityOptions opts;
            opts.axis = parse_axis(axis);
            opts.grid = parse_grid(grid);
            if (mode == "fast")
                opts.mode = SweepMode::Fast;
            else if (mode == "full")
                opts.mode = SweepMode::Full;
            else
                throw ConfigError("--mode must be fast or full");
            opts.families = families;
            opts.channels = channels;
            if (!versions.empty()) opts.versions = versions;
            opts.queue_ms = queue_ms;
            opts.trainer.episodes = sweep_episodes;
            opts.trainer.seed = c.seed;
            opts.out_dir = c.out;
            const auto res = run_sensitivity(sc, opts);
            for (const auto& r : res.fast)
                std::cout << r.family << ' ' << r.channel << ' ' << axis << '=' << r.point.weight << " -> "
                          << r.point.best.version_name << " cut " << r.point.best.cut_layer << '\n';
            for (const auto& r : res.full)
                std::cout << axis << '=' << r.weight << " reward " << r.stats.mean_reward() << " latency "
                          << r.stats.mean_latency_ms() << " ms energy " << r.stats.mean_energy_j() << " J\n";
        } else if (*battery_cmd) {
            const Scenario sc = load(c);
            std::optional<fs::path> ckpt;
            if (!checkpoint.empty()) ckpt = checkpoint;
            bopts.strategy = StrategySpec::parse(battery_strategy, ckpt);
            bopts.base_seed = c.seed;
            bopts.out_dir = c.out;
            for (const auto& r : run_battery_study(sc, bopts))
                std::cout << r.level << ": mean depletion " << r.mean() << " slots\n";
        } else if (*validate_cmd) {
            const ProfileStore store = load_profiles(profiles_path);
            for (const auto& f : store.families()) {
                std::cout << f.name << ':';
                for (const auto& v : f.versions) std::cout << ' ' << v.name << '(' << v.cut_points.size() << " cuts)";
                std::cout << '\n';
            }
            std::cout << "ok\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
