// Acceptance checks. Prints one PASS/FAIL line per criterion; `--criterion N`
// runs a single one. Exit status is nonzero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "inferedge/agent.hpp"
#include "inferedge/error.hpp"
#include "inferedge/harness.hpp"
#include "inferedge/neural/mlp.hpp"
#include "inferedge/oracle.hpp"

using namespace inferedge;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = INFEREDGE_SOURCE_DIR;
const ChannelState kLte{"LTE", 8e6, 0.5};
const ChannelState kWifi{"WiFi", 20e6, 0.5};

struct Result {
    bool pass = false;
    std::string detail;
};

const ProfileStore& store() {
    static const ProfileStore s = load_profiles(kRoot / "profiles" / "paper_tx2.json");
    return s;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Published end-to-end totals per (version, cut): latency LTE, latency WiFi,
// energy LTE, energy WiFi.
struct PaperRow {
    const char* family;
    const char* version;
    int layer;
    double lat_lte, lat_wifi, e_lte, e_wifi;
};

const PaperRow kPaperTotals[] = {
    {"VGG", "VGG11", 3, 3248.757, 1409.057, 2.32, 1.40},
    {"VGG", "VGG11", 6, 1856.29, 938.89, 2.31, 1.85},
    {"VGG", "VGG11", 11, 1289.1896, 828.3896, 3.27, 3.04},
    {"VGG", "VGG11", 27, 1048.48, 1046.48, 6.17, 6.17},
    {"VGG", "VGG19", 5, 3458.22, 1625.52, 3.47, 2.55},
    {"VGG", "VGG19", 10, 2186.29, 1197.89, 4.33, 3.87},
    {"VGG", "VGG19", 19, 1838.9852, 1379.1852, 6.57, 6.34},
    {"VGG", "VGG19", 43, 1866.89, 1864.89, 11.28, 11.28},
    {"ResNet", "ResNet18", 4, 889.29, 430.29, 1.65, 1.42},
    {"ResNet", "ResNet18", 15, 783.18, 552.18, 2.97, 2.86},
    {"ResNet", "ResNet18", 20, 583.45, 526.36, 2.56, 2.54},
    {"ResNet", "ResNet18", 49, 631.59, 629.59, 3.73, 3.73},
    {"ResNet", "ResNet50", 4, 905.11, 445.31, 1.15, 0.92},
    {"ResNet", "ResNet50", 13, 1046.18, 586.58, 2.43, 2.20},
    {"ResNet", "ResNet50", 20, 1126.57, 666.77, 3.38, 3.15},
    {"ResNet", "ResNet50", 115, 988.62, 986.62, 7.84, 7.61},
    {"DenseNet", "DenseNet121", 4, 902.03, 442.23, 0.98, 0.75},
    {"DenseNet", "DenseNet121", 6, 1322.96, 1092.96, 5.79, 5.68},
    {"DenseNet", "DenseNet121", 8, 2117.93, 2003.03, 11.74, 11.69},
    {"DenseNet", "DenseNet121", 14, 4296.17, 4294.17, 28.00, 28.00},
    {"DenseNet", "DenseNet161", 4, 1360.07, 671.47, 1.25, 0.90},
    {"DenseNet", "DenseNet161", 6, 1759.22, 1392.82, 6.84, 6.67},
    {"DenseNet", "DenseNet161", 8, 2842.54, 2669.20, 15.61, 15.53},
    {"DenseNet", "DenseNet161", 14, 7849.49, 7847.49, 51.00, 51.00},
};

const CutPointProfile& find_cut(const char* family, const char* version, int layer) {
    const ModelFamily& f = store().family(family);
    for (const auto& v : f.versions)
        if (v.name == version)
            for (const auto& c : v.cut_points)
                if (c.layer_id == layer) return c;
    throw LookupError(std::string("no cut ") + version + "/" + std::to_string(layer));
}

Result cost_reproduction() {
    int ok = 0, total = 0;
    double worst = 0.0;
    std::string misses;
    for (const auto& r : kPaperTotals) {
        const CutPointProfile& cut = find_cut(r.family, r.version, r.layer);
        const struct {
            const ChannelState* ch;
            double lat, e;
        } bands[] = {{&kLte, r.lat_lte, r.e_lte}, {&kWifi, r.lat_wifi, r.e_wifi}};
        for (const auto& b : bands) {
            const CostBreakdown got = evaluate_profile(cut, *b.ch, {0.0});
            const double dl = std::abs(got.total_latency_ms - b.lat) / b.lat;
            const double de = std::abs(got.total_energy_j - b.e) / b.e;
            worst = std::max({worst, dl, de});
            ++total;
            if (dl <= 0.005 && de <= 0.005) {
                ++ok;
            } else {
                misses += std::string(misses.empty() ? "" : "; ") + r.version + "@" + std::to_string(r.layer) +
                          "/" + b.ch->name + " lat " + fmt("%.2f%%", 100 * dl) + " energy " + fmt("%.2f%%", 100 * de);
            }
        }
    }
    std::string d = std::to_string(ok) + "/" + std::to_string(total) + " (version, cut, band) totals within 0.5%";
    if (!misses.empty()) d += "; outside: " + misses;
    return {ok == total, d};
}

int oracle_cut(const char* family, const ChannelState& ch, const RewardConfig& w) {
    return best_profile(store(), family, ch, {0.0}, w, std::vector<int>{1}).cut_layer;
}

Result cut_selection() {
    struct Cell {
        const char* label;
        const char* family;
        const ChannelState* ch;
        RewardConfig w;
        int expected;
    };
    const RewardConfig lo = RewardConfig::latency_only(), eo = RewardConfig::energy_only(),
                       mo = RewardConfig::multi_objective();
    const std::vector<Cell> cells{
        {"LO/LTE/VGG", "VGG", &kLte, lo, 19},         {"LO/WiFi/VGG", "VGG", &kWifi, lo, 10},
        {"LO/LTE/ResNet", "ResNet", &kLte, lo, 4},    {"LO/WiFi/ResNet", "ResNet", &kWifi, lo, 4},
        {"LO/LTE/DenseNet", "DenseNet", &kLte, lo, 4}, {"LO/WiFi/DenseNet", "DenseNet", &kWifi, lo, 4},
        {"EO/LTE/VGG", "VGG", &kLte, eo, 5},          {"EO/WiFi/VGG", "VGG", &kWifi, eo, 5},
        {"EO/LTE/ResNet", "ResNet", &kLte, eo, 4},    {"EO/WiFi/ResNet", "ResNet", &kWifi, eo, 4},
        {"MO/WiFi/VGG", "VGG", &kWifi, mo, 10},       {"MO/WiFi/ResNet", "ResNet", &kWifi, mo, 4},
        {"MO/WiFi/DenseNet", "DenseNet", &kWifi, mo, 4},
    };
    int ok = 0;
    std::string misses;
    for (const auto& c : cells) {
        const int got = oracle_cut(c.family, *c.ch, c.w);
        if (got == c.expected)
            ++ok;
        else
            misses += std::string(" ") + c.label + "=" + std::to_string(got);
    }
    std::string d = std::to_string(ok) + "/" + std::to_string(cells.size()) +
                    " cells exact (10 LO/EO + 3 MO WiFi); MO/LTE/VGG gives cut " +
                    std::to_string(oracle_cut("VGG", kLte, mo)) + " under equal weights (not scored)";
    if (!misses.empty()) d += "; wrong:" + misses;
    return {ok == static_cast<int>(cells.size()), d};
}

Result weight_manipulation() {
    struct Case {
        const char* family;
        WeightAxis axis;
        std::vector<int> expected;  // at weights 0 and 1
    };
    const std::vector<Case> cases{{"VGG", WeightAxis::Latency, {5, 10}},
                                  {"VGG", WeightAxis::Energy, {10, 5}},
                                  {"DenseNet", WeightAxis::Latency, {4, 4}},
                                  {"DenseNet", WeightAxis::Energy, {4, 4}}};
    int ok = 0, total = 0;
    std::string got_all;
    for (const auto& c : cases) {
        const auto pts = weight_sweep(store(), c.family, kWifi, {0.0}, c.axis, {0.0, 1.0},
                                      RewardConfig::multi_objective(), std::vector<int>{1});
        for (std::size_t i = 0; i < 2; ++i) {
            ++total;
            ok += pts[i].best.cut_layer == c.expected[i] ? 1 : 0;
        }
        got_all += std::string(" ") + c.family + "/" + std::string(axis_name(c.axis)) + "=(" +
                   std::to_string(pts[0].best.cut_layer) + "," + std::to_string(pts[1].best.cut_layer) + ")";
    }
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " settings exact;" + got_all};
}

Scenario default_scenario(const char* name = "default") {
    return load_scenario_bundle(kRoot / "configs" / (std::string(name) + ".json"));
}

// Trainer settings for the convergence and savings checks. Slot rewards do not
// depend on earlier actions, so returns are not discounted.
TrainerConfig acceptance_trainer(std::uint64_t seed) {
    TrainerConfig cfg;
    cfg.episodes = 2000;
    cfg.learning_rate = 5e-5;
    cfg.discount = 0.0;
    cfg.seed = seed;
    return cfg;
}

// Mean per-slot oracle reward over the same episode seeds the trainer used.
double oracle_episode_mean(Environment env, std::uint64_t seed, int first, int last) {
    const Policy oracle = oracle_policy(env.reward_config());
    double sum = 0.0;
    for (int ep = first; ep < last; ++ep) {
        env.reset(episode_seed(seed, ep));
        double total = 0.0;
        int steps = 0;
        while (!env.done()) {
            total += env.step(oracle(env)).reward;
            ++steps;
        }
        sum += steps ? total / steps : 0.0;
    }
    return sum / (last - first);
}

Result training_convergence() {
    const Scenario sc = default_scenario();
    const int seeds = 10;
    std::vector<double> final_ma(seeds), early_ma(seeds), ceiling(seeds);
#pragma omp parallel for schedule(dynamic)
    for (int s = 0; s < seeds; ++s) {
        Environment env = sc.make_env();
        const TrainerConfig cfg = acceptance_trainer(static_cast<std::uint64_t>(s));
        A2CAgent agent = A2CAgent::for_environment(env, cfg);
        const TrainingLog log = train(env, agent, cfg);
        std::vector<double> r;
        for (const auto& e : log) r.push_back(e.mean_reward);
        const auto ma = moving_average(r, 100);
        final_ma[s] = ma.back();
        early_ma[s] = ma[99];
        ceiling[s] = oracle_episode_mean(sc.make_env(), cfg.seed, cfg.episodes - 100, cfg.episodes);
    }
    int ok = 0, trend = 0;
    std::string per;
    for (int s = 0; s < seeds; ++s) {
        const double ratio = final_ma[s] / ceiling[s];
        ok += ratio >= 0.95 ? 1 : 0;
        trend += final_ma[s] > early_ma[s] ? 1 : 0;
        per += fmt(" %.3f", ratio);
    }
    const bool pass = ok >= 8 && trend == seeds;
    return {pass, std::to_string(ok) + "/10 seeds reach 95% of the oracle per-slot mean (ratios" + per +
                      "); moving average rises from episode 100 to 2000 in " + std::to_string(trend) + "/10"};
}

Result savings_vs_local() {
    const Scenario mixed = default_scenario();
    Environment env = mixed.make_env();
    const TrainerConfig cfg = acceptance_trainer(0);
    A2CAgent agent = A2CAgent::for_environment(env, cfg);
    train(env, agent, cfg);
    const fs::path ckpt = fs::temp_directory_path() / "inferedge_acceptance_mo.json";
    agent.save(ckpt);

    struct Band {
        const char* config;
        double energy, latency;
    };
    const Band bands[] = {{"wifi", 0.92, 0.77}, {"lte", 0.91, 0.47}};
    bool pass = true;
    std::string d;
    for (const auto& b : bands) {
        const Scenario sc = default_scenario(b.config);
        const auto rep = run_experiment(sc, {StrategySpec::parse("TRAINED", ckpt)}, ExperimentOptions{});
        const auto& r = rep.find("TRAINED");
        const bool e_ok = std::abs(r.energy_improvement - b.energy) <= 0.08;
        const bool l_ok = std::abs(r.latency_improvement - b.latency) <= 0.10;
        pass = pass && e_ok && l_ok;
        d += std::string(d.empty() ? "" : "; ") + b.config + ": energy " + fmt("%.1f%%", 100 * r.energy_improvement) +
             " (target " + fmt("%.0f", 100 * b.energy) + "+-8), latency " + fmt("%.1f%%", 100 * r.latency_improvement) +
             " (target " + fmt("%.0f", 100 * b.latency) + "+-10)";
    }
    fs::remove(ckpt);
    return {pass, d};
}

Result gradient_check() {
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> dim(1, 8), depth(1, 3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int n = 0; n < 50; ++n) {
        std::vector<int> dims{dim(rng)};
        const int layers = depth(rng);
        for (int l = 0; l < layers; ++l) dims.push_back(dim(rng));
        Mlp net(dims, n % 2 ? Activation::Relu : Activation::Linear);
        net.init(rng);
        std::vector<double> x(dims.front()), c(dims.back());
        for (double& v : x) v = u(rng);
        for (double& v : c) v = u(rng);
        auto loss = [&] {
            const auto y = net.forward(x);
            return std::inner_product(y.begin(), y.end(), c.begin(), 0.0);
        };
        MlpCache cache;
        net.forward(x, 1, &cache);
        std::vector<double> g(net.param_count(), 0.0);
        net.backward(cache, c, g);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double orig = net.params()[i];
            net.mutable_params()[i] = orig + 1e-5;
            const double up = loss();
            net.mutable_params()[i] = orig - 1e-5;
            const double down = loss();
            net.mutable_params()[i] = orig;
            const double fd = (up - down) / 2e-5;
            worst = std::max(worst, std::abs(fd - g[i]) / std::max(1.0, std::abs(fd) + std::abs(g[i])));
        }
    }
    return {worst <= 1e-4, "max relative error " + fmt("%.3g", worst) + " over 50 nets (limit 1e-4)"};
}

Result environment_invariants() {
    std::mt19937_64 rng(2718);
    long violations = 0, steps_total = 0;
    std::string first;
    auto fail = [&](const std::string& what) {
        if (violations++ == 0) first = what;
    };
    const char* levels[] = {"High", "Moderate", "Low"};
    for (int ep = 0; ep < 1000; ++ep) {
        std::uniform_int_distribution<int> nd(1, 4), lvl(0, 2);
        std::uniform_real_distribution<double> cap(2e4, 6e5), conc(0.0, 50.0), prob(0.0, 1.0);
        const int n = nd(rng);
        std::vector<UavSpec> uavs(n);
        for (auto& u : uavs) {
            u.activity = ActivityProfile::preset(levels[lvl(rng)]);
            u.battery_capacity_j = cap(rng);
        }
        ScenarioConfig cfg;
        cfg.task_probability = prob(rng);
        cfg.activity_concentration = ep % 2 ? conc(rng) : 0.0;
        cfg.server_arrival_rate = 6.0 * prob(rng);
        Environment env(cfg, uavs, store(), RewardConfig{});
        const std::uint64_t seed = rng();
        std::uniform_int_distribution<int> av(-1, 2), ac(-1, 4);

        auto run = [&](std::vector<std::vector<ExecutionProfile>>* actions, std::vector<double>* trace) {
            env.reset(seed);
            std::size_t t = 0;
            int steps = 0;
            const int bound = env.max_episode_slots();
            while (!env.done()) {
                if (actions->size() <= t) {
                    std::vector<ExecutionProfile> a(n);
                    for (auto& x : a) x = {av(rng), ac(rng)};
                    actions->push_back(a);
                }
                const EnvState before = env.state();
                const StepOutcome out = env.step((*actions)[t++]);
                if (++steps > bound) {
                    fail("episode exceeded its slot bound");
                    break;
                }
                trace->push_back(out.reward);
                trace->push_back(out.next_state.server_queue_ms);
                for (int k = 0; k < n; ++k) {
                    const auto& d = out.next_state.devices[k];
                    const auto& o = out.per_device[k];
                    trace->push_back(d.battery_j);
                    if (d.battery_j > before.devices[k].battery_j) fail("battery increased");
                    if (d.battery_j > 0.0) {
                        const double spent = o.kinetic_energy_j + (o.breakdown ? o.breakdown->total_energy_j : 0.0);
                        if (before.devices[k].battery_j - d.battery_j != spent) fail("energy not conserved");
                        if (d.battery_level < 1 || d.battery_level > 10) fail("level outside 1..10 while alive");
                    } else if (d.battery_level != 0) {
                        fail("dead device with nonzero level");
                    }
                }
            }
            steps_total += steps;
        };
        std::vector<std::vector<ExecutionProfile>> actions;
        std::vector<double> t1, t2;
        run(&actions, &t1);
        run(&actions, &t2);
        if (t1 != t2) fail("replay with the same seed and actions diverged");
    }
    return {violations == 0, std::to_string(violations) + " violations over 1000 randomized episodes (" +
                                 std::to_string(steps_total) + " steps, each replayed)" +
                                 (first.empty() ? "" : "; first: " + first)};
}

Result battery_ordering() {
    BatteryOptions o;
    o.runs = 50;
    const auto res = run_battery_study(default_scenario(), o);
    const double high = res[0].mean(), moderate = res[1].mean(), low = res[2].mean();
    return {low < moderate && moderate < high,
            "mean depletion slots High " + fmt("%.2f", high) + ", Moderate " + fmt("%.2f", moderate) + ", Low " +
                fmt("%.2f", low) + " (50 runs each)"};
}

struct Criterion {
    const char* title;
    std::function<Result()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {"cost-model reproduction", cost_reproduction},
        {"oracle cut selection (heavy versions)", cut_selection},
        {"oracle under reward-weight manipulation", weight_manipulation},
        {"training convergence", training_convergence},
        {"savings vs local-only", savings_vs_local},
        {"gradient correctness", gradient_check},
        {"environment invariants", environment_invariants},
        {"battery-life ordering", battery_ordering},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            const int n = std::atoi(argv[++i]);
            if (n < 1 || n > static_cast<int>(all.size())) {
                std::fprintf(stderr, "criterion must be 1..%zu\n", all.size());
                return 2;
            }
            selected.push_back(n);
        } else {
            std::fprintf(stderr, "usage: acceptance [--criterion N]...\n");
            return 2;
        }
    }
    if (selected.empty())
        for (int i = 1; i <= static_cast<int>(all.size()); ++i) selected.push_back(i);

    bool all_pass = true;
    for (int n : selected) {
        const auto t0 = std::chrono::steady_clock::now();
        Result r;
        try {
            r = all[n - 1].run();
        } catch (const std::exception& e) {
            r = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s AC%d %s: %s [%.1f s]\n", r.pass ? "PASS" : "FAIL", n, all[n - 1].title, r.detail.c_str(), secs);
        std::fflush(stdout);
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : 1;
}
