#include "inferedge/agent.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "inferedge/error.hpp"

namespace inferedge {
namespace {

int sample_index(std::span<const double> probs, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double x = u(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        acc += probs[i];
        if (x < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
}

int argmax(std::span<const double> v) {
    return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

double entropy_of(std::span<const double> p) {
    double h = 0.0;
    for (double q : p)
        if (q > 0.0) h -= q * std::log(q);
    return h;
}

// Splits a device head's output row into version and cut probabilities.
void head_probs(std::span<const double> logits, int versions, std::span<double> pv,
                std::span<double> pc) {
    softmax_into(logits.first(versions), pv);
    softmax_into(logits.subspan(versions), pc);
}

}  // namespace

ActorNetwork::ActorNetwork(ActorShape shape, std::mt19937_64& rng) : shape_(std::move(shape)) {
    if (shape_.state_size <= 0 || shape_.devices <= 0 || shape_.versions <= 0 || shape_.cuts <= 0)
        throw ConfigError("actor shape must be positive in every dimension");
    std::vector<int> dims{shape_.state_size};
    dims.insert(dims.end(), shape_.trunk_hidden.begin(), shape_.trunk_hidden.end());
    trunk = Mlp(dims, Activation::Relu);
    trunk.init(rng);
    for (int k = 0; k < shape_.devices; ++k) {
        device_layers.emplace_back(std::vector<int>{trunk.output_size(), shape_.device_hidden},
                                   Activation::Relu);
        device_layers.back().init(rng);
        heads.emplace_back(std::vector<int>{shape_.device_hidden, shape_.versions + shape_.cuts},
                           Activation::Linear);
        heads.back().init(rng);
    }
}

ActorNetwork::Policy ActorNetwork::policy(std::span<const double> state) const {
    if (static_cast<int>(state.size()) != shape_.state_size)
        throw NumericError("actor: state has " + std::to_string(state.size()) +
                           " features, expected " + std::to_string(shape_.state_size));
    Policy p;
    const std::vector<double> h = trunk.forward(state);
    for (int k = 0; k < shape_.devices; ++k) {
        const std::vector<double> logits = heads[k].forward(device_layers[k].forward(h));
        p.version_probs.emplace_back(shape_.versions);
        p.cut_probs.emplace_back(shape_.cuts);
        head_probs(logits, shape_.versions, p.version_probs.back(), p.cut_probs.back());
    }
    return p;
}

nlohmann::json ActorNetwork::to_json() const {
    nlohmann::json devs = nlohmann::json::array();
    nlohmann::json hs = nlohmann::json::array();
    for (const auto& d : device_layers) devs.push_back(d.to_json());
    for (const auto& h : heads) hs.push_back(h.to_json());
    return nlohmann::json{{"state_size", shape_.state_size},
                          {"devices", shape_.devices},
                          {"versions", shape_.versions},
                          {"cuts", shape_.cuts},
                          {"trunk_hidden", shape_.trunk_hidden},
                          {"device_hidden", shape_.device_hidden},
                          {"trunk", trunk.to_json()},
                          {"device_layers", std::move(devs)},
                          {"heads", std::move(hs)}};
}

ActorNetwork ActorNetwork::from_json(const nlohmann::json& doc) {
    try {
        ActorNetwork a;
        a.shape_.state_size = doc.at("state_size").get<int>();
        a.shape_.devices = doc.at("devices").get<int>();
        a.shape_.versions = doc.at("versions").get<int>();
        a.shape_.cuts = doc.at("cuts").get<int>();
        a.shape_.trunk_hidden = doc.at("trunk_hidden").get<std::vector<int>>();
        a.shape_.device_hidden = doc.at("device_hidden").get<int>();
        a.trunk = Mlp::from_json(doc.at("trunk"));
        for (const auto& d : doc.at("device_layers")) a.device_layers.push_back(Mlp::from_json(d));
        for (const auto& h : doc.at("heads")) a.heads.push_back(Mlp::from_json(h));
        if (static_cast<int>(a.device_layers.size()) != a.shape_.devices ||
            static_cast<int>(a.heads.size()) != a.shape_.devices)
            throw NumericError("actor checkpoint: device count mismatch");
        if (a.trunk.input_size() != a.shape_.state_size ||
            a.heads.front().output_size() != a.shape_.versions + a.shape_.cuts)
            throw NumericError("actor checkpoint: layer sizes do not match the recorded shape");
        return a;
    } catch (const nlohmann::json::exception& e) {
        throw NumericError(std::string("actor checkpoint: ") + e.what());
    }
}

ActionSample select_action(const ActorNetwork& actor, std::span<const double> state,
                           std::mt19937_64& rng) {
    const auto policy = actor.policy(state);
    ActionSample s;
    for (int k = 0; k < actor.shape().devices; ++k) {
        const auto& pv = policy.version_probs[k];
        const auto& pc = policy.cut_probs[k];
        const int v = sample_index(pv, rng);
        const int c = sample_index(pc, rng);
        s.actions.push_back({v, c});
        s.log_prob += std::log(pv[v]) + std::log(pc[c]);
        s.entropy += entropy_of(pv) + entropy_of(pc);
    }
    return s;
}

ActionSample greedy_action(const ActorNetwork& actor, std::span<const double> state) {
    const auto policy = actor.policy(state);
    ActionSample s;
    for (int k = 0; k < actor.shape().devices; ++k) {
        const auto& pv = policy.version_probs[k];
        const auto& pc = policy.cut_probs[k];
        const int v = argmax(pv);
        const int c = argmax(pc);
        s.actions.push_back({v, c});
        s.log_prob += std::log(pv[v]) + std::log(pc[c]);
        s.entropy += entropy_of(pv) + entropy_of(pc);
    }
    return s;
}

std::vector<double> compute_returns(std::span<const double> rewards, double discount) {
    std::vector<double> out(rewards.size());
    double running = 0.0;
    for (std::size_t i = rewards.size(); i-- > 0;) {
        running = rewards[i] + discount * running;
        out[i] = running;
    }
    return out;
}

std::vector<double> compute_advantages(std::span<const double> returns,
                                       std::span<const double> values) {
    if (returns.size() != values.size())
        throw NumericError("advantages: " + std::to_string(returns.size()) + " returns vs " +
                           std::to_string(values.size()) + " values");
    std::vector<double> out(returns.size());
    for (std::size_t i = 0; i < returns.size(); ++i) out[i] = returns[i] - values[i];
    return out;
}

void TrainerConfig::validate() const {
    if (episodes < 0) throw ConfigError("episodes must be >= 0");
    if (!(discount >= 0.0 && discount < 1.0)) throw ConfigError("discount must lie in [0, 1)");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
    if (!(entropy_coef >= 0.0)) throw ConfigError("entropy_coef must be >= 0");
    if (!(value_loss_coef > 0.0)) throw ConfigError("value_loss_coef must be > 0");
}

ActorGradients compute_actor_gradients(const ActorNetwork& actor,
                                       const std::vector<Transition>& buffer,
                                       std::span<const double> advantages, double entropy_coef) {
    const int T = static_cast<int>(buffer.size());
    if (T == 0) throw NumericError("actor gradients: empty buffer");
    if (advantages.size() != buffer.size())
        throw NumericError("actor gradients: advantage count does not match buffer");
    const ActorShape& sh = actor.shape();
    const int V = sh.versions;
    const int C = sh.cuts;

    std::vector<double> states;
    states.reserve(static_cast<std::size_t>(T) * sh.state_size);
    for (const auto& tr : buffer) {
        if (static_cast<int>(tr.state.size()) != sh.state_size)
            throw NumericError("actor gradients: state size mismatch");
        if (static_cast<int>(tr.actions.size()) != sh.devices)
            throw NumericError("actor gradients: action count mismatch");
        states.insert(states.end(), tr.state.begin(), tr.state.end());
    }

    ActorGradients g;
    g.trunk.assign(actor.trunk.param_count(), 0.0);

    MlpCache trunk_cache;
    const std::vector<double> h = actor.trunk.forward(states, T, &trunk_cache);
    std::vector<double> dh(h.size(), 0.0);

    const double inv_t = 1.0 / T;
    double loss = 0.0;
    double entropy_sum = 0.0;
    std::vector<double> pv(V), pc(C);

    for (int k = 0; k < sh.devices; ++k) {
        MlpCache dev_cache, head_cache;
        const std::vector<double> z = actor.device_layers[k].forward(h, T, &dev_cache);
        const std::vector<double> logits = actor.heads[k].forward(z, T, &head_cache);
        std::vector<double> dlogits(logits.size());

        for (int t = 0; t < T; ++t) {
            std::span<const double> row(logits.data() + static_cast<std::size_t>(t) * (V + C), V + C);
            head_probs(row, V, pv, pc);
            const ExecutionProfile a = buffer[t].actions[k];
            if (a.version_index < 0 || a.version_index >= V || a.cut_index < 0 || a.cut_index >= C)
                throw NumericError("actor gradients: recorded action outside the head range");
            const double adv = advantages[t];
            const double hv = entropy_of(pv);
            const double hc = entropy_of(pc);
            loss -= inv_t * adv * (std::log(pv[a.version_index]) + std::log(pc[a.cut_index]));
            loss -= inv_t * entropy_coef * (hv + hc);
            entropy_sum += hv + hc;

            // d(-log p_a)/dz = p - onehot(a); d(-H)/dz_i = p_i (log p_i + H).
            double* d = dlogits.data() + static_cast<std::size_t>(t) * (V + C);
            for (int i = 0; i < V; ++i) {
                const double lp = pv[i] > 0.0 ? std::log(pv[i]) : 0.0;
                d[i] = inv_t * (adv * (pv[i] - (i == a.version_index ? 1.0 : 0.0)) +
                                entropy_coef * pv[i] * (lp + hv));
            }
            for (int i = 0; i < C; ++i) {
                const double lp = pc[i] > 0.0 ? std::log(pc[i]) : 0.0;
                d[V + i] = inv_t * (adv * (pc[i] - (i == a.cut_index ? 1.0 : 0.0)) +
                                    entropy_coef * pc[i] * (lp + hc));
            }
        }

        g.heads.emplace_back(actor.heads[k].param_count(), 0.0);
        g.device_layers.emplace_back(actor.device_layers[k].param_count(), 0.0);
        const std::vector<double> dz = actor.heads[k].backward(head_cache, dlogits, g.heads.back());
        const std::vector<double> dhk =
            actor.device_layers[k].backward(dev_cache, dz, g.device_layers.back());
        for (std::size_t i = 0; i < dh.size(); ++i) dh[i] += dhk[i];
    }
    actor.trunk.backward(trunk_cache, dh, g.trunk);
    g.loss = loss;
    g.mean_entropy = entropy_sum * inv_t;
    return g;
}

A2CAgent::A2CAgent(ActorShape shape, const TrainerConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed ^ 0x5eed'a2c0'0000'0001ULL);
    const int state_size = shape.state_size;
    actor = ActorNetwork(std::move(shape), rng);
    std::vector<int> critic_dims{state_size};
    critic_dims.insert(critic_dims.end(), actor.shape().trunk_hidden.begin(),
                       actor.shape().trunk_hidden.end());
    critic_dims.push_back(1);
    critic = Mlp(critic_dims, Activation::Linear);
    critic.init(rng);

    const AdamConfig adam{cfg.learning_rate};
    trunk_opt_ = AdamOptimizer(actor.trunk.param_count(), adam);
    for (int k = 0; k < actor.shape().devices; ++k) {
        device_opts_.emplace_back(actor.device_layers[k].param_count(), adam);
        head_opts_.emplace_back(actor.heads[k].param_count(), adam);
    }
    critic_opt_ = AdamOptimizer(critic.param_count(), adam);
}

A2CAgent A2CAgent::for_environment(const Environment& env, const TrainerConfig& cfg,
                                   std::vector<int> trunk_hidden, int device_hidden) {
    int versions = 0;
    int cuts = 0;
    for (const auto& name : env.config().family_set) {
        const auto& fam = env.store().family(name);
        versions = std::max(versions, static_cast<int>(fam.versions.size()));
        for (const auto& v : fam.versions) cuts = std::max(cuts, static_cast<int>(v.cut_points.size()));
    }
    ActorShape shape{env.state_size(), static_cast<int>(env.uavs().size()), versions, cuts,
                     std::move(trunk_hidden), device_hidden};
    return A2CAgent(std::move(shape), cfg);
}

std::vector<double> A2CAgent::values(const std::vector<Transition>& buffer) const {
    if (buffer.empty()) return {};
    std::vector<double> states;
    for (const auto& tr : buffer) states.insert(states.end(), tr.state.begin(), tr.state.end());
    return critic.forward(states, static_cast<int>(buffer.size()));
}

LossReport A2CAgent::update(std::vector<Transition>& buffer, const TrainerConfig& cfg) {
    if (buffer.empty()) throw NumericError("update: empty transition buffer");
    const int T = static_cast<int>(buffer.size());

    std::vector<double> states;
    std::vector<double> rewards;
    for (const auto& tr : buffer) {
        states.insert(states.end(), tr.state.begin(), tr.state.end());
        rewards.push_back(tr.reward);
    }
    MlpCache critic_cache;
    const std::vector<double> v = critic.forward(states, T, &critic_cache);
    for (int t = 0; t < T; ++t) buffer[t].value_estimate = v[t];

    const std::vector<double> returns = compute_returns(rewards, cfg.discount);
    const std::vector<double> adv = compute_advantages(returns, v);

    LossReport report;
    report.transitions = buffer.size();
    std::vector<double> dv(T);
    for (int t = 0; t < T; ++t) {
        const double err = v[t] - returns[t];
        report.critic_loss += err * err / T;
        dv[t] = cfg.value_loss_coef * 2.0 * err / T;
    }

    ActorGradients g = compute_actor_gradients(actor, buffer, adv, cfg.entropy_coef);
    report.actor_loss = g.loss;
    report.entropy = g.mean_entropy;
    if (!std::isfinite(report.actor_loss) || !std::isfinite(report.critic_loss))
        throw NumericError("update: non-finite loss (actor " + std::to_string(report.actor_loss) +
                           ", critic " + std::to_string(report.critic_loss) + ")");

    std::vector<double> critic_grad(critic.param_count(), 0.0);
    critic.backward(critic_cache, dv, critic_grad);

    trunk_opt_.step(actor.trunk.mutable_params(), g.trunk);
    for (int k = 0; k < actor.shape().devices; ++k) {
        device_opts_[k].step(actor.device_layers[k].mutable_params(), g.device_layers[k]);
        head_opts_[k].step(actor.heads[k].mutable_params(), g.heads[k]);
    }
    critic_opt_.step(critic.mutable_params(), critic_grad);
    return report;
}

nlohmann::json A2CAgent::to_json() const {
    nlohmann::json devs = nlohmann::json::array();
    nlohmann::json hs = nlohmann::json::array();
    for (const auto& o : device_opts_) devs.push_back(o.to_json());
    for (const auto& o : head_opts_) hs.push_back(o.to_json());
    return nlohmann::json{{"format", "inferedge-a2c"},
                          {"version", 1},
                          {"actor", actor.to_json()},
                          {"critic", critic.to_json()},
                          {"optimizer",
                           {{"trunk", trunk_opt_.to_json()},
                            {"device_layers", std::move(devs)},
                            {"heads", std::move(hs)},
                            {"critic", critic_opt_.to_json()}}}};
}

A2CAgent A2CAgent::from_json(const nlohmann::json& doc) {
    try {
        if (doc.at("format").get<std::string>() != "inferedge-a2c" || doc.at("version").get<int>() != 1)
            throw NumericError("agent checkpoint: unsupported format");
        A2CAgent a;
        a.actor = ActorNetwork::from_json(doc.at("actor"));
        a.critic = Mlp::from_json(doc.at("critic"));
        const auto& opt = doc.at("optimizer");
        a.trunk_opt_ = AdamOptimizer::from_json(opt.at("trunk"));
        for (const auto& o : opt.at("device_layers")) a.device_opts_.push_back(AdamOptimizer::from_json(o));
        for (const auto& o : opt.at("heads")) a.head_opts_.push_back(AdamOptimizer::from_json(o));
        a.critic_opt_ = AdamOptimizer::from_json(opt.at("critic"));
        return a;
    } catch (const nlohmann::json::exception& e) {
        throw NumericError(std::string("agent checkpoint: ") + e.what());
    }
}

void A2CAgent::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write checkpoint '" + path.string() + "'");
    out << to_json().dump() << '\n';
}

A2CAgent A2CAgent::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open checkpoint '" + path.string() + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw NumericError("checkpoint '" + path.string() + "': " + e.what());
    }
    return from_json(doc);
}

std::uint64_t episode_seed(std::uint64_t base, int episode) {
    // splitmix64 step over (base, episode)
    std::uint64_t z = base * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(episode) + 1;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

TrainingLog train(Environment& env, A2CAgent& agent, const TrainerConfig& cfg,
                  const EpisodeCallback& on_episode) {
    cfg.validate();
    if (agent.actor.shape().state_size != env.state_size())
        throw ConfigError("actor input size does not match the environment's encoded state");
    TrainingLog log;
    std::mt19937_64 policy_rng(episode_seed(cfg.seed, -1));
    const int step_limit = env.max_episode_slots() + 1;
    std::vector<Transition> buffer;

    for (int ep = 0; ep < cfg.episodes; ++ep) {
        env.reset(episode_seed(cfg.seed, ep));
        buffer.clear();
        double total = 0.0;
        while (!env.done()) {
            if (static_cast<int>(buffer.size()) >= step_limit)
                throw Error("episode exceeded its slot bound; battery drain is not progressing");
            Transition tr;
            tr.state = env.encode();
            ActionSample a = select_action(agent.actor, tr.state, policy_rng);
            StepOutcome out = env.step(a.actions);
            tr.actions = std::move(a.actions);
            tr.log_prob = a.log_prob;
            tr.reward = out.reward;
            total += out.reward;
            buffer.push_back(std::move(tr));
        }
        EpisodeRecord rec;
        rec.episode = ep;
        rec.steps = static_cast<int>(buffer.size());
        rec.total_reward = total;
        rec.mean_reward = buffer.empty() ? 0.0 : total / static_cast<double>(buffer.size());
        if (!buffer.empty()) {
            const LossReport loss = agent.update(buffer, cfg);
            rec.actor_loss = loss.actor_loss;
            rec.critic_loss = loss.critic_loss;
            rec.entropy = loss.entropy;
            rec.updated_transitions = loss.transitions;
        }
        buffer.clear();
        log.push_back(rec);
        if (on_episode) on_episode(rec, agent);
    }
    return log;
}

}  // namespace inferedge
