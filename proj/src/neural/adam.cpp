#include "inferedge/neural/adam.hpp"

#include <cmath>

#include "inferedge/error.hpp"

namespace inferedge {

AdamOptimizer::AdamOptimizer(std::size_t param_count, AdamConfig config)
    : config_(config), m_(param_count, 0.0), v_(param_count, 0.0) {
    if (!(config_.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grads) {
    if (params.size() != m_.size() || grads.size() != m_.size())
        throw NumericError("adam: expected " + std::to_string(m_.size()) + " parameters, got " +
                           std::to_string(params.size()) + " params / " +
                           std::to_string(grads.size()) + " grads");
    for (double g : grads)
        if (!std::isfinite(g)) throw NumericError("adam: non-finite gradient");

    ++steps_;
    const double b1 = config_.beta1;
    const double b2 = config_.beta2;
    const double correction1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
    const double correction2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
    const double step_size = config_.learning_rate / correction1;
    const double root2 = std::sqrt(correction2);
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = b1 * m_[i] + (1.0 - b1) * grads[i];
        v_[i] = b2 * v_[i] + (1.0 - b2) * grads[i] * grads[i];
        params[i] -= step_size * m_[i] / (std::sqrt(v_[i]) / root2 + config_.epsilon);
    }
}

nlohmann::json AdamOptimizer::to_json() const {
    return nlohmann::json{{"learning_rate", config_.learning_rate},
                          {"beta1", config_.beta1},
                          {"beta2", config_.beta2},
                          {"epsilon", config_.epsilon},
                          {"steps", steps_},
                          {"m", m_},
                          {"v", v_}};
}

AdamOptimizer AdamOptimizer::from_json(const nlohmann::json& doc) {
    try {
        AdamConfig cfg{doc.at("learning_rate").get<double>(), doc.at("beta1").get<double>(),
                       doc.at("beta2").get<double>(), doc.at("epsilon").get<double>()};
        AdamOptimizer opt(0, cfg);
        opt.m_ = doc.at("m").get<std::vector<double>>();
        opt.v_ = doc.at("v").get<std::vector<double>>();
        opt.steps_ = doc.at("steps").get<std::int64_t>();
        if (opt.m_.size() != opt.v_.size()) throw NumericError("adam state: moment sizes differ");
        return opt;
    } catch (const nlohmann::json::exception& e) {
        throw NumericError(std::string("adam state: ") + e.what());
    }
}

}  // namespace inferedge
