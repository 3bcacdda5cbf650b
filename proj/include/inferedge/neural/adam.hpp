#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"

namespace inferedge {

struct AdamConfig {
    double learning_rate = 5e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Adaptive-moment first-order optimizer over one flat parameter vector.
class AdamOptimizer {
public:
    AdamOptimizer() = default;
    AdamOptimizer(std::size_t param_count, AdamConfig config);

    /// Rejects mismatched shapes and non-finite gradients (NumericError)
    /// without touching the parameters.
    void step(std::span<double> params, std::span<const double> grads);

    [[nodiscard]] const AdamConfig& config() const noexcept { return config_; }
    [[nodiscard]] std::int64_t steps() const noexcept { return steps_; }
    [[nodiscard]] std::span<const double> first_moment() const noexcept { return m_; }
    [[nodiscard]] std::span<const double> second_moment() const noexcept { return v_; }

    [[nodiscard]] nlohmann::json to_json() const;
    static AdamOptimizer from_json(const nlohmann::json& doc);

private:
    AdamConfig config_;
    std::vector<double> m_;
    std::vector<double> v_;
    std::int64_t steps_ = 0;
};

}  // namespace inferedge
