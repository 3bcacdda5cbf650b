#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "json.hpp"

namespace inferedge {

enum class Activation { Linear, Relu };

/// Intermediate values of one forward pass, consumed by Mlp::backward.
struct MlpCache {
    int batch = 0;
    /// layer_inputs[l] is the batch x dims[l] input of layer l; the last
    /// entry is the network output.
    std::vector<std::vector<double>> activations;
    std::uint64_t owner = 0;
    std::uint64_t generation = 0;
};

/// Fully connected network with ReLU between layers. All parameters live in
/// one flat buffer: for each layer the out x in weights, then the out biases.
class Mlp {
public:
    Mlp() = default;
    explicit Mlp(std::vector<int> layer_dims, Activation output = Activation::Linear);

    /// Uniform in +-1/sqrt(fan_in) for weights and biases.
    void init(std::mt19937_64& rng);

    [[nodiscard]] int input_size() const { return dims_.front(); }
    [[nodiscard]] int output_size() const { return dims_.back(); }
    [[nodiscard]] int layer_count() const { return static_cast<int>(dims_.size()) - 1; }
    [[nodiscard]] const std::vector<int>& dims() const noexcept { return dims_; }
    [[nodiscard]] Activation output_activation() const noexcept { return output_; }
    [[nodiscard]] std::size_t param_count() const noexcept { return params_.size(); }

    [[nodiscard]] std::span<const double> params() const noexcept { return params_; }
    /// Write access invalidates outstanding caches.
    [[nodiscard]] std::span<double> mutable_params();

    [[nodiscard]] std::span<const double> weights(int layer) const;
    [[nodiscard]] std::span<const double> bias(int layer) const;

    /// Forward pass over `batch` row-major inputs. Fills `cache` when given.
    std::vector<double> forward(std::span<const double> input, int batch = 1,
                                MlpCache* cache = nullptr) const;

    /// Accumulates parameter gradients into `param_grads` (same layout as
    /// params) and returns the gradient with respect to the input.
    std::vector<double> backward(const MlpCache& cache, std::span<const double> output_grad,
                                 std::span<double> param_grads) const;

    [[nodiscard]] nlohmann::json to_json() const;
    static Mlp from_json(const nlohmann::json& doc);

    bool operator==(const Mlp& other) const {
        return dims_ == other.dims_ && output_ == other.output_ && params_ == other.params_;
    }

private:
    [[nodiscard]] std::size_t weight_offset(int layer) const { return offsets_[layer]; }
    [[nodiscard]] std::size_t bias_offset(int layer) const {
        return offsets_[layer] + static_cast<std::size_t>(dims_[layer]) * dims_[layer + 1];
    }
    void layout();

    std::vector<int> dims_;
    Activation output_ = Activation::Linear;
    std::vector<double> params_;
    std::vector<std::size_t> offsets_;
    std::uint64_t id_ = 0;
    std::uint64_t generation_ = 0;
};

/// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);
void softmax_into(std::span<const double> logits, std::span<double> probs);

}  // namespace inferedge
