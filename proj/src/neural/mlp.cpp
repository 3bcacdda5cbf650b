#include "inferedge/neural/mlp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "inferedge/error.hpp"
#include "inferedge/neural/kernels.hpp"

namespace inferedge {
namespace {

std::uint64_t next_id() {
    static std::atomic<std::uint64_t> counter{0};
    return ++counter;
}

}  // namespace

Mlp::Mlp(std::vector<int> layer_dims, Activation output)
    : dims_(std::move(layer_dims)), output_(output), id_(next_id()) {
    if (dims_.size() < 2) throw NumericError("mlp needs at least an input and an output size");
    for (int d : dims_)
        if (d <= 0) throw NumericError("mlp layer sizes must be positive");
    layout();
}

void Mlp::layout() {
    offsets_.clear();
    std::size_t total = 0;
    for (int l = 0; l + 1 < static_cast<int>(dims_.size()); ++l) {
        offsets_.push_back(total);
        total += static_cast<std::size_t>(dims_[l]) * dims_[l + 1] + dims_[l + 1];
    }
    params_.assign(total, 0.0);
}

void Mlp::init(std::mt19937_64& rng) {
    for (int l = 0; l < layer_count(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(dims_[l]));
        std::uniform_real_distribution<double> u(-bound, bound);
        const std::size_t n = static_cast<std::size_t>(dims_[l]) * dims_[l + 1] + dims_[l + 1];
        for (std::size_t i = 0; i < n; ++i) params_[offsets_[l] + i] = u(rng);
    }
    ++generation_;
}

std::span<double> Mlp::mutable_params() {
    ++generation_;
    return params_;
}

std::span<const double> Mlp::weights(int layer) const {
    return std::span<const double>(params_).subspan(weight_offset(layer),
                                                    static_cast<std::size_t>(dims_[layer]) * dims_[layer + 1]);
}

std::span<const double> Mlp::bias(int layer) const {
    return std::span<const double>(params_).subspan(bias_offset(layer), dims_[layer + 1]);
}

std::vector<double> Mlp::forward(std::span<const double> input, int batch, MlpCache* cache) const {
    if (batch <= 0) throw NumericError("mlp forward: batch must be positive");
    if (input.size() != static_cast<std::size_t>(batch) * dims_.front())
        throw NumericError("mlp forward: input has " + std::to_string(input.size()) +
                           " values, expected " + std::to_string(batch * dims_.front()));

    std::vector<double> current(input.begin(), input.end());
    if (cache) {
        cache->batch = batch;
        cache->owner = id_;
        cache->generation = generation_;
        cache->activations.clear();
        cache->activations.reserve(dims_.size());
    }
    for (int l = 0; l < layer_count(); ++l) {
        const int in = dims_[l];
        const int out = dims_[l + 1];
        std::vector<double> next(static_cast<std::size_t>(batch) * out);
        kernels::dense_forward(current, weights(l), bias(l), next, batch, in, out);
        const bool last = l + 1 == layer_count();
        if (!last || output_ == Activation::Relu) kernels::relu_inplace(next);
        if (cache) cache->activations.push_back(std::move(current));
        current = std::move(next);
    }
    if (cache) cache->activations.push_back(current);
    return current;
}

std::vector<double> Mlp::backward(const MlpCache& cache, std::span<const double> output_grad,
                                  std::span<double> param_grads) const {
    if (cache.owner != id_ || cache.generation != generation_)
        throw NumericError("mlp backward: cache does not come from this network's current parameters");
    if (cache.activations.size() != dims_.size())
        throw NumericError("mlp backward: cache has the wrong depth");
    const int batch = cache.batch;
    if (output_grad.size() != static_cast<std::size_t>(batch) * dims_.back())
        throw NumericError("mlp backward: output gradient has the wrong size");
    if (param_grads.size() != params_.size())
        throw NumericError("mlp backward: gradient buffer has the wrong size");

    std::vector<double> grad(output_grad.begin(), output_grad.end());
    for (int l = layer_count() - 1; l >= 0; --l) {
        const int in = dims_[l];
        const int out = dims_[l + 1];
        const bool last = l + 1 == layer_count();
        if (!last || output_ == Activation::Relu)
            kernels::relu_backward(cache.activations[l + 1], grad);

        kernels::dense_backward_params(grad, cache.activations[l],
                                       param_grads.subspan(weight_offset(l),
                                                           static_cast<std::size_t>(in) * out),
                                       param_grads.subspan(bias_offset(l), out), batch, in, out);
        std::vector<double> below(static_cast<std::size_t>(batch) * in);
        kernels::dense_backward_input(grad, weights(l), below, batch, in, out);
        grad = std::move(below);
    }
    return grad;
}

nlohmann::json Mlp::to_json() const {
    return nlohmann::json{{"format", "inferedge-mlp"},
                          {"version", 1},
                          {"layer_dims", dims_},
                          {"output_activation", output_ == Activation::Relu ? "relu" : "linear"},
                          {"params", params_}};
}

Mlp Mlp::from_json(const nlohmann::json& doc) {
    try {
        if (doc.at("format").get<std::string>() != "inferedge-mlp")
            throw NumericError("checkpoint: not an mlp record");
        if (doc.at("version").get<int>() != 1) throw NumericError("checkpoint: unsupported mlp version");
        const std::string act = doc.at("output_activation").get<std::string>();
        if (act != "relu" && act != "linear")
            throw NumericError("checkpoint: unknown output activation '" + act + "'");
        Mlp net(doc.at("layer_dims").get<std::vector<int>>(),
                act == "relu" ? Activation::Relu : Activation::Linear);
        auto params = doc.at("params").get<std::vector<double>>();
        if (params.size() != net.params_.size())
            throw NumericError("checkpoint: parameter count does not match layer_dims");
        net.params_ = std::move(params);
        return net;
    } catch (const nlohmann::json::exception& e) {
        throw NumericError(std::string("checkpoint: ") + e.what());
    }
}

void softmax_into(std::span<const double> logits, std::span<double> probs) {
    const double peak = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        probs[i] = std::exp(logits[i] - peak);
        sum += probs[i];
    }
    for (double& p : probs) p /= sum;
}

std::vector<double> softmax(std::span<const double> logits) {
    if (logits.empty()) throw NumericError("softmax of an empty vector");
    std::vector<double> probs(logits.size());
    softmax_into(logits, probs);
    return probs;
}

}  // namespace inferedge
