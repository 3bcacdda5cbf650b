#include "doctest.h"

#include <cmath>
#include <random>

#include "inferedge/error.hpp"
#include "inferedge/neural/mlp.hpp"

using namespace inferedge;

namespace {

// Loss = sum(c_i * y_i) for fixed random c, so dL/dy = c.
double loss(const Mlp& net, const std::vector<double>& x, int batch, const std::vector<double>& c) {
    const auto y = net.forward(x, batch);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += c[i] * y[i];
    return s;
}

}  // namespace

TEST_CASE("forward examples") {
    Mlp zero({4, 8, 3});
    auto p = zero.mutable_params();
    std::fill(p.begin(), p.end(), 0.0);
    auto last = zero.mutable_params();
    const std::size_t bias_start = last.size() - 3;
    last[bias_start] = 0.1;
    last[bias_start + 1] = -0.2;
    last[bias_start + 2] = 0.3;
    const auto y = zero.forward(std::vector<double>{1, 2, 3, 4});
    CHECK(y == std::vector<double>{0.1, -0.2, 0.3});

    Mlp one({1, 1});
    one.mutable_params()[0] = 2.0;
    one.mutable_params()[1] = 0.0;
    CHECK(one.forward(std::vector<double>{3.0}) == std::vector<double>{6.0});

    std::mt19937_64 rng(1);
    Mlp r({4, 8, 3});
    r.init(rng);
    CHECK(r.forward(std::vector<double>{0.1, 0.2, 0.3, 0.4}).size() == 3);
    CHECK_THROWS_AS(r.forward(std::vector<double>{1.0, 2.0}), NumericError);
}

TEST_CASE("backward examples") {
    Mlp lin({1, 1});
    lin.mutable_params()[0] = 0.7;
    lin.mutable_params()[1] = 0.0;
    MlpCache cache;
    lin.forward(std::vector<double>{3.0}, 1, &cache);
    std::vector<double> g(2, 0.0);
    lin.backward(cache, std::vector<double>{1.0}, g);
    CHECK(g[0] == doctest::Approx(3.0));
    CHECK(g[1] == doctest::Approx(1.0));

    std::mt19937_64 rng(2);
    Mlp net({3, 5, 2});
    net.init(rng);
    MlpCache c2;
    net.forward(std::vector<double>{0.3, -0.2, 0.9}, 1, &c2);
    std::vector<double> zero_grads(net.param_count(), 0.0);
    net.backward(c2, std::vector<double>{0.0, 0.0}, zero_grads);
    for (double v : zero_grads) CHECK(v == 0.0);
}

TEST_CASE("stale or foreign caches are rejected") {
    std::mt19937_64 rng(3);
    Mlp a({2, 3, 1});
    a.init(rng);
    Mlp b({2, 3, 1});
    b.init(rng);
    MlpCache cache;
    a.forward(std::vector<double>{1.0, 2.0}, 1, &cache);
    std::vector<double> g(a.param_count(), 0.0);
    CHECK_THROWS_AS(b.backward(cache, std::vector<double>{1.0}, g), NumericError);
    a.mutable_params()[0] += 0.1;
    CHECK_THROWS_AS(a.backward(cache, std::vector<double>{1.0}, g), NumericError);
}

TEST_CASE("analytic gradients match central differences on 50 random nets") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> dim(1, 8), depth(1, 3), bsz(1, 3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int n = 0; n < 50; ++n) {
        std::vector<int> dims{dim(rng)};
        const int layers = depth(rng);
        for (int l = 0; l < layers; ++l) dims.push_back(dim(rng));
        Mlp net(dims, n % 2 ? Activation::Relu : Activation::Linear);
        net.init(rng);
        const int batch = bsz(rng);
        std::vector<double> x(static_cast<std::size_t>(batch) * dims.front());
        for (double& v : x) v = u(rng);
        std::vector<double> c(static_cast<std::size_t>(batch) * dims.back());
        for (double& v : c) v = u(rng);

        MlpCache cache;
        net.forward(x, batch, &cache);
        std::vector<double> grad(net.param_count(), 0.0);
        const auto dx = net.backward(cache, c, grad);

        const double h = 1e-5;
        auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(a) + std::abs(b)); };
        for (std::size_t i = 0; i < net.param_count(); ++i) {
            const double orig = net.params()[i];
            net.mutable_params()[i] = orig + h;
            const double up = loss(net, x, batch, c);
            net.mutable_params()[i] = orig - h;
            const double down = loss(net, x, batch, c);
            net.mutable_params()[i] = orig;
            worst = std::max(worst, rel(grad[i], (up - down) / (2 * h)));
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            auto xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            worst = std::max(worst, rel(dx[i], (loss(net, xp, batch, c) - loss(net, xm, batch, c)) / (2 * h)));
        }
    }
    CHECK(worst <= 1e-4);
}

TEST_CASE("softmax") {
    const auto u = softmax(std::vector<double>{0.0, 0.0, 0.0, 0.0});
    for (double p : u) CHECK(p == doctest::Approx(0.25));
    const auto big = softmax(std::vector<double>{1000.0, 0.0});
    CHECK(big[0] == doctest::Approx(1.0));
    CHECK(big[1] >= 0.0);
    const std::vector<double> x{0.3, -1.2, 2.5, 0.0};
    std::vector<double> shifted(x);
    for (double& v : shifted) v += 7.0;
    const auto a = softmax(x), b = softmax(shifted);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
        CHECK(a[i] > 0.0);
        sum += a[i];
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    for (const auto& huge : {std::vector<double>{1e6, -1e6, 0.0}, std::vector<double>{-1e6, -1e6}}) {
        const auto p = softmax(huge);
        double s = 0.0;
        for (double v : p) {
            CHECK(std::isfinite(v));
            s += v;
        }
        CHECK(std::abs(s - 1.0) <= 1e-12);
    }
}

TEST_CASE("checkpoint round trip restores outputs bit-exactly") {
    std::mt19937_64 rng(8);
    Mlp net({5, 7, 3}, Activation::Relu);
    net.init(rng);
    const Mlp back = Mlp::from_json(nlohmann::json::parse(net.to_json().dump()));
    CHECK(back == net);
    const std::vector<double> x{0.1, -0.4, 0.9, 1.3, -2.0};
    CHECK(back.forward(x) == net.forward(x));
    auto bad = net.to_json();
    bad["params"].erase(bad["params"].begin());
    CHECK_THROWS_AS(Mlp::from_json(bad), NumericError);
}
