#include "doctest.h"

#include <random>
#include <vector>

#include "inferedge/neural/kernels.hpp"

namespace k = inferedge::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return v;
}

}  // namespace

TEST_CASE("parallel kernels agree with the serial reference") {
    std::mt19937_64 rng(4);
    // Small shapes stay serial; the large ones cross the parallel threshold.
    const int shapes[][3] = {{1, 3, 2}, {1, 28, 512}, {1, 512, 256}, {7, 33, 19}, {100, 256, 128}, {64, 512, 256}};
    for (const auto& s : shapes) {
        const int batch = s[0], in = s[1], out = s[2];
        const auto x = random_vec(rng, static_cast<std::size_t>(batch) * in);
        const auto w = random_vec(rng, static_cast<std::size_t>(out) * in);
        const auto b = random_vec(rng, out);
        const auto dy = random_vec(rng, static_cast<std::size_t>(batch) * out);

        std::vector<double> y1(static_cast<std::size_t>(batch) * out), y2(y1.size());
        k::dense_forward(x, w, b, y1, batch, in, out);
        k::reference::dense_forward(x, w, b, y2, batch, in, out);
        for (std::size_t i = 0; i < y1.size(); ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-12));

        std::vector<double> dx1(x.size(), 5.0), dx2(x.size(), -5.0);
        k::dense_backward_input(dy, w, dx1, batch, in, out);
        k::reference::dense_backward_input(dy, w, dx2, batch, in, out);
        for (std::size_t i = 0; i < dx1.size(); ++i) CHECK(dx1[i] == doctest::Approx(dx2[i]).epsilon(1e-12));

        std::vector<double> dw1(w.size(), 0.5), dw2(w.size(), 0.5), db1(out, 0.25), db2(out, 0.25);
        k::dense_backward_params(dy, x, dw1, db1, batch, in, out);
        k::reference::dense_backward_params(dy, x, dw2, db2, batch, in, out);
        for (std::size_t i = 0; i < dw1.size(); ++i) CHECK(dw1[i] == doctest::Approx(dw2[i]).epsilon(1e-12));
        for (int i = 0; i < out; ++i) CHECK(db1[i] == doctest::Approx(db2[i]).epsilon(1e-12));
    }
}

TEST_CASE("reference forward by hand") {
    const std::vector<double> x{1.0, 2.0};
    const std::vector<double> w{1.0, -1.0, 0.5, 0.25};
    const std::vector<double> b{0.5, -1.0};
    std::vector<double> y(2);
    k::reference::dense_forward(x, w, b, y, 1, 2, 2);
    CHECK(y[0] == doctest::Approx(-0.5));
    CHECK(y[1] == doctest::Approx(0.0));
}

TEST_CASE("relu") {
    std::vector<double> v{-1.0, 0.0, 2.0};
    k::relu_inplace(v);
    CHECK(v == std::vector<double>{0.0, 0.0, 2.0});
    std::vector<double> g{3.0, 3.0, 3.0};
    k::relu_backward(v, g);
    CHECK(g == std::vector<double>{0.0, 0.0, 3.0});
}
