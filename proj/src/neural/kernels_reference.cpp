#include "inferedge/neural/kernels.hpp"

namespace inferedge::kernels::reference {

void dense_forward(std::span<const double> x, std::span<const double> w,
                   std::span<const double> bias, std::span<double> y, int batch, int in, int out) {
    for (int b = 0; b < batch; ++b)
        for (int o = 0; o < out; ++o) {
            double acc = 0.0;
            for (int i = 0; i < in; ++i) acc += x[b * in + i] * w[o * in + i];
            y[b * out + o] = acc + bias[o];
        }
}

void dense_backward_input(std::span<const double> dy, std::span<const double> w,
                          std::span<double> dx, int batch, int in, int out) {
    for (int b = 0; b < batch; ++b)
        for (int i = 0; i < in; ++i) {
            double acc = 0.0;
            for (int o = 0; o < out; ++o) acc += dy[b * out + o] * w[o * in + i];
            dx[b * in + i] = acc;
        }
}

void dense_backward_params(std::span<const double> dy, std::span<const double> x,
                           std::span<double> dw, std::span<double> db, int batch, int in, int out) {
    for (int o = 0; o < out; ++o) {
        for (int i = 0; i < in; ++i) {
            double acc = 0.0;
            for (int b = 0; b < batch; ++b) acc += dy[b * out + o] * x[b * in + i];
            dw[o * in + i] += acc;
        }
        double acc = 0.0;
        for (int b = 0; b < batch; ++b) acc += dy[b * out + o];
        db[o] += acc;
    }
}

}  // namespace inferedge::kernels::reference
