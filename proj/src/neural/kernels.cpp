#include "inferedge/neural/kernels.hpp"

#include <algorithm>
#include <cstddef>

namespace inferedge::kernels {
namespace {

// Below this many multiply-adds the fork/join overhead dominates.
constexpr long kParallelWork = 1L << 15;

}  // namespace

void dense_forward(std::span<const double> x, std::span<const double> w,
                   std::span<const double> bias, std::span<double> y, int batch, int in, int out) {
    const double* xp = x.data();
    const double* wp = w.data();
    const double* bp = bias.data();
    double* yp = y.data();
    const long work = static_cast<long>(batch) * in * out;

#pragma omp parallel for collapse(2) schedule(static) if (work > kParallelWork)
    for (int b = 0; b < batch; ++b) {
        for (int o = 0; o < out; ++o) {
            const double* xr = xp + static_cast<std::ptrdiff_t>(b) * in;
            const double* wr = wp + static_cast<std::ptrdiff_t>(o) * in;
            double acc = 0.0;
#pragma omp simd reduction(+ : acc)
            for (int i = 0; i < in; ++i) acc += xr[i] * wr[i];
            yp[static_cast<std::ptrdiff_t>(b) * out + o] = acc + bp[o];
        }
    }
}

void dense_backward_input(std::span<const double> dy, std::span<const double> w,
                          std::span<double> dx, int batch, int in, int out) {
    const double* dyp = dy.data();
    const double* wp = w.data();
    double* dxp = dx.data();
    const long work = static_cast<long>(batch) * in * out;

    // Rows of dx are independent; with a single row, split the columns instead.
    if (batch == 1) {
#pragma omp parallel for schedule(static) if (work > kParallelWork)
        for (int i = 0; i < in; ++i) {
            double acc = 0.0;
            for (int o = 0; o < out; ++o) acc += dyp[o] * wp[static_cast<std::ptrdiff_t>(o) * in + i];
            dxp[i] = acc;
        }
        return;
    }

#pragma omp parallel for schedule(static) if (work > kParallelWork)
    for (int b = 0; b < batch; ++b) {
        double* dxr = dxp + static_cast<std::ptrdiff_t>(b) * in;
        const double* dyr = dyp + static_cast<std::ptrdiff_t>(b) * out;
        std::fill(dxr, dxr + in, 0.0);
        for (int o = 0; o < out; ++o) {
            const double g = dyr[o];
            if (g == 0.0) continue;
            const double* wr = wp + static_cast<std::ptrdiff_t>(o) * in;
#pragma omp simd
            for (int i = 0; i < in; ++i) dxr[i] += g * wr[i];
        }
    }
}

void dense_backward_params(std::span<const double> dy, std::span<const double> x,
                           std::span<double> dw, std::span<double> db, int batch, int in, int out) {
    const double* dyp = dy.data();
    const double* xp = x.data();
    double* dwp = dw.data();
    double* dbp = db.data();
    const long work = static_cast<long>(batch) * in * out;

#pragma omp parallel for schedule(static) if (work > kParallelWork)
    for (int o = 0; o < out; ++o) {
        double* dwr = dwp + static_cast<std::ptrdiff_t>(o) * in;
        double bias_acc = 0.0;
        for (int b = 0; b < batch; ++b) {
            const double g = dyp[static_cast<std::ptrdiff_t>(b) * out + o];
            bias_acc += g;
            if (g == 0.0) continue;
            const double* xr = xp + static_cast<std::ptrdiff_t>(b) * in;
#pragma omp simd
            for (int i = 0; i < in; ++i) dwr[i] += g * xr[i];
        }
        dbp[o] += bias_acc;
    }
}

void relu_inplace(std::span<double> v) {
    for (double& e : v) e = e > 0.0 ? e : 0.0;
}

void relu_backward(std::span<const double> activated, std::span<double> grad) {
    for (std::size_t i = 0; i < grad.size(); ++i)
        if (activated[i] <= 0.0) grad[i] = 0.0;
}

}  // namespace inferedge::kernels
