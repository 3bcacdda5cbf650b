#pragma once

#include <span>

// Dense-layer kernels on row-major buffers. Weights are out x in, batches are
// batch x features. The default versions split work over independent outputs
// with OpenMP, so results do not depend on the thread count; the reference
// versions are plain serial loops kept for tests and benchmarks.

namespace inferedge::kernels {

/// y = x * w^T + bias
void dense_forward(std::span<const double> x, std::span<const double> w,
                   std::span<const double> bias, std::span<double> y, int batch, int in, int out);

/// dx = dy * w   (overwrites dx)
void dense_backward_input(std::span<const double> dy, std::span<const double> w,
                          std::span<double> dx, int batch, int in, int out);

/// dw += dy^T * x, db += column sums of dy
void dense_backward_params(std::span<const double> dy, std::span<const double> x,
                           std::span<double> dw, std::span<double> db, int batch, int in, int out);

void relu_inplace(std::span<double> v);

/// grad[i] = 0 wherever activated[i] <= 0
void relu_backward(std::span<const double> activated, std::span<double> grad);

namespace reference {

void dense_forward(std::span<const double> x, std::span<const double> w,
                   std::span<const double> bias, std::span<double> y, int batch, int in, int out);
void dense_backward_input(std::span<const double> dy, std::span<const double> w,
                          std::span<double> dx, int batch, int in, int out);
void dense_backward_params(std::span<const double> dy, std::span<const double> x,
                           std::span<double> dw, std::span<double> db, int batch, int in, int out);

}  // namespace reference
}  // namespace inferedge::kernels
