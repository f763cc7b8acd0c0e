#pragma once

#include <span>

#include "tactile/matrix.hpp"

// Dense-layer kernels used by the networks. Weights are stored input-major:
// w[i * out + o] connects input i to output o.
//
// `serial` is the reference implementation kept for testing; `parallel`
// splits the independent rows across OpenMP threads. Both accumulate every
// output element in the same order, so results agree to rounding (FMA
// contraction may differ between the vectorized and scalar paths).
namespace tactile::kernels {

namespace serial {

// y = x * w + b
void dense_forward(const Matrix& x, std::span<const double> w,
                   std::span<const double> b, Matrix& y);
// dx = dy * w^T
void dense_backward_input(const Matrix& dy, std::span<const double> w, Matrix& dx);
// dw += x^T * dy, db += column sums of dy
void dense_backward_params(const Matrix& x, const Matrix& dy, std::span<double> dw,
                           std::span<double> db);

}  // namespace serial

namespace parallel {

void dense_forward(const Matrix& x, std::span<const double> w,
                   std::span<const double> b, Matrix& y);
void dense_backward_input(const Matrix& dy, std::span<const double> w, Matrix& dx);
void dense_backward_params(const Matrix& x, const Matrix& dy, std::span<double> dw,
                           std::span<double> db);

}  // namespace parallel

void relu_inplace(Matrix& z);
// g *= 1[z > 0], where z is the layer output after rectification.
void relu_backward_inplace(const Matrix& activated, Matrix& g);
void tanh_inplace(Matrix& z);

}  // namespace tactile::kernels
