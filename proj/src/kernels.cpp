#include "tactile/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "tactile/errors.hpp"

namespace tactile {

Matrix hconcat(std::initializer_list<const Matrix*> parts) {
  std::size_t rows = (*parts.begin())->rows();
  std::size_t cols = 0;
  for (const Matrix* m : parts) {
    if (m->rows() != rows) throw UsageError("hconcat: row count mismatch");
    cols += m->cols();
  }
  Matrix out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    double* dst = out.row(r).data();
    for (const Matrix* m : parts) {
      auto src = m->row(r);
      for (double v : src) *dst++ = v;
    }
  }
  return out;
}

namespace kernels {
namespace {

void check_forward(const Matrix& x, std::span<const double> w, std::span<const double> b) {
  if (w.size() != x.cols() * b.size()) throw UsageError("dense_forward: weight shape mismatch");
}

// Below this many multiply-adds the thread fork costs more than it saves.
constexpr std::size_t kParallelWork = 1 << 14;

}  // namespace

namespace serial {

void dense_forward(const Matrix& x, std::span<const double> w, std::span<const double> b,
                   Matrix& y) {
  check_forward(x, w, b);
  const std::size_t n = x.rows(), in = x.cols(), out = b.size();
  y.resize(n, out);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t o = 0; o < out; ++o) {
      double acc = b[o];
      for (std::size_t i = 0; i < in; ++i) acc += x(r, i) * w[i * out + o];
      y(r, o) = acc;
    }
  }
}

void dense_backward_input(const Matrix& dy, std::span<const double> w, Matrix& dx) {
  const std::size_t n = dy.rows(), out = dy.cols();
  if (out == 0 || w.size() % out != 0) throw UsageError("dense_backward_input: shape mismatch");
  const std::size_t in = w.size() / out;
  dx.resize(n, in);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < in; ++i) {
      double acc = 0.0;
      for (std::size_t o = 0; o < out; ++o) acc += dy(r, o) * w[i * out + o];
      dx(r, i) = acc;
    }
  }
}

void dense_backward_params(const Matrix& x, const Matrix& dy, std::span<double> dw,
                           std::span<double> db) {
  const std::size_t n = x.rows(), in = x.cols(), out = dy.cols();
  if (dy.rows() != n || dw.size() != in * out || db.size() != out)
    throw UsageError("dense_backward_params: shape mismatch");
  for (std::size_t i = 0; i < in; ++i) {
    for (std::size_t o = 0; o < out; ++o) {
      double acc = dw[i * out + o];
      for (std::size_t r = 0; r < n; ++r) acc += x(r, i) * dy(r, o);
      dw[i * out + o] = acc;
    }
  }
  for (std::size_t o = 0; o < out; ++o) {
    double acc = db[o];
    for (std::size_t r = 0; r < n; ++r) acc += dy(r, o);
    db[o] = acc;
  }
}

}  // namespace serial

namespace parallel {

void dense_forward(const Matrix& x, std::span<const double> w, std::span<const double> b,
                   Matrix& y) {
  check_forward(x, w, b);
  const std::size_t n = x.rows(), in = x.cols(), out = b.size();
  y.resize(n, out);
  const double* xp = x.flat().data();
  const double* wp = w.data();
  const double* bp = b.data();
  double* yp = y.flat().data();
  const bool big = n * in * out >= kParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (std::size_t r = 0; r < n; ++r) {
    double* yr = yp + r * out;
    const double* xr = xp + r * in;
    for (std::size_t o = 0; o < out; ++o) yr[o] = bp[o];
    for (std::size_t i = 0; i < in; ++i) {
      const double xi = xr[i];
      const double* wi = wp + i * out;
#pragma omp simd
      for (std::size_t o = 0; o < out; ++o) yr[o] += xi * wi[o];
    }
  }
}

void dense_backward_input(const Matrix& dy, std::span<const double> w, Matrix& dx) {
  const std::size_t n = dy.rows(), out = dy.cols();
  if (out == 0 || w.size() % out != 0) throw UsageError("dense_backward_input: shape mismatch");
  const std::size_t in = w.size() / out;
  dx.resize(n, in);
  const double* dyp = dy.flat().data();
  const double* wp = w.data();
  double* dxp = dx.flat().data();
  const bool big = n * in * out >= kParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (std::size_t r = 0; r < n; ++r) {
    const double* dyr = dyp + r * out;
    for (std::size_t i = 0; i < in; ++i) {
      const double* wi = wp + i * out;
      double acc = 0.0;
#pragma omp simd reduction(+ : acc)
      for (std::size_t o = 0; o < out; ++o) acc += dyr[o] * wi[o];
      dxp[r * in + i] = acc;
    }
  }
}

void dense_backward_params(const Matrix& x, const Matrix& dy, std::span<double> dw,
                           std::span<double> db) {
  const std::size_t n = x.rows(), in = x.cols(), out = dy.cols();
  if (dy.rows() != n || dw.size() != in * out || db.size() != out)
    throw UsageError("dense_backward_params: shape mismatch");
  const double* xp = x.flat().data();
  const double* dyp = dy.flat().data();
  double* dwp = dw.data();
  const bool big = n * in * out >= kParallelWork;
  // Each thread owns whole rows of dw, so the batch sum runs in a fixed order.
#pragma omp parallel for schedule(static) if (big)
  for (std::size_t i = 0; i < in; ++i) {
    double* dwi = dwp + i * out;
    for (std::size_t r = 0; r < n; ++r) {
      const double xi = xp[r * in + i];
      const double* dyr = dyp + r * out;
#pragma omp simd
      for (std::size_t o = 0; o < out; ++o) dwi[o] += xi * dyr[o];
    }
  }
  for (std::size_t r = 0; r < n; ++r) {
    const double* dyr = dyp + r * out;
#pragma omp simd
    for (std::size_t o = 0; o < out; ++o) db[o] += dyr[o];
  }
}

}  // namespace parallel

void relu_inplace(Matrix& z) {
  for (double& v : z.flat()) v = v > 0.0 ? v : 0.0;
}

void relu_backward_inplace(const Matrix& activated, Matrix& g) {
  auto a = activated.flat();
  auto gv = g.flat();
  for (std::size_t k = 0; k < gv.size(); ++k)
    if (!(a[k] > 0.0)) gv[k] = 0.0;
}

void tanh_inplace(Matrix& z) {
  for (double& v : z.flat()) v = std::tanh(v);
}

}  // namespace kernels
}  // namespace tactile
