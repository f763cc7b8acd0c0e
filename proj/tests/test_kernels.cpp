#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "tactile/kernels.hpp"
#include "tactile/matrix.hpp"

using namespace tactile;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  Matrix m(r, c);
  std::normal_distribution<double> n(0.0, 1.0);
  for (double& v : m.flat()) v = n(rng);
  return m;
}

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::vector<double> v(n);
  std::normal_distribution<double> d(0.0, 1.0);
  for (double& x : v) x = d(rng);
  return v;
}

void expect_close(std::span<const double> a, std::span<const double> b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a[i], b[i], tol * (1.0 + std::abs(a[i]))) << i;
}

struct Shape {
  std::size_t batch, in, out;
};

// Small shapes take the scalar path, large ones cross the threading cutoff.
const Shape kShapes[] = {{1, 1, 1}, {3, 5, 2}, {17, 9, 33}, {256, 64, 64}, {300, 130, 70}};

}  // namespace

TEST(Kernels, ForwardMatchesNaiveLoop) {
  std::mt19937_64 rng(1);
  const Matrix x = random_matrix(4, 3, rng);
  const auto w = random_vector(3 * 2, rng);
  const auto b = random_vector(2, rng);
  Matrix y;
  kernels::serial::dense_forward(x, w, b, y);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t o = 0; o < 2; ++o) {
      double acc = b[o];
      for (std::size_t i = 0; i < 3; ++i) acc += x(r, i) * w[i * 2 + o];
      EXPECT_NEAR(y(r, o), acc, 1e-14);
    }
}

TEST(Kernels, SerialAndParallelAgree) {
  std::mt19937_64 rng(2);
  for (const Shape& s : kShapes) {
    SCOPED_TRACE(::testing::Message() << s.batch << "x" << s.in << "->" << s.out);
    const Matrix x = random_matrix(s.batch, s.in, rng);
    const Matrix dy = random_matrix(s.batch, s.out, rng);
    const auto w = random_vector(s.in * s.out, rng);
    const auto b = random_vector(s.out, rng);

    Matrix y1, y2;
    kernels::serial::dense_forward(x, w, b, y1);
    kernels::parallel::dense_forward(x, w, b, y2);
    expect_close(y1.flat(), y2.flat(), 1e-12);

    Matrix dx1, dx2;
    kernels::serial::dense_backward_input(dy, w, dx1);
    kernels::parallel::dense_backward_input(dy, w, dx2);
    expect_close(dx1.flat(), dx2.flat(), 1e-12);

    std::vector<double> dw1(w.size(), 0.5), dw2(w.size(), 0.5), db1(s.out, 0.5), db2(s.out, 0.5);
    kernels::serial::dense_backward_params(x, dy, dw1, db1);
    kernels::parallel::dense_backward_params(x, dy, dw2, db2);
    expect_close(dw1, dw2, 1e-12);
    expect_close(db1, db2, 1e-12);
  }
}

TEST(Kernels, BackwardIsAdjointOfForward) {
  // <dy, x W> = <dy W^T, x> and = <x^T dy, W>.
  std::mt19937_64 rng(3);
  const Matrix x = random_matrix(7, 5, rng);
  const Matrix dy = random_matrix(7, 4, rng);
  const auto w = random_vector(20, rng);
  const std::vector<double> zero_b(4, 0.0);
  Matrix y, dx;
  kernels::parallel::dense_forward(x, w, zero_b, y);
  kernels::parallel::dense_backward_input(dy, w, dx);
  std::vector<double> dw(20, 0.0), db(4, 0.0);
  kernels::parallel::dense_backward_params(x, dy, dw, db);
  double lhs = 0, via_dx = 0, via_dw = 0;
  for (std::size_t i = 0; i < y.size(); ++i) lhs += y.flat()[i] * dy.flat()[i];
  for (std::size_t i = 0; i < x.size(); ++i) via_dx += dx.flat()[i] * x.flat()[i];
  for (std::size_t i = 0; i < w.size(); ++i) via_dw += dw[i] * w[i];
  EXPECT_NEAR(lhs, via_dx, 1e-10);
  EXPECT_NEAR(lhs, via_dw, 1e-10);
  for (std::size_t o = 0; o < 4; ++o) {
    double col = 0;
    for (std::size_t r = 0; r < 7; ++r) col += dy(r, o);
    EXPECT_NEAR(db[o], col, 1e-12);
  }
}

TEST(Kernels, Activations) {
  Matrix z(1, 4);
  z.flat()[0] = -2.0;
  z.flat()[1] = 0.0;
  z.flat()[2] = 3.0;
  z.flat()[3] = -0.0;
  kernels::relu_inplace(z);
  EXPECT_EQ(z.flat()[0], 0.0);
  EXPECT_EQ(z.flat()[2], 3.0);
  Matrix g(1, 4, 1.0);
  kernels::relu_backward_inplace(z, g);
  EXPECT_EQ(g.flat()[0], 0.0);
  EXPECT_EQ(g.flat()[1], 0.0);
  EXPECT_EQ(g.flat()[2], 1.0);
  Matrix t(1, 2);
  t.flat()[0] = 0.5;
  t.flat()[1] = -40.0;
  kernels::tanh_inplace(t);
  EXPECT_DOUBLE_EQ(t.flat()[0], std::tanh(0.5));
  EXPECT_EQ(t.flat()[1], -1.0);
}

TEST(Kernels, Hconcat) {
  Matrix a(2, 1, 1.0), b(2, 2, 2.0);
  const Matrix c = hconcat({&a, &b});
  ASSERT_EQ(c.cols(), 3u);
  EXPECT_EQ(c(1, 0), 1.0);
  EXPECT_EQ(c(1, 2), 2.0);
}
