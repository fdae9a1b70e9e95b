#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gpe/transforms.hpp"
#include "oracles.hpp"

using namespace gpe;
using oracle::cd;
using oracle::pi;

TEST_CASE("sine transform values") {
  const int n = 8;
  Eigen::VectorXd v(n - 1);
  for (int j = 1; j < n; ++j) v[j - 1] = std::sin(pi * j / n);
  SineSpectrum s = dst_forward(v);
  CHECK(s.coefficients[0] == doctest::Approx(1.0).epsilon(1e-13));
  for (int l = 1; l < n - 1; ++l) CHECK(std::abs(s.coefficients[l]) < 1e-13);

  CHECK(dst_forward(Eigen::VectorXd::Zero(15)).coefficients.cwiseAbs().maxCoeff() == 0.0);

  std::mt19937_64 rng(1);
  Eigen::VectorXd r = oracle::random_vector<double>(rng, 15);
  CHECK((dst_forward(r).coefficients - oracle::slow_dst(r)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sine wavenumbers") {
  SineSpectrum s = dst_forward(Eigen::VectorXd::Ones(7), 32.0);
  REQUIRE(s.wavenumbers.size() == 7);
  for (int l = 0; l < 7; ++l) CHECK(s.wavenumbers[l] == doctest::Approx(pi * (l + 1) / 32.0));
}

TEST_CASE("inverse sine transform") {
  const int n = 8;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n - 1);
  c[0] = 1.0;
  Eigen::VectorXd v = dst_inverse(c);
  for (int j = 1; j < n; ++j) CHECK(v[j - 1] == doctest::Approx(std::sin(pi * j / n)));

  // N = 4, all-ones spectrum: phi_1 = 1 + sqrt2, phi_2 = 0, phi_3 = sqrt2 - 1
  Eigen::VectorXd w = dst_inverse(Eigen::VectorXd::Ones(3));
  CHECK(w[0] == doctest::Approx(1.0 + std::sqrt(2.0)));
  CHECK(std::abs(w[1]) < 1e-14);
  CHECK(w[2] == doctest::Approx(std::sqrt(2.0) - 1.0));

  std::mt19937_64 rng(2);
  Eigen::VectorXd r = oracle::random_vector<double>(rng, 31);
  CHECK((dst_inverse(dst_forward(r).coefficients) - r).norm() < 1e-12 * r.norm());
}

TEST_CASE("fourier transform values") {
  const int n = 16;
  Eigen::VectorXcd c = Eigen::VectorXcd::Constant(n, cd(2.5, -1.0));
  FourierSpectrum s = dft_forward(c);
  CHECK(std::abs(s.coefficients[0] - cd(2.5, -1.0)) < 1e-13);
  for (int k = 1; k < n; ++k) CHECK(std::abs(s.coefficients[k]) < 1e-13);

  Eigen::VectorXcd e(n);
  for (int j = 0; j < n; ++j) e[j] = std::polar(1.0, 2.0 * pi * j / n);
  s = dft_forward(e);
  CHECK(std::abs(s.coefficients[1] - 1.0) < 1e-13);
  for (int k = 0; k < n; ++k)
    if (k != 1) CHECK(std::abs(s.coefficients[k]) < 1e-13);

  std::mt19937_64 rng(3);
  Eigen::VectorXcd r = oracle::random_vector<cd>(rng, n);
  CHECK((dft_forward(r).coefficients - oracle::slow_dft(r)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((dft_inverse(dft_forward(r).coefficients) - r).norm() < 1e-12 * r.norm());
}

TEST_CASE("fourier wavenumbers in slot order") {
  FourierSpectrum s = dft_forward(Eigen::VectorXcd::Ones(8), 20.0);
  const int modes[] = {0, 1, 2, 3, -4, -3, -2, -1};
  for (int k = 0; k < 8; ++k) {
    CHECK(fourier_mode(k, 8) == modes[k]);
    CHECK(s.wavenumbers[k] == doctest::Approx(2.0 * pi * modes[k] / 20.0));
  }
}

TEST_CASE("parseval and linearity") {
  std::mt19937_64 rng(4);
  for (int n : {4, 8, 16, 64, 256}) {
    Eigen::VectorXd v = oracle::random_vector<double>(rng, n - 1);
    Eigen::VectorXd c = dst_forward(v).coefficients;
    CHECK(v.squaredNorm() == doctest::Approx(0.5 * n * c.squaredNorm()).epsilon(1e-12));

    Eigen::VectorXcd z = oracle::random_vector<cd>(rng, n);
    Eigen::VectorXcd f = dft_forward(z).coefficients;
    CHECK(z.squaredNorm() == doctest::Approx(n * f.squaredNorm()).epsilon(1e-12));

    Eigen::VectorXd w = oracle::random_vector<double>(rng, n - 1);
    Eigen::VectorXd lin = dst_forward(2.0 * v - 3.0 * w).coefficients;
    CHECK((lin - (2.0 * c - 3.0 * dst_forward(w).coefficients)).norm() < 1e-12 * lin.norm());
    Eigen::VectorXcd y = oracle::random_vector<cd>(rng, n);
    Eigen::VectorXcd flin = dft_forward(cd(0, 1) * z + y).coefficients;
    CHECK((flin - (cd(0, 1) * f + dft_forward(y).coefficients)).norm() < 1e-12 * flin.norm());
  }
}

TEST_CASE("axis kernels act line by line") {
  // 3D tensor: every line along each axis must match the 1D transform
  const Shape shape{5, 6, 7};
  const int m = 5 * 6 * 7;
  std::mt19937_64 rng(5);
  Eigen::VectorXd v = oracle::random_vector<double>(rng, m);
  Eigen::VectorXcd z = oracle::random_vector<cd>(rng, m);
  for (int axis = 0; axis < 3; ++axis) {
    Eigen::VectorXd tv = v;
    detail::sine_axis(tv.data(), shape, axis);
    Eigen::VectorXcd tz = z;
    detail::sine_axis(tz.data(), shape, axis);
    Eigen::VectorXcd fz = z;
    detail::fourier_axis(fz.data(), shape, axis, -1);
    const int n = shape[axis];
    const int stride = axis == 0 ? 1 : (axis == 1 ? 5 : 30);
    for (int base = 0; base < m; ++base) {
      // only visit line starts
      if ((base / stride) % n != 0) continue;
      Eigen::VectorXd line(n);
      Eigen::VectorXcd zline(n);
      for (int i = 0; i < n; ++i) {
        line[i] = v[base + i * stride];
        zline[i] = z[base + i * stride];
      }
      // unnormalized kernels: sine = N * scaled DST with N = n + 1, fourier = n * scaled DFT
      Eigen::VectorXd ref = oracle::slow_dst(line) * double(n + 1);
      Eigen::VectorXcd zref_re = (oracle::slow_dst(zline.real()) * double(n + 1)).cast<cd>();
      Eigen::VectorXcd zref_im = (oracle::slow_dst(zline.imag()) * double(n + 1)).cast<cd>();
      Eigen::VectorXcd fref = oracle::slow_dft(zline) * double(n);
      for (int i = 0; i < n; ++i) {
        CHECK(std::abs(tv[base + i * stride] - ref[i]) < 1e-11);
        CHECK(std::abs(tz[base + i * stride] - (zref_re[i] + cd(0, 1) * zref_im[i])) < 1e-11);
        CHECK(std::abs(fz[base + i * stride] - fref[i]) < 1e-11);
      }
    }
  }
}
