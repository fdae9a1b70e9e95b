#pragma once

#include <array>
#include <complex>

#include <Eigen/Core>

namespace gpe {

using Shape = std::array<int, 3>;

/// Coefficients of the scaled DST-I
///   c_l = (2/N) sum_{j=1}^{N-1} v_j sin(j l pi / N),   l = 1..N-1
/// together with the wavenumbers lambda_l = pi l / (b - a).
struct SineSpectrum {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd wavenumbers;
};

/// Coefficients of the scaled DFT
///   c_p = (1/N) sum_{j=0}^{N-1} v_j exp(-2 pi i j p / N),   p = -N/2..N/2-1
/// stored in FFT order: slot k holds mode fourier_mode(k, N).
struct FourierSpectrum {
  Eigen::VectorXcd coefficients;
  Eigen::VectorXd wavenumbers;  // lambda_p = 2 pi p / (b - a), same order
};

/// Signed mode number stored in FFT slot `k` of a length-N transform.
inline int fourier_mode(int k, int n) { return k < n / 2 ? k : k - n; }

/// `values` holds the N-1 interior samples; `extent` is b - a.
SineSpectrum dst_forward(const Eigen::Ref<const Eigen::VectorXd>& values,
                         double extent = 1.0);
/// v_j = sum_l c_l sin(j l pi / N).
Eigen::VectorXd dst_inverse(const Eigen::Ref<const Eigen::VectorXd>& coefficients);

FourierSpectrum dft_forward(const Eigen::Ref<const Eigen::VectorXcd>& values,
                            double extent = 1.0);
/// v_j = sum_p c_p exp(2 pi i j p / N); no normalization factor.
Eigen::VectorXcd dft_inverse(const Eigen::Ref<const Eigen::VectorXcd>& coefficients);

namespace detail {

// Unnormalized in-place kernels acting on every line along `axis` of a
// tensor stored with axis 0 fastest. Plans are cached process-wide; creation
// is serialized, execution is reentrant.

/// y_k = 2 sum_j x_j sin(pi (j+1)(k+1) / (n+1)), n = shape[axis].
void sine_axis(double* data, const Shape& shape, int axis);
/// Same transform applied to the real and imaginary parts independently.
void sine_axis(std::complex<double>* data, const Shape& shape, int axis);
/// y_k = sum_j x_j exp(sign * 2 pi i j k / n).
void fourier_axis(std::complex<double>* data, const Shape& shape, int axis, int sign);

}  // namespace detail
}  // namespace gpe
