#include "gpe/transforms.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <numbers>
#include <tuple>
#include <vector>

namespace gpe {
namespace detail {
namespace {

struct PlanKey {
  int kind;  // 0 sine, 1 fourier
  Shape shape;
  int axis;
  int sign;
  int components;  // 2: sine transform of interleaved re/im pairs
  bool operator<(const PlanKey& o) const {
    return std::tie(kind, shape, axis, sign, components) <
           std::tie(o.kind, o.shape, o.axis, o.sign, o.components);
  }
};

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(const PlanKey& key) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    fftw_plan plan = make(key);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  static void layout(const PlanKey& key, fftw_iodim& line, std::vector<fftw_iodim>& loops) {
    int stride = key.components;
    if (key.components > 1) loops.push_back({key.components, 1, 1});
    for (int d = 0; d < 3; ++d) {
      const int n = key.shape[d];
      if (d == key.axis) {
        line = {n, stride, stride};
      } else if (n > 1) {
        loops.push_back({n, stride, stride});
      }
      stride *= n;
    }
  }

  static fftw_plan make(const PlanKey& key) {
    const std::size_t total =
        static_cast<std::size_t>(key.shape[0]) * key.shape[1] * key.shape[2] * key.components;
    fftw_iodim line{};
    std::vector<fftw_iodim> loops;
    layout(key, line, loops);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    if (key.kind == 0) {
      std::vector<double> scratch(total);
      fftw_r2r_kind kind = FFTW_RODFT00;
      return fftw_plan_guru_r2r(1, &line, static_cast<int>(loops.size()), loops.data(),
                                scratch.data(), scratch.data(), &kind, flags);
    }
    std::vector<fftw_complex> scratch(total);
    return fftw_plan_guru_dft(1, &line, static_cast<int>(loops.size()), loops.data(),
                              scratch.data(), scratch.data(),
                              key.sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, flags);
  }

  std::mutex mutex_;
  std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void sine_axis(double* data, const Shape& shape, int axis) {
  fftw_plan plan = cache().get({0, shape, axis, 0, 1});
  fftw_execute_r2r(plan, data, data);
}

void sine_axis(std::complex<double>* data, const Shape& shape, int axis) {
  fftw_plan plan = cache().get({0, shape, axis, 0, 2});
  auto* p = reinterpret_cast<double*>(data);
  fftw_execute_r2r(plan, p, p);
}

void fourier_axis(std::complex<double>* data, const Shape& shape, int axis, int sign) {
  fftw_plan plan = cache().get({1, shape, axis, sign < 0 ? -1 : 1, 1});
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, p, p);
}

}  // namespace detail

SineSpectrum dst_forward(const Eigen::Ref<const Eigen::VectorXd>& values, double extent) {
  const int m = static_cast<int>(values.size());
  const int n = m + 1;
  SineSpectrum out;
  out.coefficients = values;
  if (m > 0) detail::sine_axis(out.coefficients.data(), {m, 1, 1}, 0);
  out.coefficients /= n;
  out.wavenumbers.resize(m);
  for (int l = 1; l <= m; ++l) out.wavenumbers[l - 1] = std::numbers::pi * l / extent;
  return out;
}

Eigen::VectorXd dst_inverse(const Eigen::Ref<const Eigen::VectorXd>& coefficients) {
  const int m = static_cast<int>(coefficients.size());
  Eigen::VectorXd out = coefficients;
  if (m > 0) detail::sine_axis(out.data(), {m, 1, 1}, 0);
  out *= 0.5;
  return out;
}

FourierSpectrum dft_forward(const Eigen::Ref<const Eigen::VectorXcd>& values, double extent) {
  const int n = static_cast<int>(values.size());
  FourierSpectrum out;
  out.coefficients = values;
  if (n > 0) detail::fourier_axis(out.coefficients.data(), {n, 1, 1}, 0, -1);
  out.coefficients /= static_cast<double>(n);
  out.wavenumbers.resize(n);
  for (int k = 0; k < n; ++k) {
    out.wavenumbers[k] = 2.0 * std::numbers::pi * fourier_mode(k, n) / extent;
  }
  return out;
}

Eigen::VectorXcd dft_inverse(const Eigen::Ref<const Eigen::VectorXcd>& coefficients) {
  const int n = static_cast<int>(coefficients.size());
  Eigen::VectorXcd out = coefficients;
  if (n > 0) detail::fourier_axis(out.data(), {n, 1, 1}, 0, +1);
  return out;
}

}  // namespace gpe
