#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "elfd/imaging.hpp"

namespace elfd {

/// Gaussian STFT window. `size` is the scale (odd number of taps).
struct WindowSpec {
  int size = 11;
  double sigma = 11.0 / 6.0;

  /// Window for a scale, sigma = size / 6 so that +-3 sigma spans the support.
  static WindowSpec for_scale(int size) { return {size, size / 6.0}; }
};

/// Two-dimensional frequency in cycles/pixel; `ux` runs along columns, `uy` along rows.
struct Frequency {
  double ux = 0.0;
  double uy = 0.0;

  Frequency operator-() const { return {-ux, -uy}; }
};

/// u1 = (1/W, 0), u2 = (0, 1/W), u3 = (1/W, 1/W), u4 = (1/W, -1/W).
std::array<Frequency, 4> frequency_set(int scale);

/// size x size weights exp(-(dx^2 + dy^2) / (2 sigma^2)), peak 1.
RealPlane gaussian_window(const WindowSpec& spec);

/// Exponent reference point: offsets from the window center (relative) or image coordinates (absolute).
enum class PhaseConvention { relative, absolute };

using ComplexPlane = Plane<std::complex<double>>;

/// Quadrant of a complex value: 0 (Re>=0, Im>=0), 1 (Re<0, Im>=0), 2 (Re<0, Im<0), 3 (Re>=0, Im<0).
inline int quadrant(std::complex<double> z) {
  const bool re_neg = z.real() < 0.0;
  const bool im_neg = z.imag() < 0.0;
  if (!im_neg) return re_neg ? 1 : 0;
  return re_neg ? 2 : 3;
}

namespace detail {

template <typename Scalar>
std::vector<std::complex<Scalar>> modulated_taps(const WindowSpec& window, double freq) {
  const int half = window.size / 2;
  std::vector<std::complex<Scalar>> taps(static_cast<std::size_t>(window.size));
  for (int r = -half; r <= half; ++r) {
    const double g = std::exp(-(static_cast<double>(r) * r) / (2.0 * window.sigma * window.sigma));
    const double phase = -2.0 * std::numbers::pi * freq * r;
    taps[static_cast<std::size_t>(r + half)] =
        std::complex<Scalar>(Scalar(g * std::cos(phase)), Scalar(g * std::sin(phase)));
  }
  return taps;
}

}  // namespace detail

/// Windowed Fourier response at frequency `u` for every pixel, replicate-padded:
///   F(x) = sum_r f(x + r) w(r) exp(-j 2 pi u.r)              (relative)
///   F(x) = sum_r f(x + r) w(r) exp(-j 2 pi u.(x + r))        (absolute)
/// Evaluated separably; the Gaussian window and the exponential both factor over (row, col).
template <typename Derived>
Plane<std::complex<typename Derived::Scalar>> stft_plane(
    const Eigen::ArrayBase<Derived>& image, const WindowSpec& window, Frequency u,
    PhaseConvention convention = PhaseConvention::relative) {
  using Scalar = typename Derived::Scalar;
  using Complex = std::complex<Scalar>;
  if (window.size < 1 || window.size % 2 == 0) throw ParameterError("stft_plane: window size must be odd");
  if (!(window.sigma > 0.0)) throw ParameterError("stft_plane: window sigma must be > 0");
  const Eigen::Index rows = image.rows();
  const Eigen::Index cols = image.cols();
  if (window.size > 2 * rows || window.size > 2 * cols) {
    throw ParameterError("stft_plane: window larger than twice the image extent");
  }
  const int half = window.size / 2;
  const auto taps_x = detail::modulated_taps<Scalar>(window, u.ux);
  const auto taps_y = detail::modulated_taps<Scalar>(window, u.uy);

  Plane<Complex> along_x(rows, cols);
  for (Eigen::Index y = 0; y < rows; ++y) {
    for (Eigen::Index x = 0; x < cols; ++x) {
      Complex acc(0);
      for (int r = -half; r <= half; ++r) {
        const Eigen::Index sx = std::clamp<Eigen::Index>(x + r, 0, cols - 1);
        acc += taps_x[static_cast<std::size_t>(r + half)] * image(y, sx);
      }
      along_x(y, x) = acc;
    }
  }
  Plane<Complex> out(rows, cols);
  for (Eigen::Index y = 0; y < rows; ++y) {
    for (Eigen::Index x = 0; x < cols; ++x) {
      Complex acc(0);
      for (int r = -half; r <= half; ++r) {
        const Eigen::Index sy = std::clamp<Eigen::Index>(y + r, 0, rows - 1);
        acc += taps_y[static_cast<std::size_t>(r + half)] * along_x(sy, x);
      }
      out(y, x) = acc;
    }
  }
  if (convention == PhaseConvention::absolute) {
    for (Eigen::Index y = 0; y < rows; ++y) {
      for (Eigen::Index x = 0; x < cols; ++x) {
        const double phase = -2.0 * std::numbers::pi * (u.ux * x + u.uy * y);
        out(y, x) *= Complex(Scalar(std::cos(phase)), Scalar(std::sin(phase)));
      }
    }
  }
  return out;
}

/// Discrete-time Fourier transform of a finite raster at `u`, with absolute
/// coordinates (row, col) measured from `origin_row`, `origin_col`.
template <typename Derived>
std::complex<double> dtft(const Eigen::ArrayBase<Derived>& signal, Frequency u,
                          double origin_row = 0.0, double origin_col = 0.0) {
  std::complex<double> acc(0.0);
  for (Eigen::Index y = 0; y < signal.rows(); ++y) {
    for (Eigen::Index x = 0; x < signal.cols(); ++x) {
      const double phase = -2.0 * std::numbers::pi * (u.ux * (x + origin_col) + u.uy * (y + origin_row));
      acc += std::complex<double>(signal(y, x)) * std::polar(1.0, phase);
    }
  }
  return acc;
}

/// The four frequency-plane responses of one image at one scale.
class StftPlanes {
 public:
  StftPlanes(int scale, std::array<ComplexPlane, 4> planes);

  int scale() const { return scale_; }
  const ComplexPlane& plane(std::size_t index) const { return planes_.at(index); }
  Eigen::Index rows() const { return planes_[0].rows(); }
  Eigen::Index cols() const { return planes_[0].cols(); }

  RealPlane magnitude(std::size_t index) const;
  Plane<std::uint8_t> quadrants(std::size_t index) const;

 private:
  int scale_;
  std::array<ComplexPlane, 4> planes_;
};

/// Responses at frequency_set(scale) with WindowSpec::for_scale(scale).
StftPlanes compute_planes(const GrayImage& image, int scale);

/// Min-max scaled magnitude/phase rasters for diagnostic dumps.
GrayImage magnitude_image(const StftPlanes& planes, std::size_t index);
GrayImage phase_image(const StftPlanes& planes, std::size_t index);

}  // namespace elfd
