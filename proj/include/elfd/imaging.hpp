#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "elfd/errors.hpp"

namespace elfd {

/// Dense 2-D raster indexed (row, col) = (y, x).
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using RealPlane = Plane<double>;

/// Grayscale raster with samples in [0,1].
class GrayImage {
 public:
  GrayImage() = default;
  explicit GrayImage(RealPlane pixels);
  /// `samples` are row-major, length width*height.
  GrayImage(Eigen::Index width, Eigen::Index height, const std::vector<double>& samples);

  Eigen::Index width() const { return pixels_.cols(); }
  Eigen::Index height() const { return pixels_.rows(); }
  const RealPlane& pixels() const { return pixels_; }
  double operator()(Eigen::Index row, Eigen::Index col) const { return pixels_(row, col); }
  std::vector<double> samples() const;

  friend bool operator==(const GrayImage& a, const GrayImage& b) {
    return a.pixels_.rows() == b.pixels_.rows() && a.pixels_.cols() == b.pixels_.cols() &&
           (a.pixels_ == b.pixels_).all();
  }

 private:
  RealPlane pixels_;
};

/// Clamp to [0,1] and wrap; non-finite samples are rejected.
GrayImage clamped_image(const RealPlane& raw);

/// Non-negative, odd-sized, unit-mass blur kernel.
class Kernel {
 public:
  explicit Kernel(RealPlane weights);

  Eigen::Index width() const { return weights_.cols(); }
  Eigen::Index height() const { return weights_.rows(); }
  const RealPlane& weights() const { return weights_; }

 private:
  RealPlane weights_;
};

struct LowRes {
  int factor;
};
struct GaussianBlur {
  double sigma;
  int size;
};
struct MotionBlur {
  int length;
  double angle_deg;
};
struct CustomKernel {
  std::filesystem::path source;
};

using DegradationSpec = std::variant<LowRes, GaussianBlur, MotionBlur, CustomKernel>;

/// Parses `lowres:F`, `gaussian:SIGMA:SIZE`, `motion:LEN:ANGLE` or `kernel:PATH`.
DegradationSpec parse_degradation(std::string_view token);
/// Inverse of parse_degradation.
std::string degradation_token(const DegradationSpec& spec);
/// Row label used in result tables (LR2, Gaussian, motion, kernel file stem, ...).
std::string degradation_label(const DegradationSpec& spec);

GrayImage load_pgm(const std::filesystem::path& path);
GrayImage read_pgm(std::istream& in);
void save_pgm(const GrayImage& image, const std::filesystem::path& path);
void write_pgm(const GrayImage& image, std::ostream& out);

Kernel gaussian_kernel(double sigma, int size);
Kernel motion_kernel(int length, double angle_deg);

/// Plain-text kernel: "height width" then `height` rows of `width` reals.
Kernel parse_kernel(std::istream& in);
Kernel load_kernel(const std::filesystem::path& path);

/// Convolution with replicate padding, no clamping. out(y,x) = sum k(r) src(y-ry, x-rx).
template <typename Derived>
Plane<typename Derived::Scalar> convolve_replicate(const Eigen::ArrayBase<Derived>& src,
                                                   const Kernel& kernel) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index rows = src.rows();
  const Eigen::Index cols = src.cols();
  if (kernel.height() > 2 * rows || kernel.width() > 2 * cols) {
    throw ParameterError("convolve: kernel larger than twice the image extent");
  }
  const Eigen::Index hy = kernel.height() / 2;
  const Eigen::Index hx = kernel.width() / 2;
  const RealPlane& w = kernel.weights();
  Plane<Scalar> out = Plane<Scalar>::Zero(rows, cols);
  for (Eigen::Index y = 0; y < rows; ++y) {
    for (Eigen::Index x = 0; x < cols; ++x) {
      Scalar acc(0);
      for (Eigen::Index ky = 0; ky < kernel.height(); ++ky) {
        const Eigen::Index sy = std::clamp<Eigen::Index>(y - (ky - hy), 0, rows - 1);
        for (Eigen::Index kx = 0; kx < kernel.width(); ++kx) {
          const double weight = w(ky, kx);
          if (weight == 0.0) continue;
          const Eigen::Index sx = std::clamp<Eigen::Index>(x - (kx - hx), 0, cols - 1);
          acc += Scalar(weight) * src(sy, sx);
        }
      }
      out(y, x) = acc;
    }
  }
  return out;
}

/// Replicate-padded convolution, clamped to [0,1].
GrayImage convolve(const GrayImage& image, const Kernel& kernel);

/// f x f box-average decimation; remainder rows/cols are dropped.
GrayImage downsample_box(const GrayImage& image, int factor);
/// Keys bicubic (a = -0.5) resampling with replicate borders, clamped to [0,1].
GrayImage resize_bicubic(const GrayImage& image, Eigen::Index width, Eigen::Index height);
/// Largest centered crop with the target aspect ratio, then bicubic resize.
GrayImage center_crop_resize(const GrayImage& image, Eigen::Index width, Eigen::Index height);

/// Applies one degradation. LowRes decimates then upsamples back to the input size.
GrayImage degrade(const GrayImage& image, const DegradationSpec& spec);

}  // namespace elfd
