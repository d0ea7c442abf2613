#include "elfd/stft.hpp"

namespace elfd {

namespace {

GrayImage minmax_scaled(const RealPlane& values) {
  const double lo = values.minCoeff();
  const double hi = values.maxCoeff();
  if (hi - lo <= 0.0) return GrayImage(RealPlane::Zero(values.rows(), values.cols()).eval());
  return clamped_image((values - lo) / (hi - lo));
}

}  // namespace

std::array<Frequency, 4> frequency_set(int scale) {
  if (scale < 1 || scale % 2 == 0) throw ParameterError("frequency_set: scale must be odd");
  const double f = 1.0 / scale;
  return {Frequency{f, 0.0}, Frequency{0.0, f}, Frequency{f, f}, Frequency{f, -f}};
}

RealPlane gaussian_window(const WindowSpec& spec) {
  if (spec.size < 1 || spec.size % 2 == 0) throw ParameterError("gaussian_window: size must be odd");
  if (!(spec.sigma > 0.0)) throw ParameterError("gaussian_window: sigma must be > 0");
  const int half = spec.size / 2;
  RealPlane w(spec.size, spec.size);
  for (int y = -half; y <= half; ++y) {
    for (int x = -half; x <= half; ++x) {
      w(y + half, x + half) = std::exp(-static_cast<double>(x * x + y * y) / (2.0 * spec.sigma * spec.sigma));
    }
  }
  return w;
}

StftPlanes::StftPlanes(int scale, std::array<ComplexPlane, 4> planes)
    : scale_(scale), planes_(std::move(planes)) {
  for (const auto& p : planes_) {
    if (p.rows() != planes_[0].rows() || p.cols() != planes_[0].cols()) {
      throw ParameterError("StftPlanes: planes must share dimensions");
    }
  }
}

RealPlane StftPlanes::magnitude(std::size_t index) const { return plane(index).abs(); }

Plane<std::uint8_t> StftPlanes::quadrants(std::size_t index) const {
  return plane(index).unaryExpr([](std::complex<double> z) { return static_cast<std::uint8_t>(quadrant(z)); });
}

StftPlanes compute_planes(const GrayImage& image, int scale) {
  if (scale < 3 || scale % 2 == 0) throw ParameterError("compute_planes: scale must be odd and >= 3");
  const WindowSpec window = WindowSpec::for_scale(scale);
  const auto freqs = frequency_set(scale);
  std::array<ComplexPlane, 4> planes;
  for (std::size_t i = 0; i < 4; ++i) planes[i] = stft_plane(image.pixels(), window, freqs[i]);
  return StftPlanes(scale, std::move(planes));
}

GrayImage magnitude_image(const StftPlanes& planes, std::size_t index) {
  return minmax_scaled(planes.magnitude(index));
}

GrayImage phase_image(const StftPlanes& planes, std::size_t index) {
  return minmax_scaled(planes.plane(index).arg());
}

}  // namespace elfd
