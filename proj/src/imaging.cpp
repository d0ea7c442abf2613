#include "elfd/imaging.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace elfd {

namespace {

void validate_samples(const RealPlane& p) {
  if (p.rows() < 1 || p.cols() < 1) throw ParameterError("GrayImage: empty raster");
  if (!p.isFinite().all()) throw ParameterError("GrayImage: non-finite sample");
  if ((p < 0.0).any() || (p > 1.0).any()) throw ParameterError("GrayImage: sample outside [0,1]");
}

double parse_real(std::string_view text, const char* what) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(std::string("degradation: bad ") + what + " '" + std::string(text) + "'");
  }
  return value;
}

int parse_int(std::string_view text, const char* what) {
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(std::string("degradation: bad ") + what + " '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split_colon(std::string_view s, std::size_t max_parts) {
  std::vector<std::string_view> parts;
  while (parts.size() + 1 < max_parts) {
    const auto pos = s.find(':');
    if (pos == std::string_view::npos) break;
    parts.push_back(s.substr(0, pos));
    s.remove_prefix(pos + 1);
  }
  parts.push_back(s);
  return parts;
}

// PGM header token reader: skips whitespace and '#' comments.
std::string next_header_token(std::istream& in, const char* field) {
  std::string token;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  while (c != EOF && !std::isspace(c) && c != '#') {
    token.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (token.empty()) throw ParseError(std::string("PGM: missing ") + field);
  if (c != EOF) in.unget();
  return token;
}

long header_number(std::istream& in, const char* field) {
  const std::string token = next_header_token(in, field);
  long value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || value < 1) {
    throw ParseError(std::string("PGM: invalid ") + field + " '" + token + "'");
  }
  return value;
}

// Keys cubic convolution weight, a = -0.5.
double cubic_weight(double t) {
  constexpr double a = -0.5;
  t = std::abs(t);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

// Resamples along rows (axis 0) or columns (axis 1).
RealPlane resample_axis(const RealPlane& src, Eigen::Index out_len, int axis) {
  const Eigen::Index in_len = axis == 0 ? src.rows() : src.cols();
  RealPlane out(axis == 0 ? out_len : src.rows(), axis == 0 ? src.cols() : out_len);
  const double scale = static_cast<double>(in_len) / static_cast<double>(out_len);
  for (Eigen::Index o = 0; o < out_len; ++o) {
    const double center = (static_cast<double>(o) + 0.5) * scale - 0.5;
    const auto base = static_cast<Eigen::Index>(std::floor(center));
    double taps[4];
    Eigen::Index idx[4];
    double norm = 0.0;
    for (int t = 0; t < 4; ++t) {
      const Eigen::Index i = base - 1 + t;
      taps[t] = cubic_weight(center - static_cast<double>(i));
      idx[t] = std::clamp<Eigen::Index>(i, 0, in_len - 1);
      norm += taps[t];
    }
    for (int t = 0; t < 4; ++t) taps[t] /= norm;
    if (axis == 0) {
      out.row(o).setZero();
      for (int t = 0; t < 4; ++t) out.row(o) += taps[t] * src.row(idx[t]);
    } else {
      out.col(o).setZero();
      for (int t = 0; t < 4; ++t) out.col(o) += taps[t] * src.col(idx[t]);
    }
  }
  return out;
}

}  // namespace

GrayImage::GrayImage(RealPlane pixels) : pixels_(std::move(pixels)) { validate_samples(pixels_); }

GrayImage::GrayImage(Eigen::Index width, Eigen::Index height, const std::vector<double>& samples) {
  if (width < 1 || height < 1) throw ParameterError("GrayImage: width and height must be >= 1");
  if (static_cast<Eigen::Index>(samples.size()) != width * height) {
    throw ParameterError("GrayImage: sample count does not match width*height");
  }
  pixels_ = Eigen::Map<const Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      samples.data(), height, width);
  validate_samples(pixels_);
}

std::vector<double> GrayImage::samples() const {
  std::vector<double> out(static_cast<std::size_t>(pixels_.size()));
  Eigen::Map<Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      out.data(), pixels_.rows(), pixels_.cols()) = pixels_;
  return out;
}

GrayImage clamped_image(const RealPlane& raw) {
  if (!raw.isFinite().all()) throw ParameterError("clamped_image: non-finite sample");
  return GrayImage(raw.cwiseMax(0.0).cwiseMin(1.0).eval());
}

Kernel::Kernel(RealPlane weights) : weights_(std::move(weights)) {
  if (weights_.rows() < 1 || weights_.cols() < 1) throw ParameterError("Kernel: empty support");
  if (weights_.rows() % 2 == 0 || weights_.cols() % 2 == 0) {
    throw ParameterError("Kernel: width and height must be odd");
  }
  if (!weights_.isFinite().all()) throw ParameterError("Kernel: non-finite weight");
  if ((weights_ < 0.0).any()) throw ParameterError("Kernel: negative weight");
  if (std::abs(weights_.sum() - 1.0) > 1e-9) throw ParameterError("Kernel: weights must sum to 1");
}

DegradationSpec parse_degradation(std::string_view token) {
  const auto head_end = token.find(':');
  const std::string_view head = token.substr(0, head_end);
  if (head == "kernel") {
    if (head_end == std::string_view::npos || head_end + 1 >= token.size()) {
      throw ParseError("degradation: kernel requires a path");
    }
    return CustomKernel{std::filesystem::path(std::string(token.substr(head_end + 1)))};
  }
  const auto parts = split_colon(token, 3);
  if (head == "lowres" && parts.size() == 2) {
    const int f = parse_int(parts[1], "factor");
    if (f < 2) throw ParameterError("degradation: lowres factor must be >= 2");
    return LowRes{f};
  }
  if (head == "gaussian" && parts.size() == 3) {
    const double sigma = parse_real(parts[1], "sigma");
    const int size = parse_int(parts[2], "size");
    if (!(sigma > 0.0) || size < 1 || size % 2 == 0) {
      throw ParameterError("degradation: gaussian needs sigma > 0 and odd size");
    }
    return GaussianBlur{sigma, size};
  }
  if (head == "motion" && parts.size() == 3) {
    const int length = parse_int(parts[1], "length");
    if (length < 1) throw ParameterError("degradation: motion length must be >= 1");
    return MotionBlur{length, parse_real(parts[2], "angle")};
  }
  throw ParseError("degradation: unrecognized token '" + std::string(token) + "'");
}

namespace {
std::string format_real(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}
}  // namespace

std::string degradation_token(const DegradationSpec& spec) {
  struct Visitor {
    std::string operator()(const LowRes& s) const { return "lowres:" + std::to_string(s.factor); }
    std::string operator()(const GaussianBlur& s) const {
      return "gaussian:" + format_real(s.sigma) + ":" + std::to_string(s.size);
    }
    std::string operator()(const MotionBlur& s) const {
      return "motion:" + std::to_string(s.length) + ":" + format_real(s.angle_deg);
    }
    std::string operator()(const CustomKernel& s) const { return "kernel:" + s.source.string(); }
  };
  return std::visit(Visitor{}, spec);
}

std::string degradation_label(const DegradationSpec& spec) {
  struct Visitor {
    std::string operator()(const LowRes& s) const { return "LR" + std::to_string(s.factor); }
    std::string operator()(const GaussianBlur&) const { return "Gaussian"; }
    std::string operator()(const MotionBlur&) const { return "motion"; }
    std::string operator()(const CustomKernel& s) const { return s.source.stem().string(); }
  };
  return std::visit(Visitor{}, spec);
}

GrayImage read_pgm(std::istream& in) {
  const std::string magic = next_header_token(in, "magic");
  if (magic != "P5") throw ParseError("PGM: unsupported magic '" + magic + "' (expected P5)");
  const long width = header_number(in, "width");
  const long height = header_number(in, "height");
  const long maxval = header_number(in, "maxval");
  if (maxval != 255) throw ParseError("PGM: unsupported maxval " + std::to_string(maxval));
  const int sep = in.get();
  if (sep == EOF || !std::isspace(sep)) throw ParseError("PGM: missing whitespace after maxval");
  std::vector<unsigned char> bytes(static_cast<std::size_t>(width * height));
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw ParseError("PGM: truncated data (expected " + std::to_string(bytes.size()) + " bytes, got " +
                     std::to_string(in.gcount()) + ")");
  }
  std::vector<double> samples(bytes.size());
  std::transform(bytes.begin(), bytes.end(), samples.begin(),
                 [](unsigned char b) { return static_cast<double>(b) / 255.0; });
  return GrayImage(width, height, samples);
}

GrayImage load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return read_pgm(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_pgm(const GrayImage& image, std::ostream& out) {
  out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  std::vector<char> bytes;
  bytes.reserve(static_cast<std::size_t>(image.width() * image.height()));
  for (Eigen::Index y = 0; y < image.height(); ++y) {
    for (Eigen::Index x = 0; x < image.width(); ++x) {
      const double q = std::clamp(std::round(image(y, x) * 255.0), 0.0, 255.0);
      bytes.push_back(static_cast<char>(static_cast<unsigned char>(q)));
    }
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void save_pgm(const GrayImage& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_pgm(image, out);
  if (!out) throw IoError("write failed for " + path.string());
}

Kernel gaussian_kernel(double sigma, int size) {
  if (!(sigma > 0.0)) throw ParameterError("gaussian_kernel: sigma must be > 0");
  if (size < 1 || size % 2 == 0) throw ParameterError("gaussian_kernel: size must be odd and >= 1");
  const int half = size / 2;
  RealPlane w(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double dy = y - half;
      const double dx = x - half;
      w(y, x) = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
    }
  }
  return Kernel(w / w.sum());
}

Kernel motion_kernel(int length, double angle_deg) {
  if (length < 1) throw ParameterError("motion_kernel: length must be >= 1");
  const double theta = angle_deg * std::numbers::pi / 180.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  // One tap per step along the dominant axis; image rows grow downward.
  std::vector<std::pair<int, int>> taps;  // (dy, dx)
  const int first = -((length - 1) / 2);
  for (int i = 0; i < length; ++i) {
    const int t = first + i;
    int dx = 0;
    int dy = 0;
    if (std::abs(c) >= std::abs(s)) {
      const int sign = c >= 0.0 ? 1 : -1;
      dx = sign * t;
      dy = static_cast<int>(std::lround(-static_cast<double>(dx) * s / c));
    } else {
      const int sign = s >= 0.0 ? 1 : -1;
      dy = -sign * t;
      dx = static_cast<int>(std::lround(-static_cast<double>(dy) * c / s));
    }
    taps.emplace_back(dy, dx);
  }
  int half = 0;
  for (const auto& [dy, dx] : taps) half = std::max({half, std::abs(dy), std::abs(dx)});
  const int size = 2 * half + 1;
  RealPlane w = RealPlane::Zero(size, size);
  for (const auto& [dy, dx] : taps) w(dy + half, dx + half) += 1.0 / length;
  return Kernel(w / w.sum());
}

Kernel parse_kernel(std::istream& in) {
  long height = 0;
  long width = 0;
  if (!(in >> height >> width)) throw ParseError("kernel: missing 'height width' header");
  if (height < 1 || width < 1) throw ParseError("kernel: non-positive dimensions");
  if (height % 2 == 0 || width % 2 == 0) throw ParseError("kernel: dimensions must be odd");
  RealPlane w(height, width);
  for (long y = 0; y < height; ++y) {
    for (long x = 0; x < width; ++x) {
      if (!(in >> w(y, x))) {
        throw ParseError("kernel: truncated weights at row " + std::to_string(y) + ", col " +
                         std::to_string(x));
      }
      if (!std::isfinite(w(y, x))) throw ParseError("kernel: non-finite weight");
      if (w(y, x) < 0.0) throw ParseError("kernel: negative weight");
    }
  }
  const double total = w.sum();
  if (std::abs(total - 1.0) > 0.01) {
    throw ParseError("kernel: weights sum to " + std::to_string(total) + ", not within 1% of 1");
  }
  return Kernel(w / total);
}

Kernel load_kernel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open kernel file " + path.string());
  try {
    return parse_kernel(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

GrayImage convolve(const GrayImage& image, const Kernel& kernel) {
  return clamped_image(convolve_replicate(image.pixels(), kernel));
}

GrayImage downsample_box(const GrayImage& image, int factor) {
  if (factor < 1) throw ParameterError("downsample_box: factor must be >= 1");
  const Eigen::Index rows = image.height() / factor;
  const Eigen::Index cols = image.width() / factor;
  if (rows < 1 || cols < 1) throw ParameterError("downsample_box: factor exceeds image size");
  RealPlane out(rows, cols);
  const double inv = 1.0 / (static_cast<double>(factor) * factor);
  for (Eigen::Index y = 0; y < rows; ++y) {
    for (Eigen::Index x = 0; x < cols; ++x) {
      out(y, x) = image.pixels().block(y * factor, x * factor, factor, factor).sum() * inv;
    }
  }
  return clamped_image(out);
}

GrayImage resize_bicubic(const GrayImage& image, Eigen::Index width, Eigen::Index height) {
  if (width < 1 || height < 1) throw ParameterError("resize_bicubic: target must be >= 1x1");
  if (width == image.width() && height == image.height()) return image;
  const RealPlane rows_done = resample_axis(image.pixels(), height, 0);
  return clamped_image(resample_axis(rows_done, width, 1));
}

GrayImage center_crop_resize(const GrayImage& image, Eigen::Index width, Eigen::Index height) {
  if (width < 1 || height < 1) throw ParameterError("center_crop_resize: target must be >= 1x1");
  Eigen::Index crop_w = image.width();
  Eigen::Index crop_h = image.height();
  // Compare aspect ratios exactly in integers.
  if (image.width() * height > image.height() * width) {
    crop_w = std::max<Eigen::Index>(1, image.height() * width / height);
  } else {
    crop_h = std::max<Eigen::Index>(1, image.width() * height / width);
  }
  const Eigen::Index x0 = (image.width() - crop_w) / 2;
  const Eigen::Index y0 = (image.height() - crop_h) / 2;
  GrayImage cropped(RealPlane(image.pixels().block(y0, x0, crop_h, crop_w)));
  return resize_bicubic(cropped, width, height);
}

GrayImage degrade(const GrayImage& image, const DegradationSpec& spec) {
  struct Visitor {
    const GrayImage& image;
    GrayImage operator()(const LowRes& s) const {
      if (s.factor < 2) throw ParameterError("degrade: lowres factor must be >= 2");
      return resize_bicubic(downsample_box(image, s.factor), image.width(), image.height());
    }
    GrayImage operator()(const GaussianBlur& s) const {
      return convolve(image, gaussian_kernel(s.sigma, s.size));
    }
    GrayImage operator()(const MotionBlur& s) const {
      return convolve(image, motion_kernel(s.length, s.angle_deg));
    }
    GrayImage operator()(const CustomKernel& s) const { return convolve(image, load_kernel(s.source)); }
  };
  return std::visit(Visitor{image}, spec);
}

}  // namespace elfd
