#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "elfd/imaging.hpp"
#include "oracles.hpp"

using namespace elfd;

namespace {

std::string p5(int w, int h, std::initializer_list<unsigned char> bytes) {
  std::string s = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  for (unsigned char b : bytes) s.push_back(static_cast<char>(b));
  return s;
}

GrayImage random_gray(std::mt19937_64& rng, long rows, long cols) { return GrayImage(oracle::random_image(rng, rows, cols)); }

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("elfd_test_imaging_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("GrayImage rejects invalid rasters") {
  CHECK_THROWS_AS(GrayImage(0, 1, {}), ParameterError);
  CHECK_THROWS_AS(GrayImage(1, 1, {1.5}), ParameterError);
  CHECK_THROWS_AS(GrayImage(1, 1, {std::nan("")}), ParameterError);
  CHECK_THROWS_AS(GrayImage(2, 1, {0.1}), ParameterError);
  const GrayImage img(3, 2, {0, 0.1, 0.2, 0.3, 0.4, 0.5});
  CHECK(img.width() == 3);
  CHECK(img.height() == 2);
  CHECK(img(1, 0) == doctest::Approx(0.3));
  CHECK(img.samples() == std::vector<double>{0, 0.1, 0.2, 0.3, 0.4, 0.5});
}

TEST_CASE("load_pgm scales bytes") {
  std::istringstream in(p5(2, 2, {0, 255, 128, 64}));
  const GrayImage img = read_pgm(in);
  CHECK(img.samples() == std::vector<double>{0.0, 1.0, 128.0 / 255.0, 64.0 / 255.0});

  std::istringstream one(p5(1, 1, {255}));
  CHECK(read_pgm(one).samples() == std::vector<double>{1.0});
}

TEST_CASE("load_pgm accepts comments and names the bad field") {
  std::istringstream commented("P5\n# made by hand\n1 1\n255\n\x07");
  CHECK(read_pgm(commented).samples()[0] == doctest::Approx(7.0 / 255.0));

  auto message = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_pgm(in);
    } catch (const ParseError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("P2\n1 1\n255\n0").find("magic") != std::string::npos);
  CHECK(message("P5\nx 1\n255\n0").find("width") != std::string::npos);
  CHECK(message("P5\n1 0\n255\n0").find("height") != std::string::npos);
  CHECK(message("P5\n1 1\n65535\n00").find("maxval") != std::string::npos);
  CHECK(message("P5\n2 2\n255\n\x01\x02").find("truncated") != std::string::npos);
}

TEST_CASE("save_pgm quantizes by rounding") {
  std::ostringstream out;
  write_pgm(GrayImage(2, 1, {0.5, 0.0}), out);
  const std::string s = out.str();
  CHECK(s.substr(0, 11) == "P5\n2 1\n255\n");
  CHECK(static_cast<unsigned char>(s[11]) == 128);
  CHECK(static_cast<unsigned char>(s[12]) == 0);
}

TEST_CASE("PGM round trip") {
  std::mt19937_64 rng(11);
  const auto dir = temp_dir("roundtrip");

  // Byte-exact: file -> image -> file.
  std::string bytes = "P5\n16 16\n255\n";
  std::uniform_int_distribution<int> byte(0, 255);
  for (int i = 0; i < 256; ++i) bytes.push_back(static_cast<char>(byte(rng)));
  {
    std::ofstream f(dir / "a.pgm", std::ios::binary);
    f << bytes;
  }
  save_pgm(load_pgm(dir / "a.pgm"), dir / "b.pgm");
  std::ifstream f(dir / "b.pgm", std::ios::binary);
  const std::string reread((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  CHECK(reread == bytes);

  // Image -> file -> image within half a quantization step.
  const GrayImage img = random_gray(rng, 8, 8);
  save_pgm(img, dir / "c.pgm");
  const GrayImage back = load_pgm(dir / "c.pgm");
  CHECK((back.pixels() - img.pixels()).abs().maxCoeff() <= 1.0 / 510.0 + 1e-15);

  CHECK_THROWS_AS(load_pgm(dir / "missing.pgm"), IoError);
}

TEST_CASE("gaussian_kernel") {
  CHECK(gaussian_kernel(1.0, 1).weights()(0, 0) == 1.0);
  const Kernel flat = gaussian_kernel(1e9, 3);
  CHECK(((flat.weights() - 1.0 / 9.0).abs() < 1e-9).all());

  const Kernel k = gaussian_kernel(3.0, 7);
  CHECK(k.weights().sum() == doctest::Approx(1.0).epsilon(1e-12));
  double z = 0.0;
  for (int y = -3; y <= 3; ++y) {
    for (int x = -3; x <= 3; ++x) z += std::exp(-(x * x + y * y) / 18.0);
  }
  CHECK(std::abs(k.weights()(3, 3) - 1.0 / z) < 1e-15);
  CHECK(std::abs(k.weights()(0, 6) - std::exp(-18.0 / 18.0) / z) < 1e-15);

  CHECK_THROWS_AS(gaussian_kernel(1.0, 4), ParameterError);
  CHECK_THROWS_AS(gaussian_kernel(0.0, 3), ParameterError);
  CHECK_THROWS_AS(gaussian_kernel(1.0, -1), ParameterError);
}

TEST_CASE("motion_kernel rasterization") {
  for (double angle : {0.0, 30.0, 45.0, 90.0, 133.0}) {
    const Kernel k = motion_kernel(1, angle);
    CHECK(k.width() == 1);
    CHECK(k.weights()(0, 0) == 1.0);
  }

  const Kernel row = motion_kernel(3, 0.0);
  REQUIRE(row.width() == 3);
  REQUIRE(row.height() == 3);
  RealPlane expect_row = RealPlane::Zero(3, 3);
  expect_row.row(1).setConstant(1.0 / 3.0);
  CHECK(((row.weights() - expect_row).abs() < 1e-15).all());

  // 45 degrees in image coordinates (rows grow downward) runs bottom-left to top-right.
  const Kernel diag = motion_kernel(7, 45.0);
  REQUIRE(diag.width() == 7);
  REQUIRE(diag.height() == 7);
  for (int y = 0; y < 7; ++y) {
    for (int x = 0; x < 7; ++x) {
      const double expected = (x + y == 6) ? 1.0 / 7.0 : 0.0;
      CHECK(std::abs(diag.weights()(y, x) - expected) < 1e-15);
    }
  }

  const Kernel vertical = motion_kernel(5, 90.0);
  CHECK(vertical.weights().col(2).sum() == doctest::Approx(1.0));
  for (int angle = 0; angle < 360; angle += 17) {
    const Kernel k = motion_kernel(6, angle);
    CHECK((k.weights() > 0).count() == 6);
    CHECK(std::abs(k.weights().sum() - 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(motion_kernel(0, 0.0), ParameterError);
}

TEST_CASE("kernel file parsing") {
  std::istringstream ok("3 1\n0.25\n0.5\n0.25\n");
  const Kernel k = parse_kernel(ok);
  CHECK(k.height() == 3);
  CHECK(k.width() == 1);

  std::istringstream near("1 3\n0.3 0.3 0.395\n");
  CHECK(parse_kernel(near).weights().sum() == doctest::Approx(1.0).epsilon(1e-12));

  std::istringstream far("1 3\n0.3 0.3 0.3\n");
  CHECK_THROWS_AS(parse_kernel(far), ParseError);
  std::istringstream negative("1 3\n-0.1 0.6 0.5\n");
  CHECK_THROWS_AS(parse_kernel(negative), ParseError);
  std::istringstream even("2 1\n0.5\n0.5\n");
  CHECK_THROWS_AS(parse_kernel(even), ParseError);
  std::istringstream truncated("3 3\n0.1 0.1\n");
  CHECK_THROWS_AS(parse_kernel(truncated), ParseError);
}

TEST_CASE("convolve") {
  std::mt19937_64 rng(3);
  const GrayImage img = random_gray(rng, 8, 8);
  CHECK(convolve(img, Kernel(RealPlane::Ones(1, 1))) == img);

  const GrayImage flat(RealPlane::Constant(9, 7, 0.37));
  const GrayImage blurred = convolve(flat, gaussian_kernel(2.0, 5));
  CHECK(((blurred.pixels() - 0.37).abs() < 1e-12).all());

  // Random normalized 3x3 kernel against the double-loop oracle.
  RealPlane w = oracle::random_image(rng, 3, 3);
  w /= w.sum();
  const Kernel k(w);
  const RealPlane fast = convolve_replicate(img.pixels(), k);
  const RealPlane slow = oracle::convolve(img.pixels(), w);
  CHECK((fast - slow).abs().maxCoeff() < 1e-12);
  CHECK((convolve(img, k).pixels() - slow.cwiseMax(0.0).cwiseMin(1.0)).abs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(convolve(GrayImage(RealPlane::Zero(2, 2)), gaussian_kernel(1.0, 5)), ParameterError);
}

TEST_CASE("convolution is linear before clamping") {
  std::mt19937_64 rng(5);
  const RealPlane a = oracle::random_image(rng, 16, 16);
  const RealPlane b = oracle::random_image(rng, 16, 16);
  const Kernel k = motion_kernel(7, 45.0);
  const RealPlane lhs = convolve_replicate((0.3 * a + 1.7 * b).eval(), k);
  const RealPlane rhs = 0.3 * convolve_replicate(a, k) + 1.7 * convolve_replicate(b, k);
  CHECK((lhs - rhs).block(3, 3, 10, 10).abs().maxCoeff() < 1e-10);
}

TEST_CASE("convolution preserves interior mass") {
  std::mt19937_64 rng(6);
  // A random patch surrounded by a constant frame wider than the kernel radius.
  RealPlane img = RealPlane::Constant(32, 32, 0.5);
  img.block(10, 10, 12, 12) = oracle::random_image(rng, 12, 12);
  const Kernel k = gaussian_kernel(1.5, 5);
  const RealPlane out = convolve_replicate(img, k);
  CHECK(out.block(4, 4, 24, 24).mean() == doctest::Approx(img.block(4, 4, 24, 24).mean()).epsilon(1e-12));
}

TEST_CASE("downsample and bicubic resize") {
  const GrayImage flat(RealPlane::Constant(4, 4, 0.25));
  CHECK(((degrade(flat, LowRes{2}).pixels() - 0.25).abs() < 1e-12).all());

  RealPlane ramp(4, 6);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 6; ++x) ramp(y, x) = (y * 6 + x) / 30.0;
  }
  const GrayImage small = downsample_box(GrayImage(ramp), 2);
  CHECK(small.width() == 3);
  CHECK(small.height() == 2);
  CHECK(small(0, 0) == doctest::Approx((0 + 1 + 6 + 7) / 120.0));

  // Remainders are truncated.
  CHECK(downsample_box(GrayImage(RealPlane::Zero(7, 9)), 4).width() == 2);
  CHECK(downsample_box(GrayImage(RealPlane::Zero(7, 9)), 4).height() == 1);

  const GrayImage up = resize_bicubic(small, 6, 4);
  CHECK(up.width() == 6);
  CHECK(up.height() == 4);

  std::mt19937_64 rng(8);
  const GrayImage img = random_gray(rng, 30, 30);
  const GrayImage lr = degrade(img, LowRes{4});
  CHECK(lr.width() == 30);
  CHECK(lr.height() == 30);

  const GrayImage cropped = center_crop_resize(random_gray(rng, 40, 60), 32, 32);
  CHECK(cropped.width() == 32);
  CHECK(cropped.height() == 32);
}

TEST_CASE("degrade composes the generators") {
  std::mt19937_64 rng(9);
  const GrayImage img = random_gray(rng, 32, 32);
  CHECK(degrade(img, GaussianBlur{3.0, 1}) == img);
  CHECK(degrade(img, GaussianBlur{3.0, 7}) == convolve(img, gaussian_kernel(3.0, 7)));
  CHECK(degrade(img, MotionBlur{7, 45.0}) == convolve(img, motion_kernel(7, 45.0)));
  CHECK(degrade(img, LowRes{2}) == degrade(img, LowRes{2}));

  const auto dir = temp_dir("kernel");
  {
    std::ofstream f(dir / "k.txt");
    f << "3 3\n0 0 0\n0.5 0 0\n0 0 0.5\n";
  }
  const CustomKernel custom{dir / "k.txt"};
  CHECK(degrade(img, custom) == convolve(img, load_kernel(custom.source)));
  CHECK_THROWS(degrade(img, CustomKernel{dir / "nope.txt"}));
}

TEST_CASE("degradation tokens") {
  CHECK(degradation_label(parse_degradation("lowres:2")) == "LR2");
  CHECK(degradation_label(parse_degradation("gaussian:3:7")) == "Gaussian");
  CHECK(degradation_label(parse_degradation("motion:7:45")) == "motion");
  CHECK(degradation_label(parse_degradation("kernel:/data/kernel3.txt")) == "kernel3");
  for (const char* t : {"lowres:4", "gaussian:3:7", "motion:7:45", "kernel:a/b.txt"}) {
    CHECK(degradation_token(parse_degradation(t)) == t);
  }
  CHECK_THROWS_AS(parse_degradation("lowres:1"), ParameterError);
  CHECK_THROWS_AS(parse_degradation("gaussian:3:6"), ParameterError);
  CHECK_THROWS_AS(parse_degradation("blur:3"), ParseError);
  CHECK_THROWS_AS(parse_degradation("motion:x:45"), ParseError);
}
