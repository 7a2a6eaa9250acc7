#include "doctest.h"
#include "oracles.hpp"

#include "mfi/error.hpp"
#include "mfi/image.hpp"

using namespace mfi;

TEST_CASE("image_new fills every sample") {
  Image a = image_new(2, 2, 1, 0.0);
  CHECK(a.size() == 4);
  for (double v : a.data()) CHECK(v == 0.0);

  Image b = image_new(1, 3, 3, 1.0);
  CHECK(b.size() == 9);
  for (double v : b.data()) CHECK(v == 1.0);

  CHECK_THROWS_AS(image_new(0, 5, 1, 0.0), DimensionError);
  CHECK_THROWS_AS(image_new(2, 2, 2, 0.0), InvalidArgument);
  CHECK_THROWS_AS(image_new(2, 2, 1, NAN), InvalidArgument);
}

TEST_CASE("image indexing is row-major with interleaved channels") {
  Image img(2, 3, 3);
  img.at(1, 2, 1) = 0.25;
  CHECK(img.data()[(1 * 3 + 2) * 3 + 1] == 0.25);
}

TEST_CASE("flow_scale") {
  const FlowField f = oracle::constant_flow(3, 4, 2.0, 0.0);
  const FlowField half = flow_scale(f, 0.5);
  for (const auto& v : half.vectors()) {
    CHECK(v.dx == 1.0);
    CHECK(v.dy == 0.0);
  }

  FlowField g(5, 6);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.vectors()[i] = {std::sin(1.3 * i) * 3.0, std::cos(0.7 * i) * 2.0};
  }
  const FlowField zeroed = flow_scale(g, 0.0);
  for (const auto& v : zeroed.vectors()) {
    CHECK(v.dx == 0.0);
    CHECK(v.dy == 0.0);
  }
  CHECK(oracle::identical(flow_scale(g, 1.0), g));

  const FlowField ab = flow_scale(flow_scale(g, 0.3), -2.5);
  const FlowField direct = flow_scale(g, 0.3 * -2.5);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double tol = 2.0 * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, std::abs(direct.vectors()[i].dx));
    CHECK(std::abs(ab.vectors()[i].dx - direct.vectors()[i].dx) <= tol);
    CHECK(std::abs(ab.vectors()[i].dy - direct.vectors()[i].dy) <= tol * 2);
  }
  CHECK_THROWS_AS(flow_scale(g, INFINITY), InvalidArgument);
}

TEST_CASE("downsample2 keeps constants and averages boxes") {
  const Image c(4, 4, 1, 0.3);
  for (auto filter : {DownsampleFilter::Gaussian5, DownsampleFilter::Box2}) {
    const Image d = downsample2(c, filter);
    CHECK(d.height() == 2);
    CHECK(d.width() == 2);
    for (double v : d.data()) CHECK(v == doctest::Approx(0.3).epsilon(1e-15));
  }

  Image checker(2, 2, 1);
  checker.at(0, 1) = 1.0;
  checker.at(1, 0) = 1.0;
  const Image box = downsample2(checker, DownsampleFilter::Box2);
  CHECK(box.height() == 1);
  CHECK(box.width() == 1);
  CHECK(box.at(0, 0) == 0.5);

  CHECK_THROWS_AS(downsample2(Image(1, 4, 1)), InvalidArgument);
}

TEST_CASE("downsample2 sizes odd dimensions by ceiling") {
  const Image img = oracle::noise_image(7, 5, 3, 4);
  const Image d = downsample2(img);
  CHECK(d.height() == 4);
  CHECK(d.width() == 3);
  CHECK(d.channels() == 3);
}

TEST_CASE("upsample_flow doubles vectors") {
  const FlowField coarse = oracle::constant_flow(4, 4, 1.5, -0.5);
  const FlowField fine = upsample_flow(coarse, 8, 7);
  CHECK(fine.height() == 8);
  CHECK(fine.width() == 7);
  for (const auto& v : fine.vectors()) {
    CHECK(v.dx == 3.0);
    CHECK(v.dy == -1.0);
  }
}

TEST_CASE("blend masks reject weights outside the unit interval") {
  CHECK_THROWS_AS(BlendMask(2, 2, 1.5), InvalidArgument);
  BlendMask m(2, 2, 0.5);
  m.set(0, 0, 2.0);
  CHECK(m.at(0, 0) == 1.0);
  CHECK_THROWS_AS(m.set(0, 1, NAN), InvalidArgument);
}

TEST_CASE("time stamps are exact rationals") {
  const auto stamps = evenly_spaced_stamps(7);
  REQUIRE(stamps.size() == 7);
  for (int i = 1; i <= 7; ++i) {
    CHECK(stamps[i - 1].value() == i / 8.0);
    CHECK(stamps[i - 1].complement().value() == (8 - i) / 8.0);
  }
  CHECK_THROWS_AS(TimeStamp(0, 8), InvalidArgument);
  CHECK_THROWS_AS(TimeStamp(8, 8), InvalidArgument);
}

TEST_CASE("input quads require one shape") {
  const Image a(4, 4, 1);
  CHECK_NOTHROW(InputQuad(a, a, a, a));
  CHECK_THROWS_AS(InputQuad(a, a, Image(4, 5, 1), a), DimensionError);
  CHECK_THROWS_AS(InputQuad(a, a, a, Image(4, 4, 3)), DimensionError);
}

TEST_CASE("to_gray uses luminance weights") {
  Image rgb(1, 1, 3);
  rgb.at(0, 0, 0) = 1.0;
  CHECK(to_gray(rgb).at(0, 0) == doctest::Approx(0.299));
  const Image g = oracle::noise_image(3, 3, 1, 2);
  CHECK(oracle::identical(to_gray(g), g));
}
