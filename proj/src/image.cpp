#include "mfi/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mfi {

namespace {

std::string shape_of(int h, int w, int c) {
  return std::to_string(h) + "x" + std::to_string(w) + "x" + std::to_string(c);
}

void check_dims(int height, int width) {
  if (height <= 0 || width <= 0) {
    throw DimensionError("invalid dimension " + std::to_string(height) + "x" +
                          std::to_string(width));
  }
}

}  // namespace

Image::Image(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
  check_dims(height, width);
  if (channels != 1 && channels != 3) {
    throw InvalidArgument("unsupported channel count " + std::to_string(channels));
  }
  if (!std::isfinite(fill)) throw InvalidArgument("non-finite fill value");
  data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

FlowField::FlowField(int height, int width, FlowVector fill) : height_(height), width_(width) {
  check_dims(height, width);
  if (!std::isfinite(fill.dx) || !std::isfinite(fill.dy)) {
    throw InvalidArgument("non-finite flow fill");
  }
  vectors_.assign(static_cast<std::size_t>(height) * width, fill);
}

BlendMask::BlendMask(int height, int width, double fill) : height_(height), width_(width) {
  check_dims(height, width);
  if (!(fill >= 0.0 && fill <= 1.0)) throw InvalidArgument("blend weight outside [0, 1]");
  weights_.assign(static_cast<std::size_t>(height) * width, fill);
}

void BlendMask::set(int y, int x, double w) {
  if (std::isnan(w)) throw InvalidArgument("NaN blend weight");
  weights_[static_cast<std::size_t>(y) * width_ + x] = std::clamp(w, 0.0, 1.0);
}

TimeStamp::TimeStamp(int numerator, int denominator)
    : numerator_(numerator), denominator_(denominator) {
  if (!(numerator > 0 && numerator < denominator)) {
    throw InvalidArgument("time stamp " + std::to_string(numerator) + "/" +
                          std::to_string(denominator) + " is not strictly inside (0, 1)");
  }
}

std::vector<TimeStamp> evenly_spaced_stamps(int count) {
  if (count < 1) throw InvalidArgument("need at least one time stamp");
  std::vector<TimeStamp> stamps;
  stamps.reserve(count);
  for (int i = 1; i <= count; ++i) stamps.emplace_back(i, count + 1);
  return stamps;
}

InputQuad::InputQuad(Image minus1, Image zero, Image one, Image two)
    : frames_{std::move(minus1), std::move(zero), std::move(one), std::move(two)} {
  for (const auto& f : frames_) {
    if (f.empty()) throw DimensionError("input quad contains an empty frame");
    if (!f.same_shape(frames_[0])) {
      throw DimensionError("input quad frames differ in shape: " +
                           shape_of(frames_[0].height(), frames_[0].width(),
                                    frames_[0].channels()) +
                           " vs " + shape_of(f.height(), f.width(), f.channels()));
    }
  }
}

Image image_new(int height, int width, int channels, double fill) {
  return Image(height, width, channels, fill);
}

FlowField flow_scale(const FlowField& f, double s) {
  if (!std::isfinite(s)) throw InvalidArgument("non-finite flow scale");
  FlowField out = f;
  for (auto& v : out.vectors()) {
    v.dx *= s;
    v.dy *= s;
  }
  return out;
}

Image downsample2(const Image& img, DownsampleFilter filter) {
  if (img.height() < 2 || img.width() < 2) {
    throw InvalidArgument("image too small to downsample: " +
                          shape_of(img.height(), img.width(), img.channels()));
  }
  const int h = img.height();
  const int w = img.width();
  const int c = img.channels();
  const int oh = (h + 1) / 2;
  const int ow = (w + 1) / 2;
  auto clampi = [](int v, int hi) { return std::clamp(v, 0, hi - 1); };

  if (filter == DownsampleFilter::Box2) {
    Image out(oh, ow, c);
    for (int y = 0; y < oh; ++y) {
      const int y0 = 2 * y;
      const int y1 = clampi(2 * y + 1, h);
      for (int x = 0; x < ow; ++x) {
        const int x0 = 2 * x;
        const int x1 = clampi(2 * x + 1, w);
        for (int k = 0; k < c; ++k) {
          out.at(y, x, k) =
              0.25 * (img.at(y0, x0, k) + img.at(y0, x1, k) + img.at(y1, x0, k) + img.at(y1, x1, k));
        }
      }
    }
    return out;
  }

  // Separable [1 4 6 4 1] / 16, evaluated only at the kept samples.
  static constexpr double kTaps[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  Image rows(h, ow, c);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      for (int k = 0; k < c; ++k) {
        double acc = 0.0;
        for (int t = -2; t <= 2; ++t) acc += kTaps[t + 2] * img.at(y, clampi(2 * x + t, w), k);
        rows.at(y, x, k) = acc;
      }
    }
  }
  Image out(oh, ow, c);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      for (int k = 0; k < c; ++k) {
        double acc = 0.0;
        for (int t = -2; t <= 2; ++t) acc += kTaps[t + 2] * rows.at(clampi(2 * y + t, h), x, k);
        out.at(y, x, k) = acc;
      }
    }
  }
  return out;
}

FlowField upsample_flow(const FlowField& coarse, int height, int width) {
  FlowField out(height, width);
  const int ch = coarse.height();
  const int cw = coarse.width();
  for (int y = 0; y < height; ++y) {
    const double cy = std::min(0.5 * y, static_cast<double>(ch - 1));
    const int y0 = static_cast<int>(cy);
    const int y1 = std::min(y0 + 1, ch - 1);
    const double fy = cy - y0;
    for (int x = 0; x < width; ++x) {
      const double cx = std::min(0.5 * x, static_cast<double>(cw - 1));
      const int x0 = static_cast<int>(cx);
      const int x1 = std::min(x0 + 1, cw - 1);
      const double fx = cx - x0;
      const FlowVector& a = coarse.at(y0, x0);
      const FlowVector& b = coarse.at(y0, x1);
      const FlowVector& d = coarse.at(y1, x0);
      const FlowVector& e = coarse.at(y1, x1);
      const double dx = (1 - fy) * ((1 - fx) * a.dx + fx * b.dx) + fy * ((1 - fx) * d.dx + fx * e.dx);
      const double dy = (1 - fy) * ((1 - fx) * a.dy + fx * b.dy) + fy * ((1 - fx) * d.dy + fx * e.dy);
      out.at(y, x) = {2.0 * dx, 2.0 * dy};
    }
  }
  return out;
}

Image to_gray(const Image& img) {
  if (img.channels() == 1) return img;
  Image out(img.height(), img.width(), 1);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out.at(y, x) = 0.299 * img.at(y, x, 0) + 0.587 * img.at(y, x, 1) + 0.114 * img.at(y, x, 2);
    }
  }
  return out;
}

void require_same_shape(const Image& a, const Image& b, const char* what) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(what) + ": image shapes differ (" +
                         shape_of(a.height(), a.width(), a.channels()) + " vs " +
                         shape_of(b.height(), b.width(), b.channels()) + ")");
  }
}

void require_same_shape(const FlowField& a, const FlowField& b, const char* what) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(what) + ": flow shapes differ (" + std::to_string(a.height()) +
                         "x" + std::to_string(a.width()) + " vs " + std::to_string(b.height()) +
                         "x" + std::to_string(b.width()) + ")");
  }
}

void require_matches(const FlowField& f, const Image& img, const char* what) {
  if (!f.matches(img)) {
    throw DimensionError(std::string(what) + ": flow " + std::to_string(f.height()) + "x" +
                         std::to_string(f.width()) + " does not match image " +
                         std::to_string(img.height()) + "x" + std::to_string(img.width()));
  }
}

}  // namespace mfi
