#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "mfi/error.hpp"

namespace mfi {

/// Floating-point raster, row-major with interleaved channels. Samples are
/// nominally in [0, 1]; conversion to 8-bit happens only at file boundaries.
class Image {
 public:
  Image() = default;
  /// Throws InvalidArgument for non-positive sizes, channels not in {1, 3}
  /// or a non-finite fill value.
  Image(int height, int width, int channels, double fill = 0.0);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(int y, int x, int c = 0) { return data_[index(y, x, c)]; }
  double at(int y, int x, int c = 0) const { return data_[index(y, x, c)]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool same_shape(const Image& other) const {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }

 private:
  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

/// Per-pixel displacement in pixels. dx runs along columns, dy along rows.
struct FlowVector {
  double dx = 0.0;
  double dy = 0.0;
};

class FlowField {
 public:
  FlowField() = default;
  FlowField(int height, int width, FlowVector fill = {});

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return vectors_.size(); }

  FlowVector& at(int y, int x) { return vectors_[static_cast<std::size_t>(y) * width_ + x]; }
  const FlowVector& at(int y, int x) const {
    return vectors_[static_cast<std::size_t>(y) * width_ + x];
  }

  std::span<FlowVector> vectors() { return vectors_; }
  std::span<const FlowVector> vectors() const { return vectors_; }

  bool same_shape(const FlowField& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }
  bool matches(const Image& img) const {
    return height_ == img.height() && width_ == img.width();
  }

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<FlowVector> vectors_;
};

/// Per-pixel blend weight in [0, 1]; weights the frame warped from I0.
class BlendMask {
 public:
  BlendMask() = default;
  /// Throws InvalidArgument if fill is outside [0, 1].
  BlendMask(int height, int width, double fill);

  int height() const { return height_; }
  int width() const { return width_; }

  double at(int y, int x) const { return weights_[static_cast<std::size_t>(y) * width_ + x]; }
  /// Stores the weight clamped to [0, 1]; NaN is rejected.
  void set(int y, int x, double w);

  std::span<const double> weights() const { return weights_; }

  bool matches(const Image& img) const {
    return height_ == img.height() && width_ == img.width();
  }

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> weights_;
};

/// Rational instant strictly between the two reference frames.
class TimeStamp {
 public:
  /// Throws InvalidArgument unless 0 < numerator < denominator.
  TimeStamp(int numerator, int denominator);

  int numerator() const { return numerator_; }
  int denominator() const { return denominator_; }
  double value() const { return static_cast<double>(numerator_) / denominator_; }
  /// The same instant measured from the second reference frame (1 - t).
  TimeStamp complement() const { return TimeStamp(denominator_ - numerator_, denominator_); }

 private:
  int numerator_;
  int denominator_;
};

/// The n evenly spaced stamps i / (n + 1), i = 1..n.
std::vector<TimeStamp> evenly_spaced_stamps(int count);

/// Four consecutive frames at nominal times -1, 0, 1, 2.
class InputQuad {
 public:
  /// Throws DimensionError unless all four frames share a shape.
  InputQuad(Image minus1, Image zero, Image one, Image two);

  const Image& minus1() const { return frames_[0]; }
  const Image& zero() const { return frames_[1]; }
  const Image& one() const { return frames_[2]; }
  const Image& two() const { return frames_[3]; }
  const std::array<Image, 4>& frames() const { return frames_; }

 private:
  std::array<Image, 4> frames_;
};

enum class DownsampleFilter { Gaussian5, Box2 };

Image image_new(int height, int width, int channels, double fill);

FlowField flow_scale(const FlowField& f, double s);

/// Low-pass and decimate by two. Output is ceil(h/2) x ceil(w/2); borders
/// replicate. Throws InvalidArgument when either side is below 2.
Image downsample2(const Image& img, DownsampleFilter filter = DownsampleFilter::Gaussian5);

/// Inverse of one downsample2 step for flows: bilinear resampling to
/// (height, width) with coarse pixel j aligned to fine pixel 2j, and vectors
/// doubled.
FlowField upsample_flow(const FlowField& coarse, int height, int width);

/// Single-channel luminance (Rec. 601 weights) or a copy for gray input.
Image to_gray(const Image& img);

void require_same_shape(const Image& a, const Image& b, const char* what);
void require_same_shape(const FlowField& a, const FlowField& b, const char* what);
void require_matches(const FlowField& f, const Image& img, const char* what);

}  // namespace mfi
