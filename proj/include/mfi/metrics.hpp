#pragma once

#include <optional>
#include <vector>

#include "mfi/image.hpp"

namespace mfi {

/// Peak signal-to-noise ratio in dB with peak 1.0. Identical images give
/// +infinity.
double psnr(const Image& a, const Image& b);

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;

/// Mean SSIM over all fully contained 11x11 Gaussian windows (sigma 1.5,
/// K1 0.01, K2 0.03, dynamic range 1), averaged over channels.
/// Throws InvalidArgument when the image is smaller than the window.
double ssim(const Image& a, const Image& b);

/// Root-mean-square difference on the 0-255 scale.
double interpolation_error(const Image& a, const Image& b);

/// Temporal change consistency: mean SSIM between |f_i - f_{i+1}| and
/// |g_i - g_{i+1}| over adjacent pairs.
double tcc(const std::vector<Image>& generated, const std::vector<Image>& truth);

struct RelaxedLoss {
  double sum = 0.0;
  double mean = 0.0;
};

/// Sum over pixels of the smallest channel-L1 distance between warped(y, x)
/// and target(y + m, x + n), |m|, |n| <= radius, with clamped indices.
RelaxedLoss relaxed_warp_loss(const Image& warped, const Image& target, int radius);

/// Plain per-pixel channel-L1 warping loss.
RelaxedLoss l1_warp_loss(const Image& warped, const Image& target);

/// Mean Euclidean norm of the per-pixel vector difference.
double endpoint_error(const FlowField& f, const FlowField& g);

struct FrameMetrics {
  double psnr = 0.0;
  double ssim = 0.0;
  double ie = 0.0;
};

struct MetricsReport {
  std::vector<FrameMetrics> frames;
  FrameMetrics mean;
  std::optional<double> tcc;
  std::optional<double> relaxed_loss;
  std::optional<double> epe;
};

/// Per-frame PSNR/SSIM/IE plus TCC when there are at least two frames.
MetricsReport evaluate_sequence(const std::vector<Image>& generated,
                                const std::vector<Image>& truth);

}  // namespace mfi
