#include "mfi/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mfi {

namespace {

std::vector<double> gaussian_taps() {
  std::vector<double> taps(kSsimWindow);
  const int r = kSsimWindow / 2;
  double total = 0.0;
  for (int k = -r; k <= r; ++k) {
    taps[k + r] = std::exp(-0.5 * k * k / (kSsimSigma * kSsimSigma));
    total += taps[k + r];
  }
  for (double& t : taps) t /= total;
  return taps;
}

// Weighted window sums of one channel, valid region only.
std::vector<double> filter_valid(const std::vector<double>& plane, int h, int w,
                                 const std::vector<double>& taps) {
  const int n = static_cast<int>(taps.size());
  const int oh = h - n + 1;
  const int ow = w - n + 1;
  std::vector<double> rows(static_cast<std::size_t>(h) * ow);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += taps[k] * plane[static_cast<std::size_t>(y) * w + x + k];
      rows[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += taps[k] * rows[static_cast<std::size_t>(y + k) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  return out;
}

double channel_l1(const Image& a, int ay, int ax, const Image& b, int by, int bx) {
  double d = 0.0;
  for (int c = 0; c < a.channels(); ++c) d += std::abs(a.at(ay, ax, c) - b.at(by, bx, c));
  return d;
}

}  // namespace

double psnr(const Image& a, const Image& b) {
  require_same_shape(a, b, "psnr");
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a.data()[k] - b.data()[k];
    acc += d * d;
  }
  const double mse = acc / static_cast<double>(a.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Image& a, const Image& b) {
  require_same_shape(a, b, "ssim");
  if (a.height() < kSsimWindow || a.width() < kSsimWindow) {
    throw InvalidArgument("ssim needs images of at least " + std::to_string(kSsimWindow) + "x" +
                          std::to_string(kSsimWindow));
  }
  static const std::vector<double> taps = gaussian_taps();
  constexpr double c1 = (kSsimK1 * 1.0) * (kSsimK1 * 1.0);
  constexpr double c2 = (kSsimK2 * 1.0) * (kSsimK2 * 1.0);
  const int h = a.height();
  const int w = a.width();
  const std::size_t n = static_cast<std::size_t>(h) * w;

  double total = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    std::vector<double> pa(n), pb(n), paa(n), pbb(n), pab(n);
    for (std::size_t k = 0; k < n; ++k) {
      pa[k] = a.data()[k * a.channels() + c];
      pb[k] = b.data()[k * b.channels() + c];
      paa[k] = pa[k] * pa[k];
      pbb[k] = pb[k] * pb[k];
      pab[k] = pa[k] * pb[k];
    }
    const auto mu_a = filter_valid(pa, h, w, taps);
    const auto mu_b = filter_valid(pb, h, w, taps);
    const auto e_aa = filter_valid(paa, h, w, taps);
    const auto e_bb = filter_valid(pbb, h, w, taps);
    const auto e_ab = filter_valid(pab, h, w, taps);
    double acc = 0.0;
    for (std::size_t k = 0; k < mu_a.size(); ++k) {
      const double ma = mu_a[k];
      const double mb = mu_b[k];
      const double va = e_aa[k] - ma * ma;
      const double vb = e_bb[k] - mb * mb;
      const double cov = e_ab[k] - ma * mb;
      acc += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
             ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    total += acc / static_cast<double>(mu_a.size());
  }
  return total / a.channels();
}

double interpolation_error(const Image& a, const Image& b) {
  require_same_shape(a, b, "interpolation_error");
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = 255.0 * a.data()[k] - 255.0 * b.data()[k];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(a.size()));
}

double tcc(const std::vector<Image>& generated, const std::vector<Image>& truth) {
  if (generated.size() != truth.size()) {
    throw DimensionError("tcc: sequences differ in length (" + std::to_string(generated.size()) +
                         " vs " + std::to_string(truth.size()) + ")");
  }
  if (generated.size() < 2) throw DimensionError("tcc needs at least two frames");
  for (std::size_t i = 0; i < generated.size(); ++i) {
    require_same_shape(generated[i], truth[i], "tcc");
    require_same_shape(generated[i], generated[0], "tcc");
  }
  auto change = [](const Image& p, const Image& q) {
    Image d(p.height(), p.width(), p.channels());
    for (std::size_t k = 0; k < p.size(); ++k) d.data()[k] = std::abs(p.data()[k] - q.data()[k]);
    return d;
  };
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < generated.size(); ++i) {
    acc += ssim(change(generated[i], generated[i + 1]), change(truth[i], truth[i + 1]));
  }
  return acc / static_cast<double>(generated.size() - 1);
}

RelaxedLoss relaxed_warp_loss(const Image& warped, const Image& target, int radius) {
  require_same_shape(warped, target, "relaxed_warp_loss");
  if (radius < 0) throw InvalidArgument("relaxed_warp_loss: negative neighbourhood radius");
  const int h = warped.height();
  const int w = warped.width();
  std::vector<double> best(static_cast<std::size_t>(h) * w, std::numeric_limits<double>::infinity());
  for (int m = -radius; m <= radius; ++m) {
    for (int n = -radius; n <= radius; ++n) {
      for (int y = 0; y < h; ++y) {
        const int ty = std::clamp(y + m, 0, h - 1);
        for (int x = 0; x < w; ++x) {
          const int tx = std::clamp(x + n, 0, w - 1);
          double& b = best[static_cast<std::size_t>(y) * w + x];
          b = std::min(b, channel_l1(warped, y, x, target, ty, tx));
        }
      }
    }
  }
  RelaxedLoss loss;
  for (double v : best) loss.sum += v;
  loss.mean = loss.sum / static_cast<double>(best.size());
  return loss;
}

RelaxedLoss l1_warp_loss(const Image& warped, const Image& target) {
  require_same_shape(warped, target, "l1_warp_loss");
  RelaxedLoss loss;
  for (int y = 0; y < warped.height(); ++y) {
    for (int x = 0; x < warped.width(); ++x) loss.sum += channel_l1(warped, y, x, target, y, x);
  }
  loss.mean = loss.sum / (static_cast<double>(warped.height()) * warped.width());
  return loss;
}

double endpoint_error(const FlowField& f, const FlowField& g) {
  require_same_shape(f, g, "endpoint_error");
  double acc = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const FlowVector& a = f.vectors()[k];
    const FlowVector& b = g.vectors()[k];
    acc += std::hypot(a.dx - b.dx, a.dy - b.dy);
  }
  return acc / static_cast<double>(f.size());
}

MetricsReport evaluate_sequence(const std::vector<Image>& generated,
                                const std::vector<Image>& truth) {
  if (generated.size() != truth.size() || generated.empty()) {
    throw DimensionError("evaluate_sequence: sequences must be non-empty and equally long");
  }
  MetricsReport report;
  for (std::size_t i = 0; i < generated.size(); ++i) {
    FrameMetrics m;
    m.psnr = psnr(generated[i], truth[i]);
    m.ssim = ssim(generated[i], truth[i]);
    m.ie = interpolation_error(generated[i], truth[i]);
    report.frames.push_back(m);
    report.mean.psnr += m.psnr;
    report.mean.ssim += m.ssim;
    report.mean.ie += m.ie;
  }
  const double n = static_cast<double>(generated.size());
  report.mean.psnr /= n;
  report.mean.ssim /= n;
  report.mean.ie /= n;
  if (generated.size() >= 2) report.tcc = tcc(generated, truth);
  return report;
}

}  // namespace mfi
