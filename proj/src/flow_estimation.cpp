#include "mfi/flow_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mfi/warp_synthesis.hpp"

namespace mfi {

namespace {

// Coarser levels are only built while the current one has at least this
// many pixels on its shorter side.
constexpr int kMinPyramidSide = 8;

// Solver images live on the 0-255 scale so the smoothness weight reads in
// 8-bit units.
Image prepare(const Image& img, double sigma) {
  Image g = to_gray(img);
  for (double& v : g.data()) v *= 255.0;
  if (sigma <= 0.0) return g;

  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> taps(2 * radius + 1);
  double total = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    taps[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
    total += taps[k + radius];
  }
  for (double& t : taps) t /= total;

  const int h = g.height();
  const int w = g.width();
  Image tmp(h, w, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) acc += taps[k + radius] * g.at(y, std::clamp(x + k, 0, w - 1));
      tmp.at(y, x) = acc;
    }
  }
  Image out(h, w, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) acc += taps[k + radius] * tmp.at(std::clamp(y + k, 0, h - 1), x);
      out.at(y, x) = acc;
    }
  }
  return out;
}

// Central differences with replicated borders.
void gradients(const Image& img, Image& gx, Image& gy) {
  const int h = img.height();
  const int w = img.width();
  gx = Image(h, w, 1);
  gy = Image(h, w, 1);
  for (int y = 0; y < h; ++y) {
    const int ym = std::max(y - 1, 0);
    const int yp = std::min(y + 1, h - 1);
    for (int x = 0; x < w; ++x) {
      const int xm = std::max(x - 1, 0);
      const int xp = std::min(x + 1, w - 1);
      gx.at(y, x) = 0.5 * (img.at(y, xp) - img.at(y, xm));
      gy.at(y, x) = 0.5 * (img.at(yp, x) - img.at(ym, x));
    }
  }
}

// Horn-Schunck with incremental warping at one scale. The data term is
// linearised around the flow at the start of each warp update; sweeps are
// lexicographic Gauss-Seidel with over-relaxation, so results depend only
// on the inputs.
void solve_scale(const Image& a, const Image& b, FlowField& flow, int sweeps, int warps,
                 double alpha, double omega) {
  const int h = a.height();
  const int w = a.width();
  const double alpha2 = alpha * alpha;
  const std::size_t n = static_cast<std::size_t>(h) * w;

  Image ax, ay, bx, by;
  gradients(a, ax, ay);
  gradients(b, bx, by);

  std::vector<double> gxx(n), gyy(n), gxy(n), cu(n), cv(n);
  for (int warp = 0; warp < warps && sweeps > 0; ++warp) {
    const Image bw = warp_bilinear(b, flow);
    const Image bxw = warp_bilinear(bx, flow);
    const Image byw = warp_bilinear(by, flow);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t k = static_cast<std::size_t>(y) * w + x;
        const double ix = 0.5 * (ax.at(y, x) + bxw.at(y, x));
        const double iy = 0.5 * (ay.at(y, x) + byw.at(y, x));
        const double it = bw.at(y, x) - a.at(y, x);
        const FlowVector& u0 = flow.at(y, x);
        const double sx = x + u0.dx;
        const double sy = y + u0.dy;
        if (sx < 0.0 || sx > w - 1.0 || sy < 0.0 || sy > h - 1.0) {
          // The match left the frame; smoothness alone decides here.
          gxx[k] = gyy[k] = gxy[k] = cu[k] = cv[k] = 0.0;
          continue;
        }
        gxx[k] = ix * ix;
        gyy[k] = iy * iy;
        gxy[k] = ix * iy;
        cu[k] = ix * ix * u0.dx + ix * iy * u0.dy - ix * it;
        cv[k] = ix * iy * u0.dx + iy * iy * u0.dy - iy * it;
      }
    }

    for (int s = 0; s < sweeps; ++s) {
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const std::size_t k = static_cast<std::size_t>(y) * w + x;
          double su = 0.0;
          double sv = 0.0;
          int count = 0;
          auto add = [&](int yy, int xx) {
            const FlowVector& q = flow.at(yy, xx);
            su += q.dx;
            sv += q.dy;
            ++count;
          };
          if (x > 0) add(y, x - 1);
          if (x + 1 < w) add(y, x + 1);
          if (y > 0) add(y - 1, x);
          if (y + 1 < h) add(y + 1, x);
          if (count == 0) continue;
          const double mean_u = su / count;
          const double mean_v = sv / count;
          FlowVector& p = flow.at(y, x);
          const double u_new = (alpha2 * mean_u + cu[k] - gxy[k] * p.dy) / (gxx[k] + alpha2);
          p.dx = (1.0 - omega) * p.dx + omega * u_new;
          const double v_new = (alpha2 * mean_v + cv[k] - gxy[k] * p.dx) / (gyy[k] + alpha2);
          p.dy = (1.0 - omega) * p.dy + omega * v_new;
        }
      }
    }
  }
}

}  // namespace

void FlowSolverConfig::validate() const {
  if (num_scales < 1) throw InvalidArgument("num_scales must be >= 1");
  if (iterations_per_scale < 1) throw InvalidArgument("iterations_per_scale must be >= 1");
  if (!(smoothness_weight > 0.0) || !std::isfinite(smoothness_weight)) {
    throw InvalidArgument("smoothness_weight must be positive");
  }
  if (warp_updates_per_scale < 1) throw InvalidArgument("warp_updates_per_scale must be >= 1");
  if (finest_iterations && *finest_iterations < 0) {
    throw InvalidArgument("finest_iterations must be >= 0");
  }
  if (!(relaxation > 0.0 && relaxation < 2.0)) throw InvalidArgument("relaxation must be in (0, 2)");
  if (!(presmoothing_sigma >= 0.0) || !std::isfinite(presmoothing_sigma)) {
    throw InvalidArgument("presmoothing_sigma must be >= 0");
  }
}

FlowField estimate_pair_flow(const Image& a, const Image& b, const std::optional<FlowField>& init,
                             const FlowSolverConfig& cfg) {
  cfg.validate();
  require_same_shape(a, b, "estimate_pair_flow");
  if (init) require_matches(*init, a, "estimate_pair_flow init");

  const int finest_sweeps = cfg.finest_iterations.value_or(cfg.iterations_per_scale);
  const Image ga = prepare(a, cfg.presmoothing_sigma);
  const Image gb = prepare(b, cfg.presmoothing_sigma);

  if (init) {
    FlowField flow = *init;
    solve_scale(ga, gb, flow, finest_sweeps, cfg.warp_updates_per_scale, cfg.smoothness_weight,
                cfg.relaxation);
    return flow;
  }

  std::vector<Image> pa{ga};
  std::vector<Image> pb{gb};
  while (static_cast<int>(pa.size()) < cfg.num_scales &&
         std::min(pa.back().height(), pa.back().width()) >= kMinPyramidSide) {
    pa.push_back(downsample2(pa.back()));
    pb.push_back(downsample2(pb.back()));
  }

  FlowField flow(pa.back().height(), pa.back().width());
  for (int level = static_cast<int>(pa.size()) - 1; level >= 0; --level) {
    if (flow.height() != pa[level].height() || flow.width() != pa[level].width()) {
      flow = upsample_flow(flow, pa[level].height(), pa[level].width());
    }
    const int sweeps = level == 0 ? finest_sweeps : cfg.iterations_per_scale;
    solve_scale(pa[level], pb[level], flow, sweeps, cfg.warp_updates_per_scale,
                cfg.smoothness_weight, cfg.relaxation);
  }
  return flow;
}

FlowBundle estimate_bundle(const InputQuad& quad, const FlowSolverConfig& cfg) {
  FlowBundle bundle;
  bundle.f0_to_m1 = estimate_pair_flow(quad.zero(), quad.minus1(), std::nullopt, cfg);
  bundle.f1_to_2 = estimate_pair_flow(quad.one(), quad.two(), std::nullopt, cfg);
  bundle.f0_to_2 = estimate_pair_flow(quad.zero(), quad.two(), std::nullopt, cfg);
  bundle.f1_to_m1 = estimate_pair_flow(quad.one(), quad.minus1(), std::nullopt, cfg);
  bundle.f0_to_1 =
      estimate_pair_flow(quad.zero(), quad.one(), flow_scale(bundle.f0_to_m1, -1.0), cfg);
  bundle.f1_to_0 =
      estimate_pair_flow(quad.one(), quad.zero(), flow_scale(bundle.f1_to_2, -1.0), cfg);
  return bundle;
}

}  // namespace mfi
