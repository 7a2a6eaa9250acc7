#include "mfi/warp_synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace mfi {

namespace {

struct BilinearTap {
  int x0, x1, y0, y1;
  double fx, fy;
};

BilinearTap tap_at(double px, double py, int width, int height) {
  px = std::clamp(px, 0.0, static_cast<double>(width - 1));
  py = std::clamp(py, 0.0, static_cast<double>(height - 1));
  BilinearTap t;
  t.x0 = static_cast<int>(std::floor(px));
  t.y0 = static_cast<int>(std::floor(py));
  t.x1 = std::min(t.x0 + 1, width - 1);
  t.y1 = std::min(t.y0 + 1, height - 1);
  t.fx = px - t.x0;
  t.fy = py - t.y0;
  return t;
}

template <typename Get>
double interpolate(const BilinearTap& t, Get get) {
  const double top = (1.0 - t.fx) * get(t.y0, t.x0) + t.fx * get(t.y0, t.x1);
  const double bottom = (1.0 - t.fx) * get(t.y1, t.x0) + t.fx * get(t.y1, t.x1);
  return (1.0 - t.fy) * top + t.fy * bottom;
}

FlowVector sample_flow(const FlowField& f, double px, double py) {
  const BilinearTap t = tap_at(px, py, f.width(), f.height());
  return {interpolate(t, [&](int y, int x) { return f.at(y, x).dx; }),
          interpolate(t, [&](int y, int x) { return f.at(y, x).dy; })};
}

double norm(const FlowVector& v) { return std::hypot(v.dx, v.dy); }

// Occlusion flags on the grid of the first flow's source frame.
std::vector<std::uint8_t> occlusion_map(const FlowField& f_ab, const FlowField& f_ba) {
  std::vector<std::uint8_t> occ(f_ab.size(), 0);
  for (int y = 0; y < f_ab.height(); ++y) {
    for (int x = 0; x < f_ab.width(); ++x) {
      const FlowVector& fwd = f_ab.at(y, x);
      const FlowVector bwd = sample_flow(f_ba, x + fwd.dx, y + fwd.dy);
      const double inconsistency = std::hypot(fwd.dx + bwd.dx, fwd.dy + bwd.dy);
      occ[static_cast<std::size_t>(y) * f_ab.width() + x] =
          inconsistency > occlusion_threshold(fwd, bwd) ? 1 : 0;
    }
  }
  return occ;
}

bool lookup(const std::vector<std::uint8_t>& map, int width, int height, double px, double py) {
  const int x = std::clamp(static_cast<int>(std::lround(px)), 0, width - 1);
  const int y = std::clamp(static_cast<int>(std::lround(py)), 0, height - 1);
  return map[static_cast<std::size_t>(y) * width + x] != 0;
}

}  // namespace

Image warp_bilinear(const Image& img, const FlowField& flow) {
  require_matches(flow, img, "warp_bilinear");
  Image out(img.height(), img.width(), img.channels());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const FlowVector& v = flow.at(y, x);
      const BilinearTap t = tap_at(x + v.dx, y + v.dy, img.width(), img.height());
      for (int c = 0; c < img.channels(); ++c) {
        out.at(y, x, c) = interpolate(t, [&](int yy, int xx) { return img.at(yy, xx, c); });
      }
    }
  }
  return out;
}

FlowField warp_flow(const FlowField& field, const FlowField& flow) {
  require_same_shape(field, flow, "warp_flow");
  FlowField out(field.height(), field.width());
  for (int y = 0; y < field.height(); ++y) {
    for (int x = 0; x < field.width(); ++x) {
      const FlowVector& v = flow.at(y, x);
      out.at(y, x) = sample_flow(field, x + v.dx, y + v.dy);
    }
  }
  return out;
}

FlowField invert_flow(const FlowField& forward, int iterations) {
  FlowField s = flow_scale(forward, -1.0);
  for (int it = 0; it < iterations; ++it) {
    FlowField next(forward.height(), forward.width());
    for (int y = 0; y < forward.height(); ++y) {
      for (int x = 0; x < forward.width(); ++x) {
        const FlowVector& cur = s.at(y, x);
        const FlowVector f = sample_flow(forward, x + cur.dx, y + cur.dy);
        next.at(y, x) = {-f.dx, -f.dy};
      }
    }
    s = std::move(next);
  }
  return s;
}

std::vector<double> forward_backward_inconsistency(const FlowField& f_ab, const FlowField& f_ba) {
  require_same_shape(f_ab, f_ba, "forward_backward_inconsistency");
  std::vector<double> out(f_ab.size());
  for (int y = 0; y < f_ab.height(); ++y) {
    for (int x = 0; x < f_ab.width(); ++x) {
      const FlowVector& fwd = f_ab.at(y, x);
      const FlowVector bwd = sample_flow(f_ba, x + fwd.dx, y + fwd.dy);
      out[static_cast<std::size_t>(y) * f_ab.width() + x] = std::hypot(fwd.dx + bwd.dx, fwd.dy + bwd.dy);
    }
  }
  return out;
}

double occlusion_threshold(const FlowVector& forward, const FlowVector& backward) {
  return 0.5 + 0.01 * (norm(forward) + norm(backward));
}

BlendMask default_blend_mask(const FlowField& f0t, const FlowField& f1t, TimeStamp t,
                             const FlowField& f01, const FlowField& f10) {
  require_same_shape(f0t, f1t, "default_blend_mask");
  require_same_shape(f0t, f01, "default_blend_mask");
  require_same_shape(f0t, f10, "default_blend_mask");
  const int h = f0t.height();
  const int w = f0t.width();
  const auto occ0 = occlusion_map(f01, f10);
  const auto occ1 = occlusion_map(f10, f01);
  const double prior = 1.0 - t.value();
  BlendMask mask(h, w, prior);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const FlowVector& s0 = f0t.at(y, x);
      const FlowVector& s1 = f1t.at(y, x);
      const bool hidden_in_1 = lookup(occ0, w, h, x + s0.dx, y + s0.dy);
      const bool hidden_in_0 = lookup(occ1, w, h, x + s1.dx, y + s1.dy);
      if (hidden_in_1 && !hidden_in_0) {
        mask.set(y, x, 1.0);
      } else if (hidden_in_0 && !hidden_in_1) {
        mask.set(y, x, 0.0);
      }
    }
  }
  return mask;
}

Image blend(const Image& from0, const Image& from1, const BlendMask& mask) {
  require_same_shape(from0, from1, "blend");
  if (!mask.matches(from0)) throw DimensionError("blend: mask does not match frames");
  Image out(from0.height(), from0.width(), from0.channels());
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      const double m = mask.at(y, x);
      for (int c = 0; c < out.channels(); ++c) {
        const double a = from0.at(y, x, c);
        const double b = from1.at(y, x, c);
        const double v = m * a + (1.0 - m) * b;
        out.at(y, x, c) = std::clamp(v, std::min(a, b), std::max(a, b));
      }
    }
  }
  return out;
}

SynthesisOutput synthesize(const Image& i0, const Image& i1, const FlowField& f0t,
                           const FlowField& f1t, const BlendMask& mask) {
  require_same_shape(i0, i1, "synthesize");
  require_matches(f0t, i0, "synthesize");
  require_matches(f1t, i0, "synthesize");
  if (!mask.matches(i0)) throw DimensionError("synthesize: mask does not match frames");
  SynthesisOutput out;
  out.warped_from_0 = warp_bilinear(i0, f0t);
  out.warped_from_1 = warp_bilinear(i1, f1t);
  out.frame = blend(out.warped_from_0, out.warped_from_1, mask);
  out.mask = mask;
  return out;
}

}  // namespace mfi
