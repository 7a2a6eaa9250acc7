#pragma once

#include <vector>

#include "mfi/image.hpp"

namespace mfi {

/// Backward warp: out(x, y) = img sampled bilinearly at (x + dx, y + dy).
/// Samples outside the raster clamp to the nearest edge.
Image warp_bilinear(const Image& img, const FlowField& flow);

/// Warps each component of a flow field the same way warp_bilinear warps an
/// image. Used for forward-backward checks.
FlowField warp_flow(const FlowField& field, const FlowField& flow);

/// Converts a forward displacement field (defined on the source grid) into
/// the backward sampling field on the target grid by fixed-point iteration
/// of s(x) = -f(x + s(x)). Constant fields are inverted exactly.
FlowField invert_flow(const FlowField& forward, int iterations = 8);

/// Per-pixel forward-backward inconsistency |f_ab(x) + f_ba(x + f_ab(x))|.
std::vector<double> forward_backward_inconsistency(const FlowField& f_ab, const FlowField& f_ba);

/// Occlusion threshold in pixels for a pair of flow vectors.
double occlusion_threshold(const FlowVector& forward, const FlowVector& backward);

/// Temporal-distance prior 1 - t, overridden where forward-backward checks
/// say only one reference frame sees the pixel: weight 1 when the frame-0
/// source is occluded in frame 1, weight 0 in the opposite case. f0t and f1t
/// are the backward sampling fields used for synthesis.
BlendMask default_blend_mask(const FlowField& f0t, const FlowField& f1t, TimeStamp t,
                             const FlowField& f01, const FlowField& f10);

struct SynthesisOutput {
  Image frame;
  BlendMask mask;
  Image warped_from_0;
  Image warped_from_1;
};

/// frame = mask * warp(I0, f0t) + (1 - mask) * warp(I1, f1t).
SynthesisOutput synthesize(const Image& i0, const Image& i1, const FlowField& f0t,
                           const FlowField& f1t, const BlendMask& mask);

/// Blend of two already-warped frames; the result is clamped to the
/// per-sample interval spanned by the two inputs.
Image blend(const Image& from0, const Image& from1, const BlendMask& mask);

}  // namespace mfi
