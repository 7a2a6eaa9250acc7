#pragma once

#include <memory>
#include <vector>

#include "mfi/flow_estimation.hpp"
#include "mfi/image.hpp"
#include "mfi/motion_models.hpp"
#include "mfi/warp_synthesis.hpp"

namespace mfi {

/// Per-stamp processing depth for n evenly spaced output frames.
///
/// Stamp i (1-based) has depth min(i, n + 1 - i). The flow pyramid runs its
/// levels 1..L in order and a stamp takes part in every level up to its
/// depth. The frame pyramid runs levels L..1 and a stamp enters at the
/// level equal to its depth and stays until level 1. Either way stamp i is
/// refined exactly depth(i) times.
class PyramidPlan {
 public:
  /// Throws InvalidArgument unless n_frames is positive.
  explicit PyramidPlan(int n_frames);

  int num_frames() const { return n_frames_; }
  int num_levels() const { return (n_frames_ + 1) / 2; }
  int depth(int stamp) const;
  /// Stamps whose depth equals level, ascending.
  std::vector<int> level_stamps(int level) const;
  /// Stamps with depth >= level, ascending.
  std::vector<int> active_stamps(int level) const;
  TimeStamp stamp_time(int stamp) const { return TimeStamp(stamp, n_frames_ + 1); }

 private:
  int n_frames_;
};

PyramidPlan plan_pyramid(int n_frames);

struct WarpedPair {
  Image from0;
  Image from1;
};

/// Data shared by every level of the flow pyramid.
struct PyramidContext {
  const Image& i0;
  const Image& i1;
  /// Inter-input flows, used for occlusion reasoning.
  const FlowField& f01;
  const FlowField& f10;
};

struct FlowLevelInput {
  int level = 1;
  std::vector<int> stamps;
  std::vector<TimeStamp> times;
  /// Current sampling flows for `stamps`: the prediction at level 1, the
  /// previous level's refinement afterwards.
  std::vector<FlowPair> flows;
  /// Warped frames produced by the previous level, with their stamps.
  /// Empty at level 1.
  std::vector<int> guidance_stamps;
  std::vector<WarpedPair> guidance;
  const PyramidContext* context = nullptr;
};

struct FlowLevelOutput {
  std::vector<FlowPair> flows;
  std::vector<BlendMask> masks;
};

class FlowRefiner {
 public:
  virtual ~FlowRefiner() = default;
  virtual FlowLevelOutput refine(const FlowLevelInput& input) = 0;
};

/// Keeps flows as they are; masks come from default_blend_mask.
class IdentityFlowRefiner : public FlowRefiner {
 public:
  FlowLevelOutput refine(const FlowLevelInput& input) override;
};

/// Classical refiner: the two warped candidates of a stamp should agree, so
/// a short-range residual flow between them is estimated and split between
/// the two sampling fields in proportion to their temporal distance.
class ConsistencyFlowRefiner : public FlowRefiner {
 public:
  explicit ConsistencyFlowRefiner(FlowSolverConfig residual_cfg = default_residual_config());
  FlowLevelOutput refine(const FlowLevelInput& input) override;

  static FlowSolverConfig default_residual_config();

 private:
  FlowSolverConfig cfg_;
};

struct FrameLevelInput {
  int level = 1;
  std::vector<int> stamps;
  std::vector<TimeStamp> times;
  /// True where the stamp joins the pyramid at this level.
  std::vector<bool> entering;
  /// Raw synthesized frame for entering stamps, previous output otherwise.
  std::vector<Image> frames;
  /// I0 and I1 warped to each stamp.
  std::vector<WarpedPair> warped;
  /// Refined frames of the previous level, with their stamps. Empty at the
  /// first level processed.
  std::vector<int> guidance_stamps;
  std::vector<Image> guidance;
};

class FrameRefiner {
 public:
  virtual ~FrameRefiner() = default;
  /// Returns one frame per entry of input.stamps.
  virtual std::vector<Image> refine(const FrameLevelInput& input) = 0;
};

class IdentityFrameRefiner : public FrameRefiner {
 public:
  std::vector<Image> refine(const FrameLevelInput& input) override;
};

struct FlowPyramidResult {
  std::vector<FlowPair> flows;
  std::vector<BlendMask> masks;
  std::vector<WarpedPair> warped;
};

/// Runs the flow pyramid. predicted holds one sampling-flow pair per stamp.
FlowPyramidResult refine_flows_pyramidal(const std::vector<FlowPair>& predicted,
                                         const PyramidContext& context, FlowRefiner& refiner,
                                         const PyramidPlan& plan);

/// Runs the frame pyramid; output ordered t_1..t_n.
std::vector<Image> postprocess_pyramidal(const std::vector<Image>& raw,
                                         const std::vector<WarpedPair>& warped,
                                         FrameRefiner& refiner, const PyramidPlan& plan);

struct InterpolationResult {
  std::vector<TimeStamp> times;
  std::vector<Image> frames;
  std::vector<Image> raw_frames;
  /// Forward displacements from the motion model, before inversion.
  std::vector<FlowPair> predicted_flows;
  /// Refined backward sampling fields used for synthesis.
  std::vector<FlowPair> refined_flows;
  std::vector<BlendMask> masks;
  std::vector<WarpedPair> warped;
  FlowBundle bundle;
};

struct InterpolationOptions {
  MotionModelKind model = MotionModelKind::Cubic;
  FlowSolverConfig solver;
  int num_frames = 7;
};

/// Full pipeline: bundle estimation, motion prediction, flow pyramid,
/// synthesis and frame pyramid. Null refiners mean identity refiners.
InterpolationResult interpolate(const InputQuad& quad, const InterpolationOptions& options,
                                FlowRefiner* flow_refiner = nullptr,
                                FrameRefiner* frame_refiner = nullptr);

/// Same as interpolate but with the inter-input flows supplied.
InterpolationResult interpolate_with_bundle(const InputQuad& quad, const FlowBundle& bundle,
                                            MotionModelKind model, int num_frames,
                                            FlowRefiner* flow_refiner = nullptr,
                                            FrameRefiner* frame_refiner = nullptr);

/// Baseline without shared temporal structure: each stamp independently
/// re-estimates the two-frame flows between I0 and I1, scales them linearly
/// and blends with the default mask.
std::vector<Image> interpolate_independent(const Image& i0, const Image& i1,
                                           const FlowSolverConfig& cfg, int num_frames = 7);

}  // namespace mfi
