#include "mfi/temporal_pyramid.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace mfi {

namespace {

std::string level_tag(const char* pyramid, int level) {
  return std::string(pyramid) + " level " + std::to_string(level);
}

void check_flow_output(const FlowLevelInput& in, const FlowLevelOutput& out, const Image& ref) {
  const std::string tag = level_tag("flow pyramid", in.level);
  if (out.flows.size() != in.stamps.size() || out.masks.size() != in.stamps.size()) {
    throw ContractError(tag + ": refiner returned " + std::to_string(out.flows.size()) +
                        " flow pairs and " + std::to_string(out.masks.size()) + " masks for " +
                        std::to_string(in.stamps.size()) + " stamps");
  }
  for (std::size_t k = 0; k < out.flows.size(); ++k) {
    if (!out.flows[k].from0.matches(ref) || !out.flows[k].from1.matches(ref)) {
      throw ContractError(tag + ": refined flow has the wrong size");
    }
    if (!out.masks[k].matches(ref)) throw ContractError(tag + ": mask has the wrong size");
    for (double v : out.masks[k].weights()) {
      if (!(v >= 0.0 && v <= 1.0)) throw ContractError(tag + ": mask weight outside [0, 1]");
    }
  }
}

void check_frame_output(const FrameLevelInput& in, const std::vector<Image>& out,
                        const Image& ref) {
  const std::string tag = level_tag("frame pyramid", in.level);
  if (out.size() != in.stamps.size()) {
    throw ContractError(tag + ": refiner returned " + std::to_string(out.size()) + " frames for " +
                        std::to_string(in.stamps.size()) + " stamps");
  }
  for (const Image& f : out) {
    if (!f.same_shape(ref)) throw ContractError(tag + ": refined frame has the wrong shape");
  }
}

}  // namespace

PyramidPlan::PyramidPlan(int n_frames) : n_frames_(n_frames) {
  if (n_frames < 1) {
    throw InvalidArgument("pyramid needs a positive frame count, got " +
                          std::to_string(n_frames));
  }
}

int PyramidPlan::depth(int stamp) const {
  if (stamp < 1 || stamp > n_frames_) {
    throw InvalidArgument("stamp " + std::to_string(stamp) + " outside 1.." +
                          std::to_string(n_frames_));
  }
  return std::min(stamp, n_frames_ + 1 - stamp);
}

std::vector<int> PyramidPlan::level_stamps(int level) const {
  std::vector<int> out;
  for (int i = 1; i <= n_frames_; ++i) {
    if (depth(i) == level) out.push_back(i);
  }
  return out;
}

std::vector<int> PyramidPlan::active_stamps(int level) const {
  std::vector<int> out;
  for (int i = 1; i <= n_frames_; ++i) {
    if (depth(i) >= level) out.push_back(i);
  }
  return out;
}

PyramidPlan plan_pyramid(int n_frames) { return PyramidPlan(n_frames); }

FlowLevelOutput IdentityFlowRefiner::refine(const FlowLevelInput& input) {
  FlowLevelOutput out;
  out.flows = input.flows;
  for (std::size_t k = 0; k < input.stamps.size(); ++k) {
    out.masks.push_back(default_blend_mask(input.flows[k].from0, input.flows[k].from1,
                                           input.times[k], input.context->f01,
                                           input.context->f10));
  }
  return out;
}

FlowSolverConfig ConsistencyFlowRefiner::default_residual_config() {
  FlowSolverConfig cfg;
  cfg.num_scales = 2;
  cfg.iterations_per_scale = 60;
  cfg.warp_updates_per_scale = 2;
  cfg.smoothness_weight = 20.0;
  return cfg;
}

ConsistencyFlowRefiner::ConsistencyFlowRefiner(FlowSolverConfig residual_cfg)
    : cfg_(std::move(residual_cfg)) {
  cfg_.validate();
}

FlowLevelOutput ConsistencyFlowRefiner::refine(const FlowLevelInput& input) {
  const PyramidContext& ctx = *input.context;
  FlowLevelOutput out;
  for (std::size_t k = 0; k < input.stamps.size(); ++k) {
    const FlowPair& cur = input.flows[k];
    const double t = input.times[k].value();
    const Image w0 = warp_bilinear(ctx.i0, cur.from0);
    const Image w1 = warp_bilinear(ctx.i1, cur.from1);
    // w1(x + r) ~ w0(x); the mismatch is charged to each side in proportion
    // to its temporal distance from t.
    const FlowField r = estimate_pair_flow(w0, w1, std::nullopt, cfg_);
    FlowPair next = cur;
    for (std::size_t p = 0; p < r.size(); ++p) {
      const FlowVector& d = r.vectors()[p];
      next.from0.vectors()[p].dx -= t * d.dx;
      next.from0.vectors()[p].dy -= t * d.dy;
      next.from1.vectors()[p].dx += (1.0 - t) * d.dx;
      next.from1.vectors()[p].dy += (1.0 - t) * d.dy;
    }
    out.masks.push_back(default_blend_mask(next.from0, next.from1, input.times[k], ctx.f01, ctx.f10));
    out.flows.push_back(std::move(next));
  }
  return out;
}

std::vector<Image> IdentityFrameRefiner::refine(const FrameLevelInput& input) {
  return input.frames;
}

FlowPyramidResult refine_flows_pyramidal(const std::vector<FlowPair>& predicted,
                                         const PyramidContext& context, FlowRefiner& refiner,
                                         const PyramidPlan& plan) {
  const int n = plan.num_frames();
  if (static_cast<int>(predicted.size()) != n) {
    throw DimensionError("refine_flows_pyramidal: " + std::to_string(predicted.size()) +
                         " predictions for a " + std::to_string(n) + "-frame plan");
  }
  require_same_shape(context.i0, context.i1, "refine_flows_pyramidal");
  for (const FlowPair& p : predicted) {
    require_matches(p.from0, context.i0, "refine_flows_pyramidal");
    require_matches(p.from1, context.i0, "refine_flows_pyramidal");
  }

  std::vector<FlowPair> current = predicted;
  FlowPyramidResult result;
  result.flows.resize(n);
  result.masks.resize(n);
  result.warped.resize(n);

  std::vector<int> guidance_stamps;
  std::vector<WarpedPair> guidance;
  for (int level = 1; level <= plan.num_levels(); ++level) {
    FlowLevelInput in;
    in.level = level;
    in.stamps = plan.active_stamps(level);
    for (int i : in.stamps) {
      in.times.push_back(plan.stamp_time(i));
      in.flows.push_back(current[i - 1]);
    }
    in.guidance_stamps = std::move(guidance_stamps);
    in.guidance = std::move(guidance);
    in.context = &context;

    FlowLevelOutput out = refiner.refine(in);
    check_flow_output(in, out, context.i0);

    guidance_stamps.clear();
    guidance.clear();
    for (std::size_t k = 0; k < in.stamps.size(); ++k) {
      const int i = in.stamps[k];
      WarpedPair w{warp_bilinear(context.i0, out.flows[k].from0),
                   warp_bilinear(context.i1, out.flows[k].from1)};
      current[i - 1] = out.flows[k];
      if (plan.depth(i) == level) {
        result.flows[i - 1] = out.flows[k];
        result.masks[i - 1] = out.masks[k];
        result.warped[i - 1] = w;
      }
      guidance_stamps.push_back(i);
      guidance.push_back(std::move(w));
    }
  }
  return result;
}

std::vector<Image> postprocess_pyramidal(const std::vector<Image>& raw,
                                         const std::vector<WarpedPair>& warped,
                                         FrameRefiner& refiner, const PyramidPlan& plan) {
  const int n = plan.num_frames();
  if (static_cast<int>(raw.size()) != n || static_cast<int>(warped.size()) != n) {
    throw DimensionError("postprocess_pyramidal: expected " + std::to_string(n) +
                         " frames and warped pairs");
  }
  for (int i = 0; i < n; ++i) {
    require_same_shape(raw[i], raw[0], "postprocess_pyramidal");
    require_same_shape(warped[i].from0, raw[0], "postprocess_pyramidal");
    require_same_shape(warped[i].from1, raw[0], "postprocess_pyramidal");
  }

  std::vector<Image> current(n);
  std::vector<int> guidance_stamps;
  std::vector<Image> guidance;
  for (int level = plan.num_levels(); level >= 1; --level) {
    FrameLevelInput in;
    in.level = level;
    in.stamps = plan.active_stamps(level);
    for (int i : in.stamps) {
      const bool entering = plan.depth(i) == level;
      in.times.push_back(plan.stamp_time(i));
      in.entering.push_back(entering);
      in.frames.push_back(entering ? raw[i - 1] : current[i - 1]);
      in.warped.push_back(warped[i - 1]);
    }
    in.guidance_stamps = std::move(guidance_stamps);
    in.guidance = std::move(guidance);

    std::vector<Image> out = refiner.refine(in);
    check_frame_output(in, out, raw[0]);

    guidance_stamps = in.stamps;
    guidance = out;
    for (std::size_t k = 0; k < in.stamps.size(); ++k) current[in.stamps[k] - 1] = std::move(out[k]);
  }
  return current;
}

InterpolationResult interpolate_with_bundle(const InputQuad& quad, const FlowBundle& bundle,
                                            MotionModelKind model, int num_frames,
                                            FlowRefiner* flow_refiner,
                                            FrameRefiner* frame_refiner) {
  const PyramidPlan plan(num_frames);
  IdentityFlowRefiner default_flow;
  IdentityFrameRefiner default_frame;
  FlowRefiner& fr = flow_refiner ? *flow_refiner : default_flow;
  FrameRefiner& pr = frame_refiner ? *frame_refiner : default_frame;

  const Image& i0 = quad.zero();
  const Image& i1 = quad.one();
  for (const FlowField* f : {&bundle.f0_to_m1, &bundle.f0_to_1, &bundle.f0_to_2, &bundle.f1_to_0,
                             &bundle.f1_to_m1, &bundle.f1_to_2}) {
    require_matches(*f, i0, "interpolate");
  }

  InterpolationResult result;
  result.bundle = bundle;
  result.times = evenly_spaced_stamps(num_frames);
  result.predicted_flows = predict_all(bundle, result.times, model);

  // Motion-model flows are forward displacements on the reference grids;
  // synthesis samples backward from the target grid.
  std::vector<FlowPair> sampling;
  for (const FlowPair& p : result.predicted_flows) {
    sampling.push_back({invert_flow(p.from0), invert_flow(p.from1)});
  }

  const PyramidContext ctx{i0, i1, bundle.f0_to_1, bundle.f1_to_0};
  FlowPyramidResult pyr = refine_flows_pyramidal(sampling, ctx, fr, plan);

  for (int k = 0; k < num_frames; ++k) {
    SynthesisOutput s = synthesize(i0, i1, pyr.flows[k].from0, pyr.flows[k].from1, pyr.masks[k]);
    result.raw_frames.push_back(std::move(s.frame));
    result.warped.push_back({std::move(s.warped_from_0), std::move(s.warped_from_1)});
  }
  result.refined_flows = std::move(pyr.flows);
  result.masks = std::move(pyr.masks);
  result.frames = postprocess_pyramidal(result.raw_frames, result.warped, pr, plan);
  return result;
}

InterpolationResult interpolate(const InputQuad& quad, const InterpolationOptions& options,
                                FlowRefiner* flow_refiner, FrameRefiner* frame_refiner) {
  PyramidPlan{options.num_frames};
  const FlowBundle bundle = estimate_bundle(quad, options.solver);
  return interpolate_with_bundle(quad, bundle, options.model, options.num_frames, flow_refiner,
                                 frame_refiner);
}

std::vector<Image> interpolate_independent(const Image& i0, const Image& i1,
                                           const FlowSolverConfig& cfg, int num_frames) {
  require_same_shape(i0, i1, "interpolate_independent");
  std::vector<Image> frames;
  for (const TimeStamp& t : evenly_spaced_stamps(num_frames)) {
    const FlowField f01 = estimate_pair_flow(i0, i1, std::nullopt, cfg);
    const FlowField f10 = estimate_pair_flow(i1, i0, std::nullopt, cfg);
    const FlowField s0 = invert_flow(flow_scale(f01, t.value()));
    const FlowField s1 = invert_flow(flow_scale(f10, t.complement().value()));
    const BlendMask mask = default_blend_mask(s0, s1, t, f01, f10);
    frames.push_back(synthesize(i0, i1, s0, s1, mask).frame);
  }
  return frames;
}

}  // namespace mfi
