#include "doctest.h"
#include "oracles.hpp"

#include <map>

#include "mfi/error.hpp"
#include "mfi/metrics.hpp"
#include "mfi/synthetic_bench.hpp"
#include "mfi/temporal_pyramid.hpp"

using namespace mfi;

namespace {

struct FlowProbe : FlowRefiner {
  std::vector<FlowLevelInput> seen;
  std::vector<std::vector<WarpedPair>> produced;

  FlowLevelOutput refine(const FlowLevelInput& in) override {
    seen.push_back(in);
    IdentityFlowRefiner id;
    FlowLevelOutput out = id.refine(in);
    // Nudge the flows so each level's output is distinguishable.
    for (auto& p : out.flows) {
      for (auto& v : p.from0.vectors()) v.dx += 0.25;
      for (auto& v : p.from1.vectors()) v.dy -= 0.125;
    }
    std::vector<WarpedPair> w;
    for (const auto& p : out.flows) {
      w.push_back({warp_bilinear(in.context->i0, p.from0), warp_bilinear(in.context->i1, p.from1)});
    }
    produced.push_back(std::move(w));
    return out;
  }
};

struct FrameProbe : FrameRefiner {
  std::vector<FrameLevelInput> seen;
  std::vector<std::vector<Image>> produced;
  std::vector<Image> refine(const FrameLevelInput& in) override {
    seen.push_back(in);
    std::vector<Image> out = in.frames;
    for (auto& f : out) {
      for (double& v : f.data()) v += 0.1;
    }
    produced.push_back(out);
    return out;
  }
};

struct WrongCount : FrameRefiner {
  std::vector<Image> refine(const FrameLevelInput& in) override {
    auto out = in.frames;
    out.pop_back();
    return out;
  }
};

struct BadMask : FlowRefiner {
  FlowLevelOutput refine(const FlowLevelInput& in) override {
    FlowLevelOutput out = IdentityFlowRefiner().refine(in);
    out.masks[0] = BlendMask(1, 1, 0.5);
    return out;
  }
};

FlowBundle constant_bundle(int h, int w, double vx, double vy) {
  FlowBundle b;
  b.f0_to_m1 = oracle::constant_flow(h, w, -vx, -vy);
  b.f0_to_1 = oracle::constant_flow(h, w, vx, vy);
  b.f0_to_2 = oracle::constant_flow(h, w, 2 * vx, 2 * vy);
  b.f1_to_0 = oracle::constant_flow(h, w, -vx, -vy);
  b.f1_to_m1 = oracle::constant_flow(h, w, -2 * vx, -2 * vy);
  b.f1_to_2 = oracle::constant_flow(h, w, vx, vy);
  return b;
}

}  // namespace

TEST_CASE("pyramid plans") {
  const PyramidPlan p7 = plan_pyramid(7);
  CHECK(p7.num_levels() == 4);
  CHECK(p7.level_stamps(1) == std::vector<int>{1, 7});
  CHECK(p7.level_stamps(2) == std::vector<int>{2, 6});
  CHECK(p7.level_stamps(3) == std::vector<int>{3, 5});
  CHECK(p7.level_stamps(4) == std::vector<int>{4});
  for (int i = 1; i <= 7; ++i) {
    CHECK(p7.depth(i) == std::min(i, 8 - i));
    CHECK(p7.depth(i) == p7.depth(8 - i));
  }

  const PyramidPlan p1 = plan_pyramid(1);
  CHECK(p1.num_levels() == 1);
  CHECK(p1.level_stamps(1) == std::vector<int>{1});

  const PyramidPlan p3 = plan_pyramid(3);
  CHECK(p3.num_levels() == 2);
  CHECK(p3.level_stamps(1) == std::vector<int>{1, 3});
  CHECK(p3.level_stamps(2) == std::vector<int>{2});

  CHECK_THROWS_AS(plan_pyramid(0), InvalidArgument);
  CHECK_THROWS_AS(p7.depth(8), InvalidArgument);
}

TEST_CASE("every stamp belongs to exactly one level") {
  for (int n : {1, 2, 3, 5, 7, 9, 15}) {
    const PyramidPlan p(n);
    std::map<int, int> count;
    for (int level = 1; level <= p.num_levels(); ++level) {
      for (int i : p.level_stamps(level)) ++count[i];
    }
    CHECK(static_cast<int>(count.size()) == n);
    for (const auto& [i, c] : count) CHECK(c == 1);
  }
}

TEST_CASE("identity flow pyramid passes predictions through") {
  const Image i0 = oracle::smooth_image(20, 24, 1);
  const Image i1 = oracle::smooth_image(20, 24, 2);
  const FlowField f01 = oracle::constant_flow(20, 24, 0.5, 0.25);
  const FlowField f10 = oracle::constant_flow(20, 24, -0.5, -0.25);
  std::vector<FlowPair> pred;
  for (int i = 1; i <= 7; ++i) {
    pred.push_back({oracle::constant_flow(20, 24, 0.1 * i, -0.2 * i),
                    oracle::constant_flow(20, 24, -0.3 * i, 0.05 * i)});
  }
  const PyramidContext ctx{i0, i1, f01, f10};
  IdentityFlowRefiner id;
  const FlowPyramidResult r = refine_flows_pyramidal(pred, ctx, id, plan_pyramid(7));
  for (int k = 0; k < 7; ++k) {
    CHECK(oracle::identical(r.flows[k].from0, pred[k].from0));
    CHECK(oracle::identical(r.flows[k].from1, pred[k].from1));
    CHECK(oracle::identical(r.warped[k].from0, warp_bilinear(i0, pred[k].from0)));
    CHECK(oracle::identical(r.warped[k].from1, warp_bilinear(i1, pred[k].from1)));
  }

  std::vector<FlowPair> zero(7, FlowPair{FlowField(20, 24), FlowField(20, 24)});
  const FlowPyramidResult rz = refine_flows_pyramidal(zero, ctx, id, plan_pyramid(7));
  for (int k = 0; k < 7; ++k) {
    CHECK(oracle::identical(rz.warped[k].from0, i0));
    CHECK(oracle::identical(rz.warped[k].from1, i1));
  }
}

TEST_CASE("flow pyramid depth and guidance") {
  const Image i0 = oracle::smooth_image(16, 16, 3);
  const Image i1 = oracle::smooth_image(16, 16, 4);
  const FlowField z(16, 16);
  std::vector<FlowPair> pred(7, FlowPair{z, z});
  const PyramidContext ctx{i0, i1, z, z};
  FlowProbe probe;
  const PyramidPlan plan(7);
  const FlowPyramidResult r = refine_flows_pyramidal(pred, ctx, probe, plan);

  REQUIRE(probe.seen.size() == 4);
  std::map<int, int> touches;
  for (std::size_t l = 0; l < probe.seen.size(); ++l) {
    const auto& in = probe.seen[l];
    CHECK(in.level == static_cast<int>(l) + 1);
    for (int i : in.stamps) ++touches[i];
    if (l == 0) {
      CHECK(in.guidance.empty());
      CHECK(in.guidance_stamps.empty());
      continue;
    }
    const auto& prev = probe.seen[l - 1];
    CHECK(in.guidance_stamps == prev.stamps);
    REQUIRE(in.guidance.size() == probe.produced[l - 1].size());
    for (std::size_t k = 0; k < in.guidance.size(); ++k) {
      CHECK(oracle::identical(in.guidance[k].from0, probe.produced[l - 1][k].from0));
      CHECK(oracle::identical(in.guidance[k].from1, probe.produced[l - 1][k].from1));
    }
  }
  for (int i = 1; i <= 7; ++i) {
    CHECK(touches[i] == std::min(i, 8 - i));
    // Each touch added 0.25 to the frame-0 sampling flow.
    CHECK(r.flows[i - 1].from0.at(3, 3).dx == 0.25 * plan.depth(i));
    CHECK(r.flows[i - 1].from1.at(3, 3).dy == -0.125 * plan.depth(i));
  }
}

TEST_CASE("frame pyramid depth, entry level and guidance") {
  std::vector<Image> raw;
  std::vector<WarpedPair> warped;
  for (int i = 1; i <= 7; ++i) {
    raw.push_back(Image(8, 8, 1, 0.05 * i));
    warped.push_back({Image(8, 8, 1, 0.0), Image(8, 8, 1, 1.0)});
  }
  FrameProbe probe;
  const PyramidPlan plan(7);
  const std::vector<Image> out = postprocess_pyramidal(raw, warped, probe, plan);

  REQUIRE(probe.seen.size() == 4);
  std::map<int, int> first_level;
  std::map<int, int> touches;
  for (std::size_t l = 0; l < probe.seen.size(); ++l) {
    const auto& in = probe.seen[l];
    CHECK(in.level == 4 - static_cast<int>(l));
    for (std::size_t k = 0; k < in.stamps.size(); ++k) {
      const int i = in.stamps[k];
      ++touches[i];
      if (!first_level.count(i)) first_level[i] = in.level;
      CHECK(in.entering[k] == (first_level[i] == in.level));
      if (in.entering[k]) CHECK(oracle::identical(in.frames[k], raw[i - 1]));
    }
    if (l > 0) {
      CHECK(in.guidance_stamps == probe.seen[l - 1].stamps);
      REQUIRE(in.guidance.size() == probe.produced[l - 1].size());
      for (std::size_t k = 0; k < in.guidance.size(); ++k) {
        CHECK(oracle::identical(in.guidance[k], probe.produced[l - 1][k]));
      }
    } else {
      CHECK(in.guidance.empty());
    }
  }
  CHECK(first_level[2] == 2);
  CHECK(first_level[6] == 2);
  CHECK(first_level[4] == 4);
  CHECK(first_level[1] == 1);
  for (int i = 1; i <= 7; ++i) {
    CHECK(touches[i] == std::min(i, 8 - i));
    CHECK(out[i - 1].at(0, 0) == doctest::Approx(0.05 * i + 0.1 * plan.depth(i)).epsilon(1e-12));
  }
  CHECK(out[3].at(4, 4) - raw[3].at(4, 4) == doctest::Approx(0.4));
  CHECK(out[0].at(4, 4) - raw[0].at(4, 4) == doctest::Approx(0.1));
}

TEST_CASE("identity frame pyramid returns the raw frames") {
  std::vector<Image> raw;
  std::vector<WarpedPair> warped;
  for (int i = 1; i <= 7; ++i) {
    raw.push_back(oracle::noise_image(5, 6, 3, i));
    warped.push_back({raw.back(), raw.back()});
  }
  IdentityFrameRefiner id;
  const auto out = postprocess_pyramidal(raw, warped, id, plan_pyramid(7));
  for (int k = 0; k < 7; ++k) CHECK(oracle::identical(out[k], raw[k]));
}

TEST_CASE("refiner contract violations are reported") {
  std::vector<Image> raw(7, Image(4, 4, 1));
  std::vector<WarpedPair> warped(7, WarpedPair{Image(4, 4, 1), Image(4, 4, 1)});
  WrongCount wrong;
  CHECK_THROWS_AS(postprocess_pyramidal(raw, warped, wrong, plan_pyramid(7)), ContractError);

  const Image i0(4, 4, 1);
  const FlowField z(4, 4);
  std::vector<FlowPair> pred(7, FlowPair{z, z});
  const PyramidContext ctx{i0, i0, z, z};
  BadMask bad;
  CHECK_THROWS_AS(refine_flows_pyramidal(pred, ctx, bad, plan_pyramid(7)), ContractError);

  IdentityFlowRefiner id;
  pred.pop_back();
  CHECK_THROWS_AS(refine_flows_pyramidal(pred, ctx, id, plan_pyramid(7)), DimensionError);
}

TEST_CASE("identity pipeline equals direct synthesis") {
  const SceneWindow w = render_window(variable_acceleration_scenes(1, 5)[0]);
  const FlowBundle bundle = constant_bundle(64, 64, 1.5, -0.75);
  const InterpolationResult r = interpolate_with_bundle(w.quad, bundle, MotionModelKind::Cubic, 7);
  REQUIRE(r.frames.size() == 7);
  for (int k = 0; k < 7; ++k) {
    const FlowField s0 = invert_flow(r.predicted_flows[k].from0);
    const FlowField s1 = invert_flow(r.predicted_flows[k].from1);
    const BlendMask m = default_blend_mask(s0, s1, r.times[k], bundle.f0_to_1, bundle.f1_to_0);
    const SynthesisOutput s = synthesize(w.quad.zero(), w.quad.one(), s0, s1, m);
    CHECK(oracle::identical(r.frames[k], s.frame));
    CHECK(oracle::identical(r.raw_frames[k], s.frame));
  }
}

TEST_CASE("time reversal mirrors the output sequence") {
  const SceneWindow w = render_window(variable_acceleration_scenes(1, 12)[0]);
  const InputQuad& q = w.quad;
  const FlowBundle b = estimate_bundle(q, FlowSolverConfig{});
  const InputQuad rq(q.two(), q.one(), q.zero(), q.minus1());
  FlowBundle rb;
  rb.f0_to_m1 = b.f1_to_2;
  rb.f0_to_1 = b.f1_to_0;
  rb.f0_to_2 = b.f1_to_m1;
  rb.f1_to_0 = b.f0_to_1;
  rb.f1_to_m1 = b.f0_to_2;
  rb.f1_to_2 = b.f0_to_m1;
  const auto fwd = interpolate_with_bundle(q, b, MotionModelKind::Cubic, 7);
  const auto rev = interpolate_with_bundle(rq, rb, MotionModelKind::Cubic, 7);
  for (int i = 1; i <= 7; ++i) {
    CHECK(oracle::identical(rev.frames[i - 1], fwd.frames[7 - i]));
  }
}

TEST_CASE("static quad is reproduced") {
  const Image a = oracle::smooth_image(48, 48, 31);
  const auto r = interpolate(InputQuad(a, a, a, a), InterpolationOptions{});
  for (const Image& f : r.frames) CHECK(psnr(f, a) >= 50.0);
}

TEST_CASE("uniform translation is interpolated") {
  const SceneSpec scene = translation_scene(2.0, -1.0, 6);
  const SceneWindow w = render_window(scene);
  const auto r = interpolate(w.quad, InterpolationOptions{});
  for (int k = 0; k < 7; ++k) {
    CAPTURE(k);
    CHECK(psnr(r.frames[k], w.truth[k]) >= 30.0);
  }
}

TEST_CASE("consistency refiner keeps a good interpolation good") {
  const SceneWindow w = render_window(variable_acceleration_scenes(1, 3)[0]);
  ConsistencyFlowRefiner refiner;
  const auto r = interpolate(w.quad, InterpolationOptions{}, &refiner);
  for (int k = 0; k < 7; ++k) CHECK(psnr(r.frames[k], w.truth[k]) >= 30.0);
}

TEST_CASE("single-frame and odd-sized plans run end to end") {
  const SceneWindow w = render_window(translation_scene(1.0, 1.0, 2));
  InterpolationOptions opts;
  opts.num_frames = 1;
  const auto r = interpolate(w.quad, opts);
  REQUIRE(r.frames.size() == 1);
  CHECK(r.times[0].value() == 0.5);
  CHECK(psnr(r.frames[0], w.truth[3]) >= 30.0);
}

TEST_CASE("mismatched quads are rejected") {
  const Image a(16, 16, 1);
  CHECK_THROWS_AS(InputQuad(a, a, Image(16, 17, 1), a), DimensionError);
  FlowBundle b = constant_bundle(16, 16, 0, 0);
  b.f0_to_2 = FlowField(8, 8);
  CHECK_THROWS_AS(interpolate_with_bundle(InputQuad(a, a, a, a), b, MotionModelKind::Cubic, 7),
                  DimensionError);
}
