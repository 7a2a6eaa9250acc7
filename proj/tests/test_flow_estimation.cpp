#include "doctest.h"
#include "oracles.hpp"

#include "mfi/error.hpp"
#include "mfi/flow_estimation.hpp"
#include "mfi/metrics.hpp"
#include "mfi/synthetic_bench.hpp"

using namespace mfi;

TEST_CASE("solver config validation") {
  FlowSolverConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.num_scales = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.iterations_per_scale = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.smoothness_weight = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.warp_updates_per_scale = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("identical frames give near-zero flow") {
  const Image a = oracle::smooth_image(48, 48, 9);
  const FlowField f = estimate_pair_flow(a, a, std::nullopt, FlowSolverConfig{});
  CHECK(oracle::mean_norm(f) < 0.05);
}

TEST_CASE("textureless frames give finite near-zero flow") {
  const Image a(32, 32, 1, 0.4);
  const Image b(32, 32, 1, 0.6);
  const FlowField f = estimate_pair_flow(a, b, std::nullopt, FlowSolverConfig{});
  for (const auto& v : f.vectors()) {
    CHECK(std::isfinite(v.dx));
    CHECK(std::isfinite(v.dy));
  }
  CHECK(oracle::mean_norm(f) < 0.05);
}

TEST_CASE("global translations are recovered") {
  const double shifts[][2] = {{2, 0}, {-1, 3}, {4, 0}, {0, -4}, {1.5, -2.5}, {-4, 4}};
  for (const auto& s : shifts) {
    CAPTURE(s[0]);
    CAPTURE(s[1]);
    const SceneWindow w = render_window(translation_scene(s[0], s[1], 21));
    const FlowField f = estimate_pair_flow(w.quad.zero(), w.quad.one(), std::nullopt, FlowSolverConfig{});
    CHECK(endpoint_error(f, oracle::constant_flow(64, 64, s[0], s[1])) < 0.5);
  }
}

TEST_CASE("flow ignores a common brightness offset") {
  const SceneWindow w = render_window(translation_scene(1.5, -1.0, 4));
  Image a = w.quad.zero();
  Image b = w.quad.one();
  const FlowField base = estimate_pair_flow(a, b, std::nullopt, FlowSolverConfig{});
  for (double& v : a.data()) v += 0.125;
  for (double& v : b.data()) v += 0.125;
  const FlowField shifted = estimate_pair_flow(a, b, std::nullopt, FlowSolverConfig{});
  double worst = 0.0;
  for (std::size_t k = 0; k < base.size(); ++k) {
    worst = std::max({worst, std::abs(base.vectors()[k].dx - shifted.vectors()[k].dx),
                      std::abs(base.vectors()[k].dy - shifted.vectors()[k].dy)});
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("solver is deterministic") {
  const SceneWindow w = render_window(translation_scene(2.0, 1.0, 8));
  const FlowField a = estimate_pair_flow(w.quad.zero(), w.quad.one(), std::nullopt, FlowSolverConfig{});
  const FlowField b = estimate_pair_flow(w.quad.zero(), w.quad.one(), std::nullopt, FlowSolverConfig{});
  CHECK(oracle::identical(a, b));
}

TEST_CASE("static quad gives six near-zero flows") {
  const Image a = oracle::smooth_image(40, 40, 2);
  const FlowBundle b = estimate_bundle(InputQuad(a, a, a, a), FlowSolverConfig{});
  for (const FlowField* f : {&b.f0_to_m1, &b.f0_to_1, &b.f0_to_2, &b.f1_to_0, &b.f1_to_m1, &b.f1_to_2}) {
    CHECK(oracle::mean_norm(*f) < 0.05);
  }
}

TEST_CASE("uniform velocity quad") {
  const SceneWindow w = render_window(translation_scene(1.0, 0.0, 13));
  const FlowBundle b = estimate_bundle(w.quad, FlowSolverConfig{});
  CHECK(endpoint_error(b.f0_to_1, oracle::constant_flow(64, 64, 1, 0)) < 0.5);
  CHECK(endpoint_error(b.f0_to_2, oracle::constant_flow(64, 64, 2, 0)) < 0.5);
  CHECK(endpoint_error(b.f0_to_m1, oracle::constant_flow(64, 64, -1, 0)) < 0.5);
  CHECK(endpoint_error(b.f1_to_0, oracle::constant_flow(64, 64, -1, 0)) < 0.5);
  CHECK(endpoint_error(b.f1_to_m1, oracle::constant_flow(64, 64, -2, 0)) < 0.5);
  CHECK(endpoint_error(b.f1_to_2, oracle::constant_flow(64, 64, 1, 0)) < 0.5);
}

TEST_CASE("second stage starts from the negated first-stage flows") {
  const SceneWindow w = render_window(variable_acceleration_scenes(1, 77)[0]);
  FlowSolverConfig cfg;
  cfg.finest_iterations = 0;
  const FlowBundle b = estimate_bundle(w.quad, cfg);
  CHECK(oracle::identical(b.f0_to_1, flow_scale(b.f0_to_m1, -1.0)));
  CHECK(oracle::identical(b.f1_to_0, flow_scale(b.f1_to_2, -1.0)));
}

TEST_CASE("init must match the frames") {
  const Image a(16, 16, 1);
  CHECK_THROWS_AS(estimate_pair_flow(a, a, FlowField(8, 8), FlowSolverConfig{}), DimensionError);
  CHECK_THROWS_AS(estimate_pair_flow(a, Image(16, 15, 1), std::nullopt, FlowSolverConfig{}),
                  DimensionError);
}
