#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mfi/image.hpp"
#include "mfi/motion_models.hpp"

namespace mfi {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Polynomial path p(t) = c0 + c1 t + c2 t^2 + c3 t^3 + c4 t^4 per axis, in
/// pixels with t in input intervals. The quartic term is only used to build
/// paths no model in the library represents exactly.
struct TrajectorySpec {
  std::array<double, 5> x{};
  std::array<double, 5> y{};

  Point2 position(double t) const;
  /// p(t) - p(from).
  Point2 displacement(double from, double t) const;
  /// Throws InvalidArgument on non-finite coefficients.
  void validate() const;
};

enum class TrajectoryPreset { ConstantVelocity, ConstantAcceleration, VariableAcceleration };

std::string_view to_string(TrajectoryPreset preset);

/// Fixed representative member of each family.
TrajectorySpec preset_trajectory(TrajectoryPreset preset);

/// Seeded random member of a family. Coefficients up to the family's degree
/// are drawn uniformly from [-scale, scale]; the leading one is kept at
/// least scale / 10 away from zero.
TrajectorySpec random_trajectory(TrajectoryPreset preset, std::uint64_t seed, double scale);

std::vector<Point2> sample_positions(const TrajectorySpec& spec, std::span<const double> times);

/// Per-axis absolute prediction errors of the three models at one time.
struct ToyComparisonRow {
  double t = 0.0;
  bool extrapolated = false;
  /// Indexed by MotionModelKind (Linear, Quadratic, Cubic).
  std::array<Point2, 3> error_from0{};
  std::array<Point2, 3> error_from1{};
};

/// Samples the path at -1, 0, 1, 2, forms exact inter-sample displacements
/// and compares every model against the true displacement at each time.
/// Times outside (0, 1) are evaluated and flagged as extrapolated.
std::vector<ToyComparisonRow> toy_model_comparison(const TrajectorySpec& spec,
                                                   std::span<const double> eval_times);

struct RelaxationSummary {
  double unperturbed_mse = 0.0;
  double best_mse = 0.0;
  /// Offsets applied to the samples at -1, 1 and 2 in the best trial.
  std::array<Point2, 3> best_offsets{};
};

/// Random search over perturbations of the samples at -1, 1 and 2, each
/// within a disc of the given radius, minimising the squared error of the
/// model's prediction at i/8, i = 1..7, referenced at frame 0. The
/// unperturbed configuration is part of the search.
RelaxationSummary relaxation_experiment(const TrajectorySpec& spec, MotionModelKind kind,
                                        double radius, int trials, std::uint64_t seed);

/// Band-limited background: a sum of random plane waves.
struct TextureSpec {
  std::uint64_t seed = 1;
  int components = 24;
  double min_wavelength = 8.0;
  double max_wavelength = 32.0;
};

struct SpriteSpec {
  int width = 12;
  int height = 12;
  /// Path of the sprite centre in canvas pixels.
  TrajectorySpec trajectory;
  TextureSpec texture{7, 12, 4.0, 12.0};
};

struct SceneSpec {
  int height = 64;
  int width = 64;
  int channels = 1;
  TextureSpec background;
  /// Motion of the whole background; its constant term is ignored.
  TrajectorySpec global_motion;
  std::optional<SpriteSpec> sprite;

  /// Throws InvalidArgument for bad sizes or when the sprite leaves the
  /// canvas (with a 1 px margin) anywhere in t in [-1, 2].
  void validate() const;
};

struct RenderedSequence {
  std::vector<double> times;
  std::vector<Image> frames;
  /// Forward displacement of every frame-0 pixel to each time.
  std::vector<FlowField> flow_from_0;
  /// Backward sampling field on each frame's grid pointing into frame 0, so
  /// warp_bilinear(frames[k0], flow_to_0[k]) reproduces frames[k].
  std::vector<FlowField> flow_to_0;
  /// Row-major flags: background at time 0 that the sprite covers at t.
  std::vector<std::vector<std::uint8_t>> occluded;
};

/// Renders the scene by bilinear resampling of integer-grid textures; the
/// ground truth is analytic. Frame 0 is sampled on the texture grid exactly.
RenderedSequence render_sequence(const SceneSpec& scene, std::span<const double> times);

/// Renders t = -1, 0, 1, 2 and the n ground-truth frames at i / (n + 1).
struct SceneWindow {
  InputQuad quad;
  std::vector<Image> truth;
  std::vector<FlowField> truth_flow_from_0;
};
SceneWindow render_window(const SceneSpec& scene, int num_frames = 7);

/// Seeded suite of textured scenes whose global motion has non-zero jerk.
std::vector<SceneSpec> variable_acceleration_scenes(int count, std::uint64_t seed, int size = 64);

/// Static background translated by a constant velocity per interval.
SceneSpec translation_scene(double vx, double vy, std::uint64_t seed, int size = 64);

}  // namespace mfi
