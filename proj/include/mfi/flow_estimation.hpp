#pragma once

#include <optional>

#include "mfi/image.hpp"

namespace mfi {

/// Coarse-to-fine variational solver settings.
///
/// smoothness_weight is the Horn-Schunck alpha expressed in 8-bit intensity
/// units, so the classical value 15 keeps its usual meaning even though
/// images are stored in [0, 1].
struct FlowSolverConfig {
  int num_scales = 3;
  int iterations_per_scale = 100;
  double smoothness_weight = 15.0;
  int warp_updates_per_scale = 3;
  /// Overrides iterations_per_scale at the finest scale only.
  std::optional<int> finest_iterations;
  /// Successive over-relaxation factor of the Gauss-Seidel sweeps.
  double relaxation = 1.9;
  /// Gaussian pre-smoothing applied to both inputs before the pyramid.
  double presmoothing_sigma = 0.8;

  /// Throws InvalidArgument if any field is out of range.
  void validate() const;
};

/// The six flows between the inputs of a quad. fA_to_B maps pixels of
/// frame A to their positions in frame B (m1 stands for frame -1).
struct FlowBundle {
  FlowField f0_to_m1;
  FlowField f0_to_1;
  FlowField f0_to_2;
  FlowField f1_to_0;
  FlowField f1_to_m1;
  FlowField f1_to_2;
};

/// Flow from a toward b: b(x + f(x)) ~ a(x). When init is given the coarse
/// scales are skipped and the finest scale starts from init.
FlowField estimate_pair_flow(const Image& a, const Image& b, const std::optional<FlowField>& init,
                             const FlowSolverConfig& cfg);

class InputQuad;

/// Two-stage estimation. Stage one: f0->-1, f1->2, f0->2, f1->-1 from
/// scratch. Stage two: f0->1 started from -f0->-1 and f1->0 from -f1->2.
FlowBundle estimate_bundle(const InputQuad& quad, const FlowSolverConfig& cfg);

}  // namespace mfi
