#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "mfi/image.hpp"

namespace mfi {

struct FlowBundle;

enum class MotionModelKind { Linear, Quadratic, Cubic };

std::string_view to_string(MotionModelKind kind);
/// Accepts "linear", "quad"/"quadratic", "cubic". Throws InvalidArgument.
MotionModelKind parse_motion_model(std::string_view name);

/// Per-pixel trajectory coefficients referenced at frame 0, in pixels per
/// input interval to the first, second and third power.
struct CubicCoefficients {
  FlowField velocity;
  FlowField acceleration;
  FlowField acceleration_change;
};

/// Scalar form of the motion models. flow_1 is the displacement to the
/// adjacent reference frame, flow_back to the frame one interval behind and
/// flow_ahead to the frame two intervals ahead. t is not range-checked so
/// that extrapolation studies can reuse it.
double predict_displacement(MotionModelKind kind, double flow_1, double flow_back,
                            double flow_ahead, double t);

CubicCoefficients cubic_coeffs_forward(const FlowField& f01, const FlowField& f0m1,
                                       const FlowField& f02);

/// Flow from frame 0 to time t under the given model.
FlowField predict_flow_from_0(const FlowField& f01, const FlowField& f0m1, const FlowField& f02,
                              TimeStamp t, MotionModelKind kind);

/// Flow from frame 1 to time t: the same model on the mirrored time axis,
/// evaluated at 1 - t with frame 2 behind and frame -1 two intervals ahead.
FlowField predict_flow_from_1(const FlowField& f10, const FlowField& f1m1, const FlowField& f12,
                              TimeStamp t, MotionModelKind kind);

/// Forward displacement pair (from frame 0, from frame 1) at one instant.
struct FlowPair {
  FlowField from0;
  FlowField from1;
};

std::vector<FlowPair> predict_all(const FlowBundle& bundle, const std::vector<TimeStamp>& stamps,
                                  MotionModelKind kind);

}  // namespace mfi
