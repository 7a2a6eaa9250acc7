#include "mfi/motion_models.hpp"

#include <string>

#include "mfi/flow_estimation.hpp"

namespace mfi {

std::string_view to_string(MotionModelKind kind) {
  switch (kind) {
    case MotionModelKind::Linear: return "linear";
    case MotionModelKind::Quadratic: return "quad";
    case MotionModelKind::Cubic: return "cubic";
  }
  return "unknown";
}

MotionModelKind parse_motion_model(std::string_view name) {
  if (name == "linear") return MotionModelKind::Linear;
  if (name == "quad" || name == "quadratic") return MotionModelKind::Quadratic;
  if (name == "cubic") return MotionModelKind::Cubic;
  throw InvalidArgument("unknown motion model '" + std::string(name) + "'");
}

double predict_displacement(MotionModelKind kind, double flow_1, double flow_back,
                            double flow_ahead, double t) {
  double out = flow_1 * t;
  if (kind == MotionModelKind::Linear) return out;
  const double accel = flow_1 + flow_back;
  out += accel / 2.0 * (t * t - t);
  if (kind == MotionModelKind::Quadratic) return out;
  // Acceleration one interval later, measured along the frame-0 pixel's path.
  const double accel_next = flow_ahead - 2.0 * flow_1;
  out += (accel_next - accel) / 6.0 * (t * t * t - t);
  return out;
}

CubicCoefficients cubic_coeffs_forward(const FlowField& f01, const FlowField& f0m1,
                                       const FlowField& f02) {
  require_same_shape(f01, f0m1, "cubic_coeffs_forward");
  require_same_shape(f01, f02, "cubic_coeffs_forward");
  CubicCoefficients c{FlowField(f01.height(), f01.width()), FlowField(f01.height(), f01.width()),
                      FlowField(f01.height(), f01.width())};
  auto one = [](double f1, double fm1, double f2, double& v, double& a, double& da) {
    a = f1 + fm1;
    const double a_next = f2 - 2.0 * f1;
    da = a_next - a;
    v = f1 - a / 2.0 - da / 6.0;
  };
  for (std::size_t k = 0; k < f01.size(); ++k) {
    const FlowVector& p = f01.vectors()[k];
    const FlowVector& m = f0m1.vectors()[k];
    const FlowVector& q = f02.vectors()[k];
    FlowVector& v = c.velocity.vectors()[k];
    FlowVector& a = c.acceleration.vectors()[k];
    FlowVector& da = c.acceleration_change.vectors()[k];
    one(p.dx, m.dx, q.dx, v.dx, a.dx, da.dx);
    one(p.dy, m.dy, q.dy, v.dy, a.dy, da.dy);
  }
  return c;
}

namespace {

FlowField predict(const FlowField& f1, const FlowField& back, const FlowField& ahead, double t,
                  MotionModelKind kind, const char* what) {
  require_same_shape(f1, back, what);
  require_same_shape(f1, ahead, what);
  FlowField out(f1.height(), f1.width());
  for (std::size_t k = 0; k < f1.size(); ++k) {
    const FlowVector& p = f1.vectors()[k];
    const FlowVector& b = back.vectors()[k];
    const FlowVector& a = ahead.vectors()[k];
    out.vectors()[k] = {predict_displacement(kind, p.dx, b.dx, a.dx, t),
                        predict_displacement(kind, p.dy, b.dy, a.dy, t)};
  }
  return out;
}

}  // namespace

FlowField predict_flow_from_0(const FlowField& f01, const FlowField& f0m1, const FlowField& f02,
                              TimeStamp t, MotionModelKind kind) {
  return predict(f01, f0m1, f02, t.value(), kind, "predict_flow_from_0");
}

FlowField predict_flow_from_1(const FlowField& f10, const FlowField& f1m1, const FlowField& f12,
                              TimeStamp t, MotionModelKind kind) {
  // On the reversed axis frame 2 sits one interval behind frame 1 and frame
  // -1 two intervals ahead.
  return predict(f10, f12, f1m1, t.complement().value(), kind, "predict_flow_from_1");
}

std::vector<FlowPair> predict_all(const FlowBundle& bundle, const std::vector<TimeStamp>& stamps,
                                  MotionModelKind kind) {
  if (stamps.empty()) throw InvalidArgument("predict_all needs at least one time stamp");
  std::vector<FlowPair> out;
  out.reserve(stamps.size());
  for (const TimeStamp& t : stamps) {
    out.push_back({predict_flow_from_0(bundle.f0_to_1, bundle.f0_to_m1, bundle.f0_to_2, t, kind),
                   predict_flow_from_1(bundle.f1_to_0, bundle.f1_to_m1, bundle.f1_to_2, t, kind)});
  }
  return out;
}

}  // namespace mfi
