#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "mfi/flow_estimation.hpp"
#include "mfi/motion_models.hpp"

namespace mfi::cli {

namespace fs = std::filesystem;

enum class ReportFormat { Json, Csv };
enum class RefinerKind { Identity, Consistency };

ReportFormat parse_report_format(const std::string& name);
RefinerKind parse_refiner(const std::string& name);

struct RunConfig {
  MotionModelKind model = MotionModelKind::Cubic;
  FlowSolverConfig solver;
  int relax_d = 9;
  RefinerKind refiner = RefinerKind::Identity;
  fs::path out_dir = "out";
  ReportFormat report = ReportFormat::Json;
  std::uint64_t seed = 0;
  bool write_flows = false;

  void validate() const;
};

struct InterpRequest {
  /// Either four frame paths or a manifest.
  std::vector<fs::path> inputs;
  std::optional<fs::path> manifest;
  /// Optional ground truth for the four-path form (seven paths).
  std::vector<fs::path> truth;
};

/// Interpolates seven frames per window and writes frame_<i>_8.png files
/// (per-window subdirectories for manifests) plus report.json or report.csv.
/// Returns the report document.
nlohmann::json run_interp(const InterpRequest& request, const RunConfig& cfg);

/// Writes the six inter-input flows of a quad as .flo files.
void run_flow(const std::vector<fs::path>& inputs, const RunConfig& cfg);

/// Compares two equally long frame sequences; TCC needs at least two frames.
nlohmann::json run_metrics(const std::vector<fs::path>& generated,
                           const std::vector<fs::path>& truth);

/// Names accepted by run_bench.
std::vector<std::string> bench_suites();

/// Deterministic benchmark table rendered in cfg.report format.
std::string run_bench(const std::string& suite, const RunConfig& cfg);

/// Checks an up-conversion factor; throws InvalidArgument when unsupported.
void check_upconvert_factor(int factor);

/// Up-converts an ordered frame list by factor (2, 4, 8 or a multiple of 8;
/// large factors apply the 8x pipeline repeatedly), writing every output
/// frame (inputs included) as frame_<numerator>_<factor>.png where the frame
/// lies numerator / factor input intervals after the first. Returns the
/// written paths.
std::vector<fs::path> run_upconvert(const std::vector<fs::path>& frames, int factor,
                                    const RunConfig& cfg);

/// Renders a sequence from a JSON scene spec into out_dir as PNG files, one
/// per requested time, plus the ground-truth forward flows as .flo files.
void run_render(const fs::path& scene_json, const std::vector<double>& times,
                const RunConfig& cfg);

}  // namespace mfi::cli
