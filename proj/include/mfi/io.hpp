#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "mfi/image.hpp"
#include "mfi/metrics.hpp"
#include "mfi/synthetic_bench.hpp"

namespace mfi::io {

namespace fs = std::filesystem;

/// Reads an 8-bit or 16-bit PNG (gray, gray+alpha, RGB, RGBA or palette).
/// Alpha is dropped; samples map to [0, 1]. Throws IoError or FormatError.
Image read_png(const fs::path& path);

/// Writes an 8-bit PNG with round-half-away-from-zero quantisation of the
/// clamped samples. The file appears atomically (temp file then rename).
void write_png(const fs::path& path, const Image& img);

/// 8-bit quantisation used by write_png.
std::uint8_t quantize(double value);

/// Middlebury .flo: "PIEH", int32 width, int32 height, then row-major
/// (dx, dy) float32 pairs, all little-endian. Components are narrowed to
/// float32 on write.
void write_flo(const fs::path& path, const FlowField& flow);
FlowField read_flo(const fs::path& path);

/// Writes bytes to path via a sibling temp file and rename.
void write_file_atomic(const fs::path& path, const std::string& bytes);

/// Ordered frame files plus the rule selecting input and ground-truth frames
/// from each window. Indices are 1-based within the window.
struct SequenceManifest {
  std::vector<fs::path> frames;
  double frame_rate = 240.0;
  int window = 25;
  int stride = 25;
  std::vector<int> inputs{1, 9, 17, 25};
  std::vector<int> ground_truth{10, 11, 12, 13, 14, 15, 16};

  /// Throws InvalidArgument on malformed sampling rules.
  void validate() const;
  /// Number of complete windows available.
  int num_windows() const;
  fs::path input_path(int window_index, int k) const;
  fs::path truth_path(int window_index, int k) const;
};

/// JSON manifest: {"frames": [...], "frame_rate": f, "sampling": {"window",
/// "stride", "inputs", "ground_truth"}}. Relative frame paths resolve against
/// the manifest's directory.
SequenceManifest read_manifest(const fs::path& path);
nlohmann::json manifest_to_json(const SequenceManifest& manifest);

nlohmann::json scene_to_json(const SceneSpec& scene);
SceneSpec scene_from_json(const nlohmann::json& j);

/// Finite doubles as numbers; infinities as the strings "inf"/"-inf".
nlohmann::json number_or_inf(double v);

inline constexpr int kReportSchemaVersion = 1;

nlohmann::json metrics_to_json(const MetricsReport& report);

/// Fixed six-significant-digit rendering used by CSV output.
std::string format_number(double v);

}  // namespace mfi::io
