#include "mfi/io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "mfi/error.hpp"

namespace mfi::io {

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

struct PngRaw {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<unsigned char> pixels;
  char message[256] = {};
};

struct MemReader {
  const std::string* bytes;
  std::size_t pos;
};

void png_fail(png_structp png, png_const_charp msg) {
  auto* raw = static_cast<PngRaw*>(png_get_error_ptr(png));
  std::snprintf(raw->message, sizeof(raw->message), "%s", msg);
  png_longjmp(png, 1);
}

void png_quiet(png_structp, png_const_charp) {}

void mem_read(png_structp png, png_bytep out, png_size_t n) {
  auto* r = static_cast<MemReader*>(png_get_io_ptr(png));
  if (r->pos + n > r->bytes->size()) png_error(png, "truncated PNG data");
  std::memcpy(out, r->bytes->data() + r->pos, n);
  r->pos += n;
}

// Objects with destructors live in the caller; png_longjmp must not skip any.
bool decode_png(const std::string& bytes, PngRaw& raw, MemReader& reader,
                std::vector<png_bytep>& rows) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &raw, png_fail, png_quiet);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &reader, mem_read);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS)) {
    png_set_strip_alpha(png);
  }
  png_read_update_info(png, info);
  raw.width = png_get_image_width(png, info);
  raw.height = png_get_image_height(png, info);
  raw.bit_depth = png_get_bit_depth(png, info);
  raw.channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  raw.pixels.resize(stride * raw.height);
  rows.resize(raw.height);
  for (std::uint32_t y = 0; y < raw.height; ++y) rows[y] = raw.pixels.data() + y * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  (void)bytes;
  return true;
}

void mem_write(png_structp png, png_bytep data, png_size_t n) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(data), n);
}

void mem_flush(png_structp) {}

bool encode_png(const std::vector<png_bytep>& rows, int width, int height, int channels,
                std::string& out, PngRaw& err) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_fail, png_quiet);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, &out, mem_write, mem_flush);
  const int color = channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  png_set_IHDR(png, info, width, height, 8, color, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, const_cast<png_bytepp>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const std::string& in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  return v;
}

nlohmann::json trajectory_to_json(const TrajectorySpec& t) {
  return {{"x", t.x}, {"y", t.y}};
}

TrajectorySpec trajectory_from_json(const nlohmann::json& j) {
  TrajectorySpec t;
  auto axis = [&](const char* key, std::array<double, 5>& dst) {
    if (!j.contains(key)) return;
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() > dst.size()) {
      throw FormatError(std::string("trajectory axis '") + key + "' must be an array of at most 5 numbers");
    }
    for (std::size_t i = 0; i < a.size(); ++i) dst[i] = a[i].get<double>();
  };
  axis("x", t.x);
  axis("y", t.y);
  t.validate();
  return t;
}

nlohmann::json texture_to_json(const TextureSpec& t) {
  return {{"seed", t.seed},
          {"components", t.components},
          {"min_wavelength", t.min_wavelength},
          {"max_wavelength", t.max_wavelength}};
}

TextureSpec texture_from_json(const nlohmann::json& j, TextureSpec t) {
  t.seed = j.value("seed", t.seed);
  t.components = j.value("components", t.components);
  t.min_wavelength = j.value("min_wavelength", t.min_wavelength);
  t.max_wavelength = j.value("max_wavelength", t.max_wavelength);
  return t;
}

}  // namespace

Image read_png(const fs::path& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() < 8 || png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) != 0) {
    throw FormatError(path.string() + " is not a PNG file");
  }
  PngRaw raw;
  MemReader reader{&bytes, 0};
  std::vector<png_bytep> rows;
  if (!decode_png(bytes, raw, reader, rows)) {
    throw FormatError("cannot decode " + path.string() + ": " + raw.message);
  }
  if (raw.channels != 1 && raw.channels != 3) {
    throw FormatError(path.string() + ": unsupported channel layout");
  }
  Image img(static_cast<int>(raw.height), static_cast<int>(raw.width), raw.channels);
  auto out = img.data();
  if (raw.bit_depth == 16) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      const unsigned v = (raw.pixels[2 * i] << 8) | raw.pixels[2 * i + 1];
      out[i] = v / 65535.0;
    }
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = raw.pixels[i] / 255.0;
  }
  return img;
}

std::uint8_t quantize(double value) {
  if (std::isnan(value)) throw InvalidArgument("cannot quantise NaN");
  const double v = std::clamp(value, 0.0, 1.0) * 255.0;
  return static_cast<std::uint8_t>(std::floor(v + 0.5));
}

void write_png(const fs::path& path, const Image& img) {
  if (img.empty()) throw InvalidArgument("write_png: empty image");
  if (img.channels() != 1 && img.channels() != 3) {
    throw InvalidArgument("write_png: only 1 or 3 channels are supported");
  }
  std::vector<unsigned char> pixels(img.size());
  auto in = img.data();
  for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = quantize(in[i]);
  const std::size_t stride = static_cast<std::size_t>(img.width()) * img.channels();
  std::vector<png_bytep> rows(img.height());
  for (int y = 0; y < img.height(); ++y) rows[y] = pixels.data() + y * stride;
  std::string bytes;
  PngRaw err;
  if (!encode_png(rows, img.width(), img.height(), img.channels(), bytes, err)) {
    throw IoError("cannot encode " + path.string() + ": " + err.message);
  }
  write_file_atomic(path, bytes);
}

void write_file_atomic(const fs::path& path, const std::string& bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " to " + path.string());
  }
}

void write_flo(const fs::path& path, const FlowField& flow) {
  if (flow.size() == 0) throw InvalidArgument("write_flo: empty flow field");
  std::string out = "PIEH";
  put_u32(out, static_cast<std::uint32_t>(flow.width()));
  put_u32(out, static_cast<std::uint32_t>(flow.height()));
  for (const FlowVector& v : flow.vectors()) {
    put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v.dx)));
    put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v.dy)));
  }
  write_file_atomic(path, out);
}

FlowField read_flo(const fs::path& path) {
  const std::string in = read_file(path);
  if (in.size() < 12 || in.compare(0, 4, "PIEH") != 0) {
    throw FormatError(path.string() + ": bad .flo magic");
  }
  const auto width = static_cast<std::int32_t>(get_u32(in, 4));
  const auto height = static_cast<std::int32_t>(get_u32(in, 8));
  if (width <= 0 || height <= 0 || width > (1 << 20) || height > (1 << 20)) {
    throw FormatError(path.string() + ": bad .flo dimensions");
  }
  const std::size_t expected = 12 + static_cast<std::size_t>(width) * height * 8;
  if (in.size() != expected) {
    throw FormatError(path.string() + ": .flo payload has " + std::to_string(in.size()) +
                      " bytes, expected " + std::to_string(expected));
  }
  FlowField flow(height, width);
  std::size_t pos = 12;
  for (FlowVector& v : flow.vectors()) {
    v.dx = std::bit_cast<float>(get_u32(in, pos));
    v.dy = std::bit_cast<float>(get_u32(in, pos + 4));
    pos += 8;
  }
  return flow;
}

void SequenceManifest::validate() const {
  if (window < 2) throw InvalidArgument("manifest window must be at least 2");
  if (stride < 1) throw InvalidArgument("manifest stride must be positive");
  if (!(frame_rate > 0.0)) throw InvalidArgument("manifest frame_rate must be positive");
  if (inputs.size() != 4) throw InvalidArgument("manifest needs exactly four input indices");
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    if (inputs[k] < 1 || inputs[k] > window) throw InvalidArgument("input index outside window");
    if (k > 0 && inputs[k] <= inputs[k - 1]) throw InvalidArgument("input indices must increase");
  }
  for (int g : ground_truth) {
    if (g <= inputs[1] || g >= inputs[2]) {
      throw InvalidArgument("ground-truth index " + std::to_string(g) +
                            " must lie strictly between the middle inputs");
    }
  }
}

int SequenceManifest::num_windows() const {
  const int n = static_cast<int>(frames.size());
  if (n < window) return 0;
  return (n - window) / stride + 1;
}

fs::path SequenceManifest::input_path(int window_index, int k) const {
  if (window_index < 0 || window_index >= num_windows() || k < 0 || k >= 4) {
    throw InvalidArgument("manifest input lookup out of range");
  }
  return frames[static_cast<std::size_t>(window_index) * stride + inputs[k] - 1];
}

fs::path SequenceManifest::truth_path(int window_index, int k) const {
  if (window_index < 0 || window_index >= num_windows() || k < 0 ||
      k >= static_cast<int>(ground_truth.size())) {
    throw InvalidArgument("manifest ground-truth lookup out of range");
  }
  return frames[static_cast<std::size_t>(window_index) * stride + ground_truth[k] - 1];
}

SequenceManifest read_manifest(const fs::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  SequenceManifest m;
  try {
    const fs::path base = path.parent_path();
    for (const auto& f : j.at("frames")) {
      fs::path p = f.get<std::string>();
      m.frames.push_back(p.is_relative() ? base / p : p);
    }
    m.frame_rate = j.value("frame_rate", m.frame_rate);
    if (j.contains("sampling")) {
      const auto& s = j.at("sampling");
      m.window = s.value("window", m.window);
      m.stride = s.value("stride", m.window);
      m.inputs = s.value("inputs", m.inputs);
      m.ground_truth = s.value("ground_truth", m.ground_truth);
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  m.validate();
  return m;
}

nlohmann::json manifest_to_json(const SequenceManifest& m) {
  nlohmann::json frames = nlohmann::json::array();
  for (const auto& f : m.frames) frames.push_back(f.generic_string());
  return {{"frames", frames},
          {"frame_rate", m.frame_rate},
          {"sampling",
           {{"window", m.window},
            {"stride", m.stride},
            {"inputs", m.inputs},
            {"ground_truth", m.ground_truth}}}};
}

nlohmann::json scene_to_json(const SceneSpec& scene) {
  nlohmann::json j = {{"height", scene.height},
                      {"width", scene.width},
                      {"channels", scene.channels},
                      {"background", texture_to_json(scene.background)},
                      {"global_motion", trajectory_to_json(scene.global_motion)}};
  if (scene.sprite) {
    j["sprite"] = {{"width", scene.sprite->width},
                   {"height", scene.sprite->height},
                   {"trajectory", trajectory_to_json(scene.sprite->trajectory)},
                   {"texture", texture_to_json(scene.sprite->texture)}};
  }
  return j;
}

SceneSpec scene_from_json(const nlohmann::json& j) {
  SceneSpec s;
  try {
    s.height = j.value("height", s.height);
    s.width = j.value("width", s.width);
    s.channels = j.value("channels", s.channels);
    if (j.contains("background")) s.background = texture_from_json(j.at("background"), s.background);
    if (j.contains("global_motion")) s.global_motion = trajectory_from_json(j.at("global_motion"));
    if (j.contains("sprite")) {
      const auto& js = j.at("sprite");
      SpriteSpec sp;
      sp.width = js.value("width", sp.width);
      sp.height = js.value("height", sp.height);
      if (js.contains("trajectory")) sp.trajectory = trajectory_from_json(js.at("trajectory"));
      if (js.contains("texture")) sp.texture = texture_from_json(js.at("texture"), sp.texture);
      s.sprite = sp;
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("scene: ") + e.what());
  }
  s.validate();
  return s;
}

nlohmann::json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

namespace {

nlohmann::json frame_metrics_json(const FrameMetrics& m) {
  return {{"psnr", number_or_inf(m.psnr)}, {"ssim", m.ssim}, {"ie", m.ie}};
}

}  // namespace

nlohmann::json metrics_to_json(const MetricsReport& report) {
  nlohmann::json frames = nlohmann::json::array();
  for (const auto& f : report.frames) frames.push_back(frame_metrics_json(f));
  nlohmann::json j = {{"frames", frames}, {"mean", frame_metrics_json(report.mean)}};
  if (report.tcc) j["tcc"] = *report.tcc;
  if (report.relaxed_loss) j["relaxed_loss"] = *report.relaxed_loss;
  if (report.epe) j["epe"] = *report.epe;
  return j;
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace mfi::io
