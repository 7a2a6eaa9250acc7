#include "mfi/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "mfi/error.hpp"
#include "mfi/io.hpp"
#include "mfi/metrics.hpp"
#include "mfi/synthetic_bench.hpp"
#include "mfi/temporal_pyramid.hpp"

namespace mfi::cli {

using nlohmann::json;

namespace {

constexpr int kWindowFrames = 7;
constexpr int kMaxUpconvertFactor = 512;

std::string pad(int v, int width) {
  std::string s = std::to_string(v);
  if (static_cast<int>(s.size()) < width) s.insert(0, width - s.size(), '0');
  return s;
}

std::unique_ptr<FlowRefiner> make_refiner(RefinerKind kind) {
  if (kind == RefinerKind::Consistency) return std::make_unique<ConsistencyFlowRefiner>();
  return std::make_unique<IdentityFlowRefiner>();
}

std::string refiner_name(RefinerKind kind) {
  return kind == RefinerKind::Consistency ? "consistency" : "identity";
}

json solver_json(const FlowSolverConfig& s) {
  json j = {{"num_scales", s.num_scales},
            {"iterations_per_scale", s.iterations_per_scale},
            {"smoothness_weight", s.smoothness_weight},
            {"warp_updates_per_scale", s.warp_updates_per_scale}};
  return j;
}

std::vector<Image> load_all(const std::vector<fs::path>& paths) {
  std::vector<Image> out;
  for (const auto& p : paths) out.push_back(io::read_png(p));
  return out;
}

InputQuad load_quad(const std::vector<fs::path>& paths) {
  if (paths.size() != 4) {
    throw InvalidArgument("expected four input frames, got " + std::to_string(paths.size()));
  }
  std::vector<Image> f = load_all(paths);
  return InputQuad(std::move(f[0]), std::move(f[1]), std::move(f[2]), std::move(f[3]));
}

double mean_relaxed_loss(const InterpolationResult& r, const std::vector<Image>& truth, int d) {
  double acc = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    acc += relaxed_warp_loss(r.warped[k].from0, truth[k], d).mean;
    acc += relaxed_warp_loss(r.warped[k].from1, truth[k], d).mean;
  }
  return acc / (2.0 * truth.size());
}

struct WindowJob {
  std::vector<fs::path> inputs;
  std::vector<fs::path> truth;
  fs::path out_dir;
  std::string prefix;
};

json interp_window(const WindowJob& job, const RunConfig& cfg) {
  const InputQuad quad = load_quad(job.inputs);
  InterpolationOptions opts;
  opts.model = cfg.model;
  opts.solver = cfg.solver;
  opts.num_frames = kWindowFrames;
  auto refiner = make_refiner(cfg.refiner);
  const InterpolationResult r = interpolate(quad, opts, refiner.get());

  fs::create_directories(job.out_dir);
  json outputs = json::array();
  for (int i = 1; i <= kWindowFrames; ++i) {
    const std::string name = "frame_" + std::to_string(i) + "_8.png";
    io::write_png(job.out_dir / name, r.frames[i - 1]);
    outputs.push_back(job.prefix + name);
  }
  if (cfg.write_flows) {
    for (int i = 1; i <= kWindowFrames; ++i) {
      const std::string stem = "flow_" + std::to_string(i) + "_8";
      io::write_flo(job.out_dir / (stem + "_from0.flo"), r.refined_flows[i - 1].from0);
      io::write_flo(job.out_dir / (stem + "_from1.flo"), r.refined_flows[i - 1].from1);
    }
  }

  json w = {{"outputs", outputs}};
  if (!job.truth.empty()) {
    if (job.truth.size() != kWindowFrames) {
      throw InvalidArgument("expected seven ground-truth frames, got " +
                            std::to_string(job.truth.size()));
    }
    const std::vector<Image> truth = load_all(job.truth);
    MetricsReport m = evaluate_sequence(r.frames, truth);
    m.relaxed_loss = mean_relaxed_loss(r, truth, cfg.relax_d);
    w["metrics"] = io::metrics_to_json(m);
  }
  return w;
}

std::string csv_field(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return io::format_number(v.get<double>());
  return v.dump();
}

std::string interp_csv(const json& report) {
  std::ostringstream out;
  out << "window,frame,t,file,psnr,ssim,ie,tcc,relaxed_loss\n";
  for (const auto& w : report.at("windows")) {
    const int idx = w.at("index").get<int>();
    const json* m = w.contains("metrics") ? &w.at("metrics") : nullptr;
    for (int i = 0; i < kWindowFrames; ++i) {
      out << idx << ',' << i + 1 << ',' << io::format_number((i + 1) / 8.0) << ','
          << w.at("outputs")[i].get<std::string>() << ',';
      if (m) {
        const auto& f = m->at("frames")[i];
        out << csv_field(f.at("psnr")) << ',' << csv_field(f.at("ssim")) << ','
            << csv_field(f.at("ie")) << ",,";
      } else {
        out << ",,,,";
      }
      out << '\n';
    }
    if (m) {
      const auto& mean = m->at("mean");
      out << idx << ",mean,,," << csv_field(mean.at("psnr")) << ',' << csv_field(mean.at("ssim"))
          << ',' << csv_field(mean.at("ie")) << ','
          << (m->contains("tcc") ? csv_field(m->at("tcc")) : "") << ','
          << (m->contains("relaxed_loss") ? csv_field(m->at("relaxed_loss")) : "") << '\n';
    }
  }
  return out.str();
}

std::string render_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<json>>& rows, ReportFormat format) {
  if (format == ReportFormat::Json) {
    json arr = json::array();
    for (const auto& row : rows) {
      json o = json::object();
      for (std::size_t c = 0; c < header.size(); ++c) o[header[c]] = row[c];
      arr.push_back(o);
    }
    return json{{"schema_version", io::kReportSchemaVersion}, {"rows", arr}}.dump(2) + "\n";
  }
  std::ostringstream out;
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_field(row[c]);
    out << '\n';
  }
  return out.str();
}

constexpr TrajectoryPreset kPresets[] = {TrajectoryPreset::ConstantVelocity,
                                         TrajectoryPreset::ConstantAcceleration,
                                         TrajectoryPreset::VariableAcceleration};
constexpr MotionModelKind kModels[] = {MotionModelKind::Linear, MotionModelKind::Quadratic,
                                       MotionModelKind::Cubic};

std::string bench_toy(const RunConfig& cfg) {
  std::vector<double> times;
  for (int i = 1; i <= 7; ++i) times.push_back(i / 8.0);
  times.push_back(-0.5);
  times.push_back(1.5);
  std::vector<std::vector<json>> rows;
  for (TrajectoryPreset p : kPresets) {
    const auto table = toy_model_comparison(preset_trajectory(p), times);
    for (const auto& row : table) {
      for (MotionModelKind m : kModels) {
        const auto k = static_cast<std::size_t>(m);
        const Point2 e0 = row.error_from0[k];
        const Point2 e1 = row.error_from1[k];
        rows.push_back({std::string(to_string(p)), row.t, row.extrapolated,
                        std::string(to_string(m)), std::hypot(e0.x, e0.y),
                        std::hypot(e1.x, e1.y)});
      }
    }
  }
  return render_table({"trajectory", "t", "extrapolated", "model", "error_from0", "error_from1"},
                      rows, cfg.report);
}

std::string bench_relaxation(const RunConfig& cfg) {
  std::vector<std::vector<json>> rows;
  for (TrajectoryPreset p : kPresets) {
    for (MotionModelKind m : kModels) {
      for (double radius : {0.0, 0.25, 0.5}) {
        const auto s = relaxation_experiment(preset_trajectory(p), m, radius, 2000, cfg.seed);
        rows.push_back({std::string(to_string(p)), std::string(to_string(m)), radius,
                        s.unperturbed_mse, s.best_mse});
      }
    }
  }
  return render_table({"trajectory", "model", "radius", "unperturbed_mse", "best_mse"}, rows,
                      cfg.report);
}

std::string bench_scenes(const RunConfig& cfg) {
  constexpr int kScenes = 20;
  const auto scenes = variable_acceleration_scenes(kScenes, cfg.seed);
  struct Acc {
    double psnr = 0, ssim = 0, ie = 0, tcc = 0;
  };
  Acc acc[4];
  for (const SceneSpec& scene : scenes) {
    const SceneWindow w = render_window(scene);
    const FlowBundle bundle = estimate_bundle(w.quad, cfg.solver);
    for (MotionModelKind m : kModels) {
      auto refiner = make_refiner(cfg.refiner);
      const auto r = interpolate_with_bundle(w.quad, bundle, m, kWindowFrames, refiner.get());
      const MetricsReport rep = evaluate_sequence(r.frames, w.truth);
      Acc& a = acc[static_cast<int>(m)];
      a.psnr += rep.mean.psnr;
      a.ssim += rep.mean.ssim;
      a.ie += rep.mean.ie;
      a.tcc += *rep.tcc;
    }
    const auto base = interpolate_independent(w.quad.zero(), w.quad.one(), cfg.solver);
    const MetricsReport rep = evaluate_sequence(base, w.truth);
    acc[3].psnr += rep.mean.psnr;
    acc[3].ssim += rep.mean.ssim;
    acc[3].ie += rep.mean.ie;
    acc[3].tcc += *rep.tcc;
  }
  std::vector<std::vector<json>> rows;
  const char* names[] = {"linear", "quad", "cubic", "independent"};
  for (int k = 0; k < 4; ++k) {
    rows.push_back({names[k], acc[k].psnr / kScenes, acc[k].ssim / kScenes, acc[k].ie / kScenes,
                    acc[k].tcc / kScenes});
  }
  return render_table({"method", "psnr", "ssim", "ie", "tcc"}, rows, cfg.report);
}

std::string bench_translation(const RunConfig& cfg) {
  std::vector<std::vector<json>> rows;
  const double speeds[][2] = {{0.5, 0.0}, {1.0, -1.0}, {2.0, 1.5}, {3.0, -2.0}, {4.0, 0.0},
                              {0.0, 4.0}};
  for (const auto& v : speeds) {
    const SceneSpec scene = translation_scene(v[0], v[1], cfg.seed);
    const SceneWindow w = render_window(scene);
    const FlowField f = estimate_pair_flow(w.quad.zero(), w.quad.one(), std::nullopt, cfg.solver);
    const FlowField truth(f.height(), f.width(), FlowVector{v[0], v[1]});
    rows.push_back({v[0], v[1], endpoint_error(f, truth)});
  }
  return render_table({"vx", "vy", "epe"}, rows, cfg.report);
}

// Inserts factor - 1 frames into every gap; the sequence ends are
// replicated to complete the first and last quads.
std::vector<Image> expand_gaps(const std::vector<Image>& frames, int factor, const RunConfig& cfg) {
  if (factor == 1) return frames;
  const int n = static_cast<int>(frames.size());
  std::vector<Image> out;
  InterpolationOptions opts;
  opts.model = cfg.model;
  opts.solver = cfg.solver;
  opts.num_frames = factor - 1;
  for (int k = 0; k + 1 < n; ++k) {
    out.push_back(frames[k]);
    const InputQuad quad(frames[std::max(k - 1, 0)], frames[k], frames[k + 1],
                         frames[std::min(k + 2, n - 1)]);
    auto refiner = make_refiner(cfg.refiner);
    InterpolationResult r = interpolate(quad, opts, refiner.get());
    for (Image& f : r.frames) out.push_back(std::move(f));
  }
  out.push_back(frames.back());
  return out;
}

std::vector<Image> upconvert_frames(std::vector<Image> frames, int factor, const RunConfig& cfg) {
  while (factor > 8 && factor % 8 == 0) {
    frames = expand_gaps(frames, 8, cfg);
    factor /= 8;
  }
  return expand_gaps(frames, factor, cfg);
}

}  // namespace

ReportFormat parse_report_format(const std::string& name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  throw InvalidArgument("unknown report format '" + name + "' (expected json or csv)");
}

RefinerKind parse_refiner(const std::string& name) {
  if (name == "identity") return RefinerKind::Identity;
  if (name == "consistency") return RefinerKind::Consistency;
  throw InvalidArgument("unknown refiner '" + name + "' (expected identity or consistency)");
}

void RunConfig::validate() const {
  solver.validate();
  if (relax_d < 0) throw InvalidArgument("relax-d must be non-negative");
}

json run_interp(const InterpRequest& request, const RunConfig& cfg) {
  cfg.validate();
  std::vector<WindowJob> jobs;
  if (request.manifest) {
    if (!request.inputs.empty() || !request.truth.empty()) {
      throw InvalidArgument("give either a manifest or input frames, not both");
    }
    const io::SequenceManifest m = io::read_manifest(*request.manifest);
    if (m.ground_truth.size() != kWindowFrames) {
      throw InvalidArgument("manifest must list seven ground-truth indices");
    }
    if (m.num_windows() == 0) throw InvalidArgument("manifest has no complete window");
    for (int w = 0; w < m.num_windows(); ++w) {
      WindowJob job;
      for (int k = 0; k < 4; ++k) job.inputs.push_back(m.input_path(w, k));
      for (int k = 0; k < kWindowFrames; ++k) job.truth.push_back(m.truth_path(w, k));
      const std::string sub = "window_" + pad(w, 3);
      job.out_dir = cfg.out_dir / sub;
      job.prefix = sub + "/";
      jobs.push_back(std::move(job));
    }
  } else {
    jobs.push_back({request.inputs, request.truth, cfg.out_dir, ""});
  }

  json windows = json::array();
  for (std::size_t w = 0; w < jobs.size(); ++w) {
    json entry = interp_window(jobs[w], cfg);
    entry["index"] = w;
    windows.push_back(std::move(entry));
  }
  json report = {{"schema_version", io::kReportSchemaVersion},
                 {"model", std::string(to_string(cfg.model))},
                 {"refiner", refiner_name(cfg.refiner)},
                 {"relax_d", cfg.relax_d},
                 {"solver", solver_json(cfg.solver)},
                 {"windows", windows}};
  fs::create_directories(cfg.out_dir);
  if (cfg.report == ReportFormat::Json) {
    io::write_file_atomic(cfg.out_dir / "report.json", report.dump(2) + "\n");
  } else {
    io::write_file_atomic(cfg.out_dir / "report.csv", interp_csv(report));
  }
  return report;
}

void run_flow(const std::vector<fs::path>& inputs, const RunConfig& cfg) {
  cfg.validate();
  const InputQuad quad = load_quad(inputs);
  const FlowBundle b = estimate_bundle(quad, cfg.solver);
  fs::create_directories(cfg.out_dir);
  io::write_flo(cfg.out_dir / "f0_to_m1.flo", b.f0_to_m1);
  io::write_flo(cfg.out_dir / "f0_to_1.flo", b.f0_to_1);
  io::write_flo(cfg.out_dir / "f0_to_2.flo", b.f0_to_2);
  io::write_flo(cfg.out_dir / "f1_to_0.flo", b.f1_to_0);
  io::write_flo(cfg.out_dir / "f1_to_m1.flo", b.f1_to_m1);
  io::write_flo(cfg.out_dir / "f1_to_2.flo", b.f1_to_2);
}

json run_metrics(const std::vector<fs::path>& generated, const std::vector<fs::path>& truth) {
  if (generated.size() != truth.size()) {
    throw InvalidArgument("metrics needs as many generated frames as ground-truth frames");
  }
  if (generated.size() < 2) throw InvalidArgument("metrics needs at least two frames");
  const MetricsReport m = evaluate_sequence(load_all(generated), load_all(truth));
  json j = io::metrics_to_json(m);
  j["schema_version"] = io::kReportSchemaVersion;
  return j;
}

std::vector<std::string> bench_suites() { return {"toy-fig3", "variable-accel-scenes", "relaxation", "translation"}; }

std::string run_bench(const std::string& suite, const RunConfig& cfg) {
  cfg.validate();
  if (suite == "toy-fig3") return bench_toy(cfg);
  if (suite == "relaxation") return bench_relaxation(cfg);
  if (suite == "variable-accel-scenes") return bench_scenes(cfg);
  if (suite == "translation") return bench_translation(cfg);
  throw InvalidArgument("unknown bench suite '" + suite + "'");
}

void check_upconvert_factor(int factor) {
  const bool small_power = factor == 2 || factor == 4 || factor == 8;
  const bool multiple = factor > 8 && factor % 8 == 0 && factor <= kMaxUpconvertFactor;
  if (!small_power && !multiple) {
    throw InvalidArgument("unsupported up-conversion factor " + std::to_string(factor) +
                          " (2, 4, 8 or a multiple of 8 up to " +
                          std::to_string(kMaxUpconvertFactor) + ")");
  }
}

std::vector<fs::path> run_upconvert(const std::vector<fs::path>& frames, int factor,
                                    const RunConfig& cfg) {
  cfg.validate();
  check_upconvert_factor(factor);
  if (frames.size() < 2) throw InvalidArgument("up-conversion needs at least two frames");
  const std::vector<Image> out = upconvert_frames(load_all(frames), factor, cfg);
  fs::create_directories(cfg.out_dir);
  std::vector<fs::path> written;
  const std::string suffix = "_" + std::to_string(factor) + ".png";
  for (std::size_t k = 0; k < out.size(); ++k) {
    fs::path p = cfg.out_dir / ("frame_" + std::to_string(k) + suffix);
    io::write_png(p, out[k]);
    written.push_back(p);
  }
  return written;
}

void run_render(const fs::path& scene_json, const std::vector<double>& times,
                const RunConfig& cfg) {
  if (times.empty()) throw InvalidArgument("render needs at least one time");
  std::ifstream in(scene_json);
  if (!in) throw IoError("cannot open " + scene_json.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw FormatError(scene_json.string() + ": " + e.what());
  }
  const SceneSpec scene = io::scene_from_json(j);
  const RenderedSequence seq = render_sequence(scene, times);
  fs::create_directories(cfg.out_dir);
  json index = json::array();
  for (std::size_t k = 0; k < times.size(); ++k) {
    const std::string stem = "render_" + pad(static_cast<int>(k), 3);
    io::write_png(cfg.out_dir / (stem + ".png"), seq.frames[k]);
    io::write_flo(cfg.out_dir / (stem + "_flow_from_0.flo"), seq.flow_from_0[k]);
    index.push_back({{"t", times[k]}, {"frame", stem + ".png"},
                     {"flow_from_0", stem + "_flow_from_0.flo"}});
  }
  io::write_file_atomic(cfg.out_dir / "render.json",
                        json{{"schema_version", io::kReportSchemaVersion}, {"frames", index}}
                                .dump(2) + "\n");
}

}  // namespace mfi::cli
