#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mfi/commands.hpp"
#include "mfi/error.hpp"
#include "mfi/io.hpp"

namespace {

struct CommonFlags {
  std::string model = "cubic";
  int scales = 3;
  int iters = 100;
  int relax_d = 9;
  std::uint64_t seed = 0;
  std::string out = "out";
  std::string report = "json";
  std::string refiner = "identity";
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--model", f.model, "Motion model: linear, quad or cubic")
      ->envname("MFI_MODEL")
      ->capture_default_str();
  app->add_option("--scales", f.scales, "Flow solver pyramid scales")
      ->envname("MFI_SCALES")
      ->capture_default_str();
  app->add_option("--iters", f.iters, "Solver sweeps per warp update")
      ->envname("MFI_ITERS")
      ->capture_default_str();
  app->add_option("--relax-d", f.relax_d, "Search radius of the relaxed warping loss")
      ->envname("MFI_RELAX_D")
      ->capture_default_str();
  app->add_option("--seed", f.seed, "Seed for synthetic data")
      ->envname("MFI_SEED")
      ->capture_default_str();
  app->add_option("--out", f.out, "Output directory")->envname("MFI_OUT")->capture_default_str();
  app->add_option("--report", f.report, "Report format: json or csv")
      ->envname("MFI_REPORT")
      ->capture_default_str();
  app->add_option("--refiner", f.refiner, "Flow refiner: identity or consistency")
      ->envname("MFI_REFINER")
      ->capture_default_str();
}

mfi::cli::RunConfig to_config(const CommonFlags& f) {
  mfi::cli::RunConfig cfg;
  cfg.model = mfi::parse_motion_model(f.model);
  cfg.solver.num_scales = f.scales;
  cfg.solver.iterations_per_scale = f.iters;
  cfg.relax_d = f.relax_d;
  cfg.seed = f.seed;
  cfg.out_dir = f.out;
  cfg.report = mfi::cli::parse_report_format(f.report);
  cfg.refiner = mfi::cli::parse_refiner(f.refiner);
  cfg.validate();
  return cfg;
}

std::vector<mfi::cli::fs::path> to_paths(const std::vector<std::string>& v) {
  return {v.begin(), v.end()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-frame video interpolation"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::vector<std::string> inputs;
  std::vector<std::string> truth;
  std::string manifest;
  bool write_flows = false;
  auto* interp = app.add_subcommand("interp", "Interpolate seven frames between I0 and I1");
  add_common(interp, flags);
  interp->add_option("inputs", inputs, "Frames I-1 I0 I1 I2");
  interp->add_option("--manifest", manifest, "Sequence manifest (JSON)")->check(CLI::ExistingFile);
  interp->add_option("--truth", truth, "Seven ground-truth frames for metrics");
  interp->add_flag("--write-flows", write_flows, "Also write the refined sampling flows");

  auto* flow = app.add_subcommand("flow", "Estimate the six inter-input flows of a quad");
  add_common(flow, flags);
  flow->add_option("inputs", inputs, "Frames I-1 I0 I1 I2")->required()->expected(4);

  std::vector<std::string> generated;
  auto* metrics = app.add_subcommand("metrics", "PSNR, SSIM, IE and TCC of a frame sequence");
  metrics->add_option("--generated", generated, "Generated frames in order")->required();
  metrics->add_option("--truth", truth, "Ground-truth frames in order")->required();

  std::string suite;
  auto* bench = app.add_subcommand("bench", "Run a deterministic synthetic benchmark");
  add_common(bench, flags);
  bench->add_option("suite", suite, "Suite name")
      ->required()
      ->check(CLI::IsMember(mfi::cli::bench_suites()));

  int factor = 8;
  auto* upconvert = app.add_subcommand("upconvert", "Raise the frame rate of a sequence");
  add_common(upconvert, flags);
  upconvert->add_option("frames", inputs, "Input frames in order");
  upconvert->add_option("--manifest", manifest, "Sequence manifest whose frames are used in order")
      ->check(CLI::ExistingFile);
  upconvert->add_option("--factor", factor, "Frame-rate multiplier: 2, 4, 8 or a multiple of 8")
      ->envname("MFI_FACTOR")
      ->capture_default_str();

  std::string scene;
  std::vector<double> times;
  auto* render = app.add_subcommand("render", "Render a synthetic scene");
  add_common(render, flags);
  render->add_option("--scene", scene, "Scene spec (JSON)")->required()->check(CLI::ExistingFile);
  render->add_option("--times", times, "Times to render, in input intervals")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*interp) {
      mfi::cli::RunConfig cfg = to_config(flags);
      cfg.write_flows = write_flows;
      mfi::cli::InterpRequest req;
      req.inputs = to_paths(inputs);
      req.truth = to_paths(truth);
      if (!manifest.empty()) req.manifest = manifest;
      if (!req.manifest && req.inputs.size() != 4) {
        throw mfi::InvalidArgument("interp needs four input frames or --manifest");
      }
      mfi::cli::run_interp(req, cfg);
      std::cout << (cfg.out_dir / (cfg.report == mfi::cli::ReportFormat::Json ? "report.json"
                                                                              : "report.csv"))
                       .string()
                << "\n";
    } else if (*flow) {
      mfi::cli::run_flow(to_paths(inputs), to_config(flags));
    } else if (*metrics) {
      std::cout << mfi::cli::run_metrics(to_paths(generated), to_paths(truth)).dump(2) << "\n";
    } else if (*bench) {
      std::cout << mfi::cli::run_bench(suite, to_config(flags));
    } else if (*upconvert) {
      auto frames = to_paths(inputs);
      if (!manifest.empty()) {
        if (!frames.empty()) throw mfi::InvalidArgument("give either a manifest or frames, not both");
        frames = mfi::io::read_manifest(manifest).frames;
      }
      for (const auto& p : mfi::cli::run_upconvert(frames, factor, to_config(flags))) {
        std::cout << p.string() << "\n";
      }
    } else if (*render) {
      mfi::cli::run_render(scene, times, to_config(flags));
    }
  } catch (const mfi::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
