#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hsfuse/hsfuse.hpp"

namespace hsfuse::cli {
namespace {

using Json = nlohmann::ordered_json;
constexpr const char* kVersion = "0.1.0";

struct Run {
  Json manifest;
  std::string manifest_path;  // empty: print to stdout
  Json timings = Json::object();
};

class StageTimer {
 public:
  explicit StageTimer(Json& timings) : timings_(timings) {}
  template <class F>
  auto operator()(const char* stage, F&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      record(stage, t0);
    } else {
      auto out = fn();
      record(stage, t0);
      return out;
    }
  }

 private:
  void record(const char* stage, std::chrono::steady_clock::time_point t0) {
    timings_[stage] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  Json& timings_;
};

std::pair<std::string, std::string> split_spec(const std::string& s) {
  const auto pos = s.find(':');
  if (pos == std::string::npos) return {s, ""};
  return {s.substr(0, pos), s.substr(pos + 1)};
}

double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ValidationError("cannot parse " + what + " from '" + s + "'");
  return v;
}

/// "block:k" or "gauss:sigma[:support]"; empty means block:factor.
KernelSpec parse_blur(const std::string& spec, int factor) {
  if (spec.empty()) return UniformBlock{factor};
  const auto [kind, rest] = split_spec(spec);
  if (kind == "block") {
    const double k = parse_number(rest, "block size");
    if (k != std::floor(k)) throw ValidationError("block size must be an integer");
    return UniformBlock{static_cast<int>(k)};
  }
  if (kind == "gauss") {
    const auto [sigma_s, support_s] = split_spec(rest);
    const double sigma = parse_number(sigma_s, "gaussian sigma");
    int support = 2 * static_cast<int>(std::ceil(3.0 * sigma)) + 1;
    if (!support_s.empty()) support = static_cast<int>(parse_number(support_s, "gaussian support"));
    return GaussianKernel{sigma, support};
  }
  throw ValidationError("unknown blur '" + spec + "' (expected block:k or gauss:sigma)");
}

SpectralResponse parse_srf(const std::string& spec, Index bands) {
  if (spec.empty() || spec == "default") return default_srf(bands);
  return load_srf_csv(spec);
}

Json metrics_json(const MetricReport& r) { return Json::parse(to_json(r)); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path);
}

/// Runs body, records status in the manifest and emits it. Returns the exit code.
template <class F>
int execute(Run& run, F&& body) {
  int code = kExitOk;
  std::string message;
  try {
    body();
  } catch (const ValidationError& e) {
    code = kExitValidation;
    message = e.what();
  } catch (const IoError& e) {
    code = kExitIo;
    message = e.what();
  } catch (const Error& e) {
    code = kExitNumerical;
    message = e.what();
  } catch (const std::exception& e) {
    code = 1;
    message = e.what();
  }
  run.manifest["timings"] = run.timings;
  run.manifest["status"] = code == kExitOk ? "ok" : "error";
  run.manifest["exit_code"] = code;
  run.manifest["error"] = code == kExitOk ? Json(nullptr) : Json(message);
  if (code != kExitOk) std::cerr << "error: " << message << "\n";

  const std::string text = run.manifest.dump(2) + "\n";
  if (run.manifest_path.empty()) {
    std::cout << text;
  } else {
    try {
      write_text(run.manifest_path, text);
    } catch (const IoError& e) {
      std::cerr << "error: " << e.what() << "\n";
      if (code == kExitOk) code = kExitIo;
    }
  }
  return code;
}

Json new_manifest(const std::string& command) {
  Json m;
  m["tool"] = "hsfuse";
  m["version"] = kVersion;
  m["command"] = command;
  m["threads"] = thread_count();
  m["config"] = Json::object();
  m["inputs"] = Json::object();
  m["outputs"] = Json::object();
  return m;
}

std::string default_manifest(const std::string& flag, const std::string& out) {
  return flag.empty() ? out + ".manifest.json" : flag;
}

// --- simulate -------------------------------------------------------------

struct SimulateOpts {
  Index bands = 31, size = 64, height = 0, width = 0, endmembers = 5;
  double smoothness = 4.0;
  std::uint64_t seed = 7;
  std::string out, dtype = "f64", manifest;
};

int cmd_simulate(const SimulateOpts& o) {
  Run run{new_manifest("simulate"), default_manifest(o.manifest, o.out)};
  SceneSpec spec;
  spec.bands = o.bands;
  spec.height = o.height > 0 ? o.height : o.size;
  spec.width = o.width > 0 ? o.width : o.size;
  spec.endmembers = o.endmembers;
  spec.smoothness = o.smoothness;
  spec.seed = o.seed;
  run.manifest["config"] = {{"bands", spec.bands},         {"height", spec.height},
                            {"width", spec.width},         {"endmembers", spec.endmembers},
                            {"smoothness", spec.smoothness}, {"seed", spec.seed},
                            {"dtype", o.dtype}};
  run.manifest["outputs"]["cube"] = o.out;
  StageTimer timed(run.timings);
  return execute(run, [&] {
    const Dtype dtype = parse_dtype(o.dtype);
    const HsiCube x = timed("generate", [&] { return generate_scene(spec); });
    timed("save", [&] { save_cube(o.out, x, dtype); });
  });
}

// --- degrade --------------------------------------------------------------

struct DegradeOpts {
  std::string in, blur, srf = "default", out_y, out_z, dtype = "f64", manifest;
  int factor = 32, phase_row = 0, phase_col = 0;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

int cmd_degrade(const DegradeOpts& o) {
  Run run{new_manifest("degrade"), default_manifest(o.manifest, o.out_y)};
  run.manifest["config"] = {{"blur", o.blur.empty() ? "block:" + std::to_string(o.factor) : o.blur},
                            {"factor", o.factor},
                            {"phase", {o.phase_row, o.phase_col}},
                            {"srf", o.srf},
                            {"noise", o.noise},
                            {"seed", o.seed},
                            {"dtype", o.dtype}};
  run.manifest["inputs"]["cube"] = o.in;
  run.manifest["outputs"] = {{"y", o.out_y}, {"z", o.out_z}};
  StageTimer timed(run.timings);
  return execute(run, [&] {
    const Dtype dtype = parse_dtype(o.dtype);
    const HsiCube x = timed("load", [&] { return load_cube(o.in); });
    const DegradationModel model{BlurOperator(x.height(), x.width(), parse_blur(o.blur, o.factor)),
                                 Downsampler(o.factor, o.phase_row, o.phase_col), parse_srf(o.srf, x.bands())};
    Observation obs = timed("degrade", [&] { return degrade(model, x); });
    if (o.noise > 0.0) {
      // independent streams for the two observations
      obs.y = add_noise(obs.y, o.noise, o.seed);
      obs.z = add_noise(obs.z, o.noise, o.seed + 1);
    }
    run.manifest["outputs"]["y_dims"] = obs.y.dims().str();
    run.manifest["outputs"]["z_dims"] = obs.z.dims().str();
    timed("save", [&] {
      save_cube(o.out_y, obs.y, dtype);
      save_cube(o.out_z, obs.z, dtype);
    });
  });
}

// --- fuse -----------------------------------------------------------------

struct FuseOpts {
  std::string y, z, prior = "naive", blur, srf = "default", out, ref, dtype = "f64", manifest;
  int factor = 32, phase_row = 0, phase_col = 0;
  HqsConfig hqs;
};

int cmd_fuse(const FuseOpts& o) {
  Run run{new_manifest("fuse"), default_manifest(o.manifest, o.out)};
  run.manifest["config"] = {{"mu", o.hqs.mu},
                            {"nu", o.hqs.nu},
                            {"rho", o.hqs.rho},
                            {"iters", o.hqs.max_iter},
                            {"tol", o.hqs.rel_tol},
                            {"rho_growth", o.hqs.rho_growth},
                            {"prior", o.prior},
                            {"blur", o.blur.empty() ? "block:" + std::to_string(o.factor) : o.blur},
                            {"factor", o.factor},
                            {"phase", {o.phase_row, o.phase_col}},
                            {"srf", o.srf},
                            {"dtype", o.dtype}};
  run.manifest["inputs"] = {{"y", o.y}, {"z", o.z}};
  if (!o.ref.empty()) run.manifest["inputs"]["ref"] = o.ref;
  run.manifest["outputs"]["cube"] = o.out;
  run.manifest["metrics"] = nullptr;
  run.manifest["objective_trace"] = Json::array();
  StageTimer timed(run.timings);

  return execute(run, [&] {
    const Dtype dtype = parse_dtype(o.dtype);
    o.hqs.validate();
    const auto [kind, prior_path] = split_spec(o.prior);
    PriorSource source;
    if (kind == "naive" && prior_path.empty())
      source = NaiveFusion{};
    else if (kind == "file" && !prior_path.empty())
      source = ExternalFile{prior_path};
    else
      throw ValidationError("prior must be 'naive' or 'file:<path>', got '" + o.prior + "'");
    if (const auto* f = std::get_if<ExternalFile>(&source)) run.manifest["inputs"]["prior"] = f->path.string();

    const HsiCube y = timed("load", [&] { return load_cube(o.y); });
    const HsiCube z = load_cube(o.z);
    const Index height = y.height() * o.factor, width = y.width() * o.factor;
    if (z.height() != height || z.width() != width)
      throw DimensionError("Z is " + z.dims().str() + " but Y " + y.dims().str() + " at factor " +
                           std::to_string(o.factor) + " implies " + std::to_string(height) + "x" +
                           std::to_string(width));
    const DegradationModel model{BlurOperator(height, width, parse_blur(o.blur, o.factor)),
                                 Downsampler(o.factor, o.phase_row, o.phase_col), parse_srf(o.srf, y.bands())};
    const HsiCube xt = timed("prior", [&] { return make_prior(source, y, z, model); });
    const FusionResult r = timed("fuse", [&] { return fuse(y, z, model, xt, o.hqs); });

    run.manifest["iterations"] = r.iterations;
    run.manifest["converged"] = r.converged;
    run.manifest["objective_trace"] = r.objective_trace;
    run.manifest["x_step_trace"] = r.x_step_trace;
    run.manifest["sylvester_residuals"] = r.sylvester_residuals;
    Json methods = Json::array();
    for (SolveMethod m : r.x_step_methods) methods.push_back(to_string(m));
    run.manifest["x_step_methods"] = methods;
    const Observation fit = degrade(model, r.x_hat);
    run.manifest["data_residuals"] = {{"y", norm(y - fit.y) / std::max(norm(y), 1e-300)},
                                      {"z", norm(z - fit.z) / std::max(norm(z), 1e-300)}};
    if (!o.ref.empty()) {
      const HsiCube ref = load_cube(o.ref);
      run.manifest["metrics"] = metrics_json(timed("evaluate", [&] { return evaluate(r.x_hat, ref, o.factor); }));
      run.manifest["prior_metrics"] = metrics_json(evaluate(xt, ref, o.factor));
    }
    timed("save", [&] { save_cube(o.out, r.x_hat, dtype); });
  });
}

// --- evaluate -------------------------------------------------------------

struct EvaluateOpts {
  std::string x_hat, ref, json, csv, manifest, psnr_mode = "mean";
  int factor = 32;
};

int cmd_evaluate(const EvaluateOpts& o) {
  std::string manifest_path = o.manifest;
  if (manifest_path.empty() && !o.json.empty()) manifest_path = o.json + ".manifest.json";
  if (manifest_path.empty() && !o.csv.empty()) manifest_path = o.csv + ".manifest.json";
  Run run{new_manifest("evaluate"), manifest_path};
  run.manifest["config"] = {{"factor", o.factor}, {"psnr_mode", o.psnr_mode}};
  run.manifest["inputs"] = {{"x_hat", o.x_hat}, {"ref", o.ref}};
  if (!o.json.empty()) run.manifest["outputs"]["json"] = o.json;
  if (!o.csv.empty()) run.manifest["outputs"]["csv"] = o.csv;
  run.manifest["metrics"] = nullptr;
  StageTimer timed(run.timings);
  return execute(run, [&] {
    MetricOptions opts;
    if (o.psnr_mode == "global")
      opts.psnr_mode = PsnrMode::GlobalMse;
    else if (o.psnr_mode != "mean")
      throw ValidationError("psnr mode must be 'mean' or 'global'");
    const HsiCube x_hat = timed("load", [&] { return load_cube(o.x_hat); });
    const HsiCube ref = load_cube(o.ref);
    const MetricReport r = timed("evaluate", [&] { return evaluate(x_hat, ref, o.factor, opts); });
    if (r.ergas_skipped_bands > 0)
      std::cerr << "warning: " << r.ergas_skipped_bands << " dark reference band(s) left out of ERGAS\n";
    run.manifest["metrics"] = metrics_json(r);
    if (!o.json.empty()) write_text(o.json, to_json(r) + "\n");
    if (!o.csv.empty()) write_text(o.csv, csv_header() + "\n" + to_csv_row(r) + "\n");
  });
}

// --- errormap -------------------------------------------------------------

struct ErrormapOpts {
  std::string x_hat, ref, out, manifest;
  std::optional<Index> band;
  std::optional<double> wavelength;
  double max_error = 0.1, wl_min = 400.0, wl_max = 700.0;
};

int cmd_errormap(const ErrormapOpts& o) {
  Run run{new_manifest("errormap"), default_manifest(o.manifest, o.out)};
  run.manifest["config"] = {{"band", o.band ? Json(*o.band) : Json(nullptr)},
                            {"wavelength", o.wavelength ? Json(*o.wavelength) : Json(nullptr)},
                            {"wavelength_range", {o.wl_min, o.wl_max}},
                            {"max_error", o.max_error}};
  run.manifest["inputs"] = {{"x_hat", o.x_hat}, {"ref", o.ref}};
  run.manifest["outputs"]["image"] = o.out;
  StageTimer timed(run.timings);
  return execute(run, [&] {
    if (o.band.has_value() == o.wavelength.has_value())
      throw ValidationError("give exactly one of --band and --wavelength");
    const HsiCube x_hat = timed("load", [&] { return load_cube(o.x_hat); });
    const HsiCube ref = load_cube(o.ref);
    const Index band = o.band ? *o.band : band_for_wavelength(*o.wavelength, ref.bands(), o.wl_min, o.wl_max);
    run.manifest["band"] = band;
    run.manifest["band_one_based"] = band + 1;
    timed("export", [&] { export_error_map(x_hat, ref, band, o.out, o.max_error); });
  });
}

void add_model_flags(CLI::App* cmd, std::string& blur, int& factor, int& phase_row, int& phase_col,
                     std::string& srf) {
  cmd->add_option("--blur", blur, "block:k or gauss:sigma[:support] (default block:<factor>)");
  cmd->add_option("--factor,-s", factor, "downsampling factor")->capture_default_str();
  cmd->add_option("--phase-row", phase_row, "decimation row offset")->capture_default_str();
  cmd->add_option("--phase-col", phase_col, "decimation column offset")->capture_default_str();
  cmd->add_option("--srf", srf, "SRF CSV path or 'default'")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Hyperspectral/RGB fusion super-resolution"};
  app.require_subcommand(1);
  std::optional<int> threads;
  app.add_option("--threads", threads, "worker threads (0 = all cores; env HSFUSE_THREADS)");

  SimulateOpts sim;
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic ground-truth cube");
  simulate->add_option("--bands", sim.bands)->capture_default_str();
  simulate->add_option("--size", sim.size, "square image side")->capture_default_str();
  simulate->add_option("--height", sim.height, "overrides --size");
  simulate->add_option("--width", sim.width, "overrides --size");
  simulate->add_option("--endmembers", sim.endmembers)->capture_default_str();
  simulate->add_option("--smoothness", sim.smoothness)->capture_default_str();
  simulate->add_option("--seed", sim.seed)->capture_default_str();
  simulate->add_option("--dtype", sim.dtype, "f32 or f64")->capture_default_str();
  simulate->add_option("--out,-o", sim.out)->required();
  simulate->add_option("--manifest", sim.manifest);

  DegradeOpts deg;
  auto* degrade_cmd = app.add_subcommand("degrade", "simulate the LR-HSI and HR-RGB observations");
  degrade_cmd->add_option("--in,-i", deg.in)->required();
  add_model_flags(degrade_cmd, deg.blur, deg.factor, deg.phase_row, deg.phase_col, deg.srf);
  degrade_cmd->add_option("--noise", deg.noise, "Gaussian noise sigma")->capture_default_str();
  degrade_cmd->add_option("--seed", deg.seed)->capture_default_str();
  degrade_cmd->add_option("--dtype", deg.dtype)->capture_default_str();
  degrade_cmd->add_option("--out-y", deg.out_y)->required();
  degrade_cmd->add_option("--out-z", deg.out_z)->required();
  degrade_cmd->add_option("--manifest", deg.manifest);

  FuseOpts fu;
  auto* fuse_cmd = app.add_subcommand("fuse", "reconstruct the HR-HSI");
  fuse_cmd->add_option("--y", fu.y, "LR hyperspectral cube")->required();
  fuse_cmd->add_option("--z", fu.z, "HR RGB cube")->required();
  fuse_cmd->add_option("--prior", fu.prior, "naive or file:<path>")->capture_default_str();
  add_model_flags(fuse_cmd, fu.blur, fu.factor, fu.phase_row, fu.phase_col, fu.srf);
  fuse_cmd->add_option("--mu", fu.hqs.mu)->capture_default_str();
  fuse_cmd->add_option("--nu", fu.hqs.nu)->capture_default_str();
  fuse_cmd->add_option("--rho", fu.hqs.rho)->capture_default_str();
  fuse_cmd->add_option("--iters,-K", fu.hqs.max_iter)->capture_default_str();
  fuse_cmd->add_option("--tol", fu.hqs.rel_tol)->capture_default_str();
  fuse_cmd->add_option("--rho-growth", fu.hqs.rho_growth)->capture_default_str();
  fuse_cmd->add_option("--ref", fu.ref, "ground truth for metrics in the manifest");
  fuse_cmd->add_option("--dtype", fu.dtype)->capture_default_str();
  fuse_cmd->add_option("--out,-o", fu.out)->required();
  fuse_cmd->add_option("--manifest", fu.manifest);

  EvaluateOpts ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "RMSE, PSNR, ERGAS, SAM, SSIM");
  evaluate_cmd->add_option("x_hat", ev.x_hat)->required();
  evaluate_cmd->add_option("ref", ev.ref)->required();
  evaluate_cmd->add_option("--factor,-s", ev.factor)->capture_default_str();
  evaluate_cmd->add_option("--psnr-mode", ev.psnr_mode, "mean or global")->capture_default_str();
  evaluate_cmd->add_option("--json", ev.json);
  evaluate_cmd->add_option("--csv", ev.csv);
  evaluate_cmd->add_option("--manifest", ev.manifest);

  ErrormapOpts em;
  auto* errormap_cmd = app.add_subcommand("errormap", "absolute error of one band as a PGM image");
  errormap_cmd->add_option("x_hat", em.x_hat)->required();
  errormap_cmd->add_option("ref", em.ref)->required();
  errormap_cmd->add_option("--band", em.band, "zero-based band index");
  errormap_cmd->add_option("--wavelength", em.wavelength, "nm, mapped to the nearest band centre");
  errormap_cmd->add_option("--wl-min", em.wl_min)->capture_default_str();
  errormap_cmd->add_option("--wl-max", em.wl_max)->capture_default_str();
  errormap_cmd->add_option("--max-error", em.max_error, "error mapped to 255")->capture_default_str();
  errormap_cmd->add_option("--out,-o", em.out)->required();
  errormap_cmd->add_option("--manifest", em.manifest);

  std::vector<std::string> rev(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rev.begin(), rev.end());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  int n = 0;
  if (threads) {
    n = *threads;
  } else if (const char* env = std::getenv("HSFUSE_THREADS")) {
    try {
      n = std::stoi(env);
    } catch (const std::exception&) {
      std::cerr << "error: HSFUSE_THREADS must be an integer\n";
      return kExitValidation;
    }
  }
  if (n < 0) {
    std::cerr << "error: thread count must be >= 0\n";
    return kExitValidation;
  }
  set_thread_count(n);

  if (*simulate) return cmd_simulate(sim);
  if (*degrade_cmd) return cmd_degrade(deg);
  if (*fuse_cmd) return cmd_fuse(fu);
  if (*evaluate_cmd) return cmd_evaluate(ev);
  return cmd_errormap(em);
}

}  // namespace hsfuse::cli
