// Copyright 2026 The Lumen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// lumen generate | estimate | evaluate
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
// Failures print exactly one line to stderr:
//   lumen: error kind=<usage|data|numerical> reason="<text>"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lumen/lumen.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int fail(ExitCode code, const std::string& reason) {
  static const char* kinds[] = {"ok", "usage", "data", "numerical"};
  std::string escaped;
  for (char c : reason) {
    if (c == '"' || c == '\\') escaped += '\\';
    escaped += c == '\n' ? ' ' : c;
  }
  std::cerr << "lumen: error kind=" << kinds[code] << " reason=\"" << escaped << "\"\n";
  return code;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("lumen");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("LUMEN_LOG")) {
    const auto lvl = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only honor recognized ones.
    if (lvl != spdlog::level::off || std::string(env) == "off") spdlog::set_level(lvl);
  }
}

/// "64" -> (64,64); "64x48" -> (64,48).
std::pair<int, int> parse_extent(const std::string& s, const char* what) {
  const auto x = s.find('x');
  try {
    std::size_t used = 0;
    if (x == std::string::npos) {
      const int n = std::stoi(s, &used);
      if (used != s.size() || n <= 0) throw std::invalid_argument(s);
      return {n, n};
    }
    const int a = std::stoi(s.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(s);
    const std::string rest = s.substr(x + 1);
    const int b = std::stoi(rest, &used);
    if (used != rest.size() || a <= 0 || b <= 0) throw std::invalid_argument(s);
    return {a, b};
  } catch (const std::logic_error&) {
    throw UsageError(std::string("bad ") + what + " '" + s + "' (expected N or WxH)");
  }
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string scene = "plane";
  std::vector<double> disparity{0.5};
  std::string views = "3";
  std::string size = "64";
  std::uint64_t seed = 1;
  double noise = 0.0;
  double kappa = 1.0;
  double cutoff = 0.25;
  int edge = -1;
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  lumen::SceneSpec spec;
  std::tie(spec.width, spec.height) = parse_extent(a.size, "--size");
  std::tie(spec.views_s, spec.views_t) = parse_extent(a.views, "--views");
  spec.center = {spec.views_s / 2, spec.views_t / 2};
  spec.texture_seed = a.seed;
  spec.noise_sigma = a.noise;
  spec.kappa_k = a.kappa;
  spec.texture_cutoff = a.cutoff;
  const auto need = [&](std::size_t n) {
    if (a.disparity.size() != n) {
      throw UsageError("--scene " + a.scene + " takes " + std::to_string(n) + " --disparity value(s)");
    }
  };
  if (a.scene == "plane") {
    need(1);
    spec.kind = lumen::PlaneScene{a.disparity[0]};
  } else if (a.scene == "step") {
    need(2);
    spec.kind = lumen::StepScene{a.disparity[0], a.disparity[1], a.edge >= 0 ? a.edge : spec.width / 2};
  } else if (a.scene == "slope") {
    need(2);
    spec.kind = lumen::SlopeScene{a.disparity[0], a.disparity[1]};
  } else {
    throw UsageError("unknown scene '" + a.scene + "'");
  }
  try {
    spec.validate();
  } catch (const lumen::ContractError& ex) {
    throw UsageError(ex.what());
  }
  const auto synth = lumen::generate(spec);
  lumen::save_lightfield(synth.lf, a.out);
  lumen::write_pfm(synth.ground_truth, fs::path(a.out) / "gt.pfm");
  spdlog::info("wrote {}x{} light-field with {}x{} views to {}", spec.width, spec.height, spec.views_s, spec.views_t,
               a.out);
  return kOk;
}

// ---------------------------------------------------------------------------

struct EstimateArgs {
  std::string input;
  std::string out;
  std::optional<double> alpha;
  std::optional<double> gamma;
  std::string profile;
  double sigma = 0.5;
  double eta = 0.8;
  int levels = 11;
  std::string color_space = "hsv";
  std::string penalizer = "tvl1";
  double sor = 1.88;
  int iters = 10;
  int lag_steps = 10;
  bool postproc = false;
  double occ_threshold = 0.01;
  int median_radius = 7;
  int threads = 1;
  std::string gt;
};

/// alpha, gamma pairs for --profile. Values are per-dataset choices, not universal defaults.
struct Profile {
  const char* name;
  double alpha;
  double gamma;
};
constexpr Profile kProfiles[] = {
    {"synthetic", 10.0, 5.0},
    {"lytro-like", 20.0, 2.0},
};

/// Shortest decimal that round-trips.
std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string describe(const lumen::PipelineConfig& cfg, const EstimateArgs& a, int effective_levels) {
  std::ostringstream o;
  o << "[config]\n"
    << "input=" << a.input << "\n"
    << "profile=" << (a.profile.empty() ? "none" : a.profile) << "\n"
    << "alpha=" << num(cfg.solver.alpha) << "\n"
    << "gamma=" << num(cfg.gamma) << "\n"
    << "sigma=" << num(cfg.sigma) << "\n"
    << "eta=" << num(cfg.eta) << "\n"
    << "levels=" << cfg.levels << "\n"
    << "effective_levels=" << effective_levels << "\n"
    << "color_space=" << lumen::to_string(cfg.color_space) << "\n"
    << "penalizer=" << lumen::to_string(cfg.solver.penalizer) << "\n"
    << "sor=" << num(cfg.solver.sor_omega) << "\n"
    << "inner_iterations=" << cfg.solver.inner_iterations << "\n"
    << "lag_steps=" << cfg.solver.lag_steps << "\n"
    << "residual_tol=" << num(cfg.solver.residual_tol) << "\n"
    << "epsilon_s=" << num(cfg.solver.epsilon_s) << "\n"
    << "epsilon_g=" << num(cfg.solver.epsilon_g) << "\n"
    << "epsilon_G=" << num(cfg.solver.epsilon_G) << "\n"
    << "postproc=" << (cfg.postproc_enabled ? 1 : 0) << "\n"
    << "occ_threshold=" << num(cfg.postproc.occlusion_threshold) << "\n"
    << "box_radius=" << cfg.postproc.box_radius << "\n"
    << "median_radius=" << cfg.postproc.window_radius << "\n"
    << "sigma_color=" << num(cfg.postproc.sigma_color) << "\n"
    << "sigma_spatial=" << num(cfg.postproc.sigma_spatial) << "\n"
    << "threads=" << cfg.threads << "\n";
  return o.str();
}

int run_estimate(const EstimateArgs& a) {
  lumen::PipelineConfig cfg;
  double alpha = 0.0;
  double gamma = 0.0;
  if (!a.profile.empty()) {
    const Profile* p = nullptr;
    for (const auto& candidate : kProfiles)
      if (a.profile == candidate.name) p = &candidate;
    if (!p) throw UsageError("unknown profile '" + a.profile + "' (synthetic, lytro-like)");
    alpha = p->alpha;
    gamma = p->gamma;
  } else if (!a.alpha || !a.gamma) {
    throw UsageError("estimate needs --alpha and --gamma, or --profile");
  }
  if (a.alpha) alpha = *a.alpha;
  if (a.gamma) gamma = *a.gamma;

  cfg.solver.alpha = alpha;
  cfg.gamma = gamma;
  cfg.sigma = a.sigma;
  cfg.eta = a.eta;
  cfg.levels = a.levels;
  cfg.color_space = a.color_space == "rgb" ? lumen::ColorSpace::RGB : lumen::ColorSpace::HSV;
  cfg.solver.penalizer = a.penalizer == "tvl2"    ? lumen::Penalizer::TV_L2
                         : a.penalizer == "image" ? lumen::Penalizer::IMAGE_DRIVEN
                                                  : lumen::Penalizer::TV_L1;
  cfg.solver.sor_omega = a.sor;
  cfg.solver.inner_iterations = a.iters;
  cfg.solver.lag_steps = a.lag_steps;
  cfg.postproc_enabled = a.postproc;
  cfg.postproc.occlusion_threshold = a.occ_threshold;
  cfg.postproc.window_radius = a.median_radius;
  cfg.postproc.sigma_spatial = 0.5 * a.median_radius;
  cfg.threads = a.threads;
  try {
    cfg.validate();
  } catch (const lumen::ContractError& ex) {
    throw UsageError(ex.what());
  }

  const lumen::LightField lf = lumen::load_lightfield(a.input);
  spdlog::info("loaded {}x{} light-field, {} valid views", lf.width(), lf.height(), lf.valid_count());

  std::optional<lumen::DisparityField> gt;
  if (!a.gt.empty()) gt = lumen::DisparityField(lumen::read_pfm(a.gt));
  const lumen::GroundTruthProbe probe{gt ? &*gt : nullptr, 0};
  const lumen::EstimateResult result = lumen::estimate(lf, cfg, probe);
  for (const auto& w : result.warnings) spdlog::warn("{}", w);

  fs::create_directories(a.out);
  const fs::path out(a.out);
  lumen::write_pfm(result.omega, out / "disparity.pfm");
  lumen::render_disparity_png(result.omega, std::nullopt, out / "disparity.png");

  std::ofstream diag(out / "diagnostics.txt", std::ios::trunc);
  diag << "# lumen estimate diagnostics\n" << describe(cfg, a, result.effective_levels);
  diag << "[warnings]\n";
  for (const auto& w : result.warnings) diag << "warning=" << w << "\n";
  diag << "[levels]\n";
  diag.precision(9);
  for (const auto& l : result.levels) {
    diag << "level=" << l.level << " width=" << l.width << " height=" << l.height << " sweeps=" << l.sweeps
         << " lag_steps=" << l.lag_steps << " residual=" << l.residual
         << " mean_abs_increment=" << l.mean_abs_increment;
    if (gt) diag << " error=" << l.error;
    diag << "\n";
    spdlog::debug("level {} {}x{} residual {:.3g}", l.level, l.width, l.height, l.residual);
  }
  if (result.occlusion) diag << "[postproc]\noccluded_pixels=" << result.occlusion->count() << "\n";
  if (!diag) throw lumen::DataError("cannot write diagnostics.txt");
  return kOk;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string est;
  std::string gt;
  double threshold = 0.002;
  double exclusion_floor = 1e-6;
  bool json = false;
  std::string out;
};

nlohmann::json to_json(const lumen::ErrorReport& r) {
  return {{"bad_pixel_fraction", r.bad_pixel_fraction}, {"threshold", r.threshold},
          {"mae", r.mae},
          {"rmse", r.rmse},
          {"evaluated_pixels", r.evaluated_pixels},
          {"excluded_pixels", r.excluded_pixels}};
}

int run_evaluate(const EvaluateArgs& a) {
  const lumen::Image est = lumen::read_pfm(a.est);
  const lumen::Image gt = lumen::read_pfm(a.gt);
  if (!est.same_shape(gt)) throw lumen::DataError("estimate and ground truth differ in size");
  const auto report = lumen::relative_error_report(est, gt, a.threshold, a.exclusion_floor);
  const std::string text = a.json ? to_json(report).dump(2) + "\n" : lumen::to_key_value(report);
  std::cout << text;
  if (!a.out.empty()) {
    const bool as_json = fs::path(a.out).extension() == ".json";
    std::ofstream o(a.out, std::ios::trunc);
    o << (as_json ? to_json(report).dump(2) + "\n" : lumen::to_key_value(report));
    if (!o) throw lumen::DataError("cannot write " + a.out);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"lumen: variational disparity estimation for light-fields"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write a synthetic light-field and its ground-truth disparity");
  g->add_option("--scene", gen.scene, "plane | step | slope")->check(CLI::IsMember({"plane", "step", "slope"}));
  g->add_option("--disparity", gen.disparity, "d (plane), d_left d_right (step), d_min d_max (slope)")
      ->expected(1, 2);
  g->add_option("--views", gen.views, "directional grid, N or SxT");
  g->add_option("--size", gen.size, "spatial size, N or WxH");
  g->add_option("--seed", gen.seed, "texture seed");
  g->add_option("--noise", gen.noise, "additive Gaussian noise sigma");
  g->add_option("--kappa", gen.kappa, "horizontal directional scale k");
  g->add_option("--cutoff", gen.cutoff, "texture band limit as a fraction of Nyquist");
  g->add_option("--edge", gen.edge, "step edge column (default: half width)");
  g->add_option("--out", gen.out, "output directory")->required();
  g->add_option("--threads", [](const CLI::results_t&) { return true; }, "accepted for symmetry; unused");

  EstimateArgs est;
  auto* e = app.add_subcommand("estimate", "Estimate the central-view disparity of a light-field directory");
  e->add_option("--input", est.input, "light-field directory")->required();
  e->add_option("--out", est.out, "output directory")->required();
  e->add_option("--alpha", est.alpha, "smoothness weight");
  e->add_option("--gamma", est.gamma, "gradient constancy weight");
  e->add_option("--profile", est.profile, "parameter profile: synthetic | lytro-like");
  e->add_option("--sigma", est.sigma, "Gaussian presmoothing sigma")->capture_default_str();
  e->add_option("--eta", est.eta, "pyramid downsampling factor")->capture_default_str();
  e->add_option("--levels", est.levels, "warping levels")->capture_default_str();
  e->add_option("--color-space", est.color_space, "rgb | hsv")->check(CLI::IsMember({"rgb", "hsv"}));
  e->add_option("--penalizer", est.penalizer, "tvl1 | tvl2 | image")->check(CLI::IsMember({"tvl1", "tvl2", "image"}));
  e->add_option("--sor", est.sor, "SOR relaxation factor")->capture_default_str();
  e->add_option("--iters", est.iters, "SOR sweeps per lag step")->capture_default_str();
  e->add_option("--lag-steps", est.lag_steps, "nonlinearity updates per level")->capture_default_str();
  e->add_flag("--postproc", est.postproc, "occlusion-aware guided median post-processing");
  e->add_option("--occ-threshold", est.occ_threshold, "occlusion threshold")->capture_default_str();
  e->add_option("--median-radius", est.median_radius, "guided median window radius")->capture_default_str();
  e->add_option("--threads", est.threads, "worker cap for warping and tensor assembly")->check(CLI::PositiveNumber);
  e->add_option("--gt", est.gt, "ground-truth PFM for per-level error diagnostics");

  EvaluateArgs ev;
  auto* v = app.add_subcommand("evaluate", "Compare a disparity PFM against ground truth");
  v->add_option("--est", ev.est, "estimated disparity PFM")->required();
  v->add_option("--gt", ev.gt, "ground-truth PFM")->required();
  v->add_option("--threshold", ev.threshold, "relative error threshold")->capture_default_str();
  v->add_option("--exclusion-floor", ev.exclusion_floor, "skip pixels with |gt| below this")->capture_default_str();
  v->add_flag("--json", ev.json, "print JSON instead of key=value");
  v->add_option("--report", ev.out, "also write the report (.json for JSON)");
  v->add_option("--threads", [](const CLI::results_t&) { return true; }, "accepted for symmetry; unused");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    return fail(kUsage, ex.what());
  }

  try {
    if (*g) return run_generate(gen);
    if (*e) return run_estimate(est);
    if (*v) return run_evaluate(ev);
  } catch (const UsageError& ex) {
    return fail(kUsage, ex.what());
  } catch (const lumen::NumericalError& ex) {
    return fail(kNumerical, ex.what());
  } catch (const lumen::DataError& ex) {
    return fail(kData, ex.what());
  } catch (const lumen::ContractError& ex) {
    return fail(kData, ex.what());
  } catch (const std::filesystem::filesystem_error& ex) {
    return fail(kData, ex.what());
  }
  return kUsage;
}
