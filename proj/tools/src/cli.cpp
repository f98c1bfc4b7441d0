#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "unistitch/unistitch.hpp"

namespace unistitch::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kBackendEnv = "STITCH_BACKEND_URL";

struct ValueFlag {
  const char* key;
  const char* type;
  const char* help;
};

constexpr ValueFlag kValueFlags[] = {
    {"lambda", "REAL", "seam-band divisor"},
    {"delta", "INT", "seam-band multiplier"},
    {"kg", "INT", "distance-transform kernel size (3 or 5)"},
    {"radius", "INT", "coarse-rectangling neighborhood radius"},
    {"eps1", "INT", "seam inpainting strength (0-255)"},
    {"eps2", "INT", "rectangling inpainting strength (0-255)"},
    {"steps", "INT", "reverse-process steps"},
    {"guidance", "REAL", "classifier-free guidance scale"},
    {"seed", "UINT", "random seed"},
    {"prompt", "TEXT", "text prompt passed to the backend"},
};

struct BoolFlag {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr BoolFlag kBoolFlags[] = {
    {"--no-coarse-rect", "no_coarse_rect", "skip Telea coarse rectangling"},
    {"--no-weighted-init", "no_weighted_init", "condition on the binary content mask"},
    {"--no-weighted-inpaint", "no_weighted_inpaint", "use the binary inpaint mask at every step"},
};

/// Config flags shared by every subcommand that runs the pipeline.
struct ConfigOptions {
  std::optional<std::string> config_file;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> value_opts;
  std::map<std::string, CLI::Option*> bool_opts;

  void attach(CLI::App& app) {
    const auto defaults = config_to_map(StitchConfig{});
    app.add_option("--config", config_file, "key = value config file (flags override it)");
    for (const auto& f : kValueFlags) {
      std::string help = f.help;
      const std::string def = defaults.at(f.key);
      help += " [default: " + (def.empty() ? std::string("\"\"") : def) + "]";
      value_opts[f.key] =
          app.add_option(std::string("--") + f.key, values[f.key], help)->type_name(f.type);
    }
    for (const auto& f : kBoolFlags) bool_opts[f.key] = app.add_flag(f.flag, f.help);
  }

  StitchConfig resolve() const {
    StitchConfig cfg;
    if (config_file) cfg = load_config(*config_file, cfg);
    for (const auto& [key, opt] : value_opts) {
      if (opt->count() > 0) apply_config_value(cfg, key, values.at(key));
    }
    for (const auto& [key, opt] : bool_opts) {
      if (opt->count() > 0) apply_config_value(cfg, key, "true");
    }
    validate_config(cfg);
    return cfg;
  }
};

struct InputOptions {
  std::string left;
  std::string right;
  std::string homography;
  std::string prealigned;

  void attach(CLI::App& app) {
    app.add_option("--left", left, "left (reference) image");
    app.add_option("--right", right, "right image");
    app.add_option("--homography", homography, "JSON file {\"h\": [9 reals]} mapping right into left");
    app.add_option("--prealigned", prealigned, "directory with warp1, warp2, mask1, mask2 images");
  }
};

enum class Mode { Homography, Prealigned };

struct JobSpec {
  Mode mode = Mode::Homography;
  fs::path left;
  fs::path right;
  fs::path homography;
  fs::path prealigned;
  fs::path out;
  StitchConfig config;
  std::string backend_url;
  bool dump_artifacts = false;
  bool dump_step_masks = false;
};

/// Error raised with the name of the stage that produced it.
struct StageError {
  std::string stage;
  Error error;
};

template <typename Fn>
auto in_stage(const std::string& stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw StageError{stage, e};
  } catch (const std::filesystem::filesystem_error& e) {
    throw StageError{stage, Error(ErrorCode::Io, e.what())};
  }
}

void usage_error(const std::string& msg) { throw StageError{"arguments", Error(ErrorCode::InvalidArgument, msg)}; }

JobSpec job_from_inputs(const InputOptions& in) {
  JobSpec spec;
  const bool any_pair = !in.left.empty() || !in.right.empty() || !in.homography.empty();
  if (!in.prealigned.empty()) {
    if (any_pair) usage_error("--prealigned cannot be combined with --left/--right/--homography");
    spec.mode = Mode::Prealigned;
    spec.prealigned = in.prealigned;
    return spec;
  }
  if (in.left.empty() || in.right.empty() || in.homography.empty()) {
    usage_error("homography mode needs --left, --right and --homography (or use --prealigned)");
  }
  spec.mode = Mode::Homography;
  spec.left = in.left;
  spec.right = in.right;
  spec.homography = in.homography;
  return spec;
}

std::string resolve_backend_url(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kBackendEnv); env != nullptr) return env;
  return {};
}

std::unique_ptr<InpaintBackend> make_backend(const std::string& url) {
  if (url.empty()) return std::make_unique<ReferenceBackend>();
  return std::make_unique<RemoteBackend>(url);
}

struct LoadedJob {
  std::optional<WarpedPair> pair;  // prealigned mode
  ImageBuffer left;
  ImageBuffer right;
  Homography h;
  std::vector<InputHash> inputs;
};

LoadedJob load_inputs(const JobSpec& spec) {
  return in_stage("load inputs", [&] {
    LoadedJob job;
    auto hashed = [&](const std::string& role, const fs::path& path) {
      if (!fs::exists(path)) fail(ErrorCode::Io, "no such file: " + path.string());
      job.inputs.push_back({role, path.string(), sha256_file(path)});
      return path;
    };
    if (spec.mode == Mode::Prealigned) {
      if (!fs::is_directory(spec.prealigned)) {
        fail(ErrorCode::Io, "not a directory: " + spec.prealigned.string());
      }
      auto img = [&](const char* stem) {
        return read_image(hashed(stem, find_image(spec.prealigned, stem)));
      };
      ImageBuffer w1 = img("warp1");
      ImageBuffer w2 = img("warp2");
      ImageBuffer m1 = img("mask1");
      ImageBuffer m2 = img("mask2");
      job.pair = pair_from_prealigned(std::move(w1), std::move(w2), m1, m2);
    } else {
      job.left = read_image(hashed("left", spec.left));
      job.right = read_image(hashed("right", spec.right));
      job.h = read_homography(hashed("homography", spec.homography));
    }
    return job;
  });
}

WarpedPair registered_pair(const LoadedJob& job) {
  if (job.pair) return *job.pair;
  return in_stage("registration", [&] { return align_pair(job.left, job.right, job.h); });
}

std::string step_mask_name(int t) {
  std::ostringstream os;
  os << 't' << std::setw(4) << std::setfill('0') << t << ".png";
  return os.str();
}

void write_mask_set(const fs::path& dir, const WarpedPair& pair, const MaskSet& masks) {
  write_mask(dir / "mask_left.png", pair.m_wl);
  write_mask(dir / "mask_right.png", pair.m_wr);
  write_mask(dir / "mask_seam.png", masks.m_seam);
  write_mask(dir / "mask_rect.png", masks.m_rect);
  write_mask(dir / "mask_inpaint.png", masks.m_inpaint);
  write_weights(dir / "w_init.png", masks.w_init);
  write_weights(dir / "w_inpaint.png", masks.w_inpaint);
}

/// Runs one stitch job and writes its outputs. Returns the written stitched image.
ImageBuffer run_stitch_job(const JobSpec& spec) {
  LoadedJob job = load_inputs(spec);
  auto backend = in_stage("backend", [&] { return make_backend(spec.backend_url); });
  StitchOptions options;
  options.record_step_masks = spec.dump_step_masks;

  PipelineArtifacts art = in_stage("pipeline", [&] {
    if (job.pair) return stitch_prealigned(std::move(*job.pair), spec.config, *backend, options);
    return stitch(job.left, job.right, job.h, spec.config, *backend, options);
  });
  const BackendCapabilities caps = in_stage("backend", [&] { return backend->capabilities(); });

  in_stage("write outputs", [&] {
    fs::create_directories(spec.out);
    write_image(spec.out / "stitched.png", art.stitched);
    if (spec.dump_artifacts) {
      write_image(spec.out / "coarse_fusion.png", art.coarse_fusion);
      write_image(spec.out / "coarse_rectangling.png", art.coarse_rectangling);
      write_mask_set(spec.out, art.pair, art.masks);
    }
    if (spec.dump_step_masks) {
      const fs::path dir = spec.out / "step_masks";
      fs::create_directories(dir);
      const int n = spec.config.steps_n;
      for (std::size_t i = 0; i < art.per_step_masks.size(); ++i) {
        write_mask(dir / step_mask_name(n - 1 - static_cast<int>(i)), art.per_step_masks[i]);
      }
    }
    RunManifest m;
    m.tool_version = version_string();
    m.mode = spec.mode == Mode::Prealigned ? "prealigned" : "homography";
    m.config = spec.config;
    m.inputs = job.inputs;
    m.backend = caps;
    m.backend_url = spec.backend_url;
    for (const auto& [stage, sec] : art.stage_seconds) m.timings.push_back({stage, sec});
    write_manifest(spec.out, m);
  });
  return art.stitched;
}

int report(const std::string& command, const StageError& e) {
  std::cerr << "unistitch " << command << ": " << e.stage << ": " << to_string(e.error.code())
            << ": " << e.error.what() << '\n';
  return exit_code_for(e.error.code());
}

template <typename Fn>
int guarded(const std::string& command, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError& e) {
    return report(command, e);
  } catch (const Error& e) {
    return report(command, StageError{"run", e});
  } catch (const std::exception& e) {
    std::cerr << "unistitch " << command << ": internal error: " << e.what() << '\n';
    return kPipeline;
  }
}

/// Batch layout: one subdirectory per job, either prealigned (warp1 ...)
/// or left/right images next to homography.json.
std::vector<JobSpec> batch_jobs(const fs::path& dir, const JobSpec& base) {
  if (!fs::is_directory(dir)) {
    throw StageError{"load inputs", Error(ErrorCode::Io, "not a directory: " + dir.string())};
  }
  std::vector<fs::path> subdirs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) subdirs.push_back(entry.path());
  }
  std::sort(subdirs.begin(), subdirs.end());
  std::vector<JobSpec> jobs;
  for (const auto& sub : subdirs) {
    JobSpec job = base;
    job.out = base.out / sub.filename();
    if (fs::exists(sub / "homography.json")) {
      job.mode = Mode::Homography;
      job.left = in_stage("load inputs", [&] { return find_image(sub, "left"); });
      job.right = in_stage("load inputs", [&] { return find_image(sub, "right"); });
      job.homography = sub / "homography.json";
    } else {
      job.mode = Mode::Prealigned;
      job.prealigned = sub;
    }
    jobs.push_back(std::move(job));
  }
  if (jobs.empty()) {
    throw StageError{"load inputs", Error(ErrorCode::Io, "no job directories in " + dir.string())};
  }
  return jobs;
}

int run_batch(const std::vector<JobSpec>& jobs, int workers) {
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  std::vector<int> codes(jobs.size(), kOk);
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      codes[i] = guarded("stitch", [&] {
        run_stitch_job(jobs[i]);
        return int{kOk};
      });
      std::lock_guard lock(log_mutex);
      std::cout << (codes[i] == kOk ? "ok     " : "failed ") << jobs[i].out.string() << '\n';
    }
  };
  const int k = std::clamp(workers, 1, static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  for (int i = 1; i < k; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (int c : codes) {
    if (c != kOk) return c;
  }
  return kOk;
}

ImageBuffer contact_sheet(const std::vector<ImageBuffer>& tiles) {
  const int w = tiles.front().width();
  const int h = tiles.front().height();
  const int c = tiles.front().channels();
  ImageBuffer sheet(2 * w, 2 * h, c);
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    const int ox = static_cast<int>(i % 2) * w;
    const int oy = static_cast<int>(i / 2) * h;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        for (int ch = 0; ch < c; ++ch) sheet.at(ox + x, oy + y, ch) = tiles[i].at(x, y, ch);
      }
    }
  }
  return sheet;
}

struct AblationVariant {
  const char* dir;
  AblationFlags flags;
};

// Components are removed cumulatively: each variant also drops the
// components removed by the previous ones.
constexpr AblationVariant kAblations[] = {
    {"a_full", {false, false, false}},
    {"b_no_coarse_rect", {true, false, false}},
    {"c_no_weighted_init", {true, true, false}},
    {"d_no_weighted_inpaint", {true, true, true}},
};

std::string format_value(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

}  // namespace

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidArgument:
      return kUsage;
    case ErrorCode::Io:
    case ErrorCode::UnsupportedFormat:
    case ErrorCode::CorruptFile:
      return kIo;
    case ErrorCode::BackendUnavailable:
    case ErrorCode::BackendShapeMismatch:
    case ErrorCode::NonFiniteLatent:
    case ErrorCode::ProviderError:
      return kBackend;
    case ErrorCode::DegenerateHomography:
    case ErrorCode::NoOverlap:
    case ErrorCode::TileTooSmall:
    case ErrorCode::ZeroVector:
      return kPipeline;
  }
  return kPipeline;
}

int run(int argc, char** argv) {
  CLI::App app{"unistitch: rectangular image stitching with weighted-mask guided inpainting"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  // stitch
  auto* stitch_cmd = app.add_subcommand("stitch", "stitch one pair or a batch of pairs");
  InputOptions stitch_in;
  ConfigOptions stitch_cfg;
  std::string stitch_out;
  std::string stitch_backend;
  std::string batch_dir;
  int jobs = 1;
  bool dump_artifacts = false;
  bool dump_step_masks = false;
  stitch_in.attach(*stitch_cmd);
  stitch_cmd->add_option("--batch", batch_dir, "directory of job subdirectories");
  stitch_cmd->add_option("--jobs", jobs, "parallel jobs in batch mode")->capture_default_str()
      ->check(CLI::PositiveNumber);
  stitch_cmd->add_option("--out", stitch_out, "output directory")->required();
  stitch_cmd->add_option("--backend", stitch_backend,
                         std::string("denoiser URL; falls back to $") + kBackendEnv +
                             ", then the built-in reference backend");
  stitch_cmd->add_flag("--dump-artifacts", dump_artifacts, "write fusion, rectangling and mask images");
  stitch_cmd->add_flag("--dump-step-masks", dump_step_masks, "write per-step latent masks");
  stitch_cfg.attach(*stitch_cmd);

  // masks
  auto* masks_cmd = app.add_subcommand("masks", "write the mask and weight images only");
  InputOptions masks_in;
  ConfigOptions masks_cfg;
  std::string masks_out;
  masks_in.attach(*masks_cmd);
  masks_cmd->add_option("--out", masks_out, "output directory")->required();
  masks_cfg.attach(*masks_cmd);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "content consistency score over a directory");
  std::string eval_dir;
  std::string provider = "builtin";
  std::string provider_url;
  std::string csv_out;
  int tiles = 4;
  std::string aggregation = "concat";
  std::string pair_mode = "mean";
  eval_cmd->add_option("dir", eval_dir, "directory of sample subfolders (stitched, fusion, left, right)")
      ->required();
  eval_cmd->add_option("--provider", provider, "embedding provider")
      ->capture_default_str()
      ->check(CLI::IsMember({"builtin", "remote"}));
  eval_cmd->add_option("--backend", provider_url,
                       std::string("provider URL for --provider remote; falls back to $") + kBackendEnv);
  eval_cmd->add_option("--out", csv_out, "CSV file (default: stdout)");
  eval_cmd->add_option("--tiles", tiles, "tiles per image (perfect square)")->capture_default_str();
  eval_cmd->add_option("--aggregation", aggregation, "tile aggregation")
      ->capture_default_str()
      ->check(CLI::IsMember({"concat", "mean"}));
  eval_cmd->add_option("--pair", pair_mode, "global input embedding")
      ->capture_default_str()
      ->check(CLI::IsMember({"mean", "side-by-side"}));

  // ablate
  auto* ablate_cmd = app.add_subcommand("ablate", "run the four ablation configurations");
  InputOptions ablate_in;
  ConfigOptions ablate_cfg;
  std::string ablate_out;
  std::string ablate_backend;
  ablate_in.attach(*ablate_cmd);
  ablate_cmd->add_option("--out", ablate_out, "output directory")->required();
  ablate_cmd->add_option("--backend", ablate_backend,
                         std::string("denoiser URL; falls back to $") + kBackendEnv);
  ablate_cfg.attach(*ablate_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (stitch_cmd->parsed()) {
    return guarded("stitch", [&] {
      JobSpec base;
      base.config = in_stage("arguments", [&] { return stitch_cfg.resolve(); });
      base.out = stitch_out;
      base.backend_url = resolve_backend_url(stitch_backend);
      base.dump_artifacts = dump_artifacts;
      base.dump_step_masks = dump_step_masks;
      if (!batch_dir.empty()) {
        if (!stitch_in.left.empty() || !stitch_in.right.empty() || !stitch_in.homography.empty() ||
            !stitch_in.prealigned.empty()) {
          usage_error("--batch cannot be combined with single-job inputs");
        }
        return run_batch(batch_jobs(batch_dir, base), jobs);
      }
      JobSpec spec = job_from_inputs(stitch_in);
      spec.config = base.config;
      spec.out = base.out;
      spec.backend_url = base.backend_url;
      spec.dump_artifacts = dump_artifacts;
      spec.dump_step_masks = dump_step_masks;
      run_stitch_job(spec);
      return int{kOk};
    });
  }

  if (masks_cmd->parsed()) {
    return guarded("masks", [&] {
      JobSpec spec = job_from_inputs(masks_in);
      spec.config = in_stage("arguments", [&] { return masks_cfg.resolve(); });
      const LoadedJob job = load_inputs(spec);
      const WarpedPair pair = registered_pair(job);
      const MaskSet masks = in_stage("masks", [&] { return build_masks(pair, spec.config); });
      in_stage("write outputs", [&] {
        fs::create_directories(masks_out);
        write_mask_set(masks_out, pair, masks);
      });
      std::cout << "domain " << pair.domain.w_star << 'x' << pair.domain.h_star << ", seam kernel "
                << masks.k_s << '\n';
      return int{kOk};
    });
  }

  if (eval_cmd->parsed()) {
    return guarded("eval", [&] {
      std::unique_ptr<ContentProvider> prov;
      if (provider == "remote") {
        const std::string url = resolve_backend_url(provider_url);
        if (url.empty()) usage_error(std::string("--provider remote needs --backend or $") + kBackendEnv);
        prov = std::make_unique<RemoteProvider>(url);
      } else {
        prov = std::make_unique<FingerprintProvider>();
      }
      CcsOptions opts;
      opts.tiles = tiles;
      opts.aggregation = aggregation == "mean" ? TileAggregation::MeanCosine : TileAggregation::Concatenate;
      opts.pair = pair_mode == "side-by-side" ? PairEmbedding::SideBySide : PairEmbedding::Mean;

      const fs::path root = eval_dir;
      if (!fs::is_directory(root)) {
        throw StageError{"load inputs", Error(ErrorCode::Io, "not a directory: " + root.string())};
      }
      std::vector<fs::path> samples;
      for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory()) samples.push_back(entry.path());
      }
      std::sort(samples.begin(), samples.end());
      if (samples.empty()) {
        throw StageError{"load inputs", Error(ErrorCode::Io, "no sample folders in " + root.string())};
      }

      std::ostringstream csv;
      csv << "image_id,ccs,ccs_n,ccs_g\n";
      CcsResult sum;
      for (const auto& dir : samples) {
        auto load = [&](const char* stem) {
          return in_stage("load inputs", [&] { return read_image(find_image(dir, stem)); });
        };
        const ImageBuffer stitched = load("stitched");
        const ImageBuffer fusion = load("fusion");
        const ImageBuffer left = load("left");
        const ImageBuffer right = load("right");
        const CcsResult r = in_stage("score " + dir.filename().string(),
                                     [&] { return ccs(stitched, fusion, left, right, *prov, opts); });
        csv << dir.filename().string() << ',' << format_value(r.ccs) << ',' << format_value(r.ccs_n)
            << ',' << format_value(r.ccs_g) << '\n';
        sum.ccs += r.ccs;
        sum.ccs_n += r.ccs_n;
        sum.ccs_g += r.ccs_g;
      }
      const double n = static_cast<double>(samples.size());
      csv << "mean," << format_value(sum.ccs / n) << ',' << format_value(sum.ccs_n / n) << ','
          << format_value(sum.ccs_g / n) << '\n';
      if (csv_out.empty()) {
        std::cout << csv.str();
      } else {
        in_stage("write outputs", [&] {
          std::ofstream out(csv_out);
          if (!out) fail(ErrorCode::Io, "cannot write " + csv_out);
          out << csv.str();
        });
      }
      return int{kOk};
    });
  }

  if (ablate_cmd->parsed()) {
    return guarded("ablate", [&] {
      JobSpec base = job_from_inputs(ablate_in);
      base.config = in_stage("arguments", [&] { return ablate_cfg.resolve(); });
      base.backend_url = resolve_backend_url(ablate_backend);
      base.dump_artifacts = true;
      std::vector<ImageBuffer> outputs;
      for (const auto& variant : kAblations) {
        JobSpec spec = base;
        spec.config.ablation = variant.flags;
        spec.out = fs::path(ablate_out) / variant.dir;
        outputs.push_back(run_stitch_job(spec));
        std::cout << "wrote " << spec.out.string() << '\n';
      }
      in_stage("write outputs", [&] {
        write_image(fs::path(ablate_out) / "sheet.png", contact_sheet(outputs));
      });
      return int{kOk};
    });
  }
  return kUsage;
}

}  // namespace unistitch::cli
