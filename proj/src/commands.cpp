// Copyright 2026 The synthseg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "synthseg/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "synthseg/error.hpp"
#include "synthseg/eval.hpp"
#include "synthseg/image_io.hpp"
#include "synthseg/random.hpp"

namespace synthseg {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

std::string image_stem(std::uint64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06llu", static_cast<unsigned long long>(index + 1));
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Per-image outcome kept in memory until the dataset is assembled.
struct ImageOutcome {
  std::vector<InstanceAnnotation> annotations;
  std::vector<DroppedInstance> dropped;
  std::size_t placed = 0;
  std::string png_sha256;
  bool reused = false;
};

struct StageTimes {
  std::atomic<std::int64_t> scene_ns{0};
  std::atomic<std::int64_t> render_ns{0};
  std::atomic<std::int64_t> annotate_ns{0};
  std::atomic<std::int64_t> encode_ns{0};
  std::atomic<std::int64_t> write_ns{0};
};

void add_ns(std::atomic<std::int64_t>& slot, Clock::time_point t0) {
  slot += std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();
}

// Sidecar: a one-image dataset whose info carries the verification keys.
std::string sidecar_text(std::uint64_t seed, const std::string& cfg_hash, const ImageRecord& image,
                         const ImageOutcome& out) {
  CocoDataset d;
  d.images = {image};
  d.annotations = out.annotations;
  d.categories = default_categories();
  json dropped = json::array();
  for (const auto& dr : out.dropped) dropped.push_back({dr.instance_id, dr.visible_pixels});
  d.info = {{"seed", seed},
            {"config_hash", cfg_hash},
            {"png_sha256", out.png_sha256},
            {"placed", out.placed},
            {"dropped", dropped}};
  return serialize_dataset(d);
}

std::optional<ImageOutcome> try_resume(const fs::path& sidecar, const fs::path& png, std::uint64_t seed,
                                       const std::string& cfg_hash, const ImageRecord& image) {
  std::error_code ec;
  if (!fs::exists(sidecar, ec) || !fs::exists(png, ec)) return std::nullopt;
  try {
    CocoDataset d = parse_dataset(read_text_file(sidecar), sidecar.string());
    const json& info = d.info;
    if (info.value("seed", std::uint64_t{0}) != seed || info.value("config_hash", std::string()) != cfg_hash) {
      return std::nullopt;
    }
    if (d.images.size() != 1 || !(d.images[0] == image)) return std::nullopt;
    ImageOutcome out;
    out.png_sha256 = info.at("png_sha256").get<std::string>();
    if (sha256_hex(read_binary_file(png)) != out.png_sha256) return std::nullopt;
    out.annotations = std::move(d.annotations);
    out.placed = info.at("placed").get<std::size_t>();
    for (const auto& dr : info.at("dropped")) {
      out.dropped.push_back({dr.at(0).get<std::uint32_t>(), dr.at(1).get<std::uint64_t>()});
    }
    out.reused = true;
    return out;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::array<std::uint8_t, 3> hsv_to_rgb8(double h, double s, double v) {
  const double c = v * s;
  const double hp = h * 6.0;
  const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp) % 6) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  const double m = v - c;
  auto q = [&](double u) { return static_cast<std::uint8_t>(std::lround(std::clamp(u + m, 0.0, 1.0) * 255.0)); };
  return {q(r), q(g), q(b)};
}

}  // namespace

std::vector<Mesh> load_meshes(const GeneratorConfig& config) {
  std::vector<Mesh> meshes;
  meshes.reserve(config.scene.model_paths.size());
  for (const auto& p : config.scene.model_paths) meshes.push_back(load_mesh(p));
  return meshes;
}

RenderedFrame render_frame(const GeneratorConfig& config, std::span<const Mesh> meshes, std::uint64_t index) {
  RenderedFrame out;
  out.spec = scene_for_image(config, index);
  out.plan = plan_scene(out.spec, meshes);
  out.frame = rasterize(out.plan.instances, meshes, out.plan.camera, out.plan.lights, out.spec.image_size,
                        config.render);
  std::vector<std::uint32_t> ids;
  for (const auto& inst : out.plan.instances.instances) ids.push_back(inst.instance_id);
  out.extraction = extract_instances(out.frame, static_cast<std::int64_t>(index + 1), config.min_area, ids);
  return out;
}

unsigned resolve_jobs(std::optional<unsigned> requested) {
  if (requested) {
    if (*requested == 0) throw ConfigError("--jobs must be >= 1");
    return *requested;
  }
  if (const char* env = std::getenv(kJobsEnvVar); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v == 0) throw ConfigError(std::string(kJobsEnvVar) + " must be a positive integer");
    return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

json run_generate(const GenerateOptions& opt) {
  const auto t_start = Clock::now();
  GeneratorConfig cfg = load_generator_config(opt.config_path);
  if (opt.seed) cfg.scene.seed = *opt.seed;
  const json cfg_json = config_to_json(cfg);
  const std::string cfg_hash = config_hash(cfg_json);
  const std::vector<Mesh> meshes = load_meshes(cfg);
  const double load_s = seconds_since(t_start);
  const unsigned jobs = std::min<std::uint64_t>(resolve_jobs(opt.jobs), std::max<std::uint64_t>(1, opt.count));

  const fs::path images_dir = opt.out_dir / "images";
  const fs::path cache_dir = opt.out_dir / ".cache";
  const fs::path ids_dir = opt.out_dir / "ids";
  std::error_code ec;
  fs::create_directories(images_dir, ec);
  if (!ec) fs::create_directories(cache_dir, ec);
  if (!ec && cfg.dump_id_png) fs::create_directories(ids_dir, ec);
  if (ec) throw IoError(opt.out_dir.string() + ": cannot create output directories: " + ec.message());

  const int width = cfg.scene.image_size.width;
  const int height = cfg.scene.image_size.height;
  std::vector<ImageOutcome> outcomes(opt.count);
  StageTimes times;
  std::atomic<std::uint64_t> next{0};
  std::atomic<std::uint64_t> done{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex mu;

  auto work = [&]() {
    for (;;) {
      if (failed.load()) return;
      const std::uint64_t i = next.fetch_add(1);
      if (i >= opt.count) return;
      try {
        const std::string stem = image_stem(i);
        const ImageRecord record{static_cast<std::int64_t>(i + 1), "images/" + stem + ".png", width, height};
        const fs::path png_path = images_dir / (stem + ".png");
        const fs::path sidecar = cache_dir / (stem + ".json");
        const std::uint64_t seed = image_seed(cfg.scene.seed, i);
        if (auto reused = try_resume(sidecar, png_path, seed, cfg_hash, record)) {
          outcomes[i] = std::move(*reused);
        } else {
          auto t0 = Clock::now();
          const SceneSpec spec = scene_for_image(cfg, i);
          const ScenePlan plan = plan_scene(spec, meshes);
          add_ns(times.scene_ns, t0);
          t0 = Clock::now();
          const FrameBuffers fb = rasterize(plan.instances, meshes, plan.camera, plan.lights, spec.image_size,
                                            cfg.render);
          add_ns(times.render_ns, t0);
          t0 = Clock::now();
          std::vector<std::uint32_t> ids;
          for (const auto& inst : plan.instances.instances) ids.push_back(inst.instance_id);
          Extraction ex = extract_instances(fb, record.id, cfg.min_area, ids);
          add_ns(times.annotate_ns, t0);
          t0 = Clock::now();
          const std::vector<std::uint8_t> png = encode_png_rgb(fb.width, fb.height, fb.rgb);
          std::vector<std::uint8_t> id_png;
          if (cfg.dump_id_png) {
            std::vector<std::uint16_t> ids16(fb.instance_id.begin(), fb.instance_id.end());
            id_png = encode_png_gray16(fb.width, fb.height, ids16);
          }
          add_ns(times.encode_ns, t0);
          t0 = Clock::now();
          ImageOutcome out;
          out.annotations = std::move(ex.annotations);
          out.dropped = std::move(ex.dropped);
          out.placed = plan.instances.instances.size();
          out.png_sha256 = sha256_hex(png);
          write_binary_file_atomic(png_path, png);
          if (cfg.dump_id_png) write_binary_file_atomic(ids_dir / (stem + ".png"), id_png);
          write_text_file_atomic(sidecar, sidecar_text(seed, cfg_hash, record, out));
          add_ns(times.write_ns, t0);
          outcomes[i] = std::move(out);
        }
        const std::uint64_t n = done.fetch_add(1) + 1;
        if (opt.progress != nullptr && (n % 25 == 0 || n == opt.count)) {
          std::lock_guard<std::mutex> lock(mu);
          *opt.progress << "generate: " << n << "/" << opt.count << " images, "
                        << seconds_since(t_start) << " s\n";
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
        failed = true;
        return;
      }
    }
  };

  const auto t_images = Clock::now();
  if (jobs <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  const double images_s = seconds_since(t_images);

  const auto t_assemble = Clock::now();
  CocoDataset dataset;
  dataset.categories = default_categories();
  json per_image = json::array();
  json image_seeds = json::array();
  json image_digests = json::array();
  std::int64_t next_ann = 1;
  std::size_t placed_total = 0, below_min = 0, occluded = 0, reused = 0;
  for (std::uint64_t i = 0; i < opt.count; ++i) {
    ImageOutcome& out = outcomes[i];
    dataset.images.push_back({static_cast<std::int64_t>(i + 1), "images/" + image_stem(i) + ".png", width, height});
    for (auto& a : out.annotations) {
      a.annotation_id = next_ann++;
      dataset.annotations.push_back(std::move(a));
    }
    json dropped = json::array();
    for (const auto& d : out.dropped) {
      (d.visible_pixels == 0 ? occluded : below_min) += 1;
      dropped.push_back({{"instance_id", d.instance_id}, {"visible_pixels", d.visible_pixels}});
    }
    placed_total += out.placed;
    reused += out.reused ? 1 : 0;
    per_image.push_back({{"image_id", i + 1},
                         {"placed", out.placed},
                         {"annotated", out.placed - out.dropped.size()},
                         {"dropped", dropped}});
    image_seeds.push_back(image_seed(cfg.scene.seed, i));
    image_digests.push_back(out.png_sha256);
  }
  dataset.info = {{"generator", "synthseg"},
                  {"version", kToolkitVersion},
                  {"master_seed", cfg.scene.seed},
                  {"config_hash", cfg_hash},
                  {"image_count", opt.count},
                  {"mask_kind", "visible"},
                  {"min_area", cfg.min_area}};
  write_dataset(dataset, opt.out_dir / "annotations.json");

  const json report = {{"images", opt.count},
                       {"instances_placed", placed_total},
                       {"annotations", dataset.annotations.size()},
                       {"dropped_below_min_area", below_min},
                       {"dropped_fully_occluded", occluded},
                       {"min_area", cfg.min_area},
                       {"per_image", per_image}};
  write_text_file_atomic(opt.out_dir / "generation_report.json", report.dump(1) + "\n");
  const double assemble_s = seconds_since(t_assemble);

  json manifest = {{"toolkit_version", kToolkitVersion},
                   {"config", cfg_json},
                   {"config_hash", cfg_hash},
                   {"master_seed", cfg.scene.seed},
                   {"output_dir", fs::absolute(opt.out_dir).lexically_normal().string()},
                   {"image_count", opt.count},
                   {"image_seeds", image_seeds},
                   {"image_sha256", image_digests},
                   {"jobs", jobs},
                   {"reused_images", reused},
                   {"timings_s",
                    {{"load", load_s},
                     {"images_wall", images_s},
                     {"scene_cpu", times.scene_ns.load() * 1e-9},
                     {"render_cpu", times.render_ns.load() * 1e-9},
                     {"annotate_cpu", times.annotate_ns.load() * 1e-9},
                     {"encode_cpu", times.encode_ns.load() * 1e-9},
                     {"write_cpu", times.write_ns.load() * 1e-9},
                     {"assemble", assemble_s},
                     {"total", seconds_since(t_start)}}}};
  write_text_file_atomic(opt.out_dir / "manifest.json", manifest.dump(1) + "\n");
  if (opt.progress != nullptr) {
    *opt.progress << "generate: done, " << opt.count << " images (" << reused << " reused), "
                  << dataset.annotations.size() << " annotations, jobs " << jobs << ", "
                  << seconds_since(t_start) << " s\n";
  }
  return manifest;
}

json run_mix(const MixOptions& opt) {
  const CocoDataset real = read_dataset(opt.real_path);
  const CocoDataset pool = read_dataset(opt.synthetic_path);
  for (std::size_t n : opt.settings) {
    if (n > pool.images.size()) {
      throw MixError("setting " + std::to_string(n) + " exceeds synthetic pool of " +
                     std::to_string(pool.images.size()) + " images");
    }
  }
  MixSpec spec;
  spec.split = opt.fractions;
  spec.seed = opt.seed;
  std::error_code ec;
  fs::create_directories(opt.out_dir, ec);
  if (ec) throw IoError(opt.out_dir.string() + ": cannot create: " + ec.message());
  const fs::path out_abs = fs::absolute(opt.out_dir).lexically_normal();
  auto prefix_for = [&](const fs::path& source) {
    std::string rel = fs::absolute(source).lexically_normal().parent_path().lexically_relative(out_abs).generic_string();
    if (rel.empty() || rel == ".") return std::string();
    return rel + "/";
  };
  spec.real_prefix = prefix_for(opt.real_path);
  spec.synthetic_prefix = prefix_for(opt.synthetic_path);

  RealSplit split = split_real(real, spec);
  for (CocoDataset* d : {&split.val, &split.test}) {
    for (auto& im : d->images) im.file_name = spec.real_prefix + im.file_name;
  }
  write_dataset(split.val, opt.out_dir / "real_val.json");
  write_dataset(split.test, opt.out_dir / "real_test.json");

  json settings = json::array();
  for (std::size_t n : opt.settings) {
    spec.synthetic_count = n;
    auto [train, report] = compose_training_set(split.train, pool, spec);
    report.real_val = split.val.images.size();
    report.real_test = split.test.images.size();
    train.info["mix"] = report.to_json();
    const std::string file = "train_syn-" + std::to_string(n) + ".json";
    write_dataset(train, opt.out_dir / file);
    settings.push_back({{"synthetic_count", n}, {"file", file}, {"report", report.to_json()}});
  }
  const json summary = {{"seed", opt.seed},
                        {"fractions", {opt.fractions.train, opt.fractions.val, opt.fractions.test}},
                        {"real_images", real.images.size()},
                        {"synthetic_pool", pool.images.size()},
                        {"nested_synthetic_subsets", true},
                        {"val_file", "real_val.json"},
                        {"test_file", "real_test.json"},
                        {"settings", settings}};
  write_text_file_atomic(opt.out_dir / "mix_summary.json", summary.dump(1) + "\n");
  return summary;
}

std::string run_evaluate(const fs::path& gt_path, const fs::path& dets_path, const EvalOptions& kinds) {
  const CocoDataset gt = read_dataset(gt_path);
  const std::vector<Detection> dets = read_detections(dets_path, gt);
  const EvalReport report = evaluate(gt, dets, kinds);
  return format_summary(report) + "\n" + format_table(report);
}

json run_inspect(const fs::path& dataset_path, const std::optional<fs::path>& manifest_path) {
  const CocoDataset d = read_dataset(dataset_path);
  std::vector<std::size_t> per_image(d.images.size(), 0);
  std::vector<std::int64_t> ids;
  for (const auto& im : d.images) ids.push_back(im.id);
  std::sort(ids.begin(), ids.end());
  std::uint64_t area_sum = 0, area_min = 0, area_max = 0;
  for (const auto& a : d.annotations) {
    const auto it = std::lower_bound(ids.begin(), ids.end(), a.image_id);
    ++per_image[static_cast<std::size_t>(it - ids.begin())];
    area_sum += a.area;
    area_min = area_min == 0 ? a.area : std::min(area_min, a.area);
    area_max = std::max(area_max, a.area);
  }
  const std::size_t n_img = d.images.size();
  const std::size_t n_ann = d.annotations.size();
  json stats = {
      {"valid", true},
      {"images", n_img},
      {"annotations", n_ann},
      {"categories", d.categories.size()},
      {"instances_per_image",
       {{"min", n_img ? *std::min_element(per_image.begin(), per_image.end()) : 0},
        {"mean", n_img ? static_cast<double>(n_ann) / static_cast<double>(n_img) : 0.0},
        {"max", n_img ? *std::max_element(per_image.begin(), per_image.end()) : 0},
        {"images_without_annotations", std::count(per_image.begin(), per_image.end(), std::size_t{0})}}},
      {"area",
       {{"min", area_min},
        {"mean", n_ann ? static_cast<double>(area_sum) / static_cast<double>(n_ann) : 0.0},
        {"max", area_max}}},
  };
  if (manifest_path) {
    const json manifest = json::parse(read_text_file(*manifest_path));
    const std::string stored = manifest.at("config_hash").get<std::string>();
    if (config_hash(manifest.at("config")) != stored) {
      throw Error(manifest_path->string() + ": config hash does not match the stored config");
    }
    const fs::path root = manifest_path->parent_path();
    const auto& digests = manifest.at("image_sha256");
    for (std::size_t i = 0; i < digests.size(); ++i) {
      const fs::path png = root / "images" / (image_stem(i) + ".png");
      if (sha256_hex(read_binary_file(png)) != digests[i].get<std::string>()) {
        throw Error(png.string() + ": digest does not match the manifest");
      }
    }
    stats["manifest"] = {{"config_hash", stored}, {"images_verified", digests.size()}};
  }
  return stats;
}

std::array<std::uint8_t, 3> palette_color(std::uint32_t instance_id) {
  if (instance_id == 0) return {0, 0, 0};
  constexpr double kGolden = 0.6180339887498949;
  const double h = std::fmod(0.11 + kGolden * static_cast<double>(instance_id), 1.0);
  return hsv_to_rgb8(h, 0.7, 0.95);
}

std::vector<std::uint8_t> run_preview(const fs::path& config_path, std::optional<std::uint64_t> seed,
                                      const fs::path& out_file) {
  GeneratorConfig cfg = load_generator_config(config_path);
  if (seed) cfg.scene.seed = *seed;
  const std::vector<Mesh> meshes = load_meshes(cfg);
  const RenderedFrame f = render_frame(cfg, meshes, 0);
  const int w = f.frame.width;
  const int h = f.frame.height;
  std::vector<std::uint8_t> canvas(static_cast<std::size_t>(2 * w) * h * 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t src = f.frame.index(x, y);
      const std::size_t left = (static_cast<std::size_t>(y) * 2 * w + x) * 3;
      const std::size_t right = left + static_cast<std::size_t>(w) * 3;
      const auto c = palette_color(f.frame.instance_id[src]);
      for (int k = 0; k < 3; ++k) {
        canvas[left + k] = f.frame.rgb[src * 3 + k];
        canvas[right + k] = c[k];
      }
    }
  }
  std::vector<std::uint8_t> png = encode_png_rgb(2 * w, h, canvas);
  if (out_file.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(out_file.parent_path(), ec);
  }
  write_binary_file_atomic(out_file, png);
  return png;
}

}  // namespace synthseg
