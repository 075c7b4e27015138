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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "synthseg/commands.hpp"
#include "synthseg/error.hpp"

namespace {

int report_error(const std::exception& e) {
  std::cerr << "error: " << e.what() << "\n";
  if (const auto* de = dynamic_cast<const synthseg::DatasetError*>(&e)) {
    for (const auto& v : de->violations()) std::cerr << "  [" << v.code << "] " << v.message << "\n";
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthseg: synthetic instance-segmentation data toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", synthseg::kToolkitVersion);

  synthseg::GenerateOptions gen;
  std::optional<std::uint64_t> gen_seed;
  std::optional<unsigned> gen_jobs;
  std::string gen_config, gen_out;
  auto* generate = app.add_subcommand("generate", "Render a synthetic dataset with annotations");
  generate->add_option("--config", gen_config, "YAML generator config")->required()->check(CLI::ExistingFile);
  generate->add_option("--count", gen.count, "Number of images")->required();
  generate->add_option("--out", gen_out, "Output directory")->required();
  generate->add_option("--seed", gen_seed, "Master seed (overrides the config)");
  generate->add_option("--jobs", gen_jobs, std::string("Worker threads (default: $") + synthseg::kJobsEnvVar +
                                               " or all cores)");
  bool gen_quiet = false;
  generate->add_flag("--quiet", gen_quiet, "No progress output");

  synthseg::MixOptions mix;
  std::string mix_real, mix_syn, mix_out;
  std::vector<double> fractions;
  auto* mixc = app.add_subcommand("mix", "Split a real dataset and compose hybrid training sets");
  mixc->add_option("--real", mix_real, "Real ground-truth COCO file")->required()->check(CLI::ExistingFile);
  mixc->add_option("--synthetic", mix_syn, "Synthetic pool COCO file")->required()->check(CLI::ExistingFile);
  mixc->add_option("--settings", mix.settings, "Synthetic counts, e.g. 0,250,500")->delimiter(',');
  mixc->add_option("--seed", mix.seed, "Split and sampling seed");
  mixc->add_option("--fractions", fractions, "train,val,test fractions")->delimiter(',')->expected(3);
  mixc->add_option("--out", mix_out, "Output directory")->required();

  std::string eval_gt, eval_dets, eval_kind = "both";
  auto* evalc = app.add_subcommand("evaluate", "Score detections against ground truth");
  evalc->add_option("--gt", eval_gt, "Ground-truth COCO file")->required()->check(CLI::ExistingFile);
  evalc->add_option("--dets", eval_dets, "Detections (COCO results array)")->required()->check(CLI::ExistingFile);
  evalc->add_option("--kind", eval_kind, "bbox, segm or both")->check(CLI::IsMember({"bbox", "segm", "both"}));

  std::string insp_path, insp_manifest;
  auto* inspect = app.add_subcommand("inspect", "Validate a dataset and print statistics");
  inspect->add_option("dataset", insp_path, "COCO file")->required()->check(CLI::ExistingFile);
  inspect->add_option("--manifest", insp_manifest, "Run manifest to verify")->check(CLI::ExistingFile);

  std::string prev_config, prev_out;
  std::optional<std::uint64_t> prev_seed;
  auto* preview = app.add_subcommand("preview", "Render one scene next to its false-colored id plane");
  preview->add_option("--config", prev_config, "YAML generator config")->required()->check(CLI::ExistingFile);
  preview->add_option("--seed", prev_seed, "Master seed (overrides the config)");
  preview->add_option("--out", prev_out, "Output PNG")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) {
      gen.config_path = gen_config;
      gen.out_dir = gen_out;
      gen.seed = gen_seed;
      gen.jobs = gen_jobs;
      gen.progress = gen_quiet ? nullptr : &std::cerr;
      synthseg::run_generate(gen);
    } else if (*mixc) {
      mix.real_path = mix_real;
      mix.synthetic_path = mix_syn;
      mix.out_dir = mix_out;
      if (!fractions.empty()) mix.fractions = {fractions[0], fractions[1], fractions[2]};
      const auto summary = synthseg::run_mix(mix);
      std::cerr << "mix: wrote " << summary.at("settings").size() << " training files to " << mix_out << "\n";
    } else if (*evalc) {
      synthseg::EvalOptions kinds;
      kinds.bbox = eval_kind != "segm";
      kinds.segm = eval_kind != "bbox";
      std::cout << synthseg::run_evaluate(eval_gt, eval_dets, kinds);
    } else if (*inspect) {
      std::optional<std::filesystem::path> manifest;
      if (!insp_manifest.empty()) manifest = insp_manifest;
      std::cout << synthseg::run_inspect(insp_path, manifest).dump(2) << "\n";
    } else if (*preview) {
      synthseg::run_preview(prev_config, prev_seed, prev_out);
    }
  } catch (const std::exception& e) {
    return report_error(e);
  }
  return 0;
}
