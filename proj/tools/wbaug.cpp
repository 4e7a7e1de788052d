// Copyright 2026 The wbaug Authors
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

// Command-line front end: build-model, augment, correct, info, synth.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "wbaug/error.hpp"
#include "wbaug/image_io.hpp"
#include "wbaug/model.hpp"
#include "wbaug/parallel.hpp"
#include "wbaug/pipeline.hpp"
#include "wbaug/synth.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kDataError = 2, kModelError = 3 };

int report(const std::exception& e, int code) {
  std::cerr << "wbaug: " << e.what() << '\n';
  return code;
}

std::vector<wbaug::WbSetting> parse_settings(const std::string& list) {
  std::vector<wbaug::WbSetting> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const auto s = wbaug::parse_setting(item);
    if (!s) throw CLI::ValidationError("--settings", "unknown setting '" + item + "'");
    out.push_back(*s);
  }
  return out;
}

struct BuildArgs {
  std::string manifest, output, direction = "emulate";
  std::size_t bins = 60, k = wbaug::kDefaultNeighbors, threads = 0;
  double sigma = wbaug::kDefaultSigma;
};

int run_build(const BuildArgs& a) {
  wbaug::ModelParams params;
  const auto dir = wbaug::parse_direction(a.direction);
  if (!dir) {
    std::cerr << "wbaug: --direction must be 'emulate' or 'correct'\n";
    return kUsage;
  }
  params.direction = *dir;
  params.histogram.bins = a.bins;
  params.neighbors = a.k;
  params.sigma = a.sigma;
  try {
    const auto manifest = wbaug::read_manifest(a.manifest);
    const auto result = wbaug::build_model(manifest, params, a.threads);
    std::cout << result.report.to_text();
    wbaug::save_model(result.model, a.output);
    std::cout << "model: " << a.output << '\n'
              << "checksum: " << wbaug::model_checksum(result.model) << '\n';
  } catch (const wbaug::Error& e) {
    return report(e, kDataError);
  }
  return kOk;
}

struct BatchArgs {
  std::string model, output, settings, naming = "{stem}_{setting}{ext}";
  std::vector<std::string> inputs;
  std::size_t k = 0;
  double sigma = 0.0;
  bool no_screen = false;
};

int run_batch_command(const BatchArgs& a, wbaug::BatchMode mode) {
  wbaug::AugmentationRequest req;
  req.model_path = a.model;
  req.output_dir = a.output;
  req.mode = mode;
  req.k = a.k;
  req.sigma = a.sigma;
  req.grayscale_screen = !a.no_screen;
  req.naming = a.naming;
  for (const auto& in : a.inputs) req.inputs.emplace_back(in);
  try {
    req.settings = parse_settings(a.settings);
  } catch (const CLI::Error& e) {
    std::cerr << "wbaug: " << e.what() << '\n';
    return kUsage;
  }
  try {
    const auto manifest = wbaug::run_batch(req);
    std::cout << "processed: " << manifest.processed() << '\n'
              << "skipped: " << manifest.skipped() << '\n'
              << "manifest: " << (fs::path(a.output) / wbaug::kRunManifestName).string()
              << '\n';
  } catch (const wbaug::Error& e) {
    return report(e, kModelError);
  }
  return kOk;
}

int run_info(const std::string& path) {
  try {
    std::cout << wbaug::describe_model(wbaug::load_model(path));
  } catch (const wbaug::Error& e) {
    return report(e, kModelError);
  }
  return kOk;
}

struct SynthArgs {
  std::string output, config;
  std::vector<std::string> bases;
  std::size_t count = 60, width = 128, height = 96, threads = 0;
  std::uint64_t seed = 1;
};

int run_synth(const SynthArgs& a) {
  try {
    wbaug::CameraEmulation emu = wbaug::CameraEmulation::defaults();
    if (!a.config.empty()) {
      std::ifstream in(a.config);
      if (!in) throw wbaug::Error(wbaug::ErrorKind::Io, a.config + ": cannot open config");
      emu = wbaug::CameraEmulation::parse(
          std::string((std::istreambuf_iterator<char>(in)), {}));
    }
    std::vector<wbaug::NamedImage> bases;
    if (a.bases.empty()) {
      for (std::size_t i = 0; i < a.count; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "scene_%04zu", i);
        bases.push_back({name, wbaug::random_base_image(a.seed + i, a.width, a.height)});
      }
    } else {
      for (const auto& p : a.bases)
        bases.push_back({fs::path(p).stem().string(), wbaug::read_image(p).image});
    }
    const auto out = wbaug::make_manifest(bases, emu, a.output, a.threads);
    for (const auto& [name, reason] : out.excluded)
      std::cout << "excluded: " << name << ": " << reason << '\n';
    std::cout << "groups: " << out.manifest.groups.size() << '\n'
              << "files: " << out.files_written << '\n'
              << "manifest: " << out.manifest_path.string() << '\n';
  } catch (const wbaug::Error& e) {
    return report(e, kDataError);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"White-balance error emulation and correction"};
  app.require_subcommand(1);

  BuildArgs build;
  auto* b = app.add_subcommand("build-model", "Fit a model from a paired dataset manifest");
  b->add_option("manifest", build.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  b->add_option("-o,--output", build.output, "Model file to write")->required();
  b->add_option("--direction", build.direction, "emulate (correct->cast) or correct (cast->correct)")
      ->check(CLI::IsMember({"emulate", "correct"}));
  b->add_option("--bins", build.bins, "Histogram bins per axis")->check(CLI::Range(5, 1024));
  b->add_option("--k", build.k, "Default neighbor count")->check(CLI::PositiveNumber);
  b->add_option("--sigma", build.sigma, "Default RBF bandwidth")->check(CLI::PositiveNumber);
  b->add_option("--threads", build.threads, "Worker threads (default: WBAUG_THREADS or all cores)");

  BatchArgs aug;
  auto* a = app.add_subcommand("augment", "Render inputs under emulated white-balance settings");
  a->add_option("model", aug.model, "Emulation model")->required();
  a->add_option("inputs", aug.inputs, "Input images (.png, .ppm)");
  a->add_option("-o,--output", aug.output, "Output directory")->required();
  a->add_option("--settings", aug.settings, "Comma-separated settings, e.g. 2850K_CS,7500K_AS");
  a->add_option("--k", aug.k, "Neighbor count")->check(CLI::PositiveNumber);
  a->add_option("--sigma", aug.sigma, "RBF bandwidth")->check(CLI::PositiveNumber);
  a->add_flag("--no-grayscale-screen", aug.no_screen, "Process grayscale inputs too");
  a->add_option("--naming", aug.naming, "Output name pattern ({stem}, {setting}, {ext})");

  BatchArgs cor;
  auto* c = app.add_subcommand("correct", "Remove white-balance casts with a correction model");
  c->add_option("model", cor.model, "Correction model")->required();
  c->add_option("inputs", cor.inputs, "Input images (.png, .ppm)");
  c->add_option("-o,--output", cor.output, "Output directory")->required();
  c->add_option("--k", cor.k, "Neighbor count")->check(CLI::PositiveNumber);
  c->add_option("--sigma", cor.sigma, "RBF bandwidth")->check(CLI::PositiveNumber);
  c->add_option("--naming", cor.naming, "Output name pattern ({stem}, {setting}, {ext})");
  cor.no_screen = true;

  std::string info_path;
  auto* i = app.add_subcommand("info", "Print model parameters");
  i->add_option("model", info_path, "Model file")->required();

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic paired dataset and manifest");
  s->add_option("-o,--output", synth.output, "Output directory")->required();
  s->add_option("bases", synth.bases, "Base images (default: generated scenes)");
  s->add_option("--count", synth.count, "Generated scene count")->check(CLI::PositiveNumber);
  s->add_option("--seed", synth.seed, "Scene seed");
  s->add_option("--width", synth.width, "Scene width")->check(CLI::PositiveNumber);
  s->add_option("--height", synth.height, "Scene height")->check(CLI::PositiveNumber);
  s->add_option("--config", synth.config, "Gains/tone-curve config file");
  s->add_option("--threads", synth.threads, "Worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (*b) return run_build(build);
  if (*a) return run_batch_command(aug, wbaug::BatchMode::Augment);
  if (*c) return run_batch_command(cor, wbaug::BatchMode::Correct);
  if (*i) return run_info(info_path);
  if (*s) return run_synth(synth);
  return kUsage;
}
