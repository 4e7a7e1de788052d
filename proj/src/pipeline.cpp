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

#include "wbaug/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <system_error>

#include "wbaug/error.hpp"
#include "wbaug/image_io.hpp"
#include "wbaug/parallel.hpp"

namespace wbaug {

namespace fs = std::filesystem;

bool detect_grayscale(const ImageBuffer& img) {
  const float* p = img.data().data();
  double sum = 0.0;
  for (std::size_t i = 0; i < img.pixel_count(); ++i, p += 3) {
    const double r = p[0];
    const double g = p[1];
    const double b = p[2];
    sum += (std::abs(r - g) + std::abs(g - b) + std::abs(b - r)) / 3.0;
  }
  return sum / static_cast<double>(img.pixel_count()) < 1.0 / 255.0;
}

Retrieval retrieve(const WbModel& model, const ImageBuffer& img, std::size_t k,
                   double sigma) {
  const ModelParams& p = model.params();
  const RgbUvHistogram h = compute_histogram(img, p.histogram);
  const CompactFeature v = project(model.pca(), h);
  Retrieval r;
  r.neighbors = knn_query(model.index(), v, k == 0 ? p.neighbors : k);
  r.weights = rbf_weights(r.neighbors.distances, sigma == 0.0 ? p.sigma : sigma);
  return r;
}

ColorTransform blended_transform(const WbModel& model, const Retrieval& r,
                                 const WbSetting& setting) {
  if (!model.has_setting(setting))
    fail(ErrorKind::InvalidInput,
         "setting " + setting_name(setting) + " is not in the model vocabulary");
  std::vector<ColorTransform> ms;
  ms.reserve(r.neighbors.ids.size());
  for (RecordId id : r.neighbors.ids)
    ms.push_back(model.record(id).transforms.at(setting).transform);
  return blend_transforms(r.weights, ms);
}

std::map<WbSetting, ImageBuffer> augment(const WbModel& model, const ImageBuffer& img,
                                         const AugmentOptions& options) {
  if (model.params().direction != Direction::Emulation)
    fail(ErrorKind::InvalidInput, "augment requires an emulation-direction model");
  const std::vector<WbSetting>& settings =
      options.settings.empty() ? model.vocabulary() : options.settings;
  for (const auto& s : settings)
    if (!model.has_setting(s))
      fail(ErrorKind::InvalidInput,
           "setting " + setting_name(s) + " is not in the model vocabulary");
  if (options.grayscale_screen && detect_grayscale(img))
    fail(ErrorKind::GrayscaleInput, kGrayscaleReason);

  const Retrieval r = retrieve(model, img, options.k, options.sigma);
  std::map<WbSetting, ImageBuffer> out;
  for (const auto& s : settings)
    out.emplace(s, apply_transform(blended_transform(model, r, s), img));
  return out;
}

ImageBuffer correct(const WbModel& model, const ImageBuffer& img,
                    const CorrectOptions& options) {
  if (model.params().direction != Direction::Correction)
    fail(ErrorKind::InvalidInput, "correct requires a correction-direction model");
  if (options.grayscale_screen && detect_grayscale(img))
    fail(ErrorKind::GrayscaleInput, kGrayscaleReason);
  const Retrieval r = retrieve(model, img, options.k, options.sigma);
  return apply_transform(blended_transform(model, r, WbSetting::corrected()), img);
}

// ---------------------------------------------------------------------------
// Batch

std::size_t RunManifest::processed() const {
  return static_cast<std::size_t>(
      std::count_if(images.begin(), images.end(), [](const auto& o) { return o.ok; }));
}

std::size_t RunManifest::skipped() const { return images.size() - processed(); }

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["model_checksum"] = model_checksum;
  j["mode"] = mode;
  j["k"] = k;
  j["sigma"] = sigma;
  j["settings"] = settings;
  j["processed"] = processed();
  j["skipped"] = skipped();
  auto& list = j["images"] = nlohmann::ordered_json::array();
  for (const auto& o : images) {
    nlohmann::ordered_json e;
    e["input"] = o.input;
    e["status"] = o.ok ? "ok" : "skipped";
    if (o.ok)
      e["outputs"] = o.outputs;
    else
      e["reason"] = o.reason;
    list.push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

namespace {

std::string substitute(std::string pattern, const std::string& key,
                       const std::string& value) {
  for (auto pos = pattern.find(key); pos != std::string::npos;
       pos = pattern.find(key, pos + value.size()))
    pattern.replace(pos, key.size(), value);
  return pattern;
}

std::string output_name(const std::string& pattern, const fs::path& input,
                        const std::string& setting) {
  std::string name = substitute(pattern, "{stem}", input.stem().string());
  name = substitute(name, "{setting}", setting);
  return substitute(name, "{ext}", input.extension().string());
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << text;
    if (!out) fail(ErrorKind::Io, path.string() + ": write failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::Io, path.string() + ": cannot move temporary file into place");
}

}  // namespace

RunManifest run_batch(const AugmentationRequest& request) {
  const WbModel model = load_model(request.model_path);
  const bool augmenting = request.mode == BatchMode::Augment;
  const Direction wanted = augmenting ? Direction::Emulation : Direction::Correction;
  if (model.params().direction != wanted)
    fail(ErrorKind::InvalidInput,
         std::string("model direction is '") + to_string(model.params().direction) +
             "' but this command needs '" + to_string(wanted) + "'");

  std::vector<WbSetting> settings;
  if (augmenting) {
    settings = request.settings.empty() ? model.vocabulary() : request.settings;
    for (const auto& s : settings)
      if (!model.has_setting(s))
        fail(ErrorKind::InvalidInput,
             "setting " + setting_name(s) + " is not in the model vocabulary");
  } else {
    settings = {WbSetting::corrected()};
  }

  RunManifest manifest;
  manifest.model_checksum = model_checksum(model);
  manifest.mode = augmenting ? "augment" : "correct";
  manifest.k = request.k == 0 ? model.params().neighbors : request.k;
  manifest.sigma = request.sigma == 0.0 ? model.params().sigma : request.sigma;
  for (const auto& s : settings) manifest.settings.push_back(setting_name(s));
  manifest.images.resize(request.inputs.size());

  std::error_code ec;
  fs::create_directories(request.output_dir, ec);
  if (ec) fail(ErrorKind::Io, request.output_dir.string() + ": cannot create directory");

  // Claim output names up front, in input order, so collisions resolve
  // deterministically.
  std::vector<std::vector<fs::path>> planned(request.inputs.size());
  std::set<fs::path> claimed;
  for (std::size_t i = 0; i < request.inputs.size(); ++i) {
    auto& outcome = manifest.images[i];
    outcome.input = request.inputs[i].string();
    bool collision = false;
    for (const auto& s : manifest.settings) {
      const fs::path out = request.output_dir / output_name(request.naming, request.inputs[i], s);
      collision = collision || claimed.contains(out);
      planned[i].push_back(out);
    }
    if (collision) {
      outcome.reason = "output name collides with an earlier input";
      planned[i].clear();
    } else {
      claimed.insert(planned[i].begin(), planned[i].end());
    }
  }

  const std::size_t workers = request.workers == 0 ? default_worker_count() : request.workers;
  parallel_for(request.inputs.size(), workers, [&](std::size_t i) {
    auto& outcome = manifest.images[i];
    if (planned[i].empty()) return;
    try {
      const LoadedImage in = read_image(request.inputs[i]);
      std::vector<ImageBuffer> results;
      if (augmenting) {
        AugmentOptions opts{settings, manifest.k, manifest.sigma, request.grayscale_screen};
        auto images = augment(model, in.image, opts);
        for (const auto& s : settings) results.push_back(std::move(images.at(s)));
      } else {
        CorrectOptions opts{manifest.k, manifest.sigma, false};
        results.push_back(correct(model, in.image, opts));
      }
      for (std::size_t j = 0; j < results.size(); ++j) {
        write_image(planned[i][j], results[j], in.bit_depth);
        outcome.outputs.push_back(planned[i][j].filename().string());
      }
      outcome.ok = true;
    } catch (const Error& e) {
      outcome.ok = false;
      outcome.outputs.clear();
      outcome.reason = e.what();
    }
  });

  write_text_atomic(request.output_dir / kRunManifestName, manifest.to_json());
  return manifest;
}

}  // namespace wbaug
