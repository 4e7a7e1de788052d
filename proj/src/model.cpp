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

#include "wbaug/model.hpp"

#include <algorithm>
#include <bit>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <system_error>

#include "wbaug/error.hpp"
#include "wbaug/image_io.hpp"
#include "wbaug/parallel.hpp"

namespace wbaug {

namespace fs = std::filesystem;

const char* to_string(Direction d) {
  return d == Direction::Emulation ? "emulate" : "correct";
}

std::optional<Direction> parse_direction(std::string_view name) {
  if (name == "emulate" || name == "emulation") return Direction::Emulation;
  if (name == "correct" || name == "correction") return Direction::Correction;
  return std::nullopt;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// ---------------------------------------------------------------------------
// WbModel

WbModel::WbModel(ModelParams params, std::vector<WbSetting> vocabulary,
                 PcaModel pca, std::vector<TrainingRecord> records)
    : params_(params),
      vocabulary_(std::move(vocabulary)),
      pca_(std::move(pca)),
      records_(std::move(records)) {
  std::sort(vocabulary_.begin(), vocabulary_.end());
  std::sort(records_.begin(), records_.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  if (pca_.output_dim() != params_.compact_dim ||
      pca_.input_dim() != params_.histogram.dimension())
    fail(ErrorKind::InvalidInput, "WbModel: PCA dimensions disagree with params");

  std::vector<RecordId> ids;
  std::vector<CompactFeature> features;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (r.feature.values.size() != params_.compact_dim)
      fail(ErrorKind::InvalidInput, "WbModel: record feature dimension mismatch");
    for (const auto& s : vocabulary_)
      if (!r.transforms.contains(s))
        fail(ErrorKind::InvalidInput,
             "WbModel: record lacks setting " + setting_name(s));
    for (const auto& [s, t] : r.transforms)
      if (t.transform.tag != s)
        fail(ErrorKind::InvalidInput, "WbModel: transform tag does not match key");
    by_id_.emplace(r.id, i);
    ids.push_back(r.id);
    features.push_back(r.feature);
  }
  index_ = FeatureIndex(std::move(ids), std::move(features));
}

const TrainingRecord& WbModel::record(RecordId id) const {
  const auto it = by_id_.find(id);
  if (it == by_id_.end())
    fail(ErrorKind::InvalidInput, "WbModel: unknown record id " + std::to_string(id));
  return records_[it->second];
}

bool WbModel::has_setting(const WbSetting& s) const {
  return std::binary_search(vocabulary_.begin(), vocabulary_.end(), s);
}

// ---------------------------------------------------------------------------
// Manifest

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void manifest_fail(std::size_t line, const std::string& what) {
  fail(ErrorKind::InvalidInput, "manifest line " + std::to_string(line) + ": " + what);
}

}  // namespace

DatasetManifest parse_manifest(std::string_view text, const fs::path& base_dir) {
  DatasetManifest manifest{base_dir, {}};
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    const std::string_view line = trim(text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    ManifestGroup group;
    group.line = line_no;
    std::string_view rest = line;
    bool first = true;
    while (true) {
      const auto semi = rest.find(';');
      const std::string_view field = trim(rest.substr(0, semi));
      if (first) {
        if (field.empty()) manifest_fail(line_no, "missing correct-image path");
        group.correct = std::string(field);
        first = false;
      } else if (!field.empty()) {
        const auto eq = field.find('=');
        if (eq == std::string_view::npos)
          manifest_fail(line_no, "expected setting=path, got '" + std::string(field) + "'");
        const std::string_view name = trim(field.substr(0, eq));
        const std::string_view path = trim(field.substr(eq + 1));
        if (path.empty()) manifest_fail(line_no, "empty path for " + std::string(name));
        if (name.starts_with("reference_")) {
          const auto style = parse_style_code(name.substr(10));
          if (!style) manifest_fail(line_no, "unknown reference '" + std::string(name) + "'");
          for (const auto& [st, p] : group.references)
            if (st == *style) manifest_fail(line_no, "duplicate " + std::string(name));
          group.references.emplace_back(*style, std::string(path));
        } else {
          const auto setting = parse_setting(name);
          if (!setting || setting->style == Style::Corrected)
            manifest_fail(line_no, "unknown setting '" + std::string(name) + "'");
          for (const auto& [s, p] : group.variants)
            if (s == *setting) manifest_fail(line_no, "duplicate setting " + std::string(name));
          group.variants.emplace_back(*setting, std::string(path));
        }
      }
      if (semi == std::string_view::npos) break;
      rest = rest.substr(semi + 1);
    }
    if (group.variants.empty()) manifest_fail(line_no, "group has no variants");
    manifest.groups.push_back(std::move(group));
  }
  return manifest;
}

DatasetManifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, path.string() + ": cannot open manifest");
  const std::string text((std::istreambuf_iterator<char>(in)), {});
  return parse_manifest(text, path.parent_path());
}

std::string format_manifest(const DatasetManifest& manifest) {
  std::string out;
  for (const auto& g : manifest.groups) {
    out += g.correct;
    for (const auto& [st, p] : g.references)
      out += ";reference_" + std::string(style_code(st)) + "=" + p;
    for (const auto& [s, p] : g.variants) out += ";" + setting_name(s) + "=" + p;
    out += '\n';
  }
  return out;
}

const std::string& ManifestGroup::reference_for(Style style) const {
  for (const auto& [s, p] : references)
    if (s == style) return p;
  return correct;
}

// ---------------------------------------------------------------------------
// Ingestion and build

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

StoredTransform fit_stored(const ImageBuffer& source, const ImageBuffer& target,
                           const WbSetting& tag, std::size_t max_pixels) {
  StoredTransform st;
  st.transform = fit_transform(source, target, max_pixels);
  st.transform.tag = tag;
  st.residual = mean_abs_error(apply_transform(st.transform, source), target);
  return st;
}

void check_same_size(const ImageBuffer& a, const ImageBuffer& b,
                     const std::string& path) {
  if (a.width() != b.width() || a.height() != b.height())
    fail(ErrorKind::InvalidInput,
         path + ": dimensions " + std::to_string(b.width()) + "x" +
             std::to_string(b.height()) + " differ from the correct image (" +
             std::to_string(a.width()) + "x" + std::to_string(a.height()) + ")");
}

void validate_params(const ModelParams& p) {
  if (p.histogram.bins < 2)
    fail(ErrorKind::InvalidInput, "histogram bins must be at least 2");
  if (p.compact_dim < 1 || p.compact_dim > p.histogram.dimension())
    fail(ErrorKind::InvalidInput,
         "compact dimension " + std::to_string(p.compact_dim) +
             " exceeds histogram dimension " + std::to_string(p.histogram.dimension()) +
             " (increase --bins)");
  if (p.neighbors < 1) fail(ErrorKind::InvalidInput, "k must be at least 1");
  if (!(p.sigma > 0.0)) fail(ErrorKind::InvalidInput, "sigma must be positive");
}

}  // namespace

std::vector<PendingRecord> ingest_group(const ManifestGroup& group,
                                        const fs::path& base_dir,
                                        const ModelParams& params) {
  const ImageBuffer correct = read_image(resolve(base_dir, group.correct)).image;
  std::vector<PendingRecord> out;
  if (params.direction == Direction::Emulation) {
    PendingRecord rec;
    rec.id = fnv1a64(group.correct);
    rec.histogram = compute_histogram(correct, params.histogram).bins;
    rec.provenance.push_back(group.correct);
    for (const auto& [setting, path] : group.variants) {
      const ImageBuffer cast = read_image(resolve(base_dir, path)).image;
      check_same_size(correct, cast, path);
      rec.transforms[setting] = fit_stored(correct, cast, setting, params.max_fit_pixels);
      rec.provenance.push_back(path);
    }
    out.push_back(std::move(rec));
  } else {
    std::map<Style, ImageBuffer> references;
    for (const auto& [style, path] : group.references) {
      references[style] = read_image(resolve(base_dir, path)).image;
      check_same_size(correct, references[style], path);
    }
    for (const auto& [setting, path] : group.variants) {
      const ImageBuffer cast = read_image(resolve(base_dir, path)).image;
      check_same_size(correct, cast, path);
      const auto ref = references.find(setting.style);
      const ImageBuffer& target = ref == references.end() ? correct : ref->second;
      PendingRecord rec;
      rec.id = fnv1a64(group.correct + "|" + setting_name(setting));
      rec.histogram = compute_histogram(cast, params.histogram).bins;
      rec.transforms[WbSetting::corrected()] =
          fit_stored(cast, target, WbSetting::corrected(), params.max_fit_pixels);
      rec.provenance = {path, group.reference_for(setting.style)};
      out.push_back(std::move(rec));
    }
  }
  return out;
}

BuildResult build_model(const DatasetManifest& manifest, const ModelParams& params,
                        std::size_t workers) {
  validate_params(params);
  const std::size_t needed = params.compact_dim + 1;
  if (manifest.groups.size() < needed)
    fail(ErrorKind::InvalidInput,
         "manifest has " + std::to_string(manifest.groups.size()) +
             " groups; at least " + std::to_string(needed) + " are required");

  const std::size_t n = manifest.groups.size();
  std::vector<std::vector<PendingRecord>> ingested(n);
  std::vector<std::string> errors(n);
  parallel_for(n, workers == 0 ? default_worker_count() : workers, [&](std::size_t i) {
    try {
      ingested[i] = ingest_group(manifest.groups[i], manifest.base_dir, params);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });

  BuildResult result;
  BuildReport& report = result.report;
  report.groups = n;
  std::set<RecordId> seen;
  std::vector<PendingRecord> pending;
  for (std::size_t i = 0; i < n; ++i) {
    GroupOutcome outcome{manifest.groups[i].line, manifest.groups[i].correct, false,
                         errors[i]};
    if (outcome.reason.empty()) {
      const bool dup = std::any_of(ingested[i].begin(), ingested[i].end(),
                                   [&](const auto& r) { return seen.contains(r.id); });
      if (dup) {
        outcome.reason = "duplicate group for " + outcome.correct;
      } else {
        outcome.accepted = true;
        for (auto& r : ingested[i]) {
          seen.insert(r.id);
          pending.push_back(std::move(r));
        }
      }
    }
    (outcome.accepted ? report.accepted : report.rejected)++;
    report.outcomes.push_back(std::move(outcome));
  }
  if (report.accepted == 0)
    fail(ErrorKind::DegenerateInput, "build failed: all " + std::to_string(n) +
                                         " groups were rejected");
  if (pending.size() < needed)
    fail(ErrorKind::InvalidInput,
         "only " + std::to_string(pending.size()) + " training records accepted; at least " +
             std::to_string(needed) + " are required");

  // Vocabulary: settings every accepted record provides.
  std::set<WbSetting> vocab;
  for (const auto& [s, t] : pending.front().transforms) vocab.insert(s);
  for (const auto& r : pending)
    std::erase_if(vocab, [&](const WbSetting& s) { return !r.transforms.contains(s); });
  if (vocab.empty())
    fail(ErrorKind::DegenerateInput, "build failed: no setting is shared by all groups");
  std::size_t dropped = 0;
  for (auto& r : pending)
    dropped += std::erase_if(r.transforms, [&](const auto& kv) { return !vocab.contains(kv.first); });
  if (dropped > 0)
    report.notes.push_back("dropped " + std::to_string(dropped) +
                           " transforms for settings missing from some groups");

  std::sort(pending.begin(), pending.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  const auto dim = static_cast<Eigen::Index>(params.histogram.dimension());
  Eigen::MatrixXd features(static_cast<Eigen::Index>(pending.size()), dim);
  for (std::size_t i = 0; i < pending.size(); ++i)
    features.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::RowVectorXd>(pending[i].histogram.data(), dim);
  PcaModel pca = fit_pca(features, params.compact_dim);

  std::vector<TrainingRecord> records;
  records.reserve(pending.size());
  for (auto& p : pending) {
    TrainingRecord r;
    r.id = p.id;
    r.feature = project(pca, p.histogram);
    r.transforms = std::move(p.transforms);
    r.provenance = std::move(p.provenance);
    records.push_back(std::move(r));
  }

  double total = 0.0;
  for (const auto& s : vocab) {
    double sum = 0.0;
    for (const auto& r : records) sum += r.transforms.at(s).residual;
    report.mean_residual[s] = sum / static_cast<double>(records.size());
    total += report.mean_residual[s];
  }
  report.overall_mean_residual = total / static_cast<double>(vocab.size());

  result.model = WbModel(params, {vocab.begin(), vocab.end()}, std::move(pca),
                         std::move(records));
  return result;
}

std::string BuildReport::to_text() const {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(6);
  out << "groups: " << groups << "\naccepted: " << accepted
      << "\nrejected: " << rejected << '\n';
  for (const auto& o : outcomes)
    if (!o.accepted)
      out << "rejected_group: line " << o.line << " " << o.correct << ": " << o.reason << '\n';
  for (const auto& [s, r] : mean_residual)
    out << "mean_fit_residual[" << setting_name(s) << "]: " << r << '\n';
  out << "mean_fit_residual: " << overall_mean_residual << '\n';
  for (const auto& note : notes) out << "note: " << note << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// WBM1 container

namespace {

constexpr char kMagic[4] = {'W', 'B', 'M', '1'};

class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
  }
  void raw(std::span<const std::uint8_t> bytes) {
    buf_.insert(buf_.end(), bytes.begin(), bytes.end());
  }
  void section(const char (&tag)[5], const ByteWriter& payload) {
    raw({reinterpret_cast<const std::uint8_t*>(tag), 4});
    u64(payload.buf_.size());
    raw(payload.buf_);
  }
  std::vector<std::uint8_t>& bytes() { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8() { return take(1)[0]; }
  std::uint32_t u32() {
    const auto b = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    const auto b = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const auto b = take(u32());
    return {b.begin(), b.end()};
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    if (n > bytes_.size() - pos_) fail(ErrorKind::Corruption, "model file truncated");
    const auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  ByteReader section(const char (&tag)[5]) {
    const auto t = take(4);
    if (std::memcmp(t.data(), tag, 4) != 0)
      fail(ErrorKind::Corruption, std::string("model file: expected section '") + tag + "'");
    return ByteReader(take(u64()));
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint64_t checksum(std::span<const std::uint8_t> bytes) {
  return fnv1a64({reinterpret_cast<const char*>(bytes.data()), bytes.size()});
}

void put_setting(ByteWriter& w, const WbSetting& s) {
  w.u32(s.temperature);
  w.u8(static_cast<std::uint8_t>(s.style));
}

WbSetting get_setting(ByteReader& r) {
  WbSetting s;
  s.temperature = r.u32();
  const std::uint8_t style = r.u8();
  if (style > static_cast<std::uint8_t>(Style::Corrected))
    fail(ErrorKind::Corruption, "model file: unknown style code");
  s.style = static_cast<Style>(style);
  return s;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

}  // namespace

std::vector<std::uint8_t> serialize_model(const WbModel& model) {
  const ModelParams& p = model.params();
  ByteWriter out;
  out.raw({reinterpret_cast<const std::uint8_t*>(kMagic), 4});
  out.u32(kModelFormatVersion);

  ByteWriter params;
  params.u32(static_cast<std::uint32_t>(p.direction));
  params.u32(static_cast<std::uint32_t>(p.histogram.bins));
  params.f64(p.histogram.lower);
  params.f64(p.histogram.upper);
  params.f64(p.histogram.epsilon);
  params.u32(static_cast<std::uint32_t>(p.compact_dim));
  params.u32(static_cast<std::uint32_t>(p.neighbors));
  params.f64(p.sigma);
  params.u32(static_cast<std::uint32_t>(p.max_fit_pixels));
  params.str(kKernelOrdering);
  params.str(kChromaConvention);
  params.u32(static_cast<std::uint32_t>(model.vocabulary().size()));
  for (const auto& s : model.vocabulary()) put_setting(params, s);
  out.section("PARM", params);

  const PcaModel& pca = model.pca();
  ByteWriter pcaw;
  pcaw.u32(static_cast<std::uint32_t>(pca.input_dim()));
  pcaw.u32(static_cast<std::uint32_t>(pca.output_dim()));
  for (Eigen::Index i = 0; i < pca.bias.size(); ++i) pcaw.f64(pca.bias(i));
  for (Eigen::Index c = 0; c < pca.coeff.cols(); ++c)
    for (Eigen::Index r = 0; r < pca.coeff.rows(); ++r) pcaw.f64(pca.coeff(r, c));
  for (Eigen::Index i = 0; i < pca.variances.size(); ++i) pcaw.f64(pca.variances(i));
  out.section("PCA ", pcaw);

  ByteWriter recs;
  recs.u32(static_cast<std::uint32_t>(model.records().size()));
  for (const auto& r : model.records()) {
    recs.u64(r.id);
    for (double v : r.feature.values) recs.f64(v);
    recs.u32(static_cast<std::uint32_t>(r.transforms.size()));
    for (const auto& [s, t] : r.transforms) {
      put_setting(recs, s);
      for (double v : t.transform.m) recs.f64(v);
      recs.f64(t.residual);
    }
    recs.u32(static_cast<std::uint32_t>(r.provenance.size()));
    for (const auto& name : r.provenance) recs.str(name);
  }
  out.section("RECS", recs);

  out.u64(checksum(out.bytes()));
  return std::move(out.bytes());
}

WbModel deserialize_model(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    fail(ErrorKind::Corruption, "not a WBM1 model file");
  ByteReader head(bytes.subspan(4, 4));
  const std::uint32_t version = head.u32();
  if (version != kModelFormatVersion)
    fail(ErrorKind::UnsupportedVersion,
         "model format version " + std::to_string(version) + " is not supported (expected " +
             std::to_string(kModelFormatVersion) + ")");
  const auto body = bytes.first(bytes.size() - 8);
  ByteReader tail(bytes.last(8));
  if (tail.u64() != checksum(body))
    fail(ErrorKind::Corruption, "model file checksum mismatch");

  ByteReader in(body.subspan(8));
  ModelParams p;
  ByteReader params = in.section("PARM");
  const std::uint32_t direction = params.u32();
  if (direction > 1) fail(ErrorKind::Corruption, "model file: unknown direction");
  p.direction = static_cast<Direction>(direction);
  p.histogram.bins = params.u32();
  p.histogram.lower = params.f64();
  p.histogram.upper = params.f64();
  p.histogram.epsilon = params.f64();
  p.compact_dim = params.u32();
  p.neighbors = params.u32();
  p.sigma = params.f64();
  p.max_fit_pixels = params.u32();
  if (params.str() != kKernelOrdering)
    fail(ErrorKind::UnsupportedVersion, "model uses a different kernel ordering");
  if (params.str() != kChromaConvention)
    fail(ErrorKind::UnsupportedVersion, "model uses a different chroma convention");
  std::vector<WbSetting> vocab(params.u32());
  for (auto& s : vocab) s = get_setting(params);

  ByteReader pcar = in.section("PCA ");
  const std::uint32_t d = pcar.u32();
  const std::uint32_t k = pcar.u32();
  if (d != p.histogram.dimension() || k != p.compact_dim)
    fail(ErrorKind::Corruption, "model file: PCA dimensions disagree with params");
  PcaModel pca;
  pca.bias.resize(d);
  pca.coeff.resize(d, k);
  pca.variances.resize(k);
  for (std::uint32_t i = 0; i < d; ++i) pca.bias(i) = pcar.f64();
  for (std::uint32_t c = 0; c < k; ++c)
    for (std::uint32_t r = 0; r < d; ++r) pca.coeff(r, c) = pcar.f64();
  for (std::uint32_t i = 0; i < k; ++i) pca.variances(i) = pcar.f64();

  ByteReader recr = in.section("RECS");
  std::vector<TrainingRecord> records(recr.u32());
  for (auto& r : records) {
    r.id = recr.u64();
    r.feature.values.resize(k);
    for (auto& v : r.feature.values) v = recr.f64();
    const std::uint32_t nt = recr.u32();
    for (std::uint32_t t = 0; t < nt; ++t) {
      const WbSetting s = get_setting(recr);
      StoredTransform st;
      st.transform.tag = s;
      for (auto& v : st.transform.m) v = recr.f64();
      st.residual = recr.f64();
      if (!r.transforms.emplace(s, st).second)
        fail(ErrorKind::Corruption, "model file: duplicate setting in record");
    }
    r.provenance.resize(recr.u32());
    for (auto& name : r.provenance) name = recr.str();
  }
  if (!in.done() || !params.done() || !pcar.done() || !recr.done())
    fail(ErrorKind::Corruption, "model file: trailing bytes in section");
  try {
    return WbModel(p, std::move(vocab), std::move(pca), std::move(records));
  } catch (const Error& e) {
    fail(ErrorKind::Corruption, std::string("model file: ") + e.what());
  }
}

void save_model(const WbModel& model, const fs::path& path) {
  const auto bytes = serialize_model(model);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) fail(ErrorKind::Io, path.string() + ": cannot open for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorKind::Io, path.string() + ": write failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::Io, path.string() + ": cannot move temporary file into place");
}

WbModel load_model(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, path.string() + ": cannot open model");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), {});
  return deserialize_model(bytes);
}

std::string model_checksum(const WbModel& model) {
  const auto bytes = serialize_model(model);
  ByteReader tail(std::span<const std::uint8_t>(bytes).last(8));
  return hex64(tail.u64());
}

std::string describe_model(const WbModel& model) {
  const ModelParams& p = model.params();
  std::ostringstream out;
  out << "format_version: " << kModelFormatVersion << '\n'
      << "direction: " << to_string(p.direction) << '\n'
      << "records: " << model.records().size() << '\n'
      << "settings: ";
  for (std::size_t i = 0; i < model.vocabulary().size(); ++i)
    out << (i ? "," : "") << setting_name(model.vocabulary()[i]);
  out << '\n'
      << "histogram_bins: " << p.histogram.bins << '\n'
      << "chroma_bounds: " << p.histogram.lower << ' ' << p.histogram.upper << '\n'
      << "black_level: " << p.histogram.epsilon << '\n'
      << "feature_dim: " << p.compact_dim << '\n'
      << "k: " << p.neighbors << '\n'
      << "sigma: " << p.sigma << '\n'
      << "max_fit_pixels: " << p.max_fit_pixels << '\n'
      << "kernel: " << kKernelOrdering << '\n'
      << "chroma_convention: " << kChromaConvention << '\n'
      << "checksum: " << model_checksum(model) << '\n';
  return out.str();
}

}  // namespace wbaug
