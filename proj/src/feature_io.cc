// Copyright (c) 2026 DCA Verification Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dca/feature_io.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "dca/binary_io.h"
#include "dca/error.h"

namespace dca {

namespace {

constexpr char kAvfMagic[] = "AVF1";
constexpr std::uint16_t kAvfVersion = 1;

void WriteClipMajor(ByteWriter& w, const Matrix& m) {
  for (std::size_t l = 0; l < m.cols(); ++l)
    for (std::size_t r = 0; r < m.rows(); ++r)
      w.F32(static_cast<float>(m(r, l)));
}

Matrix ReadClipMajor(ByteReader& r, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (std::size_t l = 0; l < cols; ++l)
    for (std::size_t d = 0; d < rows; ++d) m(d, l) = r.F32();
  m.CheckFinite("AVF1 features");
  return m;
}

}  // namespace

std::string EncodeAvf(const FeatureSequence& audio,
                      const FeatureSequence& visual) {
  if (audio.clips() != visual.clips()) {
    Fail(ErrorCode::kInvalidShape, "audio and visual clip counts differ");
  }
  ByteWriter w;
  w.Bytes(kAvfMagic);
  w.U16(kAvfVersion);
  w.U32(static_cast<std::uint32_t>(audio.dim()));
  w.U32(static_cast<std::uint32_t>(visual.dim()));
  w.U32(static_cast<std::uint32_t>(audio.clips()));
  WriteClipMajor(w, audio.data());
  WriteClipMajor(w, visual.data());
  return w.data();
}

FeaturePair DecodeAvf(const std::string& bytes) {
  ByteReader r(bytes, "AVF1 file");
  if (r.Bytes(4) != kAvfMagic) Fail(ErrorCode::kFormat, "bad AVF1 magic");
  const std::uint16_t version = r.U16();
  if (version != kAvfVersion) {
    Fail(ErrorCode::kFormat, "unsupported AVF1 version " + std::to_string(version));
  }
  const std::uint32_t d_a = r.U32();
  const std::uint32_t d_v = r.U32();
  const std::uint32_t clips = r.U32();
  if (d_a == 0 || d_v == 0 || clips == 0) {
    Fail(ErrorCode::kFormat, "AVF1 dimensions must be positive");
  }
  Matrix audio = ReadClipMajor(r, d_a, clips);
  Matrix visual = ReadClipMajor(r, d_v, clips);
  if (!r.done()) {
    Fail(ErrorCode::kCorruptFile,
         "trailing bytes in AVF1 file at byte offset " + std::to_string(r.offset()));
  }
  return {FeatureSequence(Modality::kAudio, std::move(audio)),
          FeatureSequence(Modality::kVisual, std::move(visual))};
}

void WriteAvf(const std::string& path, const FeatureSequence& audio,
              const FeatureSequence& visual) {
  WriteFileBytes(path, EncodeAvf(audio, visual));
}

FeaturePair LoadFeatures(const std::string& path) {
  try {
    return DecodeAvf(ReadFileBytes(path));
  } catch (const Error& e) {
    Fail(e.code(), path + ": " + e.what());
  }
}

Manifest ReadManifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open manifest " + path);
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  Manifest manifest;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  auto error = [&](const std::string& what) {
    Fail(ErrorCode::kParse,
         path + ": line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (have_header) continue;
      std::istringstream fields(line.substr(1));
      std::string token;
      while (fields >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) error("bad header token '" + token + "'");
        const std::string key = token.substr(0, eq);
        std::size_t value = 0;
        try {
          value = std::stoul(token.substr(eq + 1));
        } catch (const std::exception&) {
          error("bad header value '" + token + "'");
        }
        if (key == "d_a") manifest.d_a = value;
        else if (key == "d_v") manifest.d_v = value;
        else if (key == "L") manifest.clips = value;
        else error("unknown header key '" + key + "'");
      }
      have_header = true;
      continue;
    }
    if (!have_header) error("missing '# d_a=.. d_v=.. L=..' header");
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t tab; (tab = line.find('\t', start)) != std::string::npos;
         start = tab + 1) {
      fields.push_back(line.substr(start, tab - start));
    }
    fields.push_back(line.substr(start));
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() ||
        fields[2].empty()) {
      error("expected 'utterance_id<TAB>speaker_id<TAB>path'");
    }
    if (!ids.insert(fields[0]).second) {
      Fail(ErrorCode::kInvalidParameter,
           path + ": duplicate utterance id '" + fields[0] + "'");
    }
    std::filesystem::path file(fields[2]);
    if (file.is_relative()) file = base / file;
    if (!std::filesystem::exists(file)) {
      Fail(ErrorCode::kIo, path + ": feature file " + file.string() +
                               " does not exist");
    }
    manifest.entries.push_back({fields[0], fields[1], file.string()});
  }
  if (!have_header || manifest.d_a == 0 || manifest.d_v == 0 ||
      manifest.clips == 0) {
    Fail(ErrorCode::kParse, path + ": missing '# d_a=.. d_v=.. L=..' header");
  }
  return manifest;
}

void WriteManifest(const std::string& path, const Manifest& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path);
  out << "# d_a=" << manifest.d_a << " d_v=" << manifest.d_v
      << " L=" << manifest.clips << '\n';
  for (const ManifestEntry& e : manifest.entries) {
    out << e.utterance_id << '\t' << e.speaker_id << '\t' << e.path << '\n';
  }
}

std::vector<Utterance> LoadUtterances(const std::string& manifest_path) {
  const Manifest manifest = ReadManifest(manifest_path);
  std::vector<Utterance> utterances;
  for (const ManifestEntry& e : manifest.entries) {
    FeaturePair features = LoadFeatures(e.path);
    if (features.first.dim() != manifest.d_a ||
        features.second.dim() != manifest.d_v ||
        features.first.clips() != manifest.clips) {
      Fail(ErrorCode::kInvalidShape,
           e.path + ": dims do not match the manifest header");
    }
    utterances.push_back(Utterance{e.utterance_id, e.speaker_id, 0,
                                   std::move(features.first),
                                   std::move(features.second)});
  }
  IndexSpeakers(utterances);
  return utterances;
}

}  // namespace dca
