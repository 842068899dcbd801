/* Copyright 2026 The MVCNN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "mvcnn/audio.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>

#include "mvcnn/binary_io.h"
#include "mvcnn/error.h"

namespace mvcnn {

void SilenceConfig::validate() const {
  if (!(threshold >= 0.0 && threshold <= 0.5)) {
    throw Error(ErrorCode::kInvalidConfig,
                "silence threshold must lie in [0, 0.5]");
  }
  if (!(window_seconds > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig,
                "silence window duration must be positive");
  }
}

AudioClip decode_wav(std::span<const unsigned char> bytes) {
  ByteReader reader(bytes, ErrorCode::kMalformedWav);
  if (!reader.magic_matches("RIFF")) {
    throw Error(ErrorCode::kMalformedWav, "missing RIFF tag");
  }
  reader.get<uint32_t>();
  if (!reader.magic_matches("WAVE")) {
    throw Error(ErrorCode::kMalformedWav, "missing WAVE tag");
  }

  bool have_fmt = false;
  int sample_rate = 0;
  while (true) {
    const auto id = reader.get_bytes(4);
    const uint32_t chunk_size = reader.get<uint32_t>();
    const std::string tag(id.begin(), id.end());
    if (tag == "fmt ") {
      if (chunk_size < 16) {
        throw Error(ErrorCode::kMalformedWav, "fmt chunk too small");
      }
      ByteReader fmt(reader.get_bytes(chunk_size), ErrorCode::kMalformedWav);
      const uint16_t format_tag = fmt.get<uint16_t>();
      const uint16_t channels = fmt.get<uint16_t>();
      sample_rate = static_cast<int>(fmt.get<uint32_t>());
      fmt.get<uint32_t>();  // byte rate
      fmt.get<uint16_t>();  // block align
      const uint16_t bits = fmt.get<uint16_t>();
      if (format_tag != 1 || bits != 16) {
        throw Error(ErrorCode::kUnsupportedFormat,
                    "only 16-bit PCM is supported");
      }
      if (channels != 1) {
        throw Error(ErrorCode::kUnsupportedFormat,
                    "expected mono, got " + std::to_string(channels) +
                        " channels");
      }
      if (sample_rate <= 0) {
        throw Error(ErrorCode::kMalformedWav, "non-positive sample rate");
      }
      have_fmt = true;
    } else if (tag == "data") {
      if (!have_fmt) {
        throw Error(ErrorCode::kMalformedWav, "data chunk before fmt chunk");
      }
      if (chunk_size % 2 != 0) {
        throw Error(ErrorCode::kMalformedWav, "odd PCM16 data size");
      }
      ByteReader data(reader.get_bytes(chunk_size), ErrorCode::kMalformedWav);
      AudioClip clip;
      clip.sample_rate = sample_rate;
      clip.samples.resize(chunk_size / 2);
      for (auto& s : clip.samples) s = data.get<int16_t>() / 32768.0;
      return clip;
    } else {
      reader.skip(chunk_size + (chunk_size & 1u));
    }
  }
}

AudioClip load_wav(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return decode_wav(bytes);
}

std::vector<unsigned char> encode_wav(const AudioClip& clip) {
  const auto data_bytes = static_cast<uint32_t>(clip.samples.size() * 2);
  ByteWriter w;
  w.put_magic("RIFF");
  w.put<uint32_t>(36 + data_bytes);
  w.put_magic("WAVE");
  w.put_magic("fmt ");
  w.put<uint32_t>(16);
  w.put<uint16_t>(1);
  w.put<uint16_t>(1);
  w.put<uint32_t>(static_cast<uint32_t>(clip.sample_rate));
  w.put<uint32_t>(static_cast<uint32_t>(clip.sample_rate) * 2);
  w.put<uint16_t>(2);
  w.put<uint16_t>(16);
  w.put_magic("data");
  w.put<uint32_t>(data_bytes);
  for (double s : clip.samples) {
    const double q = std::round(std::clamp(s, -1.0, 1.0) * 32768.0);
    w.put<int16_t>(static_cast<int16_t>(std::clamp(q, -32768.0, 32767.0)));
  }
  return w.take();
}

void save_wav(const AudioClip& clip, const std::filesystem::path& path) {
  write_file_bytes(path, encode_wav(clip));
}

double rms(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptyInput, "rms of nothing");
  double acc = 0.0;
  for (double v : values) acc += v * v;
  return std::sqrt(acc / static_cast<double>(values.size()));
}

AudioClip remove_silence(const AudioClip& clip, const SilenceConfig& cfg) {
  cfg.validate();
  const auto window = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::llround(cfg.window_seconds * clip.sample_rate)));
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  const std::span<const double> all(clip.samples);
  for (std::size_t start = 0; start < all.size(); start += window) {
    const auto piece = all.subspan(start, std::min(window, all.size() - start));
    if (rms(piece) >= cfg.threshold) {
      out.samples.insert(out.samples.end(), piece.begin(), piece.end());
    }
  }
  return out;
}

std::vector<Frame> segment(const AudioClip& clip, std::size_t window_len,
                           double overlap_fraction) {
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidOverlap, "overlap must lie in [0, 1)");
  }
  if (!is_power_of_two(window_len)) {
    throw Error(ErrorCode::kInvalidWindow,
                "window length must be a power of two");
  }
  const auto hop = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(
             static_cast<double>(window_len) * (1.0 - overlap_fraction))));
  std::vector<Frame> frames;
  const std::size_t n = clip.samples.size();
  if (n < window_len) return frames;
  const std::size_t count = (n - window_len) / hop + 1;
  frames.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto begin = clip.samples.begin() + static_cast<std::ptrdiff_t>(i * hop);
    frames.push_back(
        Frame{std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(window_len)),
              i * hop});
  }
  return frames;
}

std::vector<double> hamming_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                  static_cast<double>(n));
  }
  return w;
}

Frame apply_hamming(const Frame& frame) {
  const auto w = hamming_window(frame.size());
  Frame out = frame;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= w[i];
  return out;
}

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

}  // namespace

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != "path,label") {
    throw Error(ErrorCode::kInvalidSpec,
                "manifest must start with header 'path,label'");
  }
  const auto base = path.parent_path();
  std::vector<ManifestEntry> entries;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) {
      throw Error(ErrorCode::kInvalidSpec, "manifest row lacks a label: " + line);
    }
    std::filesystem::path p = trim(line.substr(0, comma));
    if (p.is_relative()) p = base / p;
    entries.push_back({p, trim(line.substr(comma + 1))});
  }
  return entries;
}

void write_manifest(const std::vector<ManifestEntry>& entries,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << "path,label\n";
  for (const auto& e : entries) out << e.path.string() << ',' << e.label << '\n';
}

}  // namespace mvcnn
