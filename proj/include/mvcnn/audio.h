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

// Audio ingestion and the node-side front half of the preprocessing chain:
// WAV loading, RMS-gated silence removal, overlapping segmentation and
// Hamming windowing.

#ifndef MVCNN_AUDIO_H_
#define MVCNN_AUDIO_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace mvcnn {

inline constexpr int kDefaultSampleRate = 24000;
inline constexpr std::size_t kDefaultWindowLen = std::size_t{1} << 14;
inline constexpr std::size_t kMinWindowLen = std::size_t{1} << 11;
inline constexpr std::size_t kMaxWindowLen = std::size_t{1} << 15;

struct AudioClip {
  std::vector<double> samples;
  int sample_rate = kDefaultSampleRate;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// A fixed-length slice of a clip. Length is a power of two.
struct Frame {
  std::vector<double> values;
  std::size_t start_offset = 0;

  std::size_t size() const { return values.size(); }
};

struct SilenceConfig {
  double threshold = 0.03;
  double window_seconds = 1.0;

  // Throws kInvalidConfig when the threshold is outside [0, 0.5] or the
  // window duration is not positive.
  void validate() const;
};

constexpr bool is_power_of_two(std::size_t n) {
  return n != 0 && (n & (n - 1)) == 0;
}

// Reads a RIFF/WAVE file holding 16-bit mono PCM. Samples are scaled by
// 1/32768.
AudioClip load_wav(const std::filesystem::path& path);
AudioClip decode_wav(std::span<const unsigned char> bytes);

// Writes 16-bit mono PCM; samples are clamped to [-1, 1) before quantizing.
void save_wav(const AudioClip& clip, const std::filesystem::path& path);
std::vector<unsigned char> encode_wav(const AudioClip& clip);

double rms(std::span<const double> values);

// Drops every non-overlapping window (window_seconds long) whose RMS is
// below the threshold and concatenates the survivors in order. A trailing
// partial window is judged by its own RMS.
AudioClip remove_silence(const AudioClip& clip, const SilenceConfig& cfg);

// Frames start at multiples of hop = floor(window_len * (1 - overlap)).
std::vector<Frame> segment(const AudioClip& clip,
                           std::size_t window_len = kDefaultWindowLen,
                           double overlap_fraction = 0.5);

// Periodic Hamming coefficients w[n] = 0.54 - 0.46 cos(2 pi n / N).
std::vector<double> hamming_window(std::size_t n);
Frame apply_hamming(const Frame& frame);

struct ManifestEntry {
  std::filesystem::path path;
  std::string label;
};

// Parses a `path,label` CSV. Relative paths resolve against the manifest's
// directory.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::vector<ManifestEntry>& entries,
                    const std::filesystem::path& path);

}  // namespace mvcnn

#endif  // MVCNN_AUDIO_H_
