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

#include "mvcnn/features.h"

#include <algorithm>
#include <map>

#include "mvcnn/random.h"

namespace mvcnn {

AudioClip condition_clip(const AudioClip& clip, const FeatureOptions& options) {
  if (clip.empty()) return clip;
  if (options.highpass) {
    return remove_silence(highpass_butterworth(clip, options.highpass_cutoff_hz,
                                               options.highpass_order),
                          options.silence);
  }
  return remove_silence(clip, options.silence);
}

std::vector<FrameFeatures> extract_features(const AudioClip& clip,
                                            const FeatureOptions& options) {
  const AudioClip active = condition_clip(clip, options);
  std::vector<FrameFeatures> out;
  for (const Frame& raw : segment(active, options.window_len, options.overlap)) {
    const Frame frame = apply_hamming(raw);
    FrameFeatures f;
    f.spectrum = bin_average(fft_magnitude(frame, clip.sample_rate),
                             options.feature_len);
    if (options.compute_mfcc) {
      f.mfcc = mfcc(frame, clip.sample_rate, options.mfcc_filters,
                    options.mfcc_coeffs);
    }
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<ClipFeatures> extract_dataset(std::span<const LabeledClip> clips,
                                          const FeatureOptions& options,
                                          std::optional<double> snr_db,
                                          uint64_t noise_seed) {
  std::vector<ClipFeatures> out;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    ClipFeatures cf;
    cf.label = clips[i].label;
    cf.source_index = i;
    if (snr_db) {
      cf.frames = extract_features(
          add_noise_snr(clips[i].clip, *snr_db, derive_seed(noise_seed, {i})),
          options);
    } else {
      cf.frames = extract_features(clips[i].clip, options);
    }
    if (!cf.frames.empty()) out.push_back(std::move(cf));
  }
  return out;
}

std::vector<LabeledClip> load_manifest_clips(
    const std::filesystem::path& manifest,
    std::vector<std::string>* label_names) {
  const auto entries = read_manifest(manifest);
  std::map<std::string, int> ids;
  for (const auto& e : entries) ids.emplace(e.label, 0);
  int next = 0;
  for (auto& [name, id] : ids) id = next++;
  if (label_names) {
    label_names->clear();
    for (const auto& [name, id] : ids) label_names->push_back(name);
  }
  std::vector<LabeledClip> clips;
  clips.reserve(entries.size());
  for (const auto& e : entries) clips.push_back({load_wav(e.path), ids.at(e.label)});
  return clips;
}

}  // namespace mvcnn
