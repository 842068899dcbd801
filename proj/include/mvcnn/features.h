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

// Clip -> per-frame features. The spectrum path is the node pipeline
// (high-pass, silence removal, segmentation, Hamming, FFT magnitude, binning);
// the MFCC path reuses the same windowed frames for the KNN-MFCC baseline.

#ifndef MVCNN_FEATURES_H_
#define MVCNN_FEATURES_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvcnn/audio.h"
#include "mvcnn/spectral.h"

namespace mvcnn {

struct FeatureOptions {
  bool highpass = true;
  double highpass_cutoff_hz = 200.0;
  int highpass_order = 4;
  SilenceConfig silence;
  std::size_t window_len = kDefaultWindowLen;
  double overlap = 0.5;
  std::size_t feature_len = kDefaultFeatureLen;
  bool compute_mfcc = true;
  std::size_t mfcc_filters = 26;
  std::size_t mfcc_coeffs = 13;
};

struct FrameFeatures {
  std::vector<double> spectrum;  // binned magnitudes, before normalization
  FeatureVector mfcc;            // empty unless compute_mfcc
};

// High-pass and silence removal only.
AudioClip condition_clip(const AudioClip& clip, const FeatureOptions& options);

std::vector<FrameFeatures> extract_features(const AudioClip& clip,
                                            const FeatureOptions& options);

struct LabeledClip {
  AudioClip clip;
  int label = 0;
};

struct ClipFeatures {
  std::vector<FrameFeatures> frames;
  int label = 0;
  std::size_t source_index = 0;  // position in the input clip list
};

// Extracts every clip, optionally mixing in Gaussian noise at `snr_db`
// first (seeded per clip from `noise_seed`). Clips that yield no frames are
// dropped.
std::vector<ClipFeatures> extract_dataset(std::span<const LabeledClip> clips,
                                          const FeatureOptions& options,
                                          std::optional<double> snr_db = {},
                                          uint64_t noise_seed = 0);

// Loads the WAV files of a manifest. Labels are mapped to ids in sorted
// order; the sorted label names are written to `label_names` if given.
std::vector<LabeledClip> load_manifest_clips(
    const std::filesystem::path& manifest,
    std::vector<std::string>* label_names = nullptr);

}  // namespace mvcnn

#endif  // MVCNN_FEATURES_H_
