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

// Synthetic stand-in corpus. Each class is a set of tones under a periodic
// raised-cosine amplitude envelope; classes that share tones differ only in
// envelope period, which shows up as sideband spacing in the spectrum.

#ifndef MVCNN_SYNTHETIC_H_
#define MVCNN_SYNTHETIC_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "mvcnn/features.h"

namespace mvcnn {

struct ClassSignature {
  std::vector<double> tone_hz;
  double envelope_period_s = 0.02;
};

struct SyntheticSpec {
  std::vector<ClassSignature> classes;
  std::size_t clips_per_class = 20;
  double clip_seconds = 2.0;
  int sample_rate = kDefaultSampleRate;
  double amplitude = 0.8;          // peak of the tone sum before the envelope
  double frequency_jitter = 0.015;  // relative, uniform per clip
  double period_jitter = 0.05;      // relative, uniform per clip
  std::optional<double> snr_db;     // Gaussian noise mixed in at generation
  uint64_t seed = 0;

  std::size_t n_classes() const { return classes.size(); }
  void validate() const;
};

// Four classes at two tone sets x two temporal scales:
//   0: 2 kHz, 5 ms envelope     1: 2 kHz, 80 ms envelope
//   2: 1 + 3.5 kHz, 10 ms       3: 1 + 3.5 kHz, 40 ms
SyntheticSpec default_synthetic_spec(uint64_t seed = 0);

// Labels are class indices; clips are ordered class-major.
std::vector<LabeledClip> generate_synthetic(const SyntheticSpec& spec);

// Single clip of class `label` (index `clip_index` within its class).
AudioClip synthesize_clip(const SyntheticSpec& spec, std::size_t label,
                          std::size_t clip_index);

}  // namespace mvcnn

#endif  // MVCNN_SYNTHETIC_H_
