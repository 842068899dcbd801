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

#include "mvcnn/synthetic.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mvcnn/error.h"
#include "mvcnn/random.h"

namespace mvcnn {

using std::numbers::pi;

void SyntheticSpec::validate() const {
  if (classes.empty()) throw Error(ErrorCode::kInvalidSpec, "no classes");
  if (clips_per_class == 0 || !(clip_seconds > 0.0) || sample_rate <= 0) {
    throw Error(ErrorCode::kInvalidSpec, "empty clip layout");
  }
  if (!(amplitude > 0.0 && amplitude <= 1.0)) {
    throw Error(ErrorCode::kInvalidSpec, "amplitude must lie in (0, 1]");
  }
  if (frequency_jitter < 0.0 || period_jitter < 0.0 || period_jitter >= 1.0) {
    throw Error(ErrorCode::kInvalidSpec, "invalid jitter");
  }
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const auto& c = classes[i];
    if (c.tone_hz.empty() || !(c.envelope_period_s > 0.0)) {
      throw Error(ErrorCode::kInvalidSpec,
                  "class " + std::to_string(i) + " has no tones or period");
    }
    for (double f : c.tone_hz) {
      if (!(f > 0.0 && f * (1.0 + frequency_jitter) < sample_rate / 2.0)) {
        throw Error(ErrorCode::kInvalidSpec, "tone outside (0, Nyquist)");
      }
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (classes[j].tone_hz == c.tone_hz &&
          classes[j].envelope_period_s == c.envelope_period_s) {
        throw Error(ErrorCode::kInvalidSpec,
                    "classes " + std::to_string(j) + " and " +
                        std::to_string(i) + " share a signature");
      }
    }
  }
}

SyntheticSpec default_synthetic_spec(uint64_t seed) {
  SyntheticSpec spec;
  spec.classes = {
      {{2000.0}, 0.005},
      {{2000.0}, 0.080},
      {{1000.0, 3500.0}, 0.010},
      {{1000.0, 3500.0}, 0.040},
  };
  spec.seed = seed;
  return spec;
}

AudioClip synthesize_clip(const SyntheticSpec& spec, std::size_t label,
                          std::size_t clip_index) {
  const auto& sig = spec.classes.at(label);
  std::mt19937_64 rng(derive_seed(spec.seed, {label, clip_index}));
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);

  std::vector<double> freqs;
  std::vector<double> phases;
  for (double f : sig.tone_hz) {
    freqs.push_back(f * (1.0 + spec.frequency_jitter * unit(rng)));
    phases.push_back(phase(rng));
  }
  const double period = sig.envelope_period_s * (1.0 + spec.period_jitter * unit(rng));
  const double env_phase = phase(rng);
  const double tone_amp = spec.amplitude / static_cast<double>(freqs.size());

  const auto n = static_cast<std::size_t>(std::llround(spec.clip_seconds * spec.sample_rate));
  AudioClip clip{std::vector<double>(n), spec.sample_rate};
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / spec.sample_rate;
    const double env = 0.5 - 0.5 * std::cos(2.0 * pi * t / period + env_phase);
    double s = 0.0;
    for (std::size_t k = 0; k < freqs.size(); ++k) {
      s += tone_amp * std::sin(2.0 * pi * freqs[k] * t + phases[k]);
    }
    clip.samples[i] = env * s;
  }
  if (spec.snr_db) {
    clip = add_noise_snr(clip, *spec.snr_db,
                         derive_seed(spec.seed, {label, clip_index, 0xA0D10ULL}));
  }
  return clip;
}

std::vector<LabeledClip> generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::vector<LabeledClip> clips;
  clips.reserve(spec.n_classes() * spec.clips_per_class);
  for (std::size_t c = 0; c < spec.n_classes(); ++c) {
    for (std::size_t j = 0; j < spec.clips_per_class; ++j) {
      clips.push_back({synthesize_clip(spec, c, j), static_cast<int>(c)});
    }
  }
  return clips;
}

}  // namespace mvcnn
