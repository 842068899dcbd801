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

#include "mvcnn/spectral.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mvcnn/error.h"

namespace mvcnn {

using std::numbers::pi;

void fft_inplace(std::vector<std::complex<double>>& data) {
  const std::size_t n = data.size();
  if (!is_power_of_two(n)) {
    throw Error(ErrorCode::kNonPowerOfTwo,
                "FFT size " + std::to_string(n) + " is not a power of two");
  }
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    // Twiddles computed directly per index; the recurrence w *= w_len drifts
    // by ~1e-13 at N = 2^15.
    std::vector<std::complex<double>> twiddle(half);
    for (std::size_t k = 0; k < half; ++k) {
      twiddle[k] = std::polar(1.0, -2.0 * pi * static_cast<double>(k) /
                                       static_cast<double>(len));
    }
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const auto u = data[i + k];
        const auto v = data[i + k + half] * twiddle[k];
        data[i + k] = u + v;
        data[i + k + half] = u - v;
      }
    }
  }
}

std::vector<std::complex<double>> fft(std::span<const double> x) {
  std::vector<std::complex<double>> data(x.begin(), x.end());
  fft_inplace(data);
  return data;
}

Spectrum fft_magnitude(const Frame& frame, int sample_rate) {
  const auto coeffs = fft(frame.values);
  Spectrum spec;
  spec.source_len = frame.size();
  spec.sample_rate = sample_rate;
  spec.bins.resize(frame.size() / 2 + 1);
  for (std::size_t k = 0; k < spec.bins.size(); ++k) {
    spec.bins[k] = std::abs(coeffs[k]);
  }
  return spec;
}

std::vector<double> bin_average(const Spectrum& spec, std::size_t length) {
  const std::size_t count = spec.bins.size();
  if (length < 1 || length > count) {
    throw Error(ErrorCode::kInvalidLength,
                "cannot bin " + std::to_string(count) + " bins into " +
                    std::to_string(length));
  }
  const std::size_t base = count / length;
  const std::size_t extra = count % length;
  std::vector<double> out(length);
  std::size_t pos = 0;
  for (std::size_t j = 0; j < length; ++j) {
    const std::size_t group = base + (j < extra ? 1 : 0);
    double sum = 0.0;
    for (std::size_t i = 0; i < group; ++i) sum += spec.bins[pos + i];
    out[j] = sum / static_cast<double>(group);
    pos += group;
  }
  return out;
}

void NormStats::write(ByteWriter& w) const {
  w.put_magic("NRM1");
  w.put<uint32_t>(static_cast<uint32_t>(mean.size()));
  for (double m : mean) w.put<double>(m);
  for (double s : std) w.put<double>(s);
}

NormStats NormStats::read(ByteReader& r) {
  if (!r.magic_matches("NRM1")) {
    throw Error(ErrorCode::kBadMagic, "expected NRM1 block");
  }
  const uint32_t n = r.get<uint32_t>();
  if (n > r.remaining() / (2 * sizeof(double))) r.skip(r.remaining() + 1);
  NormStats stats;
  stats.mean.resize(n);
  stats.std.resize(n);
  for (auto& m : stats.mean) m = r.get<double>();
  for (auto& s : stats.std) s = r.get<double>();
  return stats;
}

void NormStats::save(const std::filesystem::path& path) const {
  ByteWriter w;
  write(w);
  write_file_bytes(path, w.bytes());
}

NormStats NormStats::load(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  ByteReader r(bytes);
  return read(r);
}

NormStats fit_normalizer(std::span<const FeatureVector> training_features) {
  if (training_features.empty()) {
    throw Error(ErrorCode::kEmptyTrainingSet, "no training features");
  }
  const std::size_t len = training_features.front().size();
  NormStats stats;
  stats.mean.assign(len, 0.0);
  stats.std.assign(len, 0.0);
  for (const auto& v : training_features) {
    if (v.size() != len) {
      throw Error(ErrorCode::kLengthMismatch, "ragged training features");
    }
    for (std::size_t d = 0; d < len; ++d) stats.mean[d] += std::log1p(v[d]);
  }
  const double n = static_cast<double>(training_features.size());
  for (auto& m : stats.mean) m /= n;
  for (const auto& v : training_features) {
    for (std::size_t d = 0; d < len; ++d) {
      const double c = std::log1p(v[d]) - stats.mean[d];
      stats.std[d] += c * c;
    }
  }
  for (auto& s : stats.std) s = std::max(std::sqrt(s / n), kNormStdFloor);
  return stats;
}

FeatureVector normalize(std::span<const double> v, const NormStats& stats) {
  if (v.size() != stats.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "feature length " + std::to_string(v.size()) +
                    " does not match normalizer length " +
                    std::to_string(stats.size()));
  }
  FeatureVector out(v.size());
  for (std::size_t d = 0; d < v.size(); ++d) {
    out[d] = (std::log1p(v[d]) - stats.mean[d]) / stats.std[d];
  }
  return out;
}

std::complex<double> Biquad::response(double freq_hz, double sample_rate) const {
  const auto z1 = std::polar(1.0, -2.0 * pi * freq_hz / sample_rate);
  const auto z2 = z1 * z1;
  return (b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2);
}

std::vector<Biquad> design_butterworth_highpass(double cutoff_hz,
                                                double sample_rate, int order) {
  if (!(cutoff_hz > 0.0 && cutoff_hz < sample_rate / 2.0)) {
    throw Error(ErrorCode::kInvalidCutoff,
                "cutoff must lie strictly between 0 and Nyquist");
  }
  if (order < 2 || order % 2 != 0) {
    throw Error(ErrorCode::kInvalidConfig, "filter order must be even");
  }
  const double k = std::tan(pi * cutoff_hz / sample_rate);
  const double k2 = k * k;
  std::vector<Biquad> sections;
  for (int i = 0; i < order / 2; ++i) {
    const double q =
        1.0 / (2.0 * std::sin(pi * (2.0 * i + 1.0) / (2.0 * order)));
    const double norm = 1.0 / (1.0 + k / q + k2);
    Biquad s;
    s.b0 = norm;
    s.b1 = -2.0 * norm;
    s.b2 = norm;
    s.a1 = 2.0 * (k2 - 1.0) * norm;
    s.a2 = (1.0 - k / q + k2) * norm;
    sections.push_back(s);
  }
  return sections;
}

std::vector<double> filter_cascade(std::span<const Biquad> sections,
                                   std::span<const double> input) {
  std::vector<double> signal(input.begin(), input.end());
  for (const auto& s : sections) {
    // Transposed direct form II, zero initial state.
    double z1 = 0.0, z2 = 0.0;
    for (auto& x : signal) {
      const double y = s.b0 * x + z1;
      z1 = s.b1 * x - s.a1 * y + z2;
      z2 = s.b2 * x - s.a2 * y;
      x = y;
    }
  }
  return signal;
}

AudioClip highpass_butterworth(const AudioClip& clip, double cutoff_hz,
                               int order) {
  const auto sections =
      design_butterworth_highpass(cutoff_hz, clip.sample_rate, order);
  return AudioClip{filter_cascade(sections, clip.samples), clip.sample_rate};
}

double mean_power(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc / static_cast<double>(x.size());
}

AudioClip gaussian_noise_for_snr(const AudioClip& clip, double snr_db,
                                 uint64_t seed) {
  const double p_signal = mean_power(clip.samples);
  if (!(p_signal > 0.0)) {
    throw Error(ErrorCode::kZeroPowerSignal, "signal has zero power");
  }
  const double sigma = std::sqrt(p_signal / std::pow(10.0, snr_db / 10.0));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  AudioClip noise{std::vector<double>(clip.size()), clip.sample_rate};
  for (auto& v : noise.samples) v = gauss(rng);
  return noise;
}

AudioClip add_noise_snr(const AudioClip& clip, double snr_db, uint64_t seed) {
  AudioClip out = gaussian_noise_for_snr(clip, snr_db, seed);
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    out.samples[i] += clip.samples[i];
  }
  return out;
}

double measure_snr(const AudioClip& signal, const AudioClip& noise) {
  if (signal.size() != noise.size()) {
    throw Error(ErrorCode::kLengthMismatch, "signal and noise lengths differ");
  }
  const double ps = mean_power(signal.samples);
  const double pn = mean_power(noise.samples);
  if (!(ps > 0.0) || !(pn > 0.0)) {
    throw Error(ErrorCode::kZeroPowerSignal, "zero-power input to SNR");
  }
  return 10.0 * std::log10(ps / pn);
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

std::vector<double> mel_filterbank(std::size_t n_filters, std::size_t n_fft,
                                   int sample_rate) {
  const std::size_t n_bins = n_fft / 2 + 1;
  const double top = hz_to_mel(sample_rate / 2.0);
  std::vector<double> edges(n_filters + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(top * static_cast<double>(i) /
                         static_cast<double>(n_filters + 1));
  }
  std::vector<double> bank(n_filters * n_bins, 0.0);
  for (std::size_t f = 0; f < n_filters; ++f) {
    const double lo = edges[f], mid = edges[f + 1], hi = edges[f + 2];
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double hz = static_cast<double>(k) * sample_rate /
                        static_cast<double>(n_fft);
      double w = 0.0;
      if (hz >= lo && hz <= mid) {
        w = (hz - lo) / (mid - lo);
      } else if (hz > mid && hz <= hi) {
        w = (hi - hz) / (hi - mid);
      }
      bank[f * n_bins + k] = w;
    }
  }
  return bank;
}

FeatureVector mfcc(const Frame& frame, int sample_rate, std::size_t n_filters,
                   std::size_t n_coeffs) {
  if (n_filters == 0 || n_coeffs == 0 || n_coeffs > n_filters) {
    throw Error(ErrorCode::kInvalidCounts,
                "need 0 < n_coeffs <= n_filters");
  }
  const auto spec = fft_magnitude(frame, sample_rate);
  const std::size_t n_bins = spec.bins.size();
  const auto bank = mel_filterbank(n_filters, frame.size(), sample_rate);

  std::vector<double> log_energy(n_filters);
  for (std::size_t f = 0; f < n_filters; ++f) {
    double e = 0.0;
    const double* row = bank.data() + f * n_bins;
    for (std::size_t k = 0; k < n_bins; ++k) {
      if (row[k] != 0.0) e += row[k] * spec.bins[k] * spec.bins[k];
    }
    log_energy[f] = std::log(std::max(e, 1e-10));
  }

  const double m = static_cast<double>(n_filters);
  FeatureVector coeffs(n_coeffs);
  for (std::size_t j = 0; j < n_coeffs; ++j) {
    const double scale = std::sqrt((j == 0 ? 1.0 : 2.0) / m);
    double acc = 0.0;
    for (std::size_t i = 0; i < n_filters; ++i) {
      acc += log_energy[i] *
             std::cos(pi * static_cast<double>(j) * (static_cast<double>(i) + 0.5) / m);
    }
    coeffs[j] = scale * acc;
  }
  return coeffs;
}

}  // namespace mvcnn
