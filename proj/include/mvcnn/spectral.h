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

// Frequency-domain features and the signal conditioning around them: FFT
// magnitude spectra, spectrum binning, log/z-score normalization, the
// node's Butterworth high-pass, MFCCs and SNR-controlled Gaussian noise.

#ifndef MVCNN_SPECTRAL_H_
#define MVCNN_SPECTRAL_H_

#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mvcnn/audio.h"
#include "mvcnn/binary_io.h"

namespace mvcnn {

using FeatureVector = std::vector<double>;

inline constexpr std::size_t kDefaultFeatureLen = 512;
inline constexpr double kNormStdFloor = 1e-8;

// Half spectrum of a real frame: bins 0..N/2 inclusive.
struct Spectrum {
  std::vector<double> bins;
  std::size_t source_len = 0;
  int sample_rate = kDefaultSampleRate;
};

// In-place iterative radix-2 DFT. Size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& data);
std::vector<std::complex<double>> fft(std::span<const double> x);

Spectrum fft_magnitude(const Frame& frame, int sample_rate = kDefaultSampleRate);

// Averages contiguous groups of bins down to `length` values. Groups differ
// in size by at most one; the larger groups come first.
std::vector<double> bin_average(const Spectrum& spec, std::size_t length);

struct NormStats {
  std::vector<double> mean;
  std::vector<double> std;

  std::size_t size() const { return mean.size(); }

  void write(ByteWriter& w) const;
  static NormStats read(ByteReader& r);
  void save(const std::filesystem::path& path) const;
  static NormStats load(const std::filesystem::path& path);
};

// Statistics of log(1 + x) over the training set, std floored at 1e-8.
NormStats fit_normalizer(std::span<const FeatureVector> training_features);
FeatureVector normalize(std::span<const double> v, const NormStats& stats);

struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0;
  double a1 = 0, a2 = 0;

  std::complex<double> response(double freq_hz, double sample_rate) const;
};

// Cascaded second-order sections of an even-order Butterworth high-pass,
// designed with the prewarped bilinear transform.
std::vector<Biquad> design_butterworth_highpass(double cutoff_hz,
                                                double sample_rate, int order);
std::vector<double> filter_cascade(std::span<const Biquad> sections,
                                   std::span<const double> input);
AudioClip highpass_butterworth(const AudioClip& clip, double cutoff_hz = 200.0,
                               int order = 4);

double mean_power(std::span<const double> x);

// Gaussian noise scaled so that mean_power(clip) / noise power equals
// 10^(snr_db / 10) in expectation.
AudioClip gaussian_noise_for_snr(const AudioClip& clip, double snr_db,
                                 uint64_t seed);
// clip + gaussian_noise_for_snr(clip, snr_db, seed); not re-clipped.
AudioClip add_noise_snr(const AudioClip& clip, double snr_db, uint64_t seed);
double measure_snr(const AudioClip& signal, const AudioClip& noise);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular filters equally spaced on the mel scale between 0 Hz and
// Nyquist, evaluated at the n_fft/2 + 1 bin frequencies. Row-major
// [n_filters, n_fft/2 + 1].
std::vector<double> mel_filterbank(std::size_t n_filters, std::size_t n_fft,
                                   int sample_rate);

// Power spectrum -> mel energies -> log (floor 1e-10) -> orthonormal DCT-II,
// first n_coeffs coefficients.
FeatureVector mfcc(const Frame& frame, int sample_rate = kDefaultSampleRate,
                   std::size_t n_filters = 26, std::size_t n_coeffs = 13);

}  // namespace mvcnn

#endif  // MVCNN_SPECTRAL_H_
