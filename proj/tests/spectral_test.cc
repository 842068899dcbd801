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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mvcnn/binary_io.h"
#include "oracles.h"
#include "test_util.h"

namespace mvcnn {
namespace {

std::vector<double> random_vector(std::size_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

TEST(Fft, MatchesNaiveDft) {
  for (std::size_t n : {1u, 2u, 8u, 64u, 256u}) {
    const auto x = random_vector(n, n);
    const auto fast = fft(x);
    const auto slow = oracle::naive_dft(x);
    for (std::size_t k = 0; k < n; ++k) {
      EXPECT_NEAR(std::abs(fast[k] - slow[k]), 0.0, 1e-9 * static_cast<double>(n)) << n;
    }
  }
}

TEST(Fft, RejectsNonPowerOfTwo) {
  std::vector<std::complex<double>> d(12);
  EXPECT_ERROR_CODE(fft_inplace(d), ErrorCode::kNonPowerOfTwo);
  EXPECT_ERROR_CODE(fft_magnitude(Frame{std::vector<double>(6, 1.0), 0}),
                    ErrorCode::kNonPowerOfTwo);
}

TEST(FftMagnitude, DcAndOnGridCosine) {
  const auto dc = fft_magnitude(Frame{std::vector<double>(8, 1.0), 0});
  ASSERT_EQ(dc.bins.size(), 5u);
  EXPECT_NEAR(dc.bins[0], 8.0, 1e-12);
  for (std::size_t k = 1; k < 5; ++k) EXPECT_NEAR(dc.bins[k], 0.0, 1e-12);

  Frame cosine;
  for (std::size_t n = 0; n < 16; ++n) {
    cosine.values.push_back(std::cos(2.0 * std::numbers::pi * 3.0 * n / 16.0));
  }
  const auto s = fft_magnitude(cosine);
  for (std::size_t k = 0; k < s.bins.size(); ++k) {
    EXPECT_NEAR(s.bins[k], k == 3 ? 8.0 : 0.0, 1e-9) << k;
  }
}

TEST(FftMagnitude, Linearity) {
  const auto x = random_vector(128, 5);
  Frame a{x, 0}, b{x, 0};
  for (auto& v : b.values) v *= -3.0;
  const auto sa = fft_magnitude(a), sb = fft_magnitude(b);
  for (std::size_t k = 0; k < sa.bins.size(); ++k) {
    EXPECT_NEAR(sb.bins[k], 3.0 * sa.bins[k], 1e-9);
  }
}

TEST(BinAverage, HandValues) {
  Spectrum s{{1, 2, 3, 4}, 6, 24000};
  EXPECT_EQ(bin_average(s, 2), (std::vector<double>{1.5, 3.5}));
  EXPECT_EQ(bin_average(s, 4), s.bins);
  Spectrum ones{std::vector<double>(8193, 1.0), 16384, 24000};
  for (double v : bin_average(ones, 512)) EXPECT_DOUBLE_EQ(v, 1.0);
  EXPECT_ERROR_CODE(bin_average(s, 5), ErrorCode::kInvalidLength);
  EXPECT_ERROR_CODE(bin_average(s, 0), ErrorCode::kInvalidLength);
}

TEST(BinAverage, PreservesTotalWhenGroupsAreEqual) {
  Spectrum s{random_vector(12, 2), 22, 24000};
  const auto out = bin_average(s, 3);
  double a = 0.0, b = 0.0;
  for (double v : s.bins) a += v;
  for (double v : out) b += 4.0 * v;
  EXPECT_NEAR(a, b, 1e-12);
}

TEST(Normalizer, ZScoresTrainingSet) {
  std::vector<FeatureVector> train;
  for (uint64_t i = 0; i < 50; ++i) {
    auto v = random_vector(16, 100 + i);
    for (auto& x : v) x = std::abs(x) * 10.0;
    train.push_back(v);
  }
  const auto stats = fit_normalizer(train);
  std::vector<double> sum(16, 0.0), sq(16, 0.0);
  for (const auto& v : train) {
    const auto z = normalize(v, stats);
    for (std::size_t j = 0; j < 16; ++j) sum[j] += z[j], sq[j] += z[j] * z[j];
  }
  for (std::size_t j = 0; j < 16; ++j) {
    EXPECT_NEAR(sum[j] / 50.0, 0.0, 1e-9);
    EXPECT_NEAR(std::sqrt(sq[j] / 50.0), 1.0, 1e-6);
  }
}

TEST(Normalizer, IdenticalVectorsGiveZeros) {
  std::vector<FeatureVector> train(5, FeatureVector{1.0, 2.0, 3.0});
  const auto stats = fit_normalizer(train);
  for (double v : normalize(train[0], stats)) EXPECT_EQ(v, 0.0);
  EXPECT_ERROR_CODE(fit_normalizer({}), ErrorCode::kEmptyTrainingSet);
  EXPECT_ERROR_CODE(normalize(FeatureVector{1.0}, stats), ErrorCode::kLengthMismatch);
}

TEST(Normalizer, SaveLoadBitIdentical) {
  std::vector<FeatureVector> train{random_vector(8, 1), random_vector(8, 2),
                                   random_vector(8, 3)};
  for (auto& v : train) for (auto& x : v) x = std::abs(x);
  const auto stats = fit_normalizer(train);
  const auto path = testing::TempDir() + "stats.nrm";
  stats.save(path);
  const auto back = NormStats::load(path);
  EXPECT_EQ(back.mean, stats.mean);
  EXPECT_EQ(back.std, stats.std);
  auto q = random_vector(8, 9);
  for (auto& x : q) x = std::abs(x);
  EXPECT_EQ(normalize(q, back), normalize(q, stats));

  auto bytes = read_file_bytes(path);
  bytes[0] = 'X';
  ByteReader r(bytes);
  EXPECT_ERROR_CODE(NormStats::read(r), ErrorCode::kBadMagic);
}

TEST(Butterworth, DcRejectedAfterSettling) {
  AudioClip dc{std::vector<double>(24000, 1.0), 24000};
  const auto out = highpass_butterworth(dc, 200.0, 4);
  double worst = 0.0;
  for (std::size_t i = 12000; i < out.size(); ++i) worst = std::max(worst, std::abs(out.samples[i]));
  EXPECT_LT(worst, 1e-3);
}

TEST(Butterworth, PassbandAndCutoff) {
  const auto sections = design_butterworth_highpass(200.0, 24000.0, 4);
  ASSERT_EQ(sections.size(), 2u);
  auto gain = [&](double f) {
    std::complex<double> h = 1.0;
    for (const auto& s : sections) h *= s.response(f, 24000.0);
    return std::abs(h);
  };
  EXPECT_NEAR(gain(200.0), std::sqrt(0.5), 1e-9);
  EXPECT_NEAR(gain(1000.0), 1.0, 0.01);
  EXPECT_LT(gain(20.0), 1e-3);

  AudioClip t{std::vector<double>(24000), 24000};
  for (std::size_t i = 0; i < t.size(); ++i) {
    t.samples[i] = std::sin(2.0 * std::numbers::pi * 1000.0 * i / 24000.0);
  }
  const auto out = highpass_butterworth(t, 200.0, 4);
  double peak = 0.0;
  for (std::size_t i = 12000; i < out.size(); ++i) peak = std::max(peak, std::abs(out.samples[i]));
  EXPECT_NEAR(peak, 1.0, 0.01);
}

TEST(Butterworth, RejectsBadCutoff) {
  EXPECT_ERROR_CODE(design_butterworth_highpass(12000.0, 24000.0, 4), ErrorCode::kInvalidCutoff);
  EXPECT_ERROR_CODE(design_butterworth_highpass(0.0, 24000.0, 4), ErrorCode::kInvalidCutoff);
}

TEST(Butterworth, TimeInvariant) {
  const auto sections = design_butterworth_highpass(200.0, 24000.0, 4);
  std::vector<double> impulse(400, 0.0), delayed(400, 0.0);
  impulse[0] = 1.0;
  delayed[37] = 1.0;
  const auto a = filter_cascade(sections, impulse);
  const auto b = filter_cascade(sections, delayed);
  for (std::size_t i = 0; i + 37 < 400; ++i) EXPECT_NEAR(b[i + 37], a[i], 1e-15);
  for (std::size_t i = 0; i < 37; ++i) EXPECT_EQ(b[i], 0.0);
}

TEST(Snr, MeasuredMatchesTarget) {
  AudioClip s{random_vector(24000, 77), 24000};
  for (double target : {-6.0, 0.0, 6.0}) {
    double sum = 0.0;
    for (uint64_t seed = 0; seed < 10; ++seed) {
      const auto noise = gaussian_noise_for_snr(s, target, seed);
      sum += measure_snr(s, noise);
    }
    EXPECT_NEAR(sum / 10.0, target, 0.1);
  }
}

TEST(Snr, AddNoiseIsSignalPlusNoise) {
  AudioClip s{random_vector(1000, 1), 24000};
  const auto noisy = add_noise_snr(s, 0.0, 4);
  const auto noise = gaussian_noise_for_snr(s, 0.0, 4);
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(noisy.samples[i], s.samples[i] + noise.samples[i]);
  }
  EXPECT_EQ(add_noise_snr(s, 0.0, 4).samples, noisy.samples);
  AudioClip zero{std::vector<double>(100, 0.0), 24000};
  EXPECT_ERROR_CODE(add_noise_snr(zero, 0.0, 1), ErrorCode::kZeroPowerSignal);
}

TEST(Snr, HandValues) {
  AudioClip s{random_vector(500, 3), 24000};
  EXPECT_NEAR(measure_snr(s, s), 0.0, 1e-12);
  AudioClip half = s;
  for (auto& v : half.samples) v *= 0.5;
  EXPECT_NEAR(measure_snr(s, half), 20.0 * std::log10(2.0), 1e-12);
  AudioClip dbl = s;
  for (auto& v : dbl.samples) v *= 2.0;
  EXPECT_NEAR(measure_snr(s, dbl), -6.0206, 1e-4);
}

TEST(Mel, ScaleRoundTrip) {
  EXPECT_NEAR(hz_to_mel(700.0), 2595.0 * std::log10(2.0), 1e-12);
  for (double f : {0.0, 100.0, 1000.0, 12000.0}) EXPECT_NEAR(mel_to_hz(hz_to_mel(f)), f, 1e-9);
}

TEST(Mfcc, MatchesNaiveOracle) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = seed % 2 ? 256 : 512;
    const auto x = random_vector(n, 1000 + seed);
    const auto fast = mfcc(Frame{x, 0}, 24000, 26, 13);
    const auto slow = oracle::naive_mfcc(x, 24000.0, 26, 13);
    ASSERT_EQ(fast.size(), 13u);
    for (std::size_t j = 0; j < 13; ++j) EXPECT_NEAR(fast[j], slow[j], 1e-9);
  }
}

TEST(Mfcc, ZeroFrameHitsLogFloor) {
  const auto c = mfcc(Frame{std::vector<double>(256, 0.0), 0}, 24000, 26, 13);
  EXPECT_NEAR(c[0], std::sqrt(26.0) * std::log(1e-10), 1e-9);
  for (std::size_t j = 1; j < 13; ++j) EXPECT_NEAR(c[j], 0.0, 1e-9);
}

TEST(Mfcc, RejectsBadCounts) {
  const Frame f{std::vector<double>(64, 1.0), 0};
  EXPECT_ERROR_CODE(mfcc(f, 24000, 13, 14), ErrorCode::kInvalidCounts);
  EXPECT_ERROR_CODE(mfcc(f, 24000, 0, 0), ErrorCode::kInvalidCounts);
}

}  // namespace
}  // namespace mvcnn
