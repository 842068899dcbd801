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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "mvcnn/features.h"
#include "mvcnn/sweep.h"
#include "mvcnn/synthetic.h"
#include "test_util.h"

namespace mvcnn {
namespace {

TEST(Synthetic, DefaultLayout) {
  const auto spec = default_synthetic_spec(0);
  EXPECT_EQ(spec.n_classes(), 4u);
  const auto clips = generate_synthetic(spec);
  ASSERT_EQ(clips.size(), 80u);
  EXPECT_EQ(clips[0].label, 0);
  EXPECT_EQ(clips[79].label, 3);
  for (const auto& c : clips) {
    EXPECT_EQ(c.clip.size(), 48000u);
    EXPECT_EQ(c.clip.sample_rate, 24000);
    for (double v : c.clip.samples) ASSERT_LE(std::abs(v), 0.8 + 1e-12);
  }
}

TEST(Synthetic, SeedDeterminesData) {
  const auto a = generate_synthetic(default_synthetic_spec(3));
  const auto b = generate_synthetic(default_synthetic_spec(3));
  const auto c = generate_synthetic(default_synthetic_spec(4));
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].clip.samples, b[i].clip.samples);
  EXPECT_NE(a[0].clip.samples, c[0].clip.samples);
}

TEST(Synthetic, EnvelopePeriodShowsInSpectrum) {
  SyntheticSpec spec = default_synthetic_spec(1);
  spec.frequency_jitter = 0.0;
  spec.period_jitter = 0.0;
  FeatureOptions opts;
  opts.compute_mfcc = false;
  const auto fast = extract_features(synthesize_clip(spec, 0, 0), opts);
  const auto slow = extract_features(synthesize_clip(spec, 1, 0), opts);
  ASSERT_FALSE(fast.empty());
  ASSERT_FALSE(slow.empty());
  const auto stats = fit_normalizer(std::vector<FeatureVector>{fast[0].spectrum, slow[0].spectrum});
  const auto a = normalize(fast[0].spectrum, stats), b = normalize(slow[0].spectrum, stats);
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  EXPECT_GT(std::sqrt(d), 0.1);
}

TEST(Synthetic, GenerationNoiseHitsTarget) {
  SyntheticSpec spec = default_synthetic_spec(2);
  const auto clean = synthesize_clip(spec, 2, 5);
  spec.snr_db = 0.0;
  const auto noisy = synthesize_clip(spec, 2, 5);
  AudioClip noise = noisy;
  for (std::size_t i = 0; i < noise.size(); ++i) noise.samples[i] -= clean.samples[i];
  EXPECT_NEAR(measure_snr(clean, noise), 0.0, 0.2);
}

TEST(Synthetic, ValidationErrors) {
  SyntheticSpec spec = default_synthetic_spec(0);
  spec.classes.clear();
  EXPECT_ERROR_CODE(generate_synthetic(spec), ErrorCode::kInvalidSpec);
  spec = default_synthetic_spec(0);
  spec.classes[0].tone_hz = {13000.0};
  EXPECT_ERROR_CODE(generate_synthetic(spec), ErrorCode::kInvalidSpec);
  spec = default_synthetic_spec(0);
  spec.classes[1] = spec.classes[0];
  EXPECT_ERROR_CODE(generate_synthetic(spec), ErrorCode::kInvalidSpec);
}

TEST(Features, FramesPerDefaultClip) {
  const auto clips = generate_synthetic(default_synthetic_spec(0));
  const auto frames = extract_features(clips[0].clip, {});
  ASSERT_EQ(frames.size(), 4u);
  EXPECT_EQ(frames[0].spectrum.size(), 512u);
  EXPECT_EQ(frames[0].mfcc.size(), 13u);
}

TEST(Features, SilentClipsAreDropped) {
  std::vector<LabeledClip> clips{{AudioClip{std::vector<double>(48000, 0.0), 24000}, 0},
                                 {generate_synthetic(default_synthetic_spec(0))[30].clip, 1}};
  const auto data = extract_dataset(clips, {});
  ASSERT_EQ(data.size(), 1u);
  EXPECT_EQ(data[0].source_index, 1u);
  EXPECT_EQ(data[0].label, 1);
}

TEST(Features, NoiseIsSeededPerClip) {
  auto spec = default_synthetic_spec(0);
  spec.clips_per_class = 1;
  const auto clips = generate_synthetic(spec);
  FeatureOptions opts;
  opts.compute_mfcc = false;
  const auto a = extract_dataset(clips, opts, -6.0, 1);
  const auto b = extract_dataset(clips, opts, -6.0, 1);
  const auto c = extract_dataset(clips, opts, -6.0, 2);
  EXPECT_EQ(a[2].frames[0].spectrum, b[2].frames[0].spectrum);
  EXPECT_NE(a[2].frames[0].spectrum, c[2].frames[0].spectrum);
  std::vector<LabeledClip> tail(clips.begin() + 2, clips.end());
  // Clip i's noise depends on its index, not on what else is in the batch.
  EXPECT_NE(extract_dataset(tail, opts, -6.0, 1)[0].frames[0].spectrum,
            a[2].frames[0].spectrum);
}

TEST(Features, ManifestClipsGetSortedLabelIds) {
  const auto dir = std::filesystem::path(testing::TempDir()) / "manifest_clips";
  std::filesystem::create_directories(dir);
  const auto clips = generate_synthetic(default_synthetic_spec(0));
  save_wav(clips[0].clip, dir / "a.wav");
  save_wav(clips[25].clip, dir / "b.wav");
  write_manifest({{"a.wav", "zebra"}, {"b.wav", "ant"}}, dir / "m.csv");
  std::vector<std::string> names;
  const auto loaded = load_manifest_clips(dir / "m.csv", &names);
  EXPECT_EQ(names, (std::vector<std::string>{"ant", "zebra"}));
  ASSERT_EQ(loaded.size(), 2u);
  EXPECT_EQ(loaded[0].label, 1);
  EXPECT_EQ(loaded[1].label, 0);
  EXPECT_EQ(loaded[0].clip.size(), 48000u);
}

TEST(Sweep, PaperGrids) {
  EXPECT_EQ(default_grid(SweepAxis::kWindowSize),
            (std::vector<double>{2048, 4096, 8192, 16384, 32768}));
  const auto tf = default_grid(SweepAxis::kTrainFraction);
  ASSERT_EQ(tf.size(), 9u);
  EXPECT_DOUBLE_EQ(tf.front(), 0.1);
  EXPECT_DOUBLE_EQ(tf.back(), 0.9);
  for (auto axis : {SweepAxis::kWindowSize, SweepAxis::kIterations, SweepAxis::kDropout,
                    SweepAxis::kLearningRate, SweepAxis::kTrainFraction, SweepAxis::kSnr}) {
    EXPECT_EQ(parse_axis(axis_name(axis)), axis);
  }
}

TEST(Sweep, RejectsBadGrid) {
  SweepSpec spec;
  spec.axis = SweepAxis::kWindowSize;
  spec.grid = {3000};
  EXPECT_ERROR_CODE(spec.validate(), ErrorCode::kInvalidConfig);
  spec.grid = {};
  EXPECT_ERROR_CODE(spec.validate(), ErrorCode::kInvalidConfig);
  spec.axis = SweepAxis::kDropout;
  spec.grid = {0.0};
  EXPECT_ERROR_CODE(spec.validate(), ErrorCode::kInvalidConfig);
}

TEST(Sweep, WindowAxisRowsAndCsv) {
  auto synth = default_synthetic_spec(0);
  synth.clips_per_class = 4;
  const auto clips = generate_synthetic(synth);
  SweepSpec spec;
  spec.axis = SweepAxis::kWindowSize;
  spec.grid = {8192, 2048};
  spec.methods = {Method::kKnnMfcc, Method::kKnnSpectrum};
  spec.seeds = {1, 0};
  spec.folds = 2;
  const auto rows = run_sweep(spec, clips, 4, {});
  ASSERT_EQ(rows.size(), 2u * 2u * 2u * 2u);
  EXPECT_EQ(rows.front().value, 2048.0);
  EXPECT_EQ(rows.front().method, "knn_mfcc");
  EXPECT_EQ(rows.front().seed, 0u);
  EXPECT_EQ(rows.back().value, 8192.0);
  for (const auto& r : rows) {
    EXPECT_EQ(r.axis, "window_size");
    EXPECT_GE(r.accuracy, 0.0);
    EXPECT_LE(r.accuracy, 1.0);
  }
  const std::string pre[] = {"mvcnn sweep", "seed=0"};
  const auto csv = sweep_csv(rows, pre);
  EXPECT_EQ(csv.rfind("# mvcnn sweep\n# seed=0\naxis,value,method,fold,seed,"
                      "accuracy,precision,recall,f1\nwindow_size,2048,knn_mfcc,0,0,", 0),
            0u);
  EXPECT_EQ(run_sweep(spec, clips, 4, {}).size(), rows.size());
}

}  // namespace
}  // namespace mvcnn
