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

#include "mvcnn/cli.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mvcnn/audio.h"
#include "mvcnn/error.h"
#include "mvcnn/evaluation.h"
#include "mvcnn/features.h"
#include "mvcnn/model.h"
#include "mvcnn/protocol.h"
#include "mvcnn/random.h"
#include "mvcnn/scenario.h"
#include "mvcnn/simulator.h"
#include "mvcnn/sweep.h"
#include "mvcnn/synthetic.h"

namespace mvcnn {
namespace {

constexpr uint64_t kNoiseStream = 0x5eed;

std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// Flags shared by every verb that reads audio.
struct DataFlags {
  std::string manifest;
  std::size_t window = kDefaultWindowLen;
  double overlap = 0.5;
  double silence_threshold = 0.03;
  std::size_t feature_len = kDefaultFeatureLen;
  std::string snr = "none";
  std::size_t clips_per_class = 20;
  double clip_seconds = 2.0;
};

struct ModelFlags {
  double lr = 0.001;
  double dropout = 0.8;  // keep probability
  std::size_t iters = 200;
  std::size_t batch = 16;
  std::vector<std::size_t> views{10, 15, 20};
};

void add_data_flags(CLI::App* sub, DataFlags& f) {
  sub->add_option("--manifest", f.manifest,
                  "CSV of path,label; synthetic data when empty");
  sub->add_option("--window", f.window, "frame length in samples (power of two)")
      ->check(CLI::Range(kMinWindowLen, kMaxWindowLen));
  sub->add_option("--overlap", f.overlap, "fractional frame overlap in [0, 1)")
      ->check(CLI::Range(0.0, 0.999));
  sub->add_option("--silence-threshold", f.silence_threshold,
                  "RMS below which a 1 s window is dropped");
  sub->add_option("--feature-len", f.feature_len, "binned spectrum length")
      ->check(CLI::PositiveNumber);
  sub->add_option("--snr", f.snr, "mix Gaussian noise at this SNR in dB, or none");
  sub->add_option("--clips-per-class", f.clips_per_class,
                  "synthetic clips per class")
      ->check(CLI::PositiveNumber);
  sub->add_option("--clip-seconds", f.clip_seconds, "synthetic clip duration")
      ->check(CLI::PositiveNumber);
}

void add_model_flags(CLI::App* sub, ModelFlags& f) {
  sub->add_option("--lr", f.lr, "Adam learning rate")->check(CLI::PositiveNumber);
  sub->add_option("--dropout", f.dropout, "dropout keep probability in (0, 1]")
      ->check(CLI::Range(1e-9, 1.0));
  sub->add_option("--iters", f.iters, "training iterations");
  sub->add_option("--batch", f.batch, "minibatch size")->check(CLI::PositiveNumber);
  sub->add_option("--views", f.views, "filter widths, one per view")
      ->delimiter(',');
}

std::optional<double> parse_snr(const std::string& text) {
  if (text == "none" || text.empty()) return std::nullopt;
  double v = 0.0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kUsageError, "--snr expects a number or none");
  }
  return v;
}

FeatureOptions feature_options(const DataFlags& f) {
  FeatureOptions o;
  o.window_len = f.window;
  o.overlap = f.overlap;
  o.silence.threshold = f.silence_threshold;
  o.feature_len = f.feature_len;
  return o;
}

SyntheticSpec synthetic_spec(const DataFlags& f, uint64_t seed) {
  SyntheticSpec spec = default_synthetic_spec(seed);
  spec.clips_per_class = f.clips_per_class;
  spec.clip_seconds = f.clip_seconds;
  return spec;
}

struct Corpus {
  std::vector<LabeledClip> clips;
  std::vector<std::string> class_names;
};

Corpus load_corpus(const DataFlags& f, uint64_t seed) {
  Corpus c;
  if (!f.manifest.empty()) {
    c.clips = load_manifest_clips(f.manifest, &c.class_names);
  } else {
    const SyntheticSpec spec = synthetic_spec(f, seed);
    c.clips = generate_synthetic(spec);
    for (std::size_t k = 0; k < spec.n_classes(); ++k) {
      c.class_names.push_back("class" + std::to_string(k));
    }
  }
  return c;
}

std::vector<ClipFeatures> extract(const Corpus& corpus, const DataFlags& f,
                                  uint64_t seed) {
  auto data = extract_dataset(corpus.clips, feature_options(f), parse_snr(f.snr),
                              derive_seed(seed, {kNoiseStream}));
  if (data.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "no clip produced a frame");
  }
  return data;
}

MethodConfig method_config(const ModelFlags& f, uint64_t seed) {
  MethodConfig m;
  m.model.view_widths = f.views;
  m.model.keep_prob = f.dropout;
  m.model.seed = seed;
  m.train.learning_rate = f.lr;
  m.train.iterations = f.iters;
  m.train.batch_size = f.batch;
  m.train.seed = seed;
  return m;
}

std::vector<uint64_t> seed_range(uint64_t seed, std::size_t repeats) {
  std::vector<uint64_t> seeds;
  for (std::size_t i = 0; i < repeats; ++i) seeds.push_back(seed + i);
  return seeds;
}

// The resolved flag set of a verb, one `# key=value` line each.
std::vector<std::string> preamble(const CLI::App* sub) {
  std::vector<std::string> lines{"mvcnn " + sub->get_name()};
  std::istringstream in(sub->config_to_str(true, false));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::string commented(const std::vector<std::string>& lines) {
  std::string s;
  for (const auto& l : lines) s += "# " + l + "\n";
  return s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

// ---- verbs -----------------------------------------------------------------

struct PrepFlags {
  DataFlags data;
  uint64_t seed = 0;
  std::string out = "features.csv";
  std::string frames;
};

int run_prep(const CLI::App* sub, const PrepFlags& f, std::ostream& out) {
  const Corpus corpus = load_corpus(f.data, f.seed);
  const auto data = extract(corpus, f.data, f.seed);

  std::string csv = commented(preamble(sub));
  csv += "clip,label,frame";
  for (std::size_t i = 0; i < f.data.feature_len; ++i) csv += ",f" + std::to_string(i);
  csv += '\n';
  std::size_t n_frames = 0;
  for (const auto& clip : data) {
    for (std::size_t j = 0; j < clip.frames.size(); ++j, ++n_frames) {
      csv += std::to_string(clip.source_index) + ',' +
             corpus.class_names.at(static_cast<std::size_t>(clip.label)) + ',' +
             std::to_string(j);
      for (double v : clip.frames[j].spectrum) csv += ',' + fmt(v);
      csv += '\n';
    }
  }
  write_text(f.out, csv);

  if (!f.frames.empty()) {
    // The upload stream a single node would emit, clips back to back.
    NodePipelineConfig cfg;
    cfg.features = feature_options(f.data);
    cfg.features.compute_mfcc = false;
    std::vector<unsigned char> bytes;
    uint64_t t_ms = 0;
    for (const auto& clip : corpus.clips) {
      cfg.clip_start_ms = t_ms;
      const auto msgs = node_process(clip.clip, cfg);
      for (const auto& m : msgs) {
        const auto frame = encode(m);
        bytes.insert(bytes.end(), frame.begin(), frame.end());
      }
      cfg.first_sequence += static_cast<uint32_t>(msgs.size());
      t_ms += static_cast<uint64_t>(std::llround(
          1000.0 * static_cast<double>(clip.clip.samples.size()) /
          clip.clip.sample_rate));
    }
    std::filesystem::path p(f.frames);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream fo(p, std::ios::binary | std::ios::trunc);
    fo.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
    if (!fo) throw Error(ErrorCode::kIoError, "cannot write " + p.string());
  }
  out << "clips=" << data.size() << " frames=" << n_frames << " -> " << f.out
      << '\n';
  return 0;
}

struct SynthFlags {
  uint64_t seed = 0;
  std::string out = "synthetic";
  std::size_t clips_per_class = 20;
  double clip_seconds = 2.0;
  std::string snr = "none";
};

int run_synth(const SynthFlags& f, std::ostream& out) {
  DataFlags d;
  d.clips_per_class = f.clips_per_class;
  d.clip_seconds = f.clip_seconds;
  SyntheticSpec spec = synthetic_spec(d, f.seed);
  spec.snr_db = parse_snr(f.snr);
  const auto clips = generate_synthetic(spec);

  const std::filesystem::path dir(f.out);
  std::filesystem::create_directories(dir);
  std::vector<ManifestEntry> entries;
  std::vector<std::size_t> counter(spec.n_classes(), 0);
  for (const auto& c : clips) {
    const auto label = static_cast<std::size_t>(c.label);
    char name[64];
    std::snprintf(name, sizeof name, "class%zu_%03zu.wav", label, counter[label]++);
    save_wav(c.clip, dir / name);
    entries.push_back({name, "class" + std::to_string(label)});
  }
  write_manifest(entries, dir / "manifest.csv");
  out << "wrote " << clips.size() << " clips and "
      << (dir / "manifest.csv").string() << '\n';
  return 0;
}

struct TrainFlags {
  DataFlags data;
  ModelFlags model;
  uint64_t seed = 0;
  std::string out = "model.mvc";
  std::string history;
  double val_fraction = 0.2;
  std::size_t eval_every = 10;
};

int run_train(const CLI::App* sub, const TrainFlags& f, std::ostream& out) {
  const Corpus corpus = load_corpus(f.data, f.seed);
  const auto data = extract(corpus, f.data, f.seed);
  std::vector<int> labels;
  std::vector<std::size_t> all;
  for (std::size_t i = 0; i < data.size(); ++i) {
    labels.push_back(data[i].label);
    all.push_back(i);
  }
  std::vector<std::size_t> train_idx = all, val_idx;
  if (f.val_fraction > 0.0) {
    train_idx = stratified_subsample(all, labels, 1.0 - f.val_fraction,
                                     derive_seed(f.seed, {0x7a1}));
    std::set_difference(all.begin(), all.end(), train_idx.begin(),
                        train_idx.end(), std::back_inserter(val_idx));
  }
  const auto train_frames = frames_of(data, train_idx);
  const auto val_frames = frames_of(data, val_idx);

  MethodConfig mc = method_config(f.model, f.seed);
  mc.model.n_classes = corpus.class_names.size();
  mc.train.eval_every = f.eval_every;
  TrainHistory history;
  const MultiViewCnn model =
      fit_cnn(train_frames, mc.model, mc.train, val_frames, &history);

  model.save(f.out);
  const std::string history_path =
      f.history.empty() ? f.out + ".history.csv" : f.history;
  write_text(history_path, commented(preamble(sub)) + history.to_csv());

  out << "train_frames=" << train_frames.size()
      << " validation_frames=" << val_frames.size() << '\n';
  if (!history.records.empty()) {
    out << "final_loss=" << fmt(history.records.back().loss) << '\n';
  }
  if (auto best = history.best_validation_accuracy()) {
    out << "best_validation_accuracy=" << fmt(*best) << '\n';
    out << "final_validation_accuracy="
        << fmt(history.final_validation_accuracy().value_or(0.0)) << '\n';
  }
  out << "model -> " << f.out << "\nhistory -> " << history_path << '\n';
  return 0;
}

struct EvalFlags {
  DataFlags data;
  ModelFlags model;
  uint64_t seed = 0;
  std::string out = "eval.csv";
  std::string confusion;
  std::vector<std::string> methods{"multiview"};
  std::size_t folds = 10;
  std::size_t repeats = 1;
  double train_fraction = 1.0;
  bool frame_level = false;
};

std::vector<Method> resolve_methods(const std::vector<std::string>& names) {
  std::vector<Method> methods;
  for (const auto& n : names) {
    if (n == "all") {
      methods.assign(std::begin(kAllMethods), std::end(kAllMethods));
      continue;
    }
    const auto m = parse_method(n);
    if (!m) throw Error(ErrorCode::kUsageError, "unknown method: " + n);
    methods.push_back(*m);
  }
  return methods;
}

void print_summary(std::ostream& out, Method method, const CvReport& r) {
  out << method_name(method) << ": accuracy " << fmt(r.accuracy.mean) << " +/- "
      << fmt(r.accuracy.std) << ", precision " << fmt(r.precision.mean)
      << ", recall " << fmt(r.recall.mean) << ", f1 " << fmt(r.f1.mean) << '\n';
}

std::string confusion_csv(Method method, const ConfusionMatrix& cm,
                          const std::vector<std::string>& names) {
  std::string s;
  for (std::size_t t = 0; t < cm.n_classes(); ++t) {
    s += std::string(method_name(method)) + ',' + names.at(t);
    for (std::size_t p = 0; p < cm.n_classes(); ++p) s += ',' + std::to_string(cm.at(t, p));
    s += '\n';
  }
  return s;
}

int run_eval(const CLI::App* sub, const EvalFlags& f, std::ostream& out) {
  const auto methods = resolve_methods(f.methods);
  const Corpus corpus = load_corpus(f.data, f.seed);
  const auto data = extract(corpus, f.data, f.seed);
  const std::size_t n_classes = corpus.class_names.size();
  const MethodConfig mc = method_config(f.model, f.seed);

  CvOptions cv;
  cv.folds = f.folds;
  cv.seeds = seed_range(f.seed, f.repeats);
  cv.clip_level = !f.frame_level;
  cv.train_fraction = f.train_fraction;

  std::vector<SweepRow> rows;
  std::string confusion = "method,true";
  for (const auto& n : corpus.class_names) confusion += ",pred_" + n;
  confusion += '\n';
  for (Method m : methods) {
    const CvReport r =
        run_cv(data, n_classes, classifier_factory(m, mc, n_classes), cv);
    for (const auto& fold : r.folds) {
      rows.push_back({"none", 0.0, std::string(method_name(m)), fold.fold,
                      fold.seed, fold.metrics.accuracy,
                      fold.metrics.macro_precision, fold.metrics.macro_recall,
                      fold.metrics.macro_f1});
    }
    confusion += confusion_csv(m, r.pooled, corpus.class_names);
    print_summary(out, m, r);
  }
  const auto header = preamble(sub);
  write_text(f.out, sweep_csv(rows, header));
  if (!f.confusion.empty()) write_text(f.confusion, commented(header) + confusion);
  out << "results -> " << f.out << '\n';
  return 0;
}

struct SweepFlags {
  DataFlags data;
  ModelFlags model;
  uint64_t seed = 0;
  std::string out = "sweep.csv";
  std::string axis;
  std::vector<double> grid;
  std::vector<std::string> methods{"multiview"};
  std::size_t folds = 10;
  std::size_t repeats = 1;
  bool frame_level = false;
};

int run_sweep_verb(const CLI::App* sub, const SweepFlags& f, std::ostream& out) {
  SweepSpec spec;
  const auto axis = parse_axis(f.axis);
  if (!axis) throw Error(ErrorCode::kUsageError, "unknown sweep axis: " + f.axis);
  spec.axis = *axis;
  spec.grid = f.grid.empty() ? default_grid(*axis) : f.grid;
  spec.methods = resolve_methods(f.methods);
  spec.seeds = seed_range(f.seed, f.repeats);
  spec.folds = f.folds;

  const Corpus corpus = load_corpus(f.data, f.seed);
  SweepBase base;
  base.features = feature_options(f.data);
  base.method = method_config(f.model, f.seed);
  base.snr_db = parse_snr(f.data.snr);
  base.clip_level = !f.frame_level;
  const auto rows =
      run_sweep(spec, corpus.clips, corpus.class_names.size(), base);
  write_text(f.out, sweep_csv(rows, preamble(sub)));
  out << "rows=" << rows.size() << " -> " << f.out << '\n';
  return 0;
}

struct GradcheckFlags {
  uint64_t seed = 0;
  std::size_t input_len = 32;
  std::size_t classes = 3;
  std::size_t samples = 40;
  double step = 1e-5;
  std::string out;
};

int run_gradcheck(const CLI::App* sub, const GradcheckFlags& f,
                  std::ostream& out) {
  ModelConfig mc;
  mc.input_len = f.input_len;
  mc.n_classes = f.classes;
  mc.seed = f.seed;
  MultiViewCnn model = MultiViewCnn::build(mc);
  std::mt19937_64 rng(derive_seed(f.seed, {0x9c}));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> x(f.input_len);
  for (auto& v : x) v = gauss(rng);
  const int label = static_cast<int>(f.seed % f.classes);

  GradCheckOptions opts;
  opts.step = f.step;
  opts.samples = f.samples;
  opts.seed = f.seed;
  const auto r = grad_check_model(model, x, label, opts);
  const bool pass = r.max_relative_error < 1e-4;
  out << "max_relative_error=" << fmt(r.max_relative_error)
      << " checked=" << r.checked << (pass ? " ok" : " FAILED") << '\n';
  if (!f.out.empty()) {
    write_text(f.out, commented(preamble(sub)) +
                          "max_relative_error,checked\n" +
                          fmt(r.max_relative_error) + ',' +
                          std::to_string(r.checked) + '\n');
  }
  return pass ? 0 : 1;
}

struct SimulateFlags {
  DataFlags data;
  ModelFlags model;
  uint64_t seed = 0;
  std::string out = "simulation.csv";
  std::string events;
  std::string scenario;
  std::string model_path;
  std::size_t fallback_iters = 100;
  std::size_t nodes = 5;
};

int run_simulate(const CLI::App* sub, const SimulateFlags& f, std::ostream& out) {
  const Scenario scenario = f.scenario.empty()
                                ? default_scenario(f.nodes, f.seed)
                                : load_scenario(f.scenario);
  FeatureOptions features = feature_options(f.data);

  const Corpus corpus = load_corpus(f.data, f.seed);
  std::optional<std::vector<ClipFeatures>> data;
  auto training_data = [&]() -> const std::vector<ClipFeatures>& {
    if (!data) data = extract(corpus, f.data, f.seed);
    return *data;
  };
  const std::size_t n_classes = corpus.class_names.size();
  MethodConfig mc = method_config(f.model, f.seed);
  mc.model.n_classes = n_classes;

  MultiViewCnn server;
  if (!f.model_path.empty()) {
    server = MultiViewCnn::load(f.model_path);
  } else {
    const auto& d = training_data();
    std::vector<std::size_t> all(d.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    server = fit_cnn(frames_of(d, all), mc.model, mc.train);
  }

  std::map<uint16_t, FallbackModel> fallback;
  const bool exposed =
      !scenario.server_outages.empty() ||
      std::any_of(scenario.nodes.begin(), scenario.nodes.end(),
                  [](const NodeScenario& n) { return !n.link_outages.empty(); });
  if (exposed && scenario.fallback_policy == FallbackPolicy::kClassifyLocal) {
    if (server.config().n_classes != n_classes) {
      throw Error(ErrorCode::kInvalidConfig,
                  "server model classes differ from the training corpus");
    }
    TrainConfig tc = mc.train;
    tc.iterations = f.fallback_iters;
    fallback = train_fallback_models(scenario, training_data(), n_classes,
                                     mc.model, tc);
  }

  SyntheticSpec spec = synthetic_spec(f.data, scenario.seed);
  spec.snr_db = parse_snr(f.data.snr);
  const auto recordings = scenario_recordings(scenario, spec);
  const SimulationResult result =
      simulate(scenario, recordings, server, fallback, features);

  std::vector<std::string> header = preamble(sub);
  std::istringstream sc(format_scenario(scenario));
  for (std::string line; std::getline(sc, line);) {
    if (!line.empty()) header.push_back("scenario: " + line);
  }
  write_text(f.out, commented(header) + result.records_csv());
  if (!f.events.empty()) write_text(f.events, commented(header) + result.events_csv());

  const auto n_fallback = std::count_if(
      result.records.begin(), result.records.end(),
      [](const ClassificationRecord& r) { return r.origin == Origin::kNodeFallback; });
  out << "frames=" << result.frames_sent << " records=" << result.records.size()
      << " fallback=" << n_fallback << " events=" << result.events.size()
      << " -> " << f.out << '\n';
  return 0;
}

struct TuneFlags {
  uint64_t seed = 0;
  std::string manifest;
  std::string out;
  double window_seconds = 1.0;
  std::size_t windows = 20;
  double noise_floor = 0.0;
};

std::vector<ActivityWindow> labelled_windows(const TuneFlags& f) {
  std::vector<ActivityWindow> windows;
  if (!f.manifest.empty()) {
    for (const auto& e : read_manifest(f.manifest)) {
      if (e.label != "active" && e.label != "silent") {
        throw Error(ErrorCode::kInvalidConfig,
                    "threshold manifests label clips active or silent, got " +
                        e.label);
      }
      const AudioClip clip = load_wav(e.path);
      const auto w = static_cast<std::size_t>(
          std::llround(f.window_seconds * clip.sample_rate));
      if (w == 0) throw Error(ErrorCode::kInvalidConfig, "window too short");
      for (std::size_t s = 0; s + w <= clip.samples.size(); s += w) {
        windows.push_back({{clip.samples.begin() + static_cast<std::ptrdiff_t>(s),
                            clip.samples.begin() + static_cast<std::ptrdiff_t>(s + w)},
                           e.label == "active"});
      }
    }
    return windows;
  }
  // Synthetic calls at amplitude 0.5 against a noise floor (digital silence
  // by default).
  SyntheticSpec spec = default_synthetic_spec(f.seed);
  spec.clip_seconds = f.window_seconds;
  spec.amplitude = 0.5;
  std::mt19937_64 rng(derive_seed(f.seed, {0x51}));
  std::normal_distribution<double> noise(0.0, 1.0);
  const auto n = static_cast<std::size_t>(
      std::llround(f.window_seconds * spec.sample_rate));
  for (std::size_t i = 0; i < f.windows; ++i) {
    windows.push_back({synthesize_clip(spec, i % spec.n_classes(), i).samples, true});
    std::vector<double> quiet(n);
    for (auto& v : quiet) v = f.noise_floor * noise(rng);
    windows.push_back({std::move(quiet), false});
  }
  return windows;
}

int run_tune(const CLI::App* sub, const TuneFlags& f, std::ostream& out) {
  const auto windows = labelled_windows(f);
  const auto curve = silence_threshold_curve(windows);
  const double rho = tune_silence_threshold(windows);
  if (!f.out.empty()) {
    std::string csv = commented(preamble(sub)) + "threshold,accuracy\n";
    for (const auto& p : curve) csv += fmt(p.threshold) + ',' + fmt(p.accuracy) + '\n';
    write_text(f.out, csv);
  }
  const auto best = std::find_if(curve.begin(), curve.end(), [&](const auto& p) {
    return p.threshold == rho;
  });
  out << "silence_threshold=" << fmt(rho)
      << " window_accuracy=" << fmt(best->accuracy) << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Multi-view CNN acoustic classification toolkit", "mvcnn"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.option_defaults()->always_capture_default();

  auto verb = [&app](const char* name, const char* description) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->option_defaults()->always_capture_default();
    return sub;
  };

  PrepFlags prep;
  CLI::App* prep_cmd = verb("prep", "extract binned spectra to CSV");
  add_data_flags(prep_cmd, prep.data);
  prep_cmd->add_option("--seed", prep.seed, "random seed");
  prep_cmd->add_option("--out", prep.out, "feature CSV path");
  prep_cmd->add_option("--frames", prep.frames,
                       "also write the encoded upload frames here");

  SynthFlags synth;
  CLI::App* synth_cmd = verb("synth", "write the synthetic corpus as WAV files");
  synth_cmd->add_option("--seed", synth.seed, "random seed");
  synth_cmd->add_option("--out", synth.out, "output directory");
  synth_cmd->add_option("--clips-per-class", synth.clips_per_class, "clips per class")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--clip-seconds", synth.clip_seconds, "clip duration")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--snr", synth.snr, "noise SNR in dB, or none");

  TrainFlags train;
  CLI::App* train_cmd = verb("train", "train a multi-view model");
  add_data_flags(train_cmd, train.data);
  add_model_flags(train_cmd, train.model);
  train_cmd->add_option("--seed", train.seed, "random seed");
  train_cmd->add_option("--out", train.out, "model file");
  train_cmd->add_option("--history", train.history,
                        "history CSV (default <out>.history.csv)");
  train_cmd->add_option("--val-fraction", train.val_fraction,
                        "clips held out for validation")
      ->check(CLI::Range(0.0, 0.9));
  train_cmd->add_option("--eval-every", train.eval_every,
                        "iterations between validation passes");

  EvalFlags eval;
  CLI::App* eval_cmd = verb("eval", "stratified k-fold cross-validation");
  add_data_flags(eval_cmd, eval.data);
  add_model_flags(eval_cmd, eval.model);
  eval_cmd->add_option("--seed", eval.seed, "first random seed");
  eval_cmd->add_option("--out", eval.out, "per-fold results CSV");
  eval_cmd->add_option("--confusion", eval.confusion, "pooled confusion CSV");
  eval_cmd->add_option("--method", eval.methods,
                       "multiview, single_view_cnn, knn_spectrum, knn_mfcc or all")
      ->delimiter(',');
  eval_cmd->add_option("--k", eval.folds, "number of folds")
      ->check(CLI::Range(2, 1000));
  eval_cmd->add_option("--repeats", eval.repeats, "seeds seed..seed+repeats-1")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--train-fraction", eval.train_fraction,
                       "stratified share of each training split used")
      ->check(CLI::Range(1e-9, 1.0));
  eval_cmd->add_flag("--frame-level", eval.frame_level,
                     "score frames instead of clip-level votes");

  SweepFlags sweep;
  CLI::App* sweep_cmd = verb("sweep", "cross-validate along one parameter axis");
  add_data_flags(sweep_cmd, sweep.data);
  add_model_flags(sweep_cmd, sweep.model);
  sweep_cmd->add_option("--seed", sweep.seed, "first random seed");
  sweep_cmd->add_option("--out", sweep.out, "results CSV");
  sweep_cmd->add_option("--axis", sweep.axis,
                        "window_size, iterations, dropout, learning_rate, "
                        "train_fraction or snr")
      ->required();
  sweep_cmd->add_option("--grid", sweep.grid, "axis values (default grid if empty)")
      ->delimiter(',');
  sweep_cmd->add_option("--methods", sweep.methods, "methods to compare")
      ->delimiter(',');
  sweep_cmd->add_option("--k", sweep.folds, "number of folds")
      ->check(CLI::Range(2, 1000));
  sweep_cmd->add_option("--repeats", sweep.repeats, "seeds seed..seed+repeats-1")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_flag("--frame-level", sweep.frame_level,
                      "score frames instead of clip-level votes");

  GradcheckFlags gc;
  CLI::App* gc_cmd = verb("gradcheck", "compare backprop against finite differences");
  gc_cmd->add_option("--seed", gc.seed, "random seed");
  gc_cmd->add_option("--input-len", gc.input_len, "model input length")
      ->check(CLI::Range(8, 4096));
  gc_cmd->add_option("--classes", gc.classes, "number of classes")
      ->check(CLI::Range(2, 64));
  gc_cmd->add_option("--samples", gc.samples, "coordinates probed per tensor")
      ->check(CLI::Range(20, 100000));
  gc_cmd->add_option("--step", gc.step, "central difference step")
      ->check(CLI::PositiveNumber);
  gc_cmd->add_option("--out", gc.out, "optional result CSV");

  SimulateFlags sim;
  CLI::App* sim_cmd = verb("simulate", "run the sensor network simulation");
  add_data_flags(sim_cmd, sim.data);
  add_model_flags(sim_cmd, sim.model);
  sim_cmd->add_option("--seed", sim.seed, "training and default scenario seed");
  sim_cmd->add_option("--out", sim.out, "classification records CSV");
  sim_cmd->add_option("--events", sim.events, "outage event CSV");
  sim_cmd->add_option("--scenario", sim.scenario, "scenario file");
  sim_cmd->add_option("--model", sim.model_path,
                      "server model file (trained on the fly when empty)");
  sim_cmd->add_option("--fallback-iters", sim.fallback_iters,
                      "training iterations for node fallback models");
  sim_cmd->add_option("--nodes", sim.nodes, "node count of the default scenario")
      ->check(CLI::Range(1, 1000));

  TuneFlags tune;
  CLI::App* tune_cmd = verb("tune-threshold", "pick the silence threshold");
  tune_cmd->add_option("--seed", tune.seed, "random seed");
  tune_cmd->add_option("--manifest", tune.manifest,
                       "CSV of path,label with labels active or silent");
  tune_cmd->add_option("--out", tune.out, "accuracy curve CSV");
  tune_cmd->add_option("--window-seconds", tune.window_seconds, "window duration")
      ->check(CLI::PositiveNumber);
  tune_cmd->add_option("--windows", tune.windows,
                       "synthetic windows per label when no manifest is given")
      ->check(CLI::PositiveNumber);
  tune_cmd->add_option("--noise-floor", tune.noise_floor,
                       "RMS of the synthetic silent windows")
      ->check(CLI::NonNegativeNumber);

  if (argc > 1 && argv[1][0] != '-' && app.get_subcommand_no_throw(argv[1]) == nullptr) {
    err << "mvcnn: unknown verb '" << argv[1] << "'\n" << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (prep_cmd->parsed()) return run_prep(prep_cmd, prep, out);
    if (synth_cmd->parsed()) return run_synth(synth, out);
    if (train_cmd->parsed()) return run_train(train_cmd, train, out);
    if (eval_cmd->parsed()) return run_eval(eval_cmd, eval, out);
    if (sweep_cmd->parsed()) return run_sweep_verb(sweep_cmd, sweep, out);
    if (gc_cmd->parsed()) return run_gradcheck(gc_cmd, gc, out);
    if (sim_cmd->parsed()) return run_simulate(sim_cmd, sim, out);
    if (tune_cmd->parsed()) return run_tune(tune_cmd, tune, out);
  } catch (const Error& e) {
    err << "mvcnn: " << e.what() << '\n';
    return e.code() == ErrorCode::kUsageError ? 2 : 1;
  } catch (const std::exception& e) {
    err << "mvcnn: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace mvcnn
