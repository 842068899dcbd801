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

#include "mvcnn/simulator.h"

#include <algorithm>
#include <queue>
#include <random>
#include <sstream>

#include "mvcnn/error.h"
#include "mvcnn/evaluation.h"
#include "mvcnn/random.h"

namespace mvcnn {

namespace {

struct TimedMessage {
  SpectrumMessage msg;
  uint64_t true_ms = 0;
};

std::vector<TimedMessage> node_process_timed(const AudioClip& clip,
                                             const NodePipelineConfig& config) {
  const AudioClip active = condition_clip(clip, config.features);
  std::vector<TimedMessage> out;
  uint32_t seq = config.first_sequence;
  for (const Frame& raw :
       segment(active, config.features.window_len, config.features.overlap)) {
    const auto binned = bin_average(
        fft_magnitude(apply_hamming(raw), clip.sample_rate),
        config.features.feature_len);
    TimedMessage t;
    t.msg.node_id = config.node_id;
    t.msg.sequence_no = seq++;
    const auto end_sample = static_cast<uint64_t>(raw.start_offset + raw.size());
    t.true_ms = config.clip_start_ms +
                end_sample * 1000 / static_cast<uint64_t>(clip.sample_rate);
    t.msg.timestamp_ms = static_cast<uint64_t>(std::max<int64_t>(
        0, static_cast<int64_t>(t.true_ms) + config.clock_skew_ms));
    t.msg.payload.assign(binned.begin(), binned.end());
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

std::vector<SpectrumMessage> node_process(const AudioClip& clip,
                                          const NodePipelineConfig& config) {
  std::vector<SpectrumMessage> out;
  for (auto& t : node_process_timed(clip, config)) out.push_back(std::move(t.msg));
  return out;
}

std::string_view origin_name(Origin origin) {
  return origin == Origin::kServer ? "server" : "node_fallback";
}

ClassificationRecord server_classify(const SpectrumMessage& msg,
                                     const MultiViewCnn& model) {
  if (msg.feature_len() != model.config().input_len) {
    throw Error(ErrorCode::kLengthMismatch,
                "message carries " + std::to_string(msg.feature_len()) +
                    " values, model expects " +
                    std::to_string(model.config().input_len));
  }
  const std::vector<double> raw(msg.payload.begin(), msg.payload.end());
  ClassificationRecord rec;
  rec.node_id = msg.node_id;
  rec.sequence_no = msg.sequence_no;
  rec.timestamp_ms = msg.timestamp_ms;
  rec.probabilities = model.classify_raw(raw);
  rec.predicted = static_cast<int>(
      std::max_element(rec.probabilities.begin(), rec.probabilities.end()) -
      rec.probabilities.begin());
  rec.origin = Origin::kServer;
  return rec;
}

namespace {

ClassificationRecord fallback_classify(const SpectrumMessage& msg,
                                       const FallbackModel& fb,
                                       std::size_t n_server_classes) {
  const std::vector<double> raw(msg.payload.begin(), msg.payload.end());
  const auto local = fb.model.classify_raw(raw);
  const auto best = static_cast<std::size_t>(
      std::max_element(local.begin(), local.end()) - local.begin());
  ClassificationRecord rec;
  rec.node_id = msg.node_id;
  rec.sequence_no = msg.sequence_no;
  rec.timestamp_ms = msg.timestamp_ms;
  rec.predicted = fb.classes.at(best);
  rec.probabilities.assign(n_server_classes, 0.0);
  for (std::size_t j = 0; j < local.size(); ++j) {
    rec.probabilities[static_cast<std::size_t>(fb.classes[j])] = local[j];
  }
  rec.origin = Origin::kNodeFallback;
  return rec;
}

bool any_contains(const std::vector<Interval>& windows, uint64_t t) {
  return std::any_of(windows.begin(), windows.end(),
                     [t](const Interval& w) { return w.contains(t); });
}

// First time >= t at which neither the node link nor the server is down.
uint64_t next_clear(const Scenario& s, const NodeScenario& node, uint64_t t) {
  bool moved = true;
  while (moved) {
    moved = false;
    for (const auto* windows : {&node.link_outages, &s.server_outages}) {
      for (const auto& w : *windows) {
        if (w.contains(t)) {
          t = w.end_ms + 1;
          moved = true;
        }
      }
    }
  }
  return t;
}

enum class EventType { kOutageEdge, kProduce, kComplete };

struct QueuedEvent {
  uint64_t time;
  uint64_t order;
  EventType type;
  std::size_t index;  // message index or edge index

  bool operator>(const QueuedEvent& o) const {
    return std::tie(time, order) > std::tie(o.time, o.order);
  }
};

struct PendingMessage {
  SpectrumMessage msg;
  uint64_t produced_ms = 0;
  std::vector<unsigned char> frame;
  Origin origin = Origin::kServer;
};

}  // namespace

SimulationResult simulate(const Scenario& scenario,
                          const std::vector<std::vector<AudioClip>>& node_clips,
                          const MultiViewCnn& server,
                          const std::map<uint16_t, FallbackModel>& fallback,
                          const FeatureOptions& base_features) {
  scenario.validate();
  if (node_clips.size() != scenario.n_nodes) {
    throw Error(ErrorCode::kInvalidScenario,
                "recordings supplied for " + std::to_string(node_clips.size()) +
                    " nodes, scenario has " + std::to_string(scenario.n_nodes));
  }
  const std::size_t n_classes = server.config().n_classes;
  const bool local_policy =
      scenario.fallback_policy == FallbackPolicy::kClassifyLocal;
  for (const auto& node : scenario.nodes) {
    const bool exposed =
        !node.link_outages.empty() || !scenario.server_outages.empty();
    const auto it = fallback.find(node.id);
    if (it == fallback.end()) {
      if (exposed && local_policy) {
        throw Error(ErrorCode::kInvalidScenario,
                    "node " + std::to_string(node.id) +
                        " can lose its link but has no fallback model");
      }
      continue;
    }
    const auto& fb = it->second;
    if (fb.classes.size() != fb.model.config().n_classes ||
        fb.model.config().input_len != server.config().input_len) {
      throw Error(ErrorCode::kInvalidScenario,
                  "fallback model of node " + std::to_string(node.id) +
                      " does not match its class map or the server input");
    }
    for (int c : fb.classes) {
      if (c < 0 || static_cast<std::size_t>(c) >= n_classes) {
        throw Error(ErrorCode::kInvalidScenario,
                    "fallback class " + std::to_string(c) +
                        " is not a server class");
      }
      if (!node.fallback_classes.empty() &&
          std::find(node.fallback_classes.begin(), node.fallback_classes.end(),
                    c) == node.fallback_classes.end()) {
        throw Error(ErrorCode::kInvalidScenario,
                    "fallback model of node " + std::to_string(node.id) +
                        " covers class " + std::to_string(c) +
                        " outside the configured subset");
      }
    }
  }

  FeatureOptions features = base_features;
  features.feature_len = server.config().input_len;
  features.compute_mfcc = false;

  // Node pipelines are pure; messages are generated up front.
  std::vector<PendingMessage> messages;
  for (const auto& node : scenario.nodes) {
    NodePipelineConfig cfg;
    cfg.node_id = node.id;
    cfg.features = features;
    cfg.clock_skew_ms = node.clock_skew_ms;
    uint64_t start_ms = 0;
    for (const auto& clip : node_clips[node.id - 1u]) {
      cfg.clip_start_ms = start_ms;
      auto produced = node_process_timed(clip, cfg);
      cfg.first_sequence += static_cast<uint32_t>(produced.size());
      for (auto& t : produced) {
        // Routing runs on true time; the frame keeps the skewed stamp.
        messages.push_back({std::move(t.msg), t.true_ms, {}, Origin::kServer});
      }
      start_ms += static_cast<uint64_t>(clip.size()) * 1000 /
                  static_cast<uint64_t>(clip.sample_rate);
    }
  }

  struct Edge {
    uint64_t time;
    std::string kind;
    uint16_t node;
  };
  std::vector<Edge> edges;
  for (const auto& w : scenario.server_outages) {
    edges.push_back({w.start_ms, "server_outage_start", 0});
    edges.push_back({w.end_ms, "server_outage_end", 0});
  }
  for (const auto& node : scenario.nodes) {
    for (const auto& w : node.link_outages) {
      edges.push_back({w.start_ms, "link_outage_start", node.id});
      edges.push_back({w.end_ms, "link_outage_end", node.id});
    }
  }

  std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, std::greater<>> queue;
  uint64_t order = 0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    queue.push({edges[i].time, order++, EventType::kOutageEdge, i});
  }
  for (std::size_t i = 0; i < messages.size(); ++i) {
    queue.push({messages[i].produced_ms, order++, EventType::kProduce, i});
  }

  SimulationResult result;
  std::map<uint16_t, uint64_t> last_completion;
  while (!queue.empty()) {
    const QueuedEvent ev = queue.top();
    queue.pop();
    switch (ev.type) {
      case EventType::kOutageEdge:
        result.events.push_back({ev.time, edges[ev.index].kind, edges[ev.index].node});
        break;
      case EventType::kProduce: {
        PendingMessage& p = messages[ev.index];
        const NodeScenario& node = scenario.node(p.msg.node_id);
        const bool down = any_contains(node.link_outages, ev.time) ||
                          any_contains(scenario.server_outages, ev.time);
        uint64_t done;
        if (down && local_policy) {
          p.origin = Origin::kNodeFallback;
          done = ev.time + scenario.local_latency_ms;
        } else {
          p.origin = Origin::kServer;
          const uint64_t send = down ? next_clear(scenario, node, ev.time) : ev.time;
          const uint64_t hops =
              scenario.link_latency_ms + (node.id == 1 ? 0 : scenario.relay_latency_ms);
          done = send + hops + scenario.server_latency_ms;
          p.frame = encode(p.msg);
          ++result.frames_sent;
        }
        auto& last = last_completion[node.id];
        done = std::max(done, last);
        last = done;
        queue.push({done, order++, EventType::kComplete, ev.index});
        break;
      }
      case EventType::kComplete: {
        const PendingMessage& p = messages[ev.index];
        ClassificationRecord rec =
            p.origin == Origin::kServer
                ? server_classify(decode(p.frame), server)
                : fallback_classify(p.msg, fallback.at(p.msg.node_id), n_classes);
        rec.produced_ms = p.produced_ms;
        rec.latency_ms = ev.time - p.produced_ms;
        result.records.push_back(std::move(rec));
        break;
      }
    }
  }
  return result;
}

std::string SimulationResult::records_csv() const {
  std::ostringstream out;
  out << "node,sequence,timestamp_ms,origin,predicted,latency_ms\n";
  for (const auto& r : records) {
    out << r.node_id << ',' << r.sequence_no << ',' << r.timestamp_ms << ','
        << origin_name(r.origin) << ',' << r.predicted << ',' << r.latency_ms
        << '\n';
  }
  return out.str();
}

std::string SimulationResult::events_csv() const {
  std::ostringstream out;
  out << "time_ms,event,node\n";
  for (const auto& e : events) {
    out << e.time_ms << ',' << e.kind << ',' << e.node_id << '\n';
  }
  return out.str();
}

std::map<uint16_t, FallbackModel> train_fallback_models(
    const Scenario& scenario, std::span<const ClipFeatures> dataset,
    std::size_t n_classes, const ModelConfig& model_config,
    const TrainConfig& train_config) {
  std::map<std::vector<int>, FallbackModel> by_subset;
  std::map<uint16_t, FallbackModel> out;
  for (const auto& node : scenario.nodes) {
    std::vector<int> classes = node.fallback_classes;
    if (classes.empty()) {
      for (std::size_t c = 0; c < n_classes; ++c) classes.push_back(static_cast<int>(c));
    }
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    auto it = by_subset.find(classes);
    if (it == by_subset.end()) {
      std::vector<LabeledFrame> frames;
      for (const auto& clip : dataset) {
        const auto pos = std::find(classes.begin(), classes.end(), clip.label);
        if (pos == classes.end()) continue;
        const int local = static_cast<int>(pos - classes.begin());
        for (const auto& f : clip.frames) frames.push_back({&f, local});
      }
      ModelConfig mc = model_config;
      mc.n_classes = classes.size();
      mc.seed = derive_seed(model_config.seed, {by_subset.size(), 0xfb});
      TrainConfig tc = train_config;
      tc.seed = derive_seed(train_config.seed, {by_subset.size(), 0xfb});
      it = by_subset.emplace(classes, FallbackModel{fit_cnn(frames, mc, tc), classes})
               .first;
    }
    out.emplace(node.id, it->second);
  }
  return out;
}

std::vector<std::vector<AudioClip>> scenario_recordings(
    const Scenario& scenario, const SyntheticSpec& synthetic) {
  SyntheticSpec spec = synthetic;
  spec.clip_seconds = scenario.clip_seconds;
  spec.seed = scenario.seed;
  spec.validate();
  std::vector<std::vector<AudioClip>> out(scenario.n_nodes);
  for (std::size_t n = 0; n < scenario.n_nodes; ++n) {
    std::mt19937_64 rng(derive_seed(scenario.seed, {n + 1}));
    std::uniform_int_distribution<std::size_t> pick(0, spec.n_classes() - 1);
    for (std::size_t j = 0; j < scenario.clips_per_node; ++j) {
      out[n].push_back(synthesize_clip(spec, pick(rng), (n + 1) * 100000 + j));
    }
  }
  return out;
}

}  // namespace mvcnn
