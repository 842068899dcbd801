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

// Discrete-event model of the node/server offload architecture.
//
// Nodes turn their recordings into SpectrumMessages. A message produced
// while its node's link or the server is down is either classified on the
// node by a reduced-class fallback model or held until the path recovers
// (FallbackPolicy). Delivery is reliable and in order per node; nodes 2..n
// pay one extra relay hop through node 1.

#ifndef MVCNN_SIMULATOR_H_
#define MVCNN_SIMULATOR_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mvcnn/features.h"
#include "mvcnn/model.h"
#include "mvcnn/protocol.h"
#include "mvcnn/scenario.h"
#include "mvcnn/synthetic.h"

namespace mvcnn {

struct NodePipelineConfig {
  uint16_t node_id = 1;
  FeatureOptions features;
  uint32_t first_sequence = 0;
  uint64_t clip_start_ms = 0;  // true simulated time the recording began
  int64_t clock_skew_ms = 0;
};

// High-pass, silence removal, segmentation, Hamming, FFT, binning; one
// message per frame. Timestamps are the node-clock time at which the frame
// finished recording.
std::vector<SpectrumMessage> node_process(const AudioClip& clip,
                                          const NodePipelineConfig& config);

enum class Origin { kServer, kNodeFallback };

std::string_view origin_name(Origin origin);

struct ClassificationRecord {
  uint16_t node_id = 0;
  uint32_t sequence_no = 0;
  uint64_t timestamp_ms = 0;  // node clock, as carried in the frame
  uint64_t produced_ms = 0;   // true simulated time
  int predicted = 0;
  std::vector<double> probabilities;
  Origin origin = Origin::kServer;
  uint64_t latency_ms = 0;
};

ClassificationRecord server_classify(const SpectrumMessage& msg,
                                     const MultiViewCnn& model);

// Model whose output j stands for server class classes[j].
struct FallbackModel {
  MultiViewCnn model;
  std::vector<int> classes;
};

struct SimEvent {
  uint64_t time_ms = 0;
  std::string kind;  // e.g. link_outage_start
  uint16_t node_id = 0;  // 0 for server events
};

struct SimulationResult {
  std::vector<ClassificationRecord> records;  // completion order
  std::vector<SimEvent> events;
  std::size_t frames_sent = 0;

  // node,sequence,timestamp_ms,origin,predicted,latency_ms
  std::string records_csv() const;
  std::string events_csv() const;
};

// node_clips[i] holds the recordings of node i + 1, played back to back
// starting at t = 0. `fallback` maps node id -> model; required for every
// node that can see an outage under the classify_local policy.
SimulationResult simulate(const Scenario& scenario,
                          const std::vector<std::vector<AudioClip>>& node_clips,
                          const MultiViewCnn& server,
                          const std::map<uint16_t, FallbackModel>& fallback,
                          const FeatureOptions& features = {});

// Synthetic recordings for each node, classes drawn with the scenario seed.
// Trains one reduced-class model per node over its fallback subset (all
// classes when the subset is empty). Nodes with equal subsets share a model.
std::map<uint16_t, FallbackModel> train_fallback_models(
    const Scenario& scenario, std::span<const ClipFeatures> dataset,
    std::size_t n_classes, const ModelConfig& model_config,
    const TrainConfig& train_config);

std::vector<std::vector<AudioClip>> scenario_recordings(
    const Scenario& scenario, const SyntheticSpec& synthetic);

}  // namespace mvcnn

#endif  // MVCNN_SIMULATOR_H_
