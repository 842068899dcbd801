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

// Offload scenario description and its text format.
//
// The file is UTF-8, one `key = value` per line, `#` starts a comment.
// Global keys come first; `[node N]` opens a section for node N (1-based,
// node 1 is the hub that relays the others). Times are in simulated ms and
// outage windows are closed intervals `start end`.
//
//   seed = 7
//   n_nodes = 5
//   clips_per_node = 3
//   clip_seconds = 2
//   link_latency_ms = 20        # node 1 -> server
//   relay_latency_ms = 15       # extra hop for nodes 2..n via node 1
//   local_latency_ms = 5        # on-node fallback classification
//   server_latency_ms = 2
//   max_skew_ms = 25
//   fallback_policy = classify_local   # or buffer_forward
//   server_outage = 3000 6000          # repeatable
//
//   [node 2]
//   clock_skew_ms = -12
//   link_outage = 1000 2500            # repeatable
//   fallback_classes = 0 1

#ifndef MVCNN_SCENARIO_H_
#define MVCNN_SCENARIO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mvcnn {

struct Interval {
  uint64_t start_ms = 0;
  uint64_t end_ms = 0;

  bool contains(uint64_t t) const { return t >= start_ms && t <= end_ms; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

enum class FallbackPolicy { kClassifyLocal, kBufferForward };

struct NodeScenario {
  uint16_t id = 1;
  int64_t clock_skew_ms = 0;
  std::vector<Interval> link_outages;
  // Empty means every class of the server model.
  std::vector<int> fallback_classes;

  friend bool operator==(const NodeScenario&, const NodeScenario&) = default;
};

struct Scenario {
  uint64_t seed = 0;
  std::size_t n_nodes = 5;
  std::size_t clips_per_node = 3;
  double clip_seconds = 2.0;
  uint64_t link_latency_ms = 20;
  uint64_t relay_latency_ms = 15;
  uint64_t local_latency_ms = 5;
  uint64_t server_latency_ms = 2;
  int64_t max_skew_ms = 25;
  FallbackPolicy fallback_policy = FallbackPolicy::kClassifyLocal;
  std::vector<Interval> server_outages;
  std::vector<NodeScenario> nodes;  // one per node, ids 1..n_nodes

  const NodeScenario& node(uint16_t id) const { return nodes.at(id - 1u); }
  NodeScenario& node(uint16_t id) { return nodes.at(id - 1u); }

  // Throws kInvalidScenario.
  void validate() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Scenario with n nodes, default parameters and no outages.
Scenario default_scenario(std::size_t n_nodes = 5, uint64_t seed = 0);

Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);
std::string format_scenario(const Scenario& scenario);

}  // namespace mvcnn

#endif  // MVCNN_SCENARIO_H_
