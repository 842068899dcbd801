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

#include "mvcnn/scenario.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "mvcnn/error.h"

namespace mvcnn {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kInvalidScenario,
              "line " + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto start = s.find_first_not_of(" \t", pos);
    if (start == std::string_view::npos) break;
    auto end = s.find_first_of(" \t", start);
    if (end == std::string_view::npos) end = s.size();
    out.push_back(s.substr(start, end - start));
    pos = end;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view text, std::size_t line) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    fail(line, "cannot parse number '" + std::string(text) + "'");
  }
  return value;
}

Interval parse_interval(std::string_view value, std::size_t line) {
  const auto w = words(value);
  if (w.size() != 2) fail(line, "expected 'start end'");
  return {parse_number<uint64_t>(w[0], line), parse_number<uint64_t>(w[1], line)};
}

void check_windows(const std::vector<Interval>& windows, const std::string& who) {
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (windows[i].start_ms > windows[i].end_ms) {
      throw Error(ErrorCode::kInvalidScenario, who + " outage ends before it starts");
    }
    if (i > 0 && windows[i].start_ms <= windows[i - 1].end_ms) {
      throw Error(ErrorCode::kInvalidScenario,
                  who + " outages must be sorted and disjoint");
    }
  }
}

}  // namespace

void Scenario::validate() const {
  if (n_nodes < 1 || n_nodes > 65535) {
    throw Error(ErrorCode::kInvalidScenario, "n_nodes must lie in [1, 65535]");
  }
  if (nodes.size() != n_nodes) {
    throw Error(ErrorCode::kInvalidScenario, "node table size differs from n_nodes");
  }
  if (!(clip_seconds > 0.0)) {
    throw Error(ErrorCode::kInvalidScenario, "clip_seconds must be positive");
  }
  if (max_skew_ms < 0) {
    throw Error(ErrorCode::kInvalidScenario, "max_skew_ms must be >= 0");
  }
  check_windows(server_outages, "server");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    const std::string who = "node " + std::to_string(n.id);
    if (n.id != i + 1) {
      throw Error(ErrorCode::kInvalidScenario, "node ids must be 1..n_nodes");
    }
    if (n.clock_skew_ms < -max_skew_ms || n.clock_skew_ms > max_skew_ms) {
      throw Error(ErrorCode::kInvalidScenario, who + " clock skew exceeds bound");
    }
    check_windows(n.link_outages, who);
    for (int c : n.fallback_classes) {
      if (c < 0) throw Error(ErrorCode::kInvalidScenario, who + " negative class");
    }
  }
}

Scenario default_scenario(std::size_t n_nodes, uint64_t seed) {
  Scenario s;
  s.seed = seed;
  s.n_nodes = n_nodes;
  for (std::size_t i = 0; i < n_nodes; ++i) {
    s.nodes.push_back(NodeScenario{static_cast<uint16_t>(i + 1), 0, {}, {}});
  }
  return s;
}

Scenario parse_scenario(std::string_view text) {
  struct Pending {
    std::size_t id;
    NodeScenario node;
  };
  Scenario s;
  s.nodes.clear();
  std::vector<Pending> sections;
  bool in_section = false;
  bool saw_n_nodes = false;

  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      const auto w = words(line.substr(1, line.size() - 2));
      if (w.size() != 2 || w[0] != "node") fail(line_no, "expected [node N]");
      const auto id = parse_number<std::size_t>(w[1], line_no);
      if (id < 1 || id > 65535) fail(line_no, "node id out of range");
      for (const auto& p : sections) {
        if (p.id == id) fail(line_no, "duplicate section for node " + std::to_string(id));
      }
      sections.push_back({id, NodeScenario{static_cast<uint16_t>(id), 0, {}, {}}});
      in_section = true;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));

    if (in_section) {
      NodeScenario& node = sections.back().node;
      if (key == "clock_skew_ms") {
        node.clock_skew_ms = parse_number<int64_t>(value, line_no);
      } else if (key == "link_outage") {
        node.link_outages.push_back(parse_interval(value, line_no));
      } else if (key == "fallback_classes") {
        for (auto w : words(value)) {
          node.fallback_classes.push_back(parse_number<int>(w, line_no));
        }
      } else {
        fail(line_no, "unknown node key '" + std::string(key) + "'");
      }
      continue;
    }

    if (key == "seed") {
      s.seed = parse_number<uint64_t>(value, line_no);
    } else if (key == "n_nodes") {
      s.n_nodes = parse_number<std::size_t>(value, line_no);
      saw_n_nodes = true;
    } else if (key == "clips_per_node") {
      s.clips_per_node = parse_number<std::size_t>(value, line_no);
    } else if (key == "clip_seconds") {
      s.clip_seconds = parse_number<double>(value, line_no);
    } else if (key == "link_latency_ms") {
      s.link_latency_ms = parse_number<uint64_t>(value, line_no);
    } else if (key == "relay_latency_ms") {
      s.relay_latency_ms = parse_number<uint64_t>(value, line_no);
    } else if (key == "local_latency_ms") {
      s.local_latency_ms = parse_number<uint64_t>(value, line_no);
    } else if (key == "server_latency_ms") {
      s.server_latency_ms = parse_number<uint64_t>(value, line_no);
    } else if (key == "max_skew_ms") {
      s.max_skew_ms = parse_number<int64_t>(value, line_no);
    } else if (key == "fallback_policy") {
      if (value == "classify_local") {
        s.fallback_policy = FallbackPolicy::kClassifyLocal;
      } else if (value == "buffer_forward") {
        s.fallback_policy = FallbackPolicy::kBufferForward;
      } else {
        fail(line_no, "unknown fallback_policy '" + std::string(value) + "'");
      }
    } else if (key == "server_outage") {
      s.server_outages.push_back(parse_interval(value, line_no));
    } else {
      fail(line_no, "unknown key '" + std::string(key) + "'");
    }
  }
  if (!saw_n_nodes && !sections.empty()) {
    s.n_nodes = std::max_element(sections.begin(), sections.end(),
                                 [](const Pending& a, const Pending& b) {
                                   return a.id < b.id;
                                 })->id;
  }
  for (std::size_t i = 0; i < s.n_nodes; ++i) {
    s.nodes.push_back(NodeScenario{static_cast<uint16_t>(i + 1), 0, {}, {}});
  }
  for (auto& p : sections) {
    if (p.id > s.n_nodes) {
      throw Error(ErrorCode::kInvalidScenario,
                  "section for node " + std::to_string(p.id) + " but n_nodes = " +
                      std::to_string(s.n_nodes));
    }
    s.nodes[p.id - 1] = std::move(p.node);
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

std::string format_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "seed = " << s.seed << '\n'
      << "n_nodes = " << s.n_nodes << '\n'
      << "clips_per_node = " << s.clips_per_node << '\n'
      << "clip_seconds = " << s.clip_seconds << '\n'
      << "link_latency_ms = " << s.link_latency_ms << '\n'
      << "relay_latency_ms = " << s.relay_latency_ms << '\n'
      << "local_latency_ms = " << s.local_latency_ms << '\n'
      << "server_latency_ms = " << s.server_latency_ms << '\n'
      << "max_skew_ms = " << s.max_skew_ms << '\n'
      << "fallback_policy = "
      << (s.fallback_policy == FallbackPolicy::kClassifyLocal ? "classify_local"
                                                              : "buffer_forward")
      << '\n';
  for (const auto& w : s.server_outages) {
    out << "server_outage = " << w.start_ms << ' ' << w.end_ms << '\n';
  }
  for (const auto& n : s.nodes) {
    if (n.clock_skew_ms == 0 && n.link_outages.empty() &&
        n.fallback_classes.empty()) {
      continue;
    }
    out << "\n[node " << n.id << "]\n";
    out << "clock_skew_ms = " << n.clock_skew_ms << '\n';
    for (const auto& w : n.link_outages) {
      out << "link_outage = " << w.start_ms << ' ' << w.end_ms << '\n';
    }
    if (!n.fallback_classes.empty()) {
      out << "fallback_classes =";
      for (int c : n.fallback_classes) out << ' ' << c;
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace mvcnn
