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

// Node -> server spectrum upload frame:
//
//   "SPM1" | u16 node_id | u32 sequence_no | u64 timestamp_ms |
//   u32 feature_len | f32 payload[feature_len] | u32 crc32
//
// All integers little-endian; the CRC (IEEE 802.3) covers every byte before
// it.

#ifndef MVCNN_PROTOCOL_H_
#define MVCNN_PROTOCOL_H_

#include <cstdint>
#include <span>
#include <vector>

namespace mvcnn {

struct SpectrumMessage {
  uint16_t node_id = 0;
  uint32_t sequence_no = 0;
  uint64_t timestamp_ms = 0;
  std::vector<float> payload;

  uint32_t feature_len() const { return static_cast<uint32_t>(payload.size()); }

  friend bool operator==(const SpectrumMessage&, const SpectrumMessage&) = default;
};

inline constexpr std::size_t kFrameHeaderBytes = 4 + 2 + 4 + 8 + 4;
inline constexpr std::size_t kFrameOverheadBytes = kFrameHeaderBytes + 4;

uint32_t crc32(std::span<const unsigned char> bytes);

std::vector<unsigned char> encode(const SpectrumMessage& msg);

// Errors: kTruncated (short buffer or trailing bytes), kBadMagic,
// kCrcMismatch.
SpectrumMessage decode(std::span<const unsigned char> frame);

}  // namespace mvcnn

#endif  // MVCNN_PROTOCOL_H_
