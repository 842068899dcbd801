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

#include "mvcnn/protocol.h"

#include <zlib.h>

#include <string>

#include "mvcnn/binary_io.h"
#include "mvcnn/error.h"

namespace mvcnn {

uint32_t crc32(std::span<const unsigned char> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in pieces.
  constexpr std::size_t kChunk = 1u << 30;
  for (std::size_t pos = 0; pos < bytes.size(); pos += kChunk) {
    const std::size_t n = std::min(kChunk, bytes.size() - pos);
    crc = ::crc32(crc, bytes.data() + pos, static_cast<uInt>(n));
  }
  return static_cast<uint32_t>(crc);
}

std::vector<unsigned char> encode(const SpectrumMessage& msg) {
  ByteWriter w;
  w.put_magic("SPM1");
  w.put<uint16_t>(msg.node_id);
  w.put<uint32_t>(msg.sequence_no);
  w.put<uint64_t>(msg.timestamp_ms);
  w.put<uint32_t>(msg.feature_len());
  for (float v : msg.payload) w.put<float>(v);
  w.put<uint32_t>(crc32(w.bytes()));
  return w.take();
}

SpectrumMessage decode(std::span<const unsigned char> frame) {
  ByteReader r(frame, ErrorCode::kTruncated);
  if (!r.magic_matches("SPM1")) {
    throw Error(ErrorCode::kBadMagic, "frame does not start with SPM1");
  }
  SpectrumMessage msg;
  msg.node_id = r.get<uint16_t>();
  msg.sequence_no = r.get<uint32_t>();
  msg.timestamp_ms = r.get<uint64_t>();
  const uint32_t len = r.get<uint32_t>();
  if (r.remaining() / 4 < static_cast<std::size_t>(len) + 1) {
    throw Error(ErrorCode::kTruncated,
                "frame declares " + std::to_string(len) +
                    " values but holds " + std::to_string(frame.size()) +
                    " bytes");
  }
  msg.payload.resize(len);
  for (auto& v : msg.payload) v = r.get<float>();
  const std::size_t body = r.position();
  const uint32_t stored = r.get<uint32_t>();
  if (r.remaining() != 0) {
    throw Error(ErrorCode::kTruncated,
                std::to_string(r.remaining()) + " trailing bytes after frame");
  }
  if (crc32(frame.first(body)) != stored) {
    throw Error(ErrorCode::kCrcMismatch, "frame checksum mismatch");
  }
  return msg;
}

}  // namespace mvcnn
