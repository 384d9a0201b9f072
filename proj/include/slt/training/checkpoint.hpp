// Copyright 2026 The jointslt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "slt/numcore/tensor.hpp"
#include "slt/transformer/layers.hpp"

namespace slt {

struct CheckpointEntry {
  std::string name;
  Shape shape;
  std::vector<float> data;

  bool operator==(const CheckpointEntry&) const = default;
};

/// Plain copy of a parameter set, in the owner's parameter order.
struct Checkpoint {
  std::vector<CheckpointEntry> entries;

  const CheckpointEntry* find(const std::string& name) const {
    for (const auto& e : entries)
      if (e.name == name) return &e;
    return nullptr;
  }
  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& e : entries) n += e.data.size();
    return n;
  }
  bool operator==(const Checkpoint&) const = default;
};

template <class T>
Checkpoint snapshot(const NamedParams<T>& params) {
  Checkpoint c;
  for (const auto& [name, t] : params) {
    auto d = t.data();
    c.entries.push_back({name, t.shape(), std::vector<float>(d.begin(), d.end())});
  }
  return c;
}

/// Copies matching entries into `params`. Every parameter must be present
/// unless listed in `skip`; a shape difference names the layer.
template <class T>
void load_parameters(const NamedParams<T>& params, const Checkpoint& ckpt,
                     const std::vector<std::string>& skip = {}, const std::string& prefix = "") {
  for (const auto& [name, t] : params) {
    if (std::find(skip.begin(), skip.end(), name) != skip.end()) continue;
    const auto* e = ckpt.find(name);
    if (!e) throw Error("checkpoint lacks parameter '" + prefix + name + "'");
    if (e->shape != t.shape()) {
      throw Error("parameter '" + prefix + name + "': checkpoint shape " + shape_str(e->shape) + " vs model " +
                  shape_str(t.shape()));
    }
    Tensor<T> dst = t;
    auto out = dst.mutable_data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = T(e->data[i]);
  }
}

/// Elementwise mean; all checkpoints must share names and shapes in order.
inline Checkpoint average_checkpoints(const std::vector<Checkpoint>& ckpts) {
  if (ckpts.empty()) throw Error("average_checkpoints: no checkpoints");
  const Checkpoint& first = ckpts.front();
  for (std::size_t c = 1; c < ckpts.size(); ++c) {
    if (ckpts[c].entries.size() != first.entries.size()) {
      throw Error("average_checkpoints: checkpoint " + std::to_string(c) + " has a different parameter count");
    }
    for (std::size_t i = 0; i < first.entries.size(); ++i) {
      const auto& a = first.entries[i];
      const auto& b = ckpts[c].entries[i];
      if (a.name != b.name || a.shape != b.shape) {
        throw Error("average_checkpoints: checkpoint " + std::to_string(c) + " entry '" + b.name + "' " +
                    shape_str(b.shape) + " does not match '" + a.name + "' " + shape_str(a.shape));
      }
    }
  }
  Checkpoint avg = first;
  for (std::size_t i = 0; i < avg.entries.size(); ++i) {
    auto& out = avg.entries[i].data;
    for (std::size_t j = 0; j < out.size(); ++j) {
      double s = 0.0;
      for (const auto& c : ckpts) s += c.entries[i].data[j];
      out[j] = float(s / double(ckpts.size()));
    }
  }
  return avg;
}

namespace detail {

inline constexpr char kCheckpointMagic[5] = {'S', 'Q', 'B', 'R', '1'};

inline void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(char((v >> (8 * i)) & 0xff));
}

inline std::uint32_t get_u32(const std::string& buf, std::size_t& pos) {
  if (pos + 4 > buf.size()) throw Error("checkpoint truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(std::uint8_t(buf[pos + std::size_t(i)])) << (8 * i);
  pos += 4;
  return v;
}

}  // namespace detail

/// Layout: "SQBR1", u32 manifest length, manifest (u32 count, then per entry
/// u32 name length, name, u32 rank, u32 dims), then float32 data. All
/// integers and floats are little-endian.
inline std::string serialize_checkpoint(const Checkpoint& c) {
  std::string manifest;
  detail::put_u32(manifest, std::uint32_t(c.entries.size()));
  for (const auto& e : c.entries) {
    detail::put_u32(manifest, std::uint32_t(e.name.size()));
    manifest += e.name;
    detail::put_u32(manifest, std::uint32_t(e.shape.size()));
    for (auto d : e.shape) detail::put_u32(manifest, std::uint32_t(d));
  }
  std::string out(detail::kCheckpointMagic, 5);
  detail::put_u32(out, std::uint32_t(manifest.size()));
  out += manifest;
  for (const auto& e : c.entries) {
    for (float f : e.data) detail::put_u32(out, std::bit_cast<std::uint32_t>(f));
  }
  return out;
}

inline Checkpoint deserialize_checkpoint(const std::string& buf) {
  if (buf.size() < 9 || std::memcmp(buf.data(), detail::kCheckpointMagic, 5) != 0) {
    throw Error("not a checkpoint (bad magic)");
  }
  std::size_t pos = 5;
  const std::size_t manifest_len = detail::get_u32(buf, pos);
  const std::size_t data_start = pos + manifest_len;
  if (data_start > buf.size()) throw Error("checkpoint truncated");
  Checkpoint c;
  const std::uint32_t count = detail::get_u32(buf, pos);
  for (std::uint32_t i = 0; i < count; ++i) {
    CheckpointEntry e;
    const std::size_t len = detail::get_u32(buf, pos);
    if (pos + len > data_start) throw Error("checkpoint manifest corrupt");
    e.name = buf.substr(pos, len);
    pos += len;
    const std::uint32_t rank = detail::get_u32(buf, pos);
    for (std::uint32_t r = 0; r < rank; ++r) e.shape.push_back(detail::get_u32(buf, pos));
    c.entries.push_back(std::move(e));
  }
  if (pos != data_start) throw Error("checkpoint manifest length mismatch");
  for (auto& e : c.entries) {
    e.data.resize(numel(e.shape));
    for (auto& f : e.data) f = std::bit_cast<float>(detail::get_u32(buf, pos));
  }
  if (pos != buf.size()) throw Error("checkpoint has trailing bytes");
  return c;
}

inline void save_checkpoint(const std::string& path, const Checkpoint& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  const auto bytes = serialize_checkpoint(c);
  out.write(bytes.data(), std::streamsize(bytes.size()));
  if (!out) throw Error("write failed for " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return deserialize_checkpoint(bytes);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

}  // namespace slt
