/* Copyright 2026 The SEMCo Authors. All Rights Reserved.

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

// Checkpoint file layout (all integers u32 little-endian):
//
//   "SEMC" | version | meta_len | meta (UTF-8 JSON)
//   | count | count x (name_len | name | rows | cols)
//   | tensor data in table order, f32 little-endian, row-major
//
// Values and buffers are stored; optimizer moments are not.

#ifndef SEMCO_CHECKPOINT_HPP_
#define SEMCO_CHECKPOINT_HPP_

#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "semco/binary_io.hpp"
#include "semco/errors.hpp"
#include "semco/params.hpp"

namespace semco {

inline constexpr char kCheckpointMagic[4] = {'S', 'E', 'M', 'C'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  nlohmann::json meta = nlohmann::json::object();
  std::map<std::string, Matrix<float>> tensors;

  /// Adds every tensor in `store` under "prefix/name".
  template <class T>
  void add(const std::string& prefix, const ParamStore<T>& store) {
    for (const auto& [name, p] : store) tensors[prefix + "/" + name] = p.value.template cast<float>();
  }

  /// Loads the tensors stored under `prefix` into `store`.
  template <class T>
  void load_into(const std::string& prefix, ParamStore<T>& store) const {
    std::map<std::string, Matrix<float>> sub;
    const std::string head = prefix + "/";
    for (const auto& [name, m] : tensors) {
      if (name.compare(0, head.size(), head) == 0) sub.emplace(name.substr(head.size()), m);
    }
    try {
      store.restore(sub);
    } catch (const std::exception& e) {
      throw DataError(std::string("checkpoint: ") + e.what());
    }
  }
};

inline void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot write checkpoint '" + path + "'");
  const std::string meta = ck.meta.dump();
  binary::write_bytes(os, std::string_view(kCheckpointMagic, 4));
  binary::write_u32(os, kCheckpointVersion);
  binary::write_u32(os, static_cast<std::uint32_t>(meta.size()));
  binary::write_bytes(os, meta);
  binary::write_u32(os, static_cast<std::uint32_t>(ck.tensors.size()));
  for (const auto& [name, m] : ck.tensors) {
    binary::write_u32(os, static_cast<std::uint32_t>(name.size()));
    binary::write_bytes(os, name);
    binary::write_u32(os, static_cast<std::uint32_t>(m.rows()));
    binary::write_u32(os, static_cast<std::uint32_t>(m.cols()));
  }
  for (const auto& [_, m] : ck.tensors) {
    for (float v : m.values()) binary::write_f32(os, v);
  }
  if (!os) throw DataError("failed writing checkpoint '" + path + "'");
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open checkpoint '" + path + "'");
  const std::string what = "checkpoint '" + path + "'";
  if (binary::read_bytes(is, 4, what) != std::string_view(kCheckpointMagic, 4)) {
    throw DataError(what + ": bad magic");
  }
  const std::uint32_t version = binary::read_u32(is, what);
  if (version != kCheckpointVersion) {
    throw DataError(what + ": unsupported version " + std::to_string(version));
  }
  Checkpoint ck;
  const std::uint32_t meta_len = binary::read_u32(is, what);
  try {
    ck.meta = nlohmann::json::parse(binary::read_bytes(is, meta_len, what));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(what + ": bad metadata: " + e.what());
  }
  const std::uint32_t count = binary::read_u32(is, what);
  std::vector<std::pair<std::string, std::pair<std::uint32_t, std::uint32_t>>> table;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t len = binary::read_u32(is, what);
    std::string name = binary::read_bytes(is, len, what);
    const std::uint32_t rows = binary::read_u32(is, what);
    const std::uint32_t cols = binary::read_u32(is, what);
    table.push_back({std::move(name), {rows, cols}});
  }
  for (const auto& [name, shape] : table) {
    Matrix<float> m(shape.first, shape.second);
    for (float& v : m.values()) v = binary::read_f32(is, what);
    if (!m.all_finite()) throw DataError(what + ": non-finite value in '" + name + "'");
    ck.tensors.emplace(name, std::move(m));
  }
  return ck;
}

}  // namespace semco

#endif  // SEMCO_CHECKPOINT_HPP_
