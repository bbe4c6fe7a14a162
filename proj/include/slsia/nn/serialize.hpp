// Copyright 2026 The slsia Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "slsia/common/error.hpp"
#include "slsia/common/format.hpp"
#include "slsia/nn/layers.hpp"
#include "slsia/nn/params.hpp"

namespace slsia::nn {

// Text format, one block per line group:
//
//   slsia-params 1
//   blocks <n> buffers <m>
//   param <layer> <kind> <name> <rank> <dims...>
//   <values...>
//   buffer <layer> <kind> <name> <rank> <dims...>
//   <values...>
//
// Values use the shortest decimal form that round-trips exactly.
inline void write_params_text(std::ostream& os, const NetworkSpec& spec, const ParamSet& params) {
  params.check_matches(spec);
  os << "slsia-params 1\n";
  os << "blocks " << spec.param_blocks().size() << " buffers " << spec.buffer_blocks().size() << "\n";
  auto emit = [&](const char* tag, const ParamBlock& b, std::span<const double> vals) {
    os << tag << ' ' << b.layer << ' ' << layer_kind(spec.layers()[b.layer]) << ' ' << b.name << ' ' << b.shape.size();
    for (auto d : b.shape) os << ' ' << d;
    os << '\n';
    for (std::size_t i = 0; i < vals.size(); ++i) os << (i ? " " : "") << format_double(vals[i]);
    os << '\n';
  };
  for (const auto& b : spec.param_blocks()) emit("param", b, params.block(b));
  for (const auto& b : spec.buffer_blocks()) emit("buffer", b, params.buffer(b));
}

inline ParamSet read_params_text(std::istream& is, const NetworkSpec& spec) {
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != "slsia-params" || version != 1) throw ParseError("not a slsia-params v1 text file");
  std::string kw1, kw2;
  std::size_t nb = 0, nbuf = 0;
  if (!(is >> kw1 >> nb >> kw2 >> nbuf) || kw1 != "blocks" || kw2 != "buffers") throw ParseError("bad params header");
  if (nb != spec.param_blocks().size() || nbuf != spec.buffer_blocks().size()) throw ParseError("params file layout does not match network");
  ParamSet p = ParamSet::zeros(spec);
  auto read_block = [&](const char* tag, const ParamBlock& b, std::span<double> dst) {
    std::string t, kind, name;
    std::size_t layer = 0, rank = 0;
    if (!(is >> t >> layer >> kind >> name >> rank) || t != tag) throw ParseError(std::string("expected ") + tag + " block");
    Shape shape(rank);
    for (auto& d : shape) is >> d;
    if (layer != b.layer || name != b.name || shape != b.shape || kind != layer_kind(spec.layers()[b.layer])) {
      throw ParseError("block " + name + " of layer " + std::to_string(layer) + " does not match network");
    }
    for (double& v : dst) {
      std::string tok;
      if (!(is >> tok)) throw ParseError("truncated values in block " + name);
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc{} || ptr != tok.data() + tok.size()) throw ParseError("bad number '" + tok + "'");
    }
  };
  for (const auto& b : spec.param_blocks()) read_block("param", b, p.block(b));
  for (const auto& b : spec.buffer_blocks()) read_block("buffer", b, p.buffer(b));
  return p;
}

// Binary format: "SLSP" magic, u32 version, u64 param count, u64 buffer
// count, a u64 layout fingerprint, then little-endian IEEE-754 doubles.
inline std::uint64_t layout_fingerprint(const NetworkSpec& spec) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& b : spec.param_blocks()) {
    feed(b.layer);
    for (auto d : b.shape) feed(d);
  }
  for (const auto& b : spec.buffer_blocks()) feed(b.size);
  return h;
}

inline void write_params_binary(std::ostream& os, const NetworkSpec& spec, const ParamSet& params) {
  static_assert(std::endian::native == std::endian::little, "binary params format assumes little-endian hosts");
  params.check_matches(spec);
  const std::uint32_t version = 1;
  const std::uint64_t np = params.flat().size(), nbuf = params.buffers().size(), fp = layout_fingerprint(spec);
  os.write("SLSP", 4);
  os.write(reinterpret_cast<const char*>(&version), sizeof version);
  os.write(reinterpret_cast<const char*>(&np), sizeof np);
  os.write(reinterpret_cast<const char*>(&nbuf), sizeof nbuf);
  os.write(reinterpret_cast<const char*>(&fp), sizeof fp);
  os.write(reinterpret_cast<const char*>(params.flat().data()), static_cast<std::streamsize>(np * sizeof(double)));
  os.write(reinterpret_cast<const char*>(params.buffers().data()), static_cast<std::streamsize>(nbuf * sizeof(double)));
}

inline ParamSet read_params_binary(std::istream& is, const NetworkSpec& spec) {
  char magic[4];
  std::uint32_t version = 0;
  std::uint64_t np = 0, nbuf = 0, fp = 0;
  is.read(magic, 4);
  is.read(reinterpret_cast<char*>(&version), sizeof version);
  is.read(reinterpret_cast<char*>(&np), sizeof np);
  is.read(reinterpret_cast<char*>(&nbuf), sizeof nbuf);
  is.read(reinterpret_cast<char*>(&fp), sizeof fp);
  if (!is || std::memcmp(magic, "SLSP", 4) != 0 || version != 1) throw ParseError("not a slsia binary params file");
  if (np != spec.num_params() || nbuf != spec.num_buffers() || fp != layout_fingerprint(spec)) {
    throw ParseError("binary params layout does not match network");
  }
  ParamSet p = ParamSet::zeros(spec);
  is.read(reinterpret_cast<char*>(p.flat().data()), static_cast<std::streamsize>(np * sizeof(double)));
  is.read(reinterpret_cast<char*>(p.buffers().data()), static_cast<std::streamsize>(nbuf * sizeof(double)));
  if (!is) throw ParseError("truncated binary params file");
  return p;
}

inline void save_params(const std::filesystem::path& path, const NetworkSpec& spec, const ParamSet& params) {
  std::filesystem::create_directories(path.parent_path());
  const bool binary = path.extension() == ".bin";
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw Error("cannot write " + path.string());
  if (binary) write_params_binary(os, spec, params);
  else write_params_text(os, spec, params);
}

inline ParamSet load_params(const std::filesystem::path& path, const NetworkSpec& spec) {
  const bool binary = path.extension() == ".bin";
  std::ifstream is(path, binary ? std::ios::binary : std::ios::in);
  if (!is) throw Error("cannot read " + path.string());
  return binary ? read_params_binary(is, spec) : read_params_text(is, spec);
}

}  // namespace slsia::nn
