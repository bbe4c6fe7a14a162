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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "slsia/common/error.hpp"
#include "slsia/data/dataset.hpp"

namespace slsia::data {

struct LeafOptions {
  bool digits_only = true;
};

struct LeafLoadReport {
  std::vector<std::string> shards;
  std::vector<std::string> warnings;
  std::size_t users_loaded = 0;
  std::size_t users_skipped = 0;
};

namespace detail {

inline std::vector<std::filesystem::path> leaf_shards(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  if (fs::is_regular_file(path)) return {path};
  if (!fs::is_directory(path)) throw InputError("LEAF path '" + path.string() + "' does not exist");
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(path))
    if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  if (out.empty()) throw InputError("no .json shards under '" + path.string() + "'");
  return out;
}

inline void load_leaf_shard(const std::filesystem::path& shard, const LeafOptions& opt, SubjectDataset& ds,
                            LeafLoadReport& report) {
  using nlohmann::json;
  const std::string name = shard.filename().string();
  std::ifstream in(shard);
  if (!in) throw InputError("cannot open shard '" + shard.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("shard '" + name + "': " + e.what());
  }
  if (!doc.is_object() || !doc.contains("users") || !doc.contains("user_data") || !doc["users"].is_array() ||
      !doc["user_data"].is_object()) {
    throw ParseError("shard '" + name + "': missing 'users' or 'user_data'");
  }
  const std::size_t feat = ds.feature_size();
  for (const auto& u : doc["users"]) {
    if (!u.is_string()) throw ParseError("shard '" + name + "': non-string user id");
    const std::string user = u.get<std::string>();
    auto fail = [&](const std::string& what) { return ParseError("shard '" + name + "', user '" + user + "': " + what); };
    auto it = doc["user_data"].find(user);
    if (it == doc["user_data"].end()) throw fail("no user_data entry");
    const json& ud = *it;
    if (!ud.is_object() || !ud.contains("x") || !ud.contains("y") || !ud["x"].is_array() || !ud["y"].is_array())
      throw fail("expected arrays 'x' and 'y'");
    const json& xs = ud["x"];
    const json& ys = ud["y"];
    if (xs.size() != ys.size()) throw fail("'x' and 'y' lengths differ");
    PointList pts;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!ys[i].is_number_integer()) throw fail("label " + std::to_string(i) + " is not an integer");
      const int y = ys[i].get<int>();
      if (y < 0) throw fail("negative label");
      if (opt.digits_only && y > 9) continue;
      if (!opt.digits_only && static_cast<std::size_t>(y) >= ds.num_classes()) throw fail("label out of range");
      const json& x = xs[i];
      if (!x.is_array() || x.size() != feat)
        throw fail("sample " + std::to_string(i) + " does not have " + std::to_string(feat) + " values");
      DataPoint p;
      p.features.reserve(feat);
      for (const auto& v : x) {
        if (!v.is_number()) throw fail("non-numeric pixel in sample " + std::to_string(i));
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw fail("non-finite pixel in sample " + std::to_string(i));
        p.features.push_back(d);
      }
      p.label = y;
      p.subject = user;
      pts.push_back(std::move(p));
    }
    if (pts.empty()) {
      report.warnings.push_back("shard '" + name + "': user '" + user + "' has no usable samples, skipped");
      ++report.users_skipped;
      continue;
    }
    ++report.users_loaded;
    for (auto& p : pts) ds.add(std::move(p));
  }
}

}  // namespace detail

// One subject per LEAF writer. `path` is a single shard or a directory of
// shards; shards are parsed one at a time.
inline SubjectDataset load_leaf_femnist(const std::filesystem::path& path, const LeafOptions& opt = {},
                                        LeafLoadReport* report = nullptr) {
  SubjectDataset ds({1, 28, 28}, opt.digits_only ? 10 : 62);
  LeafLoadReport local;
  LeafLoadReport& r = report ? *report : local;
  for (const auto& shard : detail::leaf_shards(path)) {
    r.shards.push_back(shard.string());
    detail::load_leaf_shard(shard, opt, ds, r);
  }
  return ds;
}

}  // namespace slsia::data
