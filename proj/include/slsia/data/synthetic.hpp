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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "slsia/common/error.hpp"
#include "slsia/common/rng.hpp"
#include "slsia/data/dataset.hpp"

namespace slsia::data {

// XOR over the indicators 1[x_i >= 0].
inline int xor_label(std::span<const double> x) {
  int y = 0;
  for (double v : x) y ^= (v >= 0.0) ? 1 : 0;
  return y;
}

struct SyntheticParams {
  std::size_t n_subjects = 200;
  std::size_t points_per_subject = 400;
  std::size_t dim = 60;
  double min_sep = 0.35;
  // Subject means are uniform in [-mean_range, mean_range]^dim.
  double mean_range = 2.5;
  // Covariance = cov_scale * (A A^T / dim + 0.1 I), A standard normal.
  double cov_scale = 0.25;
  std::size_t retry_budget = 10000;
  std::uint64_t seed = 0;
};

struct SubjectModel {
  std::vector<double> mean;
  std::vector<double> covariance;  // dim x dim, row-major
};

namespace detail {

inline std::string synthetic_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "syn-%03zu", i);
  return buf;
}

// Lower-triangular L with L L^T = a; a must be symmetric positive definite.
inline std::vector<double> cholesky(const std::vector<double>& a, std::size_t n) {
  std::vector<double> l(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      if (i == j) {
        if (s <= 0.0) throw GenerationError("covariance is not positive definite");
        l[i * n + i] = std::sqrt(s);
      } else {
        l[i * n + j] = s / l[j * n + j];
      }
    }
  return l;
}

}  // namespace detail

// Means by rejection sampling against all previously accepted means; each
// subject's candidate stream and covariance stream are keyed by its index.
inline std::vector<SubjectModel> make_subject_models(const SyntheticParams& p) {
  if (!(p.min_sep > 0.0)) throw ConfigError("min_sep must be positive");
  if (p.dim < 1) throw ConfigError("dim must be at least 1");
  if (!(p.mean_range > 0.0) || !(p.cov_scale > 0.0)) throw ConfigError("mean_range and cov_scale must be positive");
  const std::size_t d = p.dim;
  std::vector<SubjectModel> models(p.n_subjects);
  for (std::size_t s = 0; s < p.n_subjects; ++s) {
    Rng rng = make_rng(p.seed, "synthetic-mean", s);
    std::uniform_real_distribution<double> u(-p.mean_range, p.mean_range);
    bool accepted = false;
    std::vector<double> m(d);
    for (std::size_t attempt = 0; attempt < p.retry_budget && !accepted; ++attempt) {
      for (auto& v : m) v = u(rng);
      accepted = true;
      for (std::size_t o = 0; o < s && accepted; ++o) {
        double dist2 = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const double diff = m[k] - models[o].mean[k];
          dist2 += diff * diff;
        }
        accepted = dist2 > p.min_sep * p.min_sep;
      }
    }
    if (!accepted) {
      throw GenerationError("could not place subject " + std::to_string(s) + " mean within " +
                            std::to_string(p.retry_budget) + " attempts");
    }
    models[s].mean = m;

    Rng crng = make_rng(p.seed, "synthetic-cov", s);
    std::normal_distribution<double> z;
    std::vector<double> a(d * d);
    for (auto& v : a) v = z(crng);
    auto& cov = models[s].covariance;
    cov.assign(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        double dot = 0.0;
        for (std::size_t k = 0; k < d; ++k) dot += a[i * d + k] * a[j * d + k];
        double v = p.cov_scale * (dot / static_cast<double>(d) + (i == j ? 0.1 : 0.0));
        cov[i * d + j] = cov[j * d + i] = v;
      }
  }
  return models;
}

inline SubjectDataset gen_synthetic(const SyntheticParams& p) {
  const auto models = make_subject_models(p);
  const std::size_t d = p.dim;
  SubjectDataset ds({d}, 2);
  for (std::size_t s = 0; s < models.size(); ++s) {
    const auto chol = detail::cholesky(models[s].covariance, d);
    Rng rng = make_rng(p.seed, "synthetic-points", s);
    std::normal_distribution<double> z;
    PointList pts;
    pts.reserve(p.points_per_subject);
    std::vector<double> e(d);
    for (std::size_t n = 0; n < p.points_per_subject; ++n) {
      for (auto& v : e) v = z(rng);
      DataPoint pt;
      pt.features.resize(d);
      for (std::size_t i = 0; i < d; ++i) {
        double v = models[s].mean[i];
        for (std::size_t k = 0; k <= i; ++k) v += chol[i * d + k] * e[k];
        pt.features[i] = v;
      }
      pt.label = xor_label(pt.features);
      pts.push_back(std::move(pt));
    }
    ds.set_subject(detail::synthetic_id(s), std::move(pts));
  }
  return ds;
}

}  // namespace slsia::data
