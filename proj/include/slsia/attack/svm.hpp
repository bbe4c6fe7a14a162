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
#include <cstdint>
#include <limits>
#include <vector>

#include "slsia/common/error.hpp"

namespace slsia::attack {

struct SvmConfig {
  double C = 1.0;
  double tol = 1e-3;
  // <= 0 selects 1 / (d * Var(X)) over all training entries.
  double gamma = 0.0;
};

// Soft-margin RBF SVM trained by SMO with second-order working-set selection.
class RbfSvm {
 public:
  RbfSvm() = default;

  // labels in {0, 1}
  static RbfSvm train(const std::vector<std::vector<double>>& X, const std::vector<int>& labels, const SvmConfig& cfg = {}) {
    const std::size_t n = X.size();
    if (n == 0 || labels.size() != n) throw InputError("SVM needs one label per example");
    const std::size_t d = X.front().size();
    for (const auto& x : X)
      if (x.size() != d) throw InputError("SVM examples differ in dimension");
    bool pos = false, neg = false;
    for (int l : labels) (l == 1 ? pos : neg) = true;
    if (!pos || !neg) throw InputError("SVM training needs both labels");

    RbfSvm m;
    m.dim_ = d;
    m.gamma_ = cfg.gamma > 0 ? cfg.gamma : scale_gamma(X);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = labels[i] == 1 ? 1.0 : -1.0;

    std::vector<double> K(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      K[i * n + i] = 1.0;
      for (std::size_t j = 0; j < i; ++j) K[i * n + j] = K[j * n + i] = m.kernel(X[i], X[j]);
    }
    auto Q = [&](std::size_t i, std::size_t j) { return y[i] * y[j] * K[i * n + j]; };

    const double C = cfg.C;
    std::vector<double> a(n, 0.0), G(n, -1.0);
    auto up = [&](std::size_t t) { return (y[t] > 0 && a[t] < C) || (y[t] < 0 && a[t] > 0); };
    auto low = [&](std::size_t t) { return (y[t] > 0 && a[t] > 0) || (y[t] < 0 && a[t] < C); };
    constexpr double tau = 1e-12;
    const std::size_t max_iter = std::max<std::size_t>(10000000, 100 * n);
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
      double gmax = -std::numeric_limits<double>::infinity(), gmin = std::numeric_limits<double>::infinity();
      std::size_t i = n;
      for (std::size_t t = 0; t < n; ++t)
        if (up(t) && -y[t] * G[t] >= gmax) {
          gmax = -y[t] * G[t];
          i = t;
        }
      if (i == n) break;
      std::size_t j = n;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < n; ++t) {
        if (!low(t)) continue;
        const double v = -y[t] * G[t];
        gmin = std::min(gmin, v);
        const double b = gmax - v;
        if (b > 0) {
          double quad = K[i * n + i] + K[t * n + t] - 2.0 * K[i * n + t];
          if (quad <= 0) quad = tau;
          const double obj = -(b * b) / quad;
          if (obj <= best) {
            best = obj;
            j = t;
          }
        }
      }
      if (j == n || gmax - gmin < cfg.tol) break;

      const double ai = a[i], aj = a[j];
      if (y[i] != y[j]) {
        double quad = Q(i, i) + Q(j, j) + 2 * Q(i, j);
        if (quad <= 0) quad = tau;
        const double delta = (-G[i] - G[j]) / quad;
        const double diff = a[i] - a[j];
        a[i] += delta;
        a[j] += delta;
        if (diff > 0) {
          if (a[j] < 0) { a[j] = 0; a[i] = diff; }
        } else {
          if (a[i] < 0) { a[i] = 0; a[j] = -diff; }
        }
        if (diff > 0) {
          if (a[i] > C) { a[i] = C; a[j] = C - diff; }
        } else {
          if (a[j] > C) { a[j] = C; a[i] = C + diff; }
        }
      } else {
        double quad = Q(i, i) + Q(j, j) - 2 * Q(i, j);
        if (quad <= 0) quad = tau;
        const double delta = (G[i] - G[j]) / quad;
        const double sum = a[i] + a[j];
        a[i] -= delta;
        a[j] += delta;
        if (sum > C) {
          if (a[i] > C) { a[i] = C; a[j] = sum - C; }
        } else {
          if (a[j] < 0) { a[j] = 0; a[i] = sum; }
        }
        if (sum > C) {
          if (a[j] > C) { a[j] = C; a[i] = sum - C; }
        } else {
          if (a[i] < 0) { a[i] = 0; a[j] = sum; }
        }
      }
      const double di = a[i] - ai, dj = a[j] - aj;
      for (std::size_t t = 0; t < n; ++t) G[t] += Q(t, i) * di + Q(t, j) * dj;
    }

    // Offset from free vectors, or the midpoint of the feasible interval.
    double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity(), sum = 0;
    std::size_t nfree = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const double yg = y[t] * G[t];
      if (a[t] >= C) {
        if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else if (a[t] <= 0) {
        if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else {
        ++nfree;
        sum += yg;
      }
    }
    m.rho_ = nfree > 0 ? sum / static_cast<double>(nfree) : (ub + lb) / 2;
    for (std::size_t t = 0; t < n; ++t)
      if (a[t] > 0) {
        m.sv_.push_back(X[t]);
        m.coef_.push_back(a[t] * y[t]);
      }
    return m;
  }

  static double scale_gamma(const std::vector<std::vector<double>>& X) {
    const std::size_t d = X.front().size();
    double mean = 0, cnt = 0;
    for (const auto& x : X)
      for (double v : x) {
        mean += v;
        cnt += 1;
      }
    mean /= cnt;
    double var = 0;
    for (const auto& x : X)
      for (double v : x) var += (v - mean) * (v - mean);
    var /= cnt;
    return var > 0 ? 1.0 / (static_cast<double>(d) * var) : 1.0;
  }

  double decision(const std::vector<double>& x) const {
    if (x.size() != dim_) throw InputError("SVM input has wrong dimension");
    double s = -rho_;
    for (std::size_t k = 0; k < sv_.size(); ++k) s += coef_[k] * kernel(sv_[k], x);
    return s;
  }

  int predict(const std::vector<double>& x) const { return decision(x) > 0 ? 1 : 0; }

  std::size_t dim() const noexcept { return dim_; }
  double gamma() const noexcept { return gamma_; }
  double rho() const noexcept { return rho_; }
  std::size_t num_support() const noexcept { return sv_.size(); }

 private:
  double kernel(const std::vector<double>& u, const std::vector<double>& v) const {
    double s = 0;
    for (std::size_t k = 0; k < u.size(); ++k) {
      const double t = u[k] - v[k];
      s += t * t;
    }
    return std::exp(-gamma_ * s);
  }

  std::size_t dim_ = 0;
  double gamma_ = 1.0;
  double rho_ = 0.0;
  std::vector<std::vector<double>> sv_;
  std::vector<double> coef_;
};

}  // namespace slsia::attack
