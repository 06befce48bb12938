// Copyright 2026 The uavmatch Authors
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
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "uavmatch/error.hpp"

namespace uavmatch {

struct KnapsackItem {
  double value = 0.0;
  int weight = 0;
};

struct KnapsackSolution {
  std::vector<bool> chosen;
  double value = 0.0;
  int weight = 0;
};

// Exact 0/1 knapsack by dynamic programming over integer capacity.
// Among equal-value optima the DP keeps the one that skips later items,
// which makes the choice deterministic in item order.
inline KnapsackSolution solve_knapsack(std::span<const KnapsackItem> items, int capacity) {
  const std::size_t n = items.size();
  KnapsackSolution out;
  out.chosen.assign(n, false);
  if (capacity < 0) return out;
  for (const KnapsackItem& it : items) {
    if (it.weight < 0) throw Error(ErrorKind::kValidation, "negative knapsack weight");
  }
  const long total_weight = std::accumulate(
      items.begin(), items.end(), 0L, [](long acc, const KnapsackItem& it) { return acc + it.weight; });
  const int cap = static_cast<int>(std::min<long>(capacity, total_weight));
  const std::size_t width = static_cast<std::size_t>(cap) + 1;

  // best[i][w]: best value using the first i items within weight w.
  std::vector<double> best((n + 1) * width, 0.0);
  auto at = [&](std::size_t i, std::size_t w) -> double& { return best[i * width + w]; };
  for (std::size_t i = 1; i <= n; ++i) {
    const KnapsackItem& it = items[i - 1];
    for (std::size_t w = 0; w < width; ++w) {
      double v = at(i - 1, w);
      if (static_cast<std::size_t>(it.weight) <= w && it.value > 0.0) {
        const double with = at(i - 1, w - static_cast<std::size_t>(it.weight)) + it.value;
        if (with > v) v = with;
      }
      at(i, w) = v;
    }
  }
  std::size_t w = width - 1;
  for (std::size_t i = n; i > 0; --i) {
    if (at(i, w) != at(i - 1, w)) {
      out.chosen[i - 1] = true;
      w -= static_cast<std::size_t>(items[i - 1].weight);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (out.chosen[i]) {
      out.value += items[i].value;
      out.weight += items[i].weight;
    }
  }
  return out;
}

}  // namespace uavmatch
