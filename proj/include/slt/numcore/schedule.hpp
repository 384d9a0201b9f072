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
#include <cmath>
#include <cstdint>

#include "slt/numcore/tensor.hpp"

namespace slt {

/// Warmup-then-inverse-sqrt learning-rate rule.
struct ScheduleConfig {
  double k = 1.0;
  int d_model = 256;
  std::int64_t warmup = 25000;
};

/// k · d_model^-0.5 · min(step^-0.5, step · warmup^-1.5); peaks at step == warmup.
inline double noam_lrate(std::int64_t step, const ScheduleConfig& cfg) {
  if (step < 1) throw Error("noam_lrate: step must be >= 1");
  if (cfg.warmup < 1 || cfg.k <= 0.0 || cfg.d_model < 1) throw Error("noam_lrate: invalid schedule config");
  const double s = double(step);
  return cfg.k / std::sqrt(double(cfg.d_model)) *
         std::min(1.0 / std::sqrt(s), s * std::pow(double(cfg.warmup), -1.5));
}

}  // namespace slt
