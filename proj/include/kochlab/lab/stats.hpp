// Copyright 2026 The kochlab Authors
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

// Small statistics helpers for the experiment tables.

#pragma once

#include <vector>

namespace kochlab::lab {

struct LineFit {
  double slope = 0;
  double intercept = 0;
  double slope_se = 0;
};

/// Weighted least squares y ~ intercept + slope x.
LineFit weighted_line_fit(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w);

/// Fit of log p against log n for failure counts k out of m, with p = (k + 1/2) / (m + 1)
/// and binomial weights on the log scale.
LineFit loglog_rate_fit(const std::vector<double>& n, const std::vector<double>& k, double m);

}  // namespace kochlab::lab
