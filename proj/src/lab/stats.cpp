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

#include "kochlab/lab/stats.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace kochlab::lab {

LineFit weighted_line_fit(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w) {
  const auto n = static_cast<Eigen::Index>(x.size());
  if (n < 2 || y.size() != x.size() || w.size() != x.size()) throw std::invalid_argument("line fit: bad sizes");
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n), sw(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    sw(i) = std::sqrt(w[k]);
    a(i, 0) = sw(i);
    a(i, 1) = sw(i) * x[k];
    b(i) = sw(i) * y[k];
  }
  const Eigen::Vector2d beta = a.colPivHouseholderQr().solve(b);
  LineFit fit{beta(1), beta(0), 0};
  if (n > 2) {
    const double rss = (a * beta - b).squaredNorm();
    const Eigen::Matrix2d cov = (a.transpose() * a).inverse() * (rss / static_cast<double>(n - 2));
    fit.slope_se = std::sqrt(std::max(0.0, cov(1, 1)));
  }
  return fit;
}

LineFit loglog_rate_fit(const std::vector<double>& n, const std::vector<double>& k, double m) {
  std::vector<double> x, y, w;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double p = (k[i] + 0.5) / (m + 1);
    x.push_back(std::log(n[i]));
    y.push_back(std::log(p));
    w.push_back(m * p / (1 - p));  // inverse delta-method variance of log p
  }
  return weighted_line_fit(x, y, w);
}

}  // namespace kochlab::lab
