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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kochlab {

/// An orbit point landed exactly on the singularity of the roof.
class SingularityError : public std::domain_error {
 public:
  explicit SingularityError(std::int64_t index)
      : std::domain_error("orbit hits the roof singularity at index " + std::to_string(index)),
        index_(index) {}
  std::int64_t index() const { return index_; }

 private:
  std::int64_t index_;
};

/// Invalid experiment configuration; carries the offending field name.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace kochlab
