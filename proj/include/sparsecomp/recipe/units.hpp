// Copyright 2026 The sparsecomp Authors
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

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace sparsecomp::recipe {

/// Unit name -> milliliters. Names are matched case-insensitively with
/// surrounding whitespace ignored and inner runs of whitespace collapsed.
///
/// Defaults: ml 1, cl 10, dl 100, l 1000, oz 29.5735, tsp 5, tbsp 15,
/// bar spoon 5, dash 0.9, splash 3. These are conventional bar measures, not
/// values taken from any particular dataset.
class UnitTable {
 public:
  static UnitTable defaults();

  /// Parses `name=factor` lines on top of `base`; blank lines and lines
  /// starting with '#' are skipped. Throws MalformedRow on bad lines.
  static UnitTable parse(std::string_view text, UnitTable base = defaults());
  static UnitTable load(const std::filesystem::path& path, UnitTable base = defaults());

  void set(std::string_view name, double milliliters);

  /// Throws UnknownUnit.
  double to_milliliters(std::string_view unit) const;

  const std::map<std::string, double>& factors() const noexcept { return factors_; }

 private:
  std::map<std::string, double> factors_;
};

std::string normalize_unit_name(std::string_view name);

}  // namespace sparsecomp::recipe
