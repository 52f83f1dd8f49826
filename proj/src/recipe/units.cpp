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

#include "sparsecomp/recipe/units.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sparsecomp/error.hpp"

namespace sparsecomp::recipe {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string normalize_unit_name(std::string_view name) {
  std::string out;
  bool pending_space = false;
  for (char c : trim(name)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = true;
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

UnitTable UnitTable::defaults() {
  UnitTable table;
  table.set("ml", 1.0);
  table.set("cl", 10.0);
  table.set("dl", 100.0);
  table.set("l", 1000.0);
  table.set("oz", 29.5735);
  table.set("tsp", 5.0);
  table.set("tbsp", 15.0);
  table.set("bar spoon", 5.0);
  table.set("dash", 0.9);
  table.set("splash", 3.0);
  return table;
}

void UnitTable::set(std::string_view name, double milliliters) {
  auto key = normalize_unit_name(name);
  if (key.empty()) throw Error(ErrorCode::InvalidArgument, "unit name is empty");
  if (!std::isfinite(milliliters) || milliliters <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "unit '" + key + "' needs a positive finite factor");
  }
  factors_[std::move(key)] = milliliters;
}

double UnitTable::to_milliliters(std::string_view unit) const {
  const auto it = factors_.find(normalize_unit_name(unit));
  if (it == factors_.end()) throw Error(ErrorCode::UnknownUnit, "unknown unit '" + std::string(unit) + "'");
  return it->second;
}

UnitTable UnitTable::parse(std::string_view text, UnitTable base) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::MalformedRow, "unit table line " + std::to_string(line_no) + ": expected name=factor");
    }
    const auto value = trim(body.substr(eq + 1));
    double factor = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), factor);
    if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(factor) || factor <= 0.0) {
      throw Error(ErrorCode::MalformedRow,
                  "unit table line " + std::to_string(line_no) + ": bad factor '" + std::string(value) + "'");
    }
    base.set(body.substr(0, eq), factor);
  }
  return base;
}

UnitTable UnitTable::load(const std::filesystem::path& path, UnitTable base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open unit table " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), std::move(base));
}

}  // namespace sparsecomp::recipe
