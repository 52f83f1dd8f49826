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

#include <cstdint>
#include <string>

#include "sparsecomp/recipe/dataset.hpp"
#include "sparsecomp/recipe/units.hpp"

namespace sparsecomp::recipe {

/// Seeded stand-in for a real cocktail list: 60-80 recipes of 2-5 ingredients
/// drawn from style templates (sours, highballs, spritzes, ...), written in the
/// recipe CSV schema with mixed units. Labels follow fixed rules over
/// ingredient families, e.g. citrus plus something sparkling or minty is
/// "Fresh"; cream or coffee liqueur is "After dinner". Seven taste labels and
/// four timing labels are possible.
std::string synthetic_recipes_csv(std::uint64_t seed);

RecipeDataset synthetic_dataset(std::uint64_t seed, const UnitTable& units = UnitTable::defaults());

}  // namespace sparsecomp::recipe
