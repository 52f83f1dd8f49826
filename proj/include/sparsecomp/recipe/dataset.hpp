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

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sparsecomp/composition.hpp"
#include "sparsecomp/recipe/units.hpp"
#include "sparsecomp/target.hpp"

namespace sparsecomp::recipe {

/// Recipes are stored as per-mille compositions.
inline constexpr int kPerMille = 1000;

struct Recipe {
  std::string name;
  CompositionRatio composition;
  std::string taste;
  std::string timing;
};

class RecipeDataset {
 public:
  /// Validates sums, lengths, the 2-ingredient minimum and label presence.
  RecipeDataset(std::vector<std::string> ingredients, std::vector<Recipe> recipes);

  SpaceParams space() const { return SpaceParams::make(static_cast<int>(ingredients_.size()), kPerMille); }
  std::size_t size() const noexcept { return recipes_.size(); }
  const std::vector<std::string>& ingredients() const noexcept { return ingredients_; }
  const std::vector<Recipe>& recipes() const noexcept { return recipes_; }
  const Recipe& operator[](std::size_t k) const { return recipes_[k]; }

  /// Distinct labels, sorted.
  const std::vector<std::string>& taste_labels() const noexcept { return taste_labels_; }
  const std::vector<std::string>& timing_labels() const noexcept { return timing_labels_; }

  int max_ingredients() const noexcept { return max_ingredients_; }

 private:
  std::vector<std::string> ingredients_;
  std::vector<Recipe> recipes_;
  std::vector<std::string> taste_labels_;
  std::vector<std::string> timing_labels_;
  int max_ingredients_ = 0;
};

/// Scales nonnegative amounts to integers summing to exactly 1000. Floors
/// first, then hands the leftover units to the largest fractional parts,
/// lowest index first on ties. Throws MalformedRow when the amounts sum to 0
/// or contain a negative or non-finite value.
std::vector<int> to_per_mille(std::span<const double> amounts);

/// Reads `name,taste,timing,ingredient,amount,unit` rows. Rows of one recipe
/// share its name; the ingredient vocabulary is ordered by first appearance.
RecipeDataset parse_recipes(std::istream& in, const UnitTable& units);
RecipeDataset load_recipes(const std::filesystem::path& path, const UnitTable& units);

/// Writes the dataset back in the same CSV schema, amounts in per-mille ml.
void write_recipes(std::ostream& out, const RecipeDataset& dataset);

/// Weight of n = share of recipes with n ingredients.
SparsityCondition empirical_sparsity_prior(const RecipeDataset& dataset, double priority = 1.0);

/// |supp(a) & supp(b)| / min(|supp(a)|, |supp(b)|). Throws VocabularyMismatch
/// on different lengths.
double overlap_coefficient(const CompositionRatio& a, const CompositionRatio& b);

struct Neighbour {
  std::size_t index = 0;  // position in the dataset
  double overlap = 0.0;
};

/// Top-k dataset recipes by overlap coefficient; ties keep dataset order.
std::vector<Neighbour> nearest_recipes(const CompositionRatio& x, const RecipeDataset& dataset, std::size_t k);

/// Splits one CSV record (RFC 4180 quoting). Exposed for the CLI readers.
std::vector<std::string> split_csv_record(const std::string& line);
std::string quote_csv_field(const std::string& field);

}  // namespace sparsecomp::recipe
