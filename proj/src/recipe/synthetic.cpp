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

#include "sparsecomp/recipe/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "sparsecomp/random.hpp"

namespace sparsecomp::recipe {

namespace {

enum class Family { Spirit, Bitter, Liqueur, Citrus, Syrup, Mixer, Wine, Cream, Savory, Herb };

struct Ingredient {
  const char* name;
  Family family;
};

constexpr Ingredient kIngredients[] = {
    {"gin", Family::Spirit},
    {"vodka", Family::Spirit},
    {"white rum", Family::Spirit},
    {"dark rum", Family::Spirit},
    {"tequila", Family::Spirit},
    {"bourbon", Family::Spirit},
    {"cognac", Family::Spirit},
    {"campari", Family::Bitter},
    {"aperol", Family::Bitter},
    {"sweet vermouth", Family::Bitter},
    {"dry vermouth", Family::Bitter},
    {"angostura bitters", Family::Bitter},
    {"triple sec", Family::Liqueur},
    {"creme de cassis", Family::Liqueur},
    {"maraschino", Family::Liqueur},
    {"amaretto", Family::Liqueur},
    {"coffee liqueur", Family::Liqueur},
    {"lemon juice", Family::Citrus},
    {"lime juice", Family::Citrus},
    {"orange juice", Family::Citrus},
    {"grapefruit juice", Family::Citrus},
    {"sugar syrup", Family::Syrup},
    {"grenadine", Family::Syrup},
    {"honey syrup", Family::Syrup},
    {"soda water", Family::Mixer},
    {"tonic water", Family::Mixer},
    {"ginger beer", Family::Mixer},
    {"cola", Family::Mixer},
    {"champagne", Family::Wine},
    {"prosecco", Family::Wine},
    {"cream", Family::Cream},
    {"tomato juice", Family::Savory},
    {"worcestershire sauce", Family::Savory},
    {"mint", Family::Herb},
};

struct Slot {
  std::vector<const char*> choices;
  double lo;  // amount range in `unit`
  double hi;
  const char* unit;
  double probability;
};

struct Style {
  const char* name;
  std::vector<Slot> slots;
};

const std::vector<Style>& styles() {
  static const std::vector<const char*> spirits{"gin", "vodka", "white rum", "dark rum", "tequila", "bourbon", "cognac"};
  static const std::vector<const char*> citrus{"lemon juice", "lime juice", "orange juice", "grapefruit juice"};
  static const std::vector<const char*> syrups{"sugar syrup", "grenadine", "honey syrup"};
  static const std::vector<const char*> mixers{"soda water", "tonic water", "ginger beer", "cola"};
  static const std::vector<const char*> liqueurs{"triple sec", "creme de cassis", "maraschino"};
  static const std::vector<const char*> aperitifs{"campari", "aperol", "sweet vermouth", "dry vermouth"};
  static const std::vector<Style> all{
      {"sour", {{spirits, 4, 6, "cl", 1}, {citrus, 2, 3, "cl", 1}, {syrups, 1, 2, "cl", 1}, {liqueurs, 1, 2, "cl", 0.3}}},
      {"smash",
       {{spirits, 4, 5, "cl", 1},
        {citrus, 2, 3, "cl", 1},
        {{"mint"}, 1, 2, "bar spoon", 1},
        {syrups, 1, 2, "cl", 0.6},
        {{"soda water"}, 3, 5, "cl", 0.4}}},
      {"highball",
       {{spirits, 4, 5, "cl", 1},
        {mixers, 10, 15, "cl", 1},
        {citrus, 1, 2, "cl", 0.5},
        {{"angostura bitters"}, 1, 3, "dash", 0.3}}},
      {"stirred",
       {{spirits, 5, 6, "cl", 1},
        {aperitifs, 2, 3, "cl", 1},
        {liqueurs, 0.5, 1, "cl", 0.4},
        {{"angostura bitters"}, 1, 3, "dash", 0.5}}},
      {"spritz",
       {{{"campari", "aperol"}, 4, 6, "cl", 1},
        {{"prosecco", "champagne", "soda water"}, 6, 9, "cl", 1},
        {{"orange juice"}, 2, 3, "cl", 0.4}}},
      {"dessert",
       {{spirits, 3, 4, "cl", 1}, {{"cream"}, 2, 3, "cl", 1}, {{"coffee liqueur", "amaretto"}, 2, 3, "cl", 1}}},
      {"savory",
       {{{"vodka", "tequila", "gin"}, 4, 5, "cl", 1},
        {{"tomato juice"}, 9, 12, "cl", 1},
        {{"lemon juice", "lime juice"}, 1, 2, "cl", 0.7},
        {{"worcestershire sauce"}, 1, 3, "dash", 0.6}}},
      {"royale", {{{"champagne", "prosecco"}, 9, 12, "cl", 1}, {{"creme de cassis", "triple sec"}, 1, 1.5, "cl", 1}}},
      {"short",
       {{spirits, 5, 6, "cl", 1},
        {spirits, 2, 3, "cl", 1},
        {syrups, 1, 2, "bar spoon", 0.5},
        {{"angostura bitters"}, 1, 2, "dash", 0.5}}},
  };
  return all;
}

Family family_of(const std::string& name) {
  for (const auto& ing : kIngredients) {
    if (name == ing.name) return ing.family;
  }
  return Family::Spirit;  // unreachable for template ingredients
}

struct Labels {
  std::string taste;
  std::string timing;
};

// Rules are checked in order; the first match wins.
Labels label_recipe(const std::vector<std::pair<std::string, double>>& parts) {
  std::map<Family, double> share;
  double total = 0.0;
  for (const auto& [name, ml] : parts) total += ml;
  for (const auto& [name, ml] : parts) share[family_of(name)] += ml / total;
  auto has = [&](Family f) { return share.count(f) > 0; };
  auto has_name = [&](const char* n) {
    return std::any_of(parts.begin(), parts.end(), [&](const auto& p) { return p.first == n; });
  };

  Labels labels;
  if (has(Family::Savory)) {
    labels.taste = "Salty";
  } else if (has(Family::Bitter) && !has(Family::Citrus)) {
    labels.taste = "Bittersweet";
  } else if (has(Family::Citrus) && (has(Family::Mixer) || has(Family::Wine) || has(Family::Herb))) {
    labels.taste = "Fresh";
  } else if (has(Family::Citrus) && share[Family::Citrus] >= share[Family::Syrup] + share[Family::Liqueur]) {
    labels.taste = "Sour";
  } else if (has(Family::Syrup) || has(Family::Liqueur) || has(Family::Cream)) {
    labels.taste = "Sweet";
  } else if (share[Family::Spirit] >= 0.6) {
    labels.taste = "Boozy";
  } else {
    labels.taste = "Unknown";
  }

  if (has(Family::Cream) || has_name("coffee liqueur") || has_name("amaretto")) {
    labels.timing = "After dinner";
  } else if (share[Family::Mixer] >= 0.4) {
    labels.timing = "Long drink";
  } else if (has(Family::Bitter) || has(Family::Wine)) {
    labels.timing = "Pre-dinner";
  } else {
    labels.timing = "All day";
  }
  return labels;
}

double unit_ml(const char* unit) {
  static const UnitTable table = UnitTable::defaults();
  return table.to_milliliters(unit);
}

}  // namespace

std::string synthetic_recipes_csv(std::uint64_t seed) {
  Rng rng(seed);
  const auto& all_styles = styles();
  const int recipe_count = 60 + static_cast<int>(uniform_index(rng, 21));

  std::ostringstream out;
  out << "name,taste,timing,ingredient,amount,unit\n";
  for (int r = 0; r < recipe_count; ++r) {
    const auto& style = all_styles[uniform_index(rng, all_styles.size())];
    struct Part {
      std::string name;
      double amount;
      const char* unit;
    };
    std::vector<Part> parts;
    // A repeated spirit in a two-slot style can leave one ingredient; redraw.
    while (parts.size() < 2) {
      parts.clear();
      for (const auto& slot : style.slots) {
        if (parts.size() == 5) break;
        if (slot.probability < 1.0 && uniform01(rng) >= slot.probability) continue;
        std::string name = slot.choices[uniform_index(rng, slot.choices.size())];
        if (std::any_of(parts.begin(), parts.end(), [&](const Part& p) { return p.name == name; })) continue;
        // Amounts land on half-unit steps, as a bartender would write them.
        const double amount = std::round(2.0 * (slot.lo + (slot.hi - slot.lo) * uniform01(rng))) / 2.0;
        parts.push_back({std::move(name), std::max(0.5, amount), slot.unit});
      }
    }

    std::vector<std::pair<std::string, double>> volumes;
    for (const auto& p : parts) volumes.emplace_back(p.name, p.amount * unit_ml(p.unit));
    const auto labels = label_recipe(volumes);
    const auto name = fmt::format("{} {:02d}", style.name, r + 1);
    for (const auto& p : parts) {
      out << quote_csv_field(name) << ',' << labels.taste << ',' << labels.timing << ',' << p.name << ','
          << fmt::format("{:g}", p.amount) << ',' << p.unit << '\n';
    }
  }
  return out.str();
}

RecipeDataset synthetic_dataset(std::uint64_t seed, const UnitTable& units) {
  std::istringstream in(synthetic_recipes_csv(seed));
  return parse_recipes(in, units);
}

}  // namespace sparsecomp::recipe
