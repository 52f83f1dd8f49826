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

#include "sparsecomp/recipe/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <unordered_map>

#include "sparsecomp/error.hpp"

namespace sparsecomp::recipe {

namespace {

std::vector<std::string> sorted_labels(const std::vector<Recipe>& recipes, std::string Recipe::*field) {
  std::set<std::string> labels;
  for (const auto& r : recipes) labels.insert(r.*field);
  return {labels.begin(), labels.end()};
}

std::string trimmed(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

RecipeDataset::RecipeDataset(std::vector<std::string> ingredients, std::vector<Recipe> recipes)
    : ingredients_(std::move(ingredients)), recipes_(std::move(recipes)) {
  if (recipes_.empty()) throw Error(ErrorCode::EmptyDataset, "dataset has no recipes");
  if (ingredients_.size() < 2) throw Error(ErrorCode::EmptyDataset, "dataset needs at least two ingredients");
  for (const auto& r : recipes_) {
    if (r.composition.size() != static_cast<int>(ingredients_.size()) || r.composition.total() != kPerMille) {
      throw Error(ErrorCode::VocabularyMismatch, "recipe '" + r.name + "' does not match the ingredient vocabulary");
    }
    r.composition.check_invariants();
    if (r.composition.nonzero_count() < 2) {
      throw Error(ErrorCode::MalformedRow, "recipe '" + r.name + "' has fewer than two ingredients");
    }
    if (r.taste.empty() || r.timing.empty()) {
      throw Error(ErrorCode::MalformedRow, "recipe '" + r.name + "' is missing a label");
    }
    max_ingredients_ = std::max(max_ingredients_, r.composition.nonzero_count());
  }
  taste_labels_ = sorted_labels(recipes_, &Recipe::taste);
  timing_labels_ = sorted_labels(recipes_, &Recipe::timing);
}

std::vector<int> to_per_mille(std::span<const double> amounts) {
  double sum = 0.0;
  for (double a : amounts) {
    if (!std::isfinite(a) || a < 0.0) throw Error(ErrorCode::MalformedRow, "amounts must be finite and nonnegative");
    sum += a;
  }
  if (!(sum > 0.0)) throw Error(ErrorCode::MalformedRow, "amounts sum to zero");

  std::vector<int> out(amounts.size());
  std::vector<double> remainder(amounts.size());
  int assigned = 0;
  for (std::size_t k = 0; k < amounts.size(); ++k) {
    const double exact = kPerMille * (amounts[k] / sum);
    const double whole = std::floor(exact);
    out[k] = static_cast<int>(whole);
    remainder[k] = exact - whole;
    assigned += out[k];
  }
  std::vector<std::size_t> order(amounts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  if (assigned > kPerMille) throw Error(ErrorCode::InvariantViolation, "per-mille floors overshoot the total");
  for (std::size_t r = 0; assigned < kPerMille; ++r, ++assigned) ++out[order[r % order.size()]];
  return out;
}

std::vector<std::string> split_csv_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"') {
        if (k + 1 < line.size() && line[k + 1] == '"') {
          field.push_back('"');
          ++k;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty() && !was_quoted) {
      quoted = was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (quoted) throw Error(ErrorCode::MalformedRow, "unterminated quoted field");
  fields.push_back(std::move(field));
  return fields;
}

std::string quote_csv_field(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

RecipeDataset parse_recipes(std::istream& in, const UnitTable& units) {
  struct Pending {
    std::string name;
    std::string taste;
    std::string timing;
    std::map<std::size_t, double> milliliters;  // by vocabulary index
  };
  std::vector<std::string> vocabulary;
  std::unordered_map<std::string, std::size_t> vocabulary_index;
  std::vector<Pending> pending;
  std::unordered_map<std::string, std::size_t> recipe_index;

  std::string line;
  int line_no = 0;
  bool header_seen = false;
  auto fail = [&](const std::string& what) {
    return Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (trimmed(line).empty()) continue;
    auto fields = split_csv_record(line);
    for (auto& f : fields) f = trimmed(f);
    if (!header_seen) {
      const std::vector<std::string> expected{"name", "taste", "timing", "ingredient", "amount", "unit"};
      if (fields != expected) throw fail("expected header name,taste,timing,ingredient,amount,unit");
      header_seen = true;
      continue;
    }
    if (fields.size() != 6) throw fail("expected 6 fields, got " + std::to_string(fields.size()));
    const auto& [name, taste, timing, ingredient, amount_text, unit] =
        std::tie(fields[0], fields[1], fields[2], fields[3], fields[4], fields[5]);
    if (name.empty() || ingredient.empty() || taste.empty() || timing.empty()) throw fail("empty required field");

    double amount = 0.0;
    const auto [ptr, ec] = std::from_chars(amount_text.data(), amount_text.data() + amount_text.size(), amount);
    if (ec != std::errc{} || ptr != amount_text.data() + amount_text.size() || !std::isfinite(amount) || amount < 0) {
      throw fail("bad amount '" + amount_text + "'");
    }
    const double ml = amount * units.to_milliliters(unit);

    auto [vit, new_ingredient] = vocabulary_index.try_emplace(ingredient, vocabulary.size());
    if (new_ingredient) vocabulary.push_back(ingredient);
    auto [rit, new_recipe] = recipe_index.try_emplace(name, pending.size());
    if (new_recipe) pending.push_back({name, taste, timing, {}});
    auto& recipe = pending[rit->second];
    if (recipe.taste != taste || recipe.timing != timing) throw fail("recipe '" + name + "' changes its labels");
    recipe.milliliters[vit->second] += ml;
  }
  if (!header_seen || pending.empty()) throw Error(ErrorCode::EmptyDataset, "no recipe rows found");

  std::vector<Recipe> recipes;
  recipes.reserve(pending.size());
  for (auto& p : pending) {
    std::vector<double> amounts(vocabulary.size(), 0.0);
    for (const auto& [k, ml] : p.milliliters) amounts[k] = ml;
    std::vector<int> per_mille;
    try {
      per_mille = to_per_mille(amounts);
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedRow, "recipe '" + p.name + "': " + e.what());
    }
    recipes.push_back({std::move(p.name), CompositionRatio::from_trusted(std::move(per_mille), kPerMille),
                       std::move(p.taste), std::move(p.timing)});
  }
  return RecipeDataset(std::move(vocabulary), std::move(recipes));
}

RecipeDataset load_recipes(const std::filesystem::path& path, const UnitTable& units) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open recipe file " + path.string());
  return parse_recipes(in, units);
}

void write_recipes(std::ostream& out, const RecipeDataset& dataset) {
  out << "name,taste,timing,ingredient,amount,unit\n";
  for (const auto& r : dataset.recipes()) {
    for (int k = 0; k < r.composition.size(); ++k) {
      if (r.composition[k] == 0) continue;
      out << quote_csv_field(r.name) << ',' << quote_csv_field(r.taste) << ',' << quote_csv_field(r.timing) << ','
          << quote_csv_field(dataset.ingredients()[static_cast<std::size_t>(k)]) << ',' << r.composition[k]
          << ",ml\n";
    }
  }
}

SparsityCondition empirical_sparsity_prior(const RecipeDataset& dataset, double priority) {
  std::map<int, double> counts;
  for (const auto& r : dataset.recipes()) counts[r.composition.nonzero_count()] += 1.0;
  for (auto& [n, c] : counts) c /= static_cast<double>(dataset.size());
  return SparsityCondition::make(counts, dataset.space(), priority);
}

double overlap_coefficient(const CompositionRatio& a, const CompositionRatio& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::VocabularyMismatch, "compositions have different lengths");
  int shared = 0;
  for (int k = 0; k < a.size(); ++k) shared += (a[k] > 0 && b[k] > 0) ? 1 : 0;
  const int smaller = std::min(a.nonzero_count(), b.nonzero_count());
  return static_cast<double>(shared) / static_cast<double>(smaller);
}

std::vector<Neighbour> nearest_recipes(const CompositionRatio& x, const RecipeDataset& dataset, std::size_t k) {
  if (k == 0 || k > dataset.size()) throw Error(ErrorCode::InvalidArgument, "k must be in [1, dataset size]");
  std::vector<Neighbour> all(dataset.size());
  for (std::size_t r = 0; r < dataset.size(); ++r) all[r] = {r, overlap_coefficient(x, dataset[r].composition)};
  std::stable_sort(all.begin(), all.end(), [](const Neighbour& a, const Neighbour& b) { return a.overlap > b.overlap; });
  all.resize(k);
  return all;
}

}  // namespace sparsecomp::recipe
