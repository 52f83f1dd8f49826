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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>

#include "reference.hpp"
#include "sparsecomp/error.hpp"
#include "sparsecomp/oracle.hpp"
#include "sparsecomp/recipe/demo.hpp"
#include "sparsecomp/recipe/synthetic.hpp"

using namespace sparsecomp;
using namespace sparsecomp::recipe;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

RecipeDataset parse(const std::string& csv) {
  std::istringstream in(csv);
  return parse_recipes(in, UnitTable::defaults());
}

CompositionRatio per_mille(std::vector<int> v) { return validate(v, SpaceParams::make(static_cast<int>(v.size()), 1000)); }

const RecipeDataset& bundled() {
  static const RecipeDataset d = synthetic_dataset(7);
  return d;
}

}  // namespace

TEST_SUITE("recipe-data") {
  TEST_CASE("unit table") {
    const auto units = UnitTable::defaults();
    CHECK(units.to_milliliters("cl") == 10.0);
    CHECK(units.to_milliliters(" Bar   Spoon ") == 5.0);
    CHECK(units.to_milliliters("dash") == 0.9);
    CHECK(code_of([&] { units.to_milliliters("pinch"); }) == ErrorCode::UnknownUnit);
    const auto custom = UnitTable::parse("# overrides\npinch = 0.3\ncl=11\n");
    CHECK(custom.to_milliliters("pinch") == 0.3);
    CHECK(custom.to_milliliters("cl") == 11.0);
    CHECK(custom.to_milliliters("oz") == 29.5735);
    CHECK(code_of([] { UnitTable::parse("pinch 3\n"); }) == ErrorCode::MalformedRow);
    CHECK(code_of([] { UnitTable::parse("pinch=-1\n"); }) == ErrorCode::MalformedRow);
  }

  TEST_CASE("per-mille conversion") {
    CHECK(to_per_mille(std::vector<double>{9, 1, 0}) == std::vector<int>{900, 100, 0});
    CHECK(to_per_mille(std::vector<double>{1, 1, 1}) == std::vector<int>{334, 333, 333});
    CHECK(to_per_mille(std::vector<double>{0, 2, 2, 2}) == std::vector<int>{0, 334, 333, 333});
    CHECK(code_of([] { to_per_mille(std::vector<double>{0, 0}); }) == ErrorCode::MalformedRow);
    CHECK(code_of([] { to_per_mille(std::vector<double>{1, -1}); }) == ErrorCode::MalformedRow);

    Rng rng(6);
    for (int t = 0; t < 2000; ++t) {
      std::vector<double> a(1 + uniform_index(rng, 8));
      for (auto& v : a) v = uniform01(rng) < 0.3 ? 0.0 : 100 * uniform01(rng);
      if (std::accumulate(a.begin(), a.end(), 0.0) == 0.0) a[0] = 1.0;
      const auto q = to_per_mille(a);
      CHECK(std::accumulate(q.begin(), q.end(), 0) == 1000);
      const double sum = std::accumulate(a.begin(), a.end(), 0.0);
      for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(q[k] - 1000 * a[k] / sum) < 1.0);
    }
  }

  TEST_CASE("recipe CSV parsing") {
    const auto d = parse(
        "name,taste,timing,ingredient,amount,unit\n"
        "Kir Royale,Fresh,Pre-dinner,champagne,9,cl\n"
        "Kir Royale,Fresh,Pre-dinner,creme de cassis,1,cl\n"
        "\"Gin, Tonic\",Fresh,Long drink,gin,5,cl\n"
        "\"Gin, Tonic\",Fresh,Long drink,tonic water,10,cl\n"
        "\"Gin, Tonic\",Fresh,Long drink,angostura bitters,1,dash\n");
    CHECK(d.size() == 2);
    CHECK(d.ingredients() == std::vector<std::string>{"champagne", "creme de cassis", "gin", "tonic water",
                                                      "angostura bitters"});
    CHECK(d[0].composition.to_vector() == std::vector<int>{900, 100, 0, 0, 0});
    CHECK(d[1].name == "Gin, Tonic");
    CHECK(d[1].composition[4] == 6);  // 0.9 ml of 150.9 ml
    CHECK(d.taste_labels() == std::vector<std::string>{"Fresh"});
    CHECK(d.timing_labels() == std::vector<std::string>{"Long drink", "Pre-dinner"});

    // Writing and re-reading keeps the compositions.
    std::ostringstream out;
    write_recipes(out, d);
    const auto again = parse(out.str());
    CHECK(again.ingredients() == d.ingredients());
    for (std::size_t r = 0; r < d.size(); ++r) CHECK(again[r].composition == d[r].composition);
  }

  TEST_CASE("recipe CSV errors") {
    const std::string header = "name,taste,timing,ingredient,amount,unit\n";
    CHECK(code_of([&] { parse(header); }) == ErrorCode::EmptyDataset);
    CHECK(code_of([&] { parse(""); }) == ErrorCode::EmptyDataset);
    CHECK(code_of([&] { parse("a,b\n"); }) == ErrorCode::MalformedRow);
    CHECK(code_of([&] { parse(header + "x,Sweet,All day,gin,3,pinch\nx,Sweet,All day,rum,1,cl\n"); }) ==
          ErrorCode::UnknownUnit);
    CHECK(code_of([&] { parse(header + "x,Sweet,All day,gin,zero,cl\n"); }) == ErrorCode::MalformedRow);
    CHECK(code_of([&] { parse(header + "x,Sweet,All day,gin,0,cl\nx,Sweet,All day,rum,0,cl\n"); }) ==
          ErrorCode::MalformedRow);
    CHECK(code_of([&] { parse(header + "x,Sweet,All day,gin,3,cl\n"); }) == ErrorCode::EmptyDataset);
    CHECK(code_of([&] { parse(header + "x,Sweet,All day,gin,3,cl\ny,Sweet,All day,gin,3,cl\ny,Sweet,All day,rum,1,cl\n"); }) ==
          ErrorCode::MalformedRow);
    CHECK(code_of([&] { parse(header + "x,Sweet,All day,gin,3,cl\nx,Sour,All day,rum,1,cl\n"); }) ==
          ErrorCode::MalformedRow);
  }

  TEST_CASE("empirical sparsity prior") {
    // 69 recipes with 13/29/24/3 recipes of 2/3/4/5 ingredients.
    std::vector<std::string> ingredients;
    for (int k = 0; k < 65; ++k) ingredients.push_back("i" + std::to_string(k));
    std::vector<Recipe> recipes;
    const std::pair<int, int> groups[] = {{2, 13}, {3, 29}, {4, 24}, {5, 3}};
    for (auto [n, count] : groups) {
      for (int r = 0; r < count; ++r) {
        std::vector<int> v(65, 0);
        for (int k = 0; k < n; ++k) v[static_cast<std::size_t>((r + k * 7) % 65)] = k == 0 ? 1000 - (n - 1) * 100 : 100;
        recipes.push_back({"r", per_mille(v), "Fresh", "All day"});
      }
    }
    const RecipeDataset d(ingredients, recipes);
    const auto prior = empirical_sparsity_prior(d);
    CHECK(prior.weight(2) == doctest::Approx(13.0 / 69));
    CHECK(prior.weight(3) == doctest::Approx(29.0 / 69));
    CHECK(prior.weight(4) == doctest::Approx(24.0 / 69));
    CHECK(prior.weight(5) == doctest::Approx(3.0 / 69));
    CHECK(prior.weight(6) == 0.0);

    const RecipeDataset single({"a", "b"}, {{"only", per_mille({500, 500}), "Sweet", "All day"}});
    CHECK(empirical_sparsity_prior(single).weight(2) == 1.0);

    const auto bundled_prior = empirical_sparsity_prior(bundled());
    double sum = 0.0;
    std::map<int, double> direct;
    for (const auto& r : bundled().recipes()) direct[r.composition.nonzero_count()] += 1.0 / bundled().size();
    for (int n = 0; n <= bundled_prior.max_support(); ++n) {
      sum += bundled_prior.weight(n);
      CHECK(bundled_prior.weight(n) == doctest::Approx(direct[n]));
    }
    CHECK(sum == doctest::Approx(1.0));
  }

  TEST_CASE("overlap coefficient") {
    const auto a = per_mille({100, 200, 700, 0, 0});
    CHECK(overlap_coefficient(a, per_mille({500, 250, 250, 0, 0})) == 1.0);
    CHECK(overlap_coefficient(per_mille({0, 300, 300, 400, 0}), per_mille({0, 0, 300, 300, 400})) ==
          doctest::Approx(2.0 / 3));
    CHECK(overlap_coefficient(a, per_mille({0, 0, 0, 500, 500})) == 0.0);
    // Symmetric, and 1 when one support contains the other.
    Rng rng(2);
    const auto space = SpaceParams::make(6, 1000);
    for (int t = 0; t < 500; ++t) {
      const auto x = sample_state_with_support(space, 1 + static_cast<int>(uniform_index(rng, 6)), rng);
      const auto y = sample_state_with_support(space, 1 + static_cast<int>(uniform_index(rng, 6)), rng);
      CHECK(overlap_coefficient(x, y) == overlap_coefficient(y, x));
      bool contained = true;
      for (int k = 0; k < 6; ++k) contained = contained && (x[k] == 0 || y[k] > 0);
      if (contained) CHECK(overlap_coefficient(x, y) == 1.0);
    }
    CHECK_THROWS_AS(overlap_coefficient(a, per_mille({500, 500})), Error);
  }

  TEST_CASE("nearest recipes") {
    const auto& d = bundled();
    const auto all = nearest_recipes(d[5].composition, d, d.size());
    CHECK(all.size() == d.size());
    CHECK(all.front().overlap == 1.0);
    CHECK(d[all.front().index].composition.nonzero_count() >= 1);
    bool self_first = false;
    for (const auto& nb : all) {
      if (nb.overlap < 1.0) break;
      self_first = self_first || nb.index == 5;
    }
    CHECK(self_first);

    // Brute force: sort (−overlap, index) pairs independently.
    Rng rng(10);
    for (int t = 0; t < 20; ++t) {
      const auto q = sample_state_with_support(d.space(), 3, rng);
      std::vector<std::pair<double, std::size_t>> brute;
      for (std::size_t r = 0; r < d.size(); ++r) {
        int shared = 0;
        for (int k = 0; k < q.size(); ++k) shared += q[k] > 0 && d[r].composition[k] > 0;
        brute.emplace_back(-static_cast<double>(shared) / std::min(3, d[r].composition.nonzero_count()), r);
      }
      std::sort(brute.begin(), brute.end());
      const auto got = nearest_recipes(q, d, 10);
      for (std::size_t k = 0; k < 10; ++k) {
        CHECK(got[k].index == brute[k].second);
        CHECK(got[k].overlap == doctest::Approx(-brute[k].first));
      }
    }
  }

  TEST_CASE("synthetic dataset shape") {
    for (std::uint64_t seed : {1u, 7u, 99u}) {
      const auto d = synthetic_dataset(seed);
      CHECK(d.size() >= 60);
      CHECK(d.size() <= 80);
      for (const auto& r : d.recipes()) {
        CHECK(r.composition.nonzero_count() >= 2);
        CHECK(r.composition.nonzero_count() <= 5);
      }
      CHECK(d.taste_labels().size() >= 5);
      CHECK(d.timing_labels().size() == 4);
      CHECK(synthetic_recipes_csv(seed) == synthetic_recipes_csv(seed));
    }
    CHECK(synthetic_recipes_csv(1) != synthetic_recipes_csv(2));
  }
}

TEST_SUITE("recipe-forest") {
  TEST_CASE("a single class cannot be learned") {
    const RecipeDataset d({"a", "b", "c"}, {{"x", per_mille({500, 500, 0}), "Sweet", "All day"},
                                            {"y", per_mille({0, 500, 500}), "Sweet", "Long drink"}});
    CHECK(code_of([&] { train_forest(d, LabelKind::Taste, {}); }) == ErrorCode::DegenerateLabels);
    CHECK_NOTHROW(train_forest(d, LabelKind::Timing, {}));
  }

  TEST_CASE("a depth-0 tree predicts the training frequencies") {
    const auto& d = bundled();
    ForestParams params;
    params.trees = 1;
    params.max_depth = 0;
    params.bootstrap = false;
    const auto model = train_forest(d, LabelKind::Taste, params);
    std::map<std::string, double> freq;
    for (const auto& r : d.recipes()) freq[r.taste] += 1.0 / d.size();
    Rng rng(1);
    for (int t = 0; t < 50; ++t) {
      const auto probs = model.predict_proba(sample_state_with_support(d.space(), 3, rng));
      for (std::size_t c = 0; c < model.classes().size(); ++c) {
        CHECK(probs[c] == doctest::Approx(freq[model.classes()[c]]).epsilon(1e-12));
      }
    }
    const int fresh = model.class_index("Fresh");
    const auto scorer = label_condition(std::make_shared<const ForestModel>(model), "Fresh");
    CHECK(scorer.score(d[0].composition) == doctest::Approx(freq["Fresh"]));
    CHECK(fresh >= 0);
  }

  TEST_CASE("forest probabilities average the trees") {
    DecisionTree yes{{TreeNode{-1, 0.0, -1, -1, {3, 0}}}};
    DecisionTree no{{TreeNode{-1, 0.0, -1, -1, {0, 5}}}};
    const ForestModel model({"a", "b"}, {"hit", "miss"}, {}, {yes, no});
    const auto probs = model.predict_proba(per_mille({400, 600}));
    CHECK(probs[0] == 0.5);
    CHECK(probs[1] == 0.5);
    CHECK_THROWS_AS(model.predict_proba(per_mille({400, 300, 300})), Error);
    CHECK(code_of([&] { model.class_index("maybe"); }) == ErrorCode::UnknownLabel);
  }

  TEST_CASE("forest outputs are distributions, deterministic, and persist exactly") {
    const auto& d = bundled();
    ForestParams params;
    params.trees = 40;
    params.seed = 3;
    const auto model = train_forest(d, LabelKind::Timing, params);
    CHECK(model == train_forest(d, LabelKind::Timing, params));
    std::ostringstream saved;
    model.save(saved);
    std::istringstream in(saved.str());
    const auto loaded = ForestModel::load(in);
    CHECK(loaded == model);

    Rng rng(8);
    for (int t = 0; t < 1000; ++t) {
      const auto x = sample_state_with_support(d.space(), 2 + static_cast<int>(uniform_index(rng, 4)), rng);
      const auto p = model.predict_proba(x);
      double sum = 0.0;
      for (double v : p) {
        CHECK(v >= 0.0);
        sum += v;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(loaded.predict_proba(x) == p);
    }
    std::istringstream bad("{\"format\":\"other\"}");
    CHECK(code_of([&] { ForestModel::load(bad); }) == ErrorCode::ModelFormat);
  }

  TEST_CASE("leaves respect the minimum size") {
    ForestParams params;
    params.trees = 10;
    params.min_leaf = 4;
    params.bootstrap = false;
    const auto model = train_forest(bundled(), LabelKind::Taste, params);
    for (const auto& tree : model.trees()) {
      for (const auto& node : tree.nodes) {
        if (!node.is_leaf()) continue;
        CHECK(std::accumulate(node.counts.begin(), node.counts.end(), 0u) >= 4u);
      }
    }
  }

  TEST_CASE("a separable label is learned") {
    // Relabel: does the recipe contain any spirit above 40%?
    const auto& d = bundled();
    std::vector<Recipe> relabelled;
    for (const auto& r : d.recipes()) {
      int strongest = 0;
      for (int k = 0; k < r.composition.size(); ++k) strongest = std::max(strongest, r.composition[k]);
      relabelled.push_back({r.name, r.composition, strongest > 400 ? "strong" : "mixed", r.timing});
    }
    const RecipeDataset separable(d.ingredients(), relabelled);
    ForestParams params;
    params.seed = 11;
    const auto model = train_forest(separable, LabelKind::Taste, params);
    CHECK(training_accuracy(model, separable, LabelKind::Taste) >= 0.9);
  }

  TEST_CASE("pair scans agree with point predictions") {
    const auto& d = bundled();
    ForestParams params;
    params.trees = 30;
    params.seed = 5;
    const auto model = train_forest(d, LabelKind::Taste, params);
    const int c = model.class_index("Fresh");
    Rng rng(13);
    for (int t = 0; t < 40; ++t) {
      auto x = sample_state_with_support(d.space(), 2 + static_cast<int>(uniform_index(rng, 4)), rng);
      const auto support = x.support();
      const int i = support[uniform_index(rng, support.size())];
      int j = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(x.size() - 1)));
      if (j >= i) ++j;
      const int pooled = x[i] + x[j];
      std::vector<double> scan(static_cast<std::size_t>(pooled) + 1);
      model.pair_scan(x, i, j, c, scan);
      for (int k = 0; k <= pooled; ++k) {
        x.set_pair(i, j, k);
        CHECK(scan[static_cast<std::size_t>(k)] == doctest::Approx(model.predict_proba(x, c)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("label conditions") {
    const auto& d = bundled();
    ForestParams params;
    params.trees = 20;
    auto model = std::make_shared<const ForestModel>(train_forest(d, LabelKind::Taste, params));
    CHECK(code_of([&] { label_condition(model, "Umami"); }) == ErrorCode::UnknownLabel);
    const auto off = label_condition(model, "Fresh", 0.0);
    Rng rng(3);
    for (int t = 0; t < 20; ++t) CHECK(property_energy(sample_state_with_support(d.space(), 3, rng), off) == 0.0);
  }
}

TEST_SUITE("recipe-demo") {
  TEST_CASE("conditioned chains score higher than prior draws") {
    const auto& d = bundled();
    ForestParams params;
    params.trees = 30;
    params.seed = 2;
    const auto models = train_demo_models(d, params);
    DemoConfig config;
    config.chain.iterations = 15000;
    config.chain.burn_in = 2000;
    config.chain.seed = 9;
    config.chain.kernel.verify = true;
    const auto result = run_demo(d, models, config);
    CHECK(result.mcmc_scores.size() == 15000);
    CHECK(result.baseline_scores.size() == 15000);
    CHECK(result.mcmc.mean > result.baseline.mean);

    const auto prior = empirical_sparsity_prior(d);
    std::uint64_t visits = 0;
    for (const auto& r : result.recipes) {
      CHECK(prior.weight(r.composition.nonzero_count()) > 0.0);
      CHECK(r.composition.total() == 1000);
      CHECK(r.joint_score == doctest::Approx(r.taste_score * r.timing_score).epsilon(1e-12));
      CHECK(r.joint_score >= 0.0);
      CHECK(r.joint_score <= 1.0);
      CHECK(r.nearest.size() == 3);
      visits += r.visits;
    }
    CHECK(visits == 15000);
    CHECK(std::is_sorted(result.recipes.begin(), result.recipes.end(),
                         [](const auto& a, const auto& b) { return a.joint_score > b.joint_score; }));

    // Same inputs, same outputs.
    const auto again = run_demo(d, models, config);
    CHECK(again.mcmc_scores == result.mcmc_scores);
    CHECK(again.baseline_scores == result.baseline_scores);
  }

  TEST_CASE("score histograms") {
    const std::vector<double> scores{0.0, 0.05, 0.5, 0.99, 1.0};
    const auto h = score_histogram(scores, 10);
    CHECK(h.edges.size() == 11);
    CHECK(h.counts[0] == 2);
    CHECK(h.counts[5] == 1);
    CHECK(h.counts[9] == 2);
    CHECK(h.mean == doctest::Approx(2.54 / 5));
    CHECK_THROWS_AS(score_histogram(std::vector<double>{1.5}, 10), Error);
  }
}
