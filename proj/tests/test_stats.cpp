// Copyright 2026 The lftree Authors
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "lftree/error.hpp"
#include "lftree/special_functions.hpp"
#include "lftree/stats.hpp"
#include "oracles.hpp"

using namespace lftree;

namespace {

const std::vector<double> A{1, 2, 3, 4, 5};
const std::vector<double> B{2, 3, 4, 5, 6};
const std::vector<double> C{10, 11, 12, 13, 14};

std::vector<GroupSummary> summaries(const std::vector<std::vector<double>>& groups) {
  std::vector<GroupSummary> out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    out.push_back(GroupSummary::from_values(static_cast<int>(i), groups[i]));
  }
  return out;
}

std::vector<std::vector<double>> gaussian_groups(std::uint64_t seed, const std::vector<double>& means,
                                                 std::size_t n, double sd) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0.0, sd);
  std::vector<std::vector<double>> out;
  for (double m : means) {
    std::vector<double> xs;
    for (std::size_t i = 0; i < n; ++i) xs.push_back(m + noise(gen));
    out.push_back(xs);
  }
  return out;
}

}  // namespace

TEST_CASE("special functions match published table values") {
  CHECK(special::student_t_two_sided(2.228, 10.0) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(special::student_t_two_sided(1.96, 1e6) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(special::student_t_two_sided(0.0, 3.0) == 1.0);
  CHECK(special::f_upper_tail(4.10, 2.0, 10.0) == doctest::Approx(0.05).epsilon(2e-3));
  CHECK(special::f_upper_tail(0.0, 2.0, 10.0) == 1.0);
  CHECK(special::incomplete_beta(2.0, 3.0, 0.4) == doctest::Approx(0.5248).epsilon(1e-12));
  CHECK(special::incomplete_beta(1.0, 1.0, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("group summaries use the unbiased variance") {
  const auto g = GroupSummary::from_values(7, A);
  CHECK(g.label == 7);
  CHECK(g.n == 5);
  CHECK(g.mean == 3.0);
  CHECK(g.variance == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(GroupSummary::from_values(0, std::vector<double>{4.0}).variance == 0.0);
}

TEST_CASE("welch fixture against the independent oracle") {
  const auto got = welch_anova(summaries({A, B, C}));
  REQUIRE(got.has_value());
  const auto want = oracle::welch({A, B, C});
  CHECK(got->f == doctest::Approx(want.F).epsilon(1e-8));
  CHECK(got->df_den == doctest::Approx(want.nu).epsilon(1e-8));
  CHECK(got->df_num == 2.0);
  CHECK(got->p_value == doctest::Approx(want.p).epsilon(1e-6));
}

TEST_CASE("welch on identical means is zero") {
  const auto got = welch_anova(summaries({A, {5, 4, 3, 2, 1}}));
  REQUIRE(got.has_value());
  CHECK(got->f == 0.0);
  CHECK(got->p_value == 1.0);
}

TEST_CASE("welch needs two eligible groups") {
  CHECK_FALSE(welch_anova(summaries({A})).has_value());
  CHECK_FALSE(welch_anova(summaries({A, {3.0}})).has_value());
}

TEST_CASE("welch is invariant to scale, shift and group order") {
  const auto base = welch_anova(summaries({A, B, C}));
  auto affine = [](std::vector<double> xs, double a, double b) {
    for (double& x : xs) x = a * x + b;
    return xs;
  };
  for (auto [a, b] : {std::pair{3.0, 0.0}, std::pair{0.01, -40.0}, std::pair{250.0, 1e3}}) {
    const auto moved = welch_anova(summaries({affine(A, a, b), affine(B, a, b), affine(C, a, b)}));
    CHECK(moved->f == doctest::Approx(base->f).epsilon(1e-9));
    CHECK(moved->df_den == doctest::Approx(base->df_den).epsilon(1e-9));
    CHECK(moved->p_value == doctest::Approx(base->p_value).epsilon(1e-9));
  }
  const auto permuted = welch_anova(summaries({C, A, B}));
  CHECK(permuted->f == doctest::Approx(base->f).epsilon(1e-12));
  CHECK(permuted->df_den == doctest::Approx(base->df_den).epsilon(1e-12));
}

TEST_CASE("games-howell fixture against the independent oracle") {
  const auto g = summaries({A, C});
  const auto got = games_howell_pair(g[0], g[1]);
  const auto want = oracle::games_howell(A, C);
  CHECK(got.t == doctest::Approx(want.t).epsilon(1e-6));
  CHECK(got.df == doctest::Approx(want.nu).epsilon(1e-6));
  CHECK(got.p_value == doctest::Approx(want.p).epsilon(1e-6));

  const auto flipped = games_howell_pair(g[1], g[0]);
  CHECK(flipped.t == doctest::Approx(-got.t).epsilon(1e-15));
  CHECK(flipped.p_value == doctest::Approx(got.p_value).epsilon(1e-15));
}

TEST_CASE("games-howell degenerate conventions") {
  const auto same = summaries({A, A});
  const auto r = games_howell_pair(same[0], same[1]);
  CHECK(r.t == 0.0);
  CHECK(r.p_value == 1.0);
  const auto flat = summaries({{2, 2, 2}, {2, 2, 2}});
  CHECK(games_howell_pair(flat[0], flat[1]).p_value == 1.0);
  const auto apart = summaries({{2, 2, 2}, {5, 5, 5}});
  CHECK(games_howell_pair(apart[0], apart[1]).p_value == 0.0);
}

TEST_CASE("bonferroni multiplies by the number of pairs") {
  const auto g = summaries({A, B, C});
  const auto raw = games_howell(g, Correction::none);
  const auto adj = games_howell(g, Correction::bonferroni);
  REQUIRE(raw.size() == 3);
  REQUIRE(adj.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(adj[i].p_value == doctest::Approx(std::min(1.0, 3.0 * raw[i].p_value)).epsilon(1e-15));
  }
  CHECK(adj[0].p_value == 1.0);  // A vs B is far from significant
}

TEST_CASE("random small instances agree with the oracle") {
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<int> k_dist(2, 5);
  std::uniform_int_distribution<int> n_dist(2, 9);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> loc(-3.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<double>> groups(static_cast<std::size_t>(k_dist(gen)));
    for (auto& xs : groups) {
      const double m = loc(gen);
      const double s = std::exp(loc(gen) / 3.0);
      const int n = n_dist(gen);
      for (int i = 0; i < n; ++i) xs.push_back(m + s * noise(gen));
    }
    const auto g = summaries(groups);
    const auto got = welch_anova(g);
    const auto want = oracle::welch(groups);
    REQUIRE(got.has_value());
    CHECK(got->f == doctest::Approx(want.F).epsilon(1e-8));
    CHECK(got->df_den == doctest::Approx(want.nu).epsilon(1e-8));
    CHECK(got->p_value == doctest::Approx(want.p).epsilon(1e-6));
    const auto pairs = games_howell(g, Correction::none);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      for (std::size_t j = i + 1; j < groups.size(); ++j, ++idx) {
        const auto w = oracle::games_howell(groups[i], groups[j]);
        CHECK(pairs[idx].t == doctest::Approx(w.t).epsilon(1e-8));
        CHECK(pairs[idx].df == doctest::Approx(w.nu).epsilon(1e-8));
        CHECK(pairs[idx].p_value == doctest::Approx(w.p).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("a zero threshold retains every cluster") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto groups = gaussian_groups(seed, {0.0, 10.0, 20.0, 30.0}, 6, 0.5);
    for (auto corr : {Correction::none, Correction::bonferroni}) {
      const auto sel = select_groups(groups, 0.0, corr);
      CHECK(sel.retained == std::vector<int>{0, 1, 2, 3});
      CHECK(sel.excluded.empty());
    }
  }
}

TEST_CASE("separated clusters lose their worst member") {
  const auto groups = gaussian_groups(11, {0.0, 5.0, 10.0}, 8, 0.5);
  const auto sel = select_groups(groups, 0.05, Correction::none);
  REQUIRE(sel.welch.has_value());
  CHECK(sel.welch->p_value < 0.05);
  CHECK(sel.best_label == 2);
  CHECK(std::find(sel.excluded.begin(), sel.excluded.end(), 0) != sel.excluded.end());
  CHECK(std::find(sel.retained.begin(), sel.retained.end(), 2) != sel.retained.end());
  for (const auto& cmp : sel.comparisons) {
    CHECK(cmp.p_value == doctest::Approx(oracle::games_howell(groups[static_cast<std::size_t>(cmp.label_i)],
                                                              groups[static_cast<std::size_t>(cmp.label_j)])
                                             .p)
                             .epsilon(1e-6));
  }
}

TEST_CASE("clusters from one distribution are all retained") {
  const auto groups = gaussian_groups(3, {1.0, 1.0, 1.0}, 10, 1.0);
  const auto sel = select_groups(groups, 0.05, Correction::none);
  REQUIRE(sel.welch.has_value());
  CHECK(sel.welch->p_value >= 0.05);
  CHECK(sel.retained == std::vector<int>{0, 1, 2});
}

TEST_CASE("small clusters are always retained and the result is never empty") {
  auto groups = gaussian_groups(5, {0.0, 10.0, 20.0}, 6, 0.1);
  groups.push_back({-100.0});
  groups.push_back({});
  const auto sel = select_groups(groups, 0.05, Correction::none);
  CHECK(std::find(sel.retained.begin(), sel.retained.end(), 3) != sel.retained.end());
  CHECK(std::find(sel.retained.begin(), sel.retained.end(), 4) != sel.retained.end());
  CHECK(std::find(sel.retained.begin(), sel.retained.end(), 2) != sel.retained.end());

  CHECK_FALSE(select_groups({{}, {}}, 0.05, Correction::none).retained.empty());
  CHECK(select_groups({{1.0}, {2.0, 3.0}}, 0.5, Correction::none).retained == std::vector<int>{0, 1});
}

TEST_CASE("raising the threshold never shrinks the excluded set") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto groups = gaussian_groups(seed, {0.0, 0.6, 1.2, 1.8, 2.4}, 6, 1.0);
    std::size_t previous = 0;
    bool gate_open_before = false;
    for (double p : {0.001, 0.01, 0.05, 0.1, 0.2}) {
      const auto sel = select_groups(groups, p, Correction::none);
      const bool gate_open = sel.welch && sel.welch->p_value < p;
      if (gate_open && gate_open_before) CHECK(sel.excluded.size() >= previous);
      previous = sel.excluded.size();
      gate_open_before = gate_open;
    }
  }
}

TEST_CASE("selection over a labelled pool matches the raw grouping") {
  const auto groups = gaussian_groups(8, {0.0, 4.0, 8.0}, 5, 0.3);
  std::vector<Candidate> cs;
  ObservationSet obs;
  for (std::size_t c = 0; c < groups.size(); ++c) {
    for (double y : groups[c]) {
      Candidate cand;
      cand.id = cs.size();
      cand.features = {static_cast<double>(cand.id)};
      cand.oracle_value = y;
      cand.cluster = static_cast<int>(c);
      obs.add(cand.id, y);
      cs.push_back(cand);
    }
  }
  // An unobserved cluster still counts as a label.
  Candidate extra;
  extra.id = cs.size();
  extra.features = {-1.0};
  extra.cluster = 3;
  cs.push_back(extra);
  const CandidatePool pool(cs, ObjectiveSense::maximize);
  const auto sel = select_clusters(obs, pool, 0.05, Correction::bonferroni);
  auto with_empty = groups;
  with_empty.push_back({});
  const auto raw = select_groups(with_empty, 0.05, Correction::bonferroni);
  CHECK(sel.retained == raw.retained);
  CHECK(sel.excluded == raw.excluded);
  CHECK(std::find(sel.retained.begin(), sel.retained.end(), 3) != sel.retained.end());
  CHECK_FALSE(sel.excluded.empty());
}

TEST_CASE("corrections parse by name") {
  CHECK(parse_correction("bonferroni") == Correction::bonferroni);
  CHECK(parse_correction("none") == Correction::none);
  CHECK_THROWS_AS(parse_correction("holm"), InvalidArgument);
}
