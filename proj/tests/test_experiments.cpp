#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oblivsim/experiments.hpp"

using namespace oblivsim;

namespace {

CliOverrides seeded(uint64_t seed) {
  CliOverrides overrides;
  overrides.seed = seed;
  return overrides;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("oblivcheck reports exact zero distance") {
  OblivcheckOutcome outcome = run_oblivcheck({5, 32, 8, 3});
  CHECK(outcome.pairs == 5);
  CHECK(outcome.identical_pairs == 5);
  CHECK(outcome.max_tv == 0.0);
  CHECK(outcome.mean_tv == 0.0);
  REQUIRE(outcome.per_pair_tv.size() == 5);
  for (double tv : outcome.per_pair_tv) CHECK(tv == 0.0);
  CHECK(outcome.sample_view.operations.size() == 32);
  CHECK_THROWS_AS(run_oblivcheck({0, 32, 8, 3}), std::invalid_argument);
  CHECK_THROWS_AS(run_oblivcheck({5, 32, 65, 3}), std::invalid_argument);
}

TEST_CASE("dynbench measurements equal the closed forms") {
  DynbenchOutcome outcome = run_dynbench({64, 8, 0.5, 4});
  CHECK(outcome.rebuild_exact);
  CHECK(outcome.query_exact);
  CHECK(outcome.view.operations.size() == 64);
  uint64_t rebuild = 0, query = 0;
  for (uint64_t t = 1; t <= 64; ++t) {
    query += t - 1;
    rebuild += uint64_t{1} << std::countr_zero(t);
  }
  CHECK(outcome.report.measured_rebuild_total == rebuild);
  CHECK(outcome.report.measured_query_total == query);
  CHECK(outcome.report.operations == 64);
  CHECK_THROWS_AS(run_dynbench({64, 8, 1.5, 4}), std::invalid_argument);
}

TEST_CASE("the attack separates leaky from oblivious") {
  AttackParams params;
  params.trials = 30;
  params.seed = 5;
  AttackOutcome outcome = run_attack(params);
  CHECK(outcome.epochs == 3);
  CHECK(outcome.epoch_sizes == std::vector<uint64_t>{2, 4, 8});
  CHECK(outcome.trials == 30);
  REQUIRE(outcome.bucketed.size() == 3);
  REQUIRE(outcome.oblivious.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    const AdvantageRow& leaky = outcome.bucketed[i];
    CHECK(leaky.epoch == i);
    // Every in-subcube query scans its own full bucket; the outside query
    // probes nothing, so the calibrated threshold separates perfectly.
    CHECK(leaky.t_mean == doctest::Approx(double(outcome.epoch_sizes[i])).epsilon(1e-12));
    CHECK(leaky.t_median == doctest::Approx(double(outcome.epoch_sizes[i])).epsilon(1e-12));
    CHECK(leaky.advantage == 1.0);
    CHECK(leaky.threshold >= 1);
    CHECK(outcome.oblivious[i].advantage == 0.0);
  }
  CHECK(outcome.soundness_ok);
  // Update phase plus k+1 probe queries in the sampled view.
  CHECK(outcome.sample_view.operations.size() == 14 + 4);

  std::string csv = advantage_csv(outcome.bucketed);
  CHECK(contains(csv, "epoch,t_i_mean,t_i_median,advantage,threshold\n"));
  CHECK(contains(csv, "0,2.000000,2.000000,1.000000,"));

  // A fixed threshold of zero fires on both sides and kills the advantage.
  params.threshold = 0;
  AttackOutcome degenerate = run_attack(params);
  for (const auto& row : degenerate.bucketed) CHECK(row.advantage == 0.0);
}

TEST_CASE("the inequality runs stay violation-free") {
  LemmasParams params;
  params.pinsker_instances = 500;
  params.grid_max = 6;
  params.population_max = 60;
  params.probes_max = 3;
  params.mc_draws = 20000;
  params.pairwise_trials = 5;
  params.pairwise_points = 64;
  params.pairwise_dim = 256;
  params.pairwise_ratio = 0.3;  // random-point minima concentrate near d/2 - 4*sqrt(d)/2
  params.seed = 6;
  LemmasOutcome outcome = run_lemmas(params);
  CHECK(outcome.pinsker_checked == 500);
  CHECK(outcome.pinsker_violations == 0);
  CHECK(outcome.resolution_checked > 0);
  CHECK(outcome.resolution_violations == 0);
  CHECK(outcome.spot_exact == doctest::Approx(1.0 / 110.0).epsilon(1e-9));
  CHECK(outcome.spot_bound == doctest::Approx(0.0064).epsilon(1e-9));
  CHECK(outcome.mc_ok);
  CHECK(outcome.mc_sigma > 0.0);
  CHECK(outcome.pairwise_failures == 0);
  CHECK(outcome.pairwise_min_distance >= 77);  // 0.3 * 256 rounded up

  // Zero counts skip blocks instead of failing them.
  LemmasParams skip;
  skip.pinsker_instances = 0;
  skip.population_max = 0;
  skip.pairwise_trials = 0;
  skip.seed = 6;
  LemmasOutcome skipped = run_lemmas(skip);
  CHECK(skipped.pinsker_checked == 0);
  CHECK(skipped.resolution_checked == 0);
  CHECK(skipped.pairwise_min_distance == 0);
}

TEST_CASE("expansion sampling never beats the exhaustive minimum") {
  ExpansionOutcome outcome = run_expansion({4, 4, 2, 50, 7});
  CHECK(outcome.spot_min_d4_r2 == 11);
  CHECK(outcome.violations == 0);
  REQUIRE(outcome.rows.size() == 8);  // sizes 1..4 by r in {1,2}
  for (const auto& row : outcome.rows) {
    CHECK(row.sampled_min >= row.exhaustive_min);
    CHECK(row.phi_estimate ==
          doctest::Approx(double(row.sampled_min) / double(row.set_size)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(run_expansion({5, 4, 2, 50, 7}), std::invalid_argument);
  CHECK_THROWS_AS(run_expansion({4, 20, 2, 50, 7}), std::invalid_argument);
}

TEST_CASE("resolution stages behave at both extremes") {
  ResolveOutcome outcome = run_resolve({32, 8, uint64_t{1} << 20, 10000, 8});
  CHECK(outcome.epoch == 2);
  CHECK(outcome.linear_epoch_cells == 4);
  CHECK(outcome.linear_resolved_count == 0);
  CHECK(outcome.linear_bitmap == std::string(256, '0'));
  CHECK(outcome.linear_full_sample_resolved == 256);
  CHECK(outcome.bucket_epoch_cells == 4);
  CHECK(outcome.bucket_resolved_count == 256);
  CHECK(outcome.bucket_bitmap == std::string(256, '1'));
  CHECK(outcome.bucket_holdout_resolved == 0);
  CHECK(outcome.sampling_spot_exact == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(outcome.sampling_spot_bound == doctest::Approx(0.0625).epsilon(1e-9));
  CHECK(outcome.sample_view.operations.size() == 7);
  CHECK_THROWS_AS(run_resolve({32, 17, 100, 10000, 8}), std::invalid_argument);
  CHECK_THROWS_AS(run_resolve({16, 8, 100, 10000, 8}), std::invalid_argument);
}

TEST_CASE("records replay byte-identically") {
  CliOverrides overrides = seeded(11);
  overrides.trials = 50;
  RunResult first = run_experiment_json("lemmas", "", overrides);
  RunResult second = run_experiment_json("lemmas", "", overrides);
  CHECK(first.record_text == second.record_text);
  CHECK(contains(first.record_text, "\"experiment\": \"lemmas\""));
  CHECK(first.csv_bucketed.empty());
  CHECK(first.trace_text.empty());

  nlohmann::json record = nlohmann::json::parse(first.record_text);
  CHECK(record.at("config").at("pinsker_instances") == 50);
  CHECK(record.at("config").at("seed") == 11);
  CHECK(record.at("results").at("pinsker_violations") == 0);
  CHECK_FALSE(record.contains("wall_clock_ms"));
}

TEST_CASE("config parsing reports field-level failures") {
  CliOverrides overrides = seeded(1);
  CHECK_THROWS_WITH_AS(run_experiment_json("nonsense", "", overrides),
                       "unknown experiment: nonsense", std::invalid_argument);
  CHECK_THROWS_AS(run_experiment_json("lemmas", "{not json", overrides), std::invalid_argument);
  CHECK_THROWS_WITH_AS(run_experiment_json("lemmas", "[1,2]", overrides),
                       "config: top level must be an object", std::invalid_argument);
  CHECK_THROWS_WITH_AS(run_experiment_json("lemmas", R"({"bogus": {}})", overrides),
                       "config section bogus: unknown experiment", std::invalid_argument);
  CHECK_THROWS_WITH_AS(run_experiment_json("lemmas", R"({"lemmas": 3})", overrides),
                       "config section lemmas: must be an object", std::invalid_argument);

  try {
    run_experiment_json("oblivcheck", R"({"oblivcheck": {"bogus": 1}})", overrides);
    FAIL("unknown field accepted");
  } catch (const std::invalid_argument& error) {
    CHECK(contains(error.what(), "config field oblivcheck.bogus"));
    CHECK(contains(error.what(), "unknown field"));
  }
  try {
    run_experiment_json("oblivcheck", R"({"oblivcheck": {"pairs": "ten"}})", overrides);
    FAIL("mistyped field accepted");
  } catch (const std::invalid_argument& error) {
    CHECK(contains(error.what(), "config field oblivcheck.pairs"));
  }

  // Sections for other experiments are tolerated; only the requested one is
  // read, so one config file can drive every subcommand.
  CliOverrides quick = seeded(2);
  quick.trials = 3;
  RunResult shared = run_experiment_json(
      "oblivcheck", R"({"oblivcheck": {"n_ops": 16, "d": 8}, "attack": {"trials": 9}})", quick);
  nlohmann::json record = nlohmann::json::parse(shared.record_text);
  CHECK(record.at("config").at("pairs") == 3);  // trials override maps to pairs
  CHECK(record.at("config").at("n_ops") == 16);
  CHECK(record.at("results").at("identical_pairs") == 3);
}

TEST_CASE("cross-experiment override rules") {
  CliOverrides with_threshold = seeded(1);
  with_threshold.threshold = 1;
  CHECK_THROWS_WITH_AS(run_experiment_json("lemmas", "", with_threshold),
                       "a threshold only applies to attack", std::invalid_argument);
  CliOverrides with_floor = seeded(1);
  with_floor.floor_size = 4;
  CHECK_THROWS_WITH_AS(run_experiment_json("dynbench", "", with_floor),
                       "an epoch floor only applies to attack", std::invalid_argument);
  CliOverrides with_trials = seeded(1);
  with_trials.trials = 5;
  CHECK_THROWS_WITH_AS(run_experiment_json("dynbench", "", with_trials),
                       "a trial count does not apply to dynbench", std::invalid_argument);
  CHECK_THROWS_WITH_AS(run_experiment_json("resolve", "", with_trials),
                       "a trial count does not apply to resolve", std::invalid_argument);
  CHECK_THROWS_WITH_AS(run_experiment_json("lemmas", "", CliOverrides{}),
                       "a seed is required", std::invalid_argument);

  CliOverrides negative = seeded(1);
  negative.threshold = -2;
  CHECK_THROWS_WITH_AS(run_experiment_json("attack", R"({"attack": {"trials": 2}})", negative),
                       "a threshold must be non-negative", std::invalid_argument);
}

TEST_CASE("the attack record carries both CSV tables") {
  CliOverrides overrides = seeded(13);
  overrides.trials = 5;
  RunResult result = run_experiment_json("attack", "", overrides);
  REQUIRE(!result.csv_bucketed.empty());
  REQUIRE(!result.csv_oblivious.empty());
  CHECK(result.csv_bucketed.rfind("epoch,t_i_mean,t_i_median,advantage,threshold\n", 0) == 0);
  CHECK(result.csv_oblivious.rfind("epoch,t_i_mean,t_i_median,advantage,threshold\n", 0) == 0);
  // Header plus one row per epoch.
  CHECK(std::count(result.csv_bucketed.begin(), result.csv_bucketed.end(), '\n') == 4);
  nlohmann::json record = nlohmann::json::parse(result.record_text);
  CHECK(record.at("results").at("soundness_ok") == true);
  CHECK(record.at("results").at("bucketed").size() == 3);
}

TEST_CASE("trace dumps and timing are opt-in") {
  CliOverrides overrides = seeded(17);
  overrides.trials = 2;
  overrides.dump_trace = true;
  RunResult result = run_experiment_json("oblivcheck", R"({"oblivcheck": {"n_ops": 3, "d": 8}})",
                                         overrides);
  REQUIRE(!result.trace_text.empty());
  CHECK(result.trace_text.rfind("op_index,op_label,address,kind\n", 0) == 0);
  // 3 operations render as 3 blocks separated by blank lines.
  CHECK(std::count(result.trace_text.begin(), result.trace_text.end(), '\n') >= 5);
  RunResult again = run_experiment_json("oblivcheck", R"({"oblivcheck": {"n_ops": 3, "d": 8}})",
                                        overrides);
  CHECK(again.trace_text == result.trace_text);

  CliOverrides timed = seeded(17);
  timed.trials = 2;
  timed.timing = true;
  RunResult with_clock = run_experiment_json("oblivcheck",
                                             R"({"oblivcheck": {"n_ops": 3, "d": 8}})", timed);
  CHECK(contains(with_clock.record_text, "wall_clock_ms"));
}

TEST_CASE("config seeds lose to the command line") {
  CliOverrides fixed = seeded(21);
  fixed.trials = 4;
  RunResult overridden =
      run_experiment_json("oblivcheck", R"({"oblivcheck": {"seed": 1, "n_ops": 8, "d": 8}})",
                          fixed);
  RunResult direct =
      run_experiment_json("oblivcheck", R"({"oblivcheck": {"n_ops": 8, "d": 8}})", fixed);
  CHECK(overridden.record_text == direct.record_text);
}

}  // TEST_SUITE
