#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oblivsim/adversary.hpp"
#include "oblivsim/structures.hpp"

namespace oblivsim {

// ---- oblivcheck: view distance over random operation-sequence pairs ----

struct OblivcheckParams {
  uint64_t pairs = 100;
  uint64_t n_ops = 256;
  unsigned d = 16;
  uint64_t seed = 0;
};

struct OblivcheckOutcome {
  uint64_t pairs = 0;
  uint64_t identical_pairs = 0;  // byte-identical dumps
  double max_tv = 0.0;
  double mean_tv = 0.0;
  std::vector<double> per_pair_tv;
  SessionTrace sample_view;  // first run of the first pair
};

OblivcheckOutcome run_oblivcheck(const OblivcheckParams& params);

// ---- dynbench: measured probe totals against the closed forms ----

struct DynbenchParams {
  uint64_t n_ops = 1024;
  unsigned d = 16;
  double query_fraction = 0.5;
  uint64_t seed = 0;
};

struct DynbenchOutcome {
  CostReport report;
  bool rebuild_exact = false;  // measured == predicted rebuild total
  bool query_exact = false;    // measured == predicted query total
  SessionTrace view;
};

DynbenchOutcome run_dynbench(const DynbenchParams& params);

// ---- attack: per-epoch distinguisher advantage, leaky vs oblivious ----

struct AttackParams {
  unsigned d = 16;
  unsigned d_prime = 4;
  uint64_t n_total = 14;   // update budget
  uint64_t floor_size = 2;
  uint64_t beta = 2;
  uint64_t trials = 1000;
  std::optional<uint64_t> threshold;  // default: median of in-subcube counts
  uint64_t prefix_attempts = 10000;
  uint64_t seed = 0;
};

struct AdvantageRow {
  size_t epoch = 0;
  double t_mean = 0.0;    // in-subcube probe counts into C_epoch
  double t_median = 0.0;
  double advantage = 0.0;
  uint64_t threshold = 0;
  double tv_bound = 0.0;  // 2 * plug-in distance of the per-count tables
};

struct AttackOutcome {
  size_t epochs = 0;
  std::vector<uint64_t> epoch_sizes;  // plan sizes, epoch 0 first
  uint64_t trials = 0;
  std::vector<AdvantageRow> bucketed;
  std::vector<AdvantageRow> oblivious;
  bool soundness_ok = false;  // advantage <= tv_bound on every row
  SessionTrace sample_view;   // bucketed arm, first trial
};

AttackOutcome run_attack(const AttackParams& params);

// CSV rows "epoch,t_i_mean,t_i_median,advantage,threshold".
std::string advantage_csv(const std::vector<AdvantageRow>& rows);

// ---- lemmas: inequality property runs ----

struct LemmasParams {
  uint64_t pinsker_instances = 10000;  // 0 skips the block
  unsigned grid_max = 8;

  uint64_t population_max = 200;  // 0 skips the block
  uint64_t probes_max = 5;
  uint64_t mc_draws = 100000;

  uint64_t pairwise_trials = 200;  // 0 skips the block
  uint64_t pairwise_points = 256;
  unsigned pairwise_dim = 1024;
  double pairwise_ratio = 0.4;

  uint64_t seed = 0;
};

struct LemmasOutcome {
  uint64_t pinsker_checked = 0;
  uint64_t pinsker_violations = 0;

  uint64_t resolution_checked = 0;
  uint64_t resolution_violations = 0;
  double spot_exact = 0.0;  // population 100, s = 10, t = 1
  double spot_bound = 0.0;
  double mc_estimate = 0.0;
  double mc_sigma = 0.0;
  bool mc_ok = false;  // |estimate - exact| <= 3 sigma

  uint64_t pairwise_failures = 0;
  unsigned pairwise_min_distance = 0;  // min over all trials
};

LemmasOutcome run_lemmas(const LemmasParams& params);

// ---- expansion: sampled neighborhoods against the exhaustive minimum ----

struct ExpansionRunParams {
  unsigned d = 4;
  unsigned max_set_size = 4;
  unsigned r_max = 2;
  uint64_t samples_per_cell = 200;
  uint64_t seed = 0;
};

struct ExpansionRow {
  unsigned set_size = 0;
  unsigned r = 0;
  uint64_t exhaustive_min = 0;
  uint64_t sampled_min = 0;
  double phi_estimate = 0.0;  // sampled_min / set_size
};

struct ExpansionOutcome {
  std::vector<ExpansionRow> rows;
  uint64_t violations = 0;  // sampled neighborhood below the exhaustive min
  uint64_t spot_min_d4_r2 = 0;  // exhaustive_min_expansion(4, 1, 2)
};

ExpansionOutcome run_expansion(const ExpansionRunParams& params);

// ---- resolve: cell sampling and resolved-query enumeration ----

struct ResolveParams {
  unsigned d = 32;
  unsigned d_prime = 8;
  uint64_t probe_cap = uint64_t{1} << 20;
  uint64_t prefix_attempts = 10000;
  uint64_t seed = 0;
};

struct ResolveOutcome {
  size_t epoch = 0;  // oldest epoch, the one both stages sample

  // Full-scan stage: the sample misses one cell of C_epoch.
  uint64_t linear_epoch_cells = 0;
  uint64_t linear_resolved_count = 0;  // expected 0
  std::string linear_bitmap;
  uint64_t linear_full_sample_resolved = 0;  // control: T = C_epoch

  // Bucketed stage, oldest epoch, sample covering the whole bucket.
  uint64_t bucket_epoch_cells = 0;
  uint64_t bucket_resolved_count = 0;  // expected 2^d_prime
  std::string bucket_bitmap;
  uint64_t bucket_holdout_resolved = 0;  // control: one bucket cell missing

  double sampling_spot_exact = 0.0;  // resolution probability at the stage sizes
  double sampling_spot_bound = 0.0;
  SessionTrace sample_view;  // full-scan stage update session
};

ResolveOutcome run_resolve(const ResolveParams& params);

// ---- JSON front end used by the command-line tool ----

struct CliOverrides {
  std::optional<uint64_t> seed;
  std::optional<uint64_t> trials;
  std::optional<int64_t> threshold;
  std::optional<uint64_t> floor_size;
  bool timing = false;      // adds wall_clock_ms to the record
  bool dump_trace = false;  // fills RunResult::trace_text
};

struct RunResult {
  std::string record_text;    // deterministic JSON ResultRecord
  std::string csv_bucketed;   // attack only
  std::string csv_oblivious;  // attack only
  std::string trace_text;     // sample session dump, when one exists
};

// Parses a JSON config object, applies overrides, validates with
// field-level messages, runs the experiment, and serializes the record.
RunResult run_experiment_json(const std::string& experiment, const std::string& config_text,
                              const CliOverrides& overrides);

}  // namespace oblivsim
