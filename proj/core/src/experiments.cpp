#include "oblivsim/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "oblivsim/analysis.hpp"
#include "oblivsim/rng.hpp"

namespace oblivsim {

namespace {

constexpr unsigned kClientBits = 64;

unsigned address_bits(uint64_t cells) {
  unsigned n = 1;
  while ((uint64_t{1} << n) < cells) ++n;
  return n;
}

unsigned word_bits_for(uint64_t cells, unsigned d) {
  unsigned bits = std::max(address_bits(cells), d);
  if (bits > 64) throw std::invalid_argument("cell word cannot hold both addresses and points");
  return bits;
}

uint64_t pow2_above(uint64_t n) {
  uint64_t p = 2;
  while (p <= n) p *= 2;
  return p;
}

Point random_point(unsigned d, Rng& rng) {
  Point p(d);
  for (unsigned j = 0; j < d; j += 64) {
    unsigned chunk = std::min(64u, d - j);
    uint64_t word = rng.bits(chunk);
    for (unsigned b = 0; b < chunk; ++b)
      if ((word >> b) & 1u) p.set(j + b, true);
  }
  return p;
}

AnnParams bench_params(unsigned d) {
  AnnParams params;
  params.d = d;
  params.r = std::max(1u, d / 8);
  params.c = 2.0;
  params.validate();
  return params;
}

}  // namespace

OblivcheckOutcome run_oblivcheck(const OblivcheckParams& params) {
  if (params.pairs == 0 || params.n_ops == 0) throw std::invalid_argument("nothing to run");
  if (params.d == 0 || params.d > 64) throw std::invalid_argument("dimension must be in [1,64]");
  LinearScanStatic base(bench_params(params.d));
  const uint64_t n_max = pow2_above(params.n_ops);
  const uint64_t cells = ObliviousDynamic::cells_required(params.n_ops, n_max, base);
  OblivcheckOutcome outcome;
  outcome.pairs = params.pairs;
  double tv_sum = 0.0;
  for (uint64_t pair = 0; pair < params.pairs; ++pair) {
    SessionTrace views[2];
    for (int side = 0; side < 2; ++side) {
      uint64_t lane = 2 * pair + static_cast<uint64_t>(side);
      Rng rng(mix_seed(params.seed, lane));
      Machine machine(cells, word_bits_for(cells, params.d), kClientBits,
                      mix_seed(params.seed, lane ^ 0x5eedULL));
      ObliviousDynamic dyn(machine, base, params.d, n_max);
      for (uint64_t t = 0; t < params.n_ops; ++t) {
        Point x = random_point(params.d, rng);
        if (rng.bit())
          dyn.operate_insert(x);
        else
          dyn.operate_query(x);
      }
      views[side] = machine.adversary_view();
    }
    TvEstimate tv = tv_deterministic(views[0], views[1]);
    outcome.per_pair_tv.push_back(tv.value);
    outcome.max_tv = std::max(outcome.max_tv, tv.value);
    tv_sum += tv.value;
    if (tv.value == 0.0) ++outcome.identical_pairs;
    if (pair == 0) outcome.sample_view = std::move(views[0]);
  }
  outcome.mean_tv = tv_sum / static_cast<double>(params.pairs);
  return outcome;
}

DynbenchOutcome run_dynbench(const DynbenchParams& params) {
  if (params.n_ops == 0) throw std::invalid_argument("nothing to run");
  if (params.d == 0 || params.d > 64) throw std::invalid_argument("dimension must be in [1,64]");
  if (params.query_fraction < 0.0 || params.query_fraction > 1.0)
    throw std::invalid_argument("query fraction must lie in [0,1]");
  LinearScanStatic base(bench_params(params.d));
  const uint64_t n_max = pow2_above(params.n_ops);
  const uint64_t cells = ObliviousDynamic::cells_required(params.n_ops, n_max, base);
  Machine machine(cells, word_bits_for(cells, params.d), kClientBits, mix_seed(params.seed, 1));
  ObliviousDynamic dyn(machine, base, params.d, n_max);
  Rng rng(mix_seed(params.seed, 2));
  for (uint64_t t = 0; t < params.n_ops; ++t) {
    Point x = random_point(params.d, rng);
    if (rng.unit() < params.query_fraction)
      dyn.operate_query(x);
    else
      dyn.operate_insert(x);
  }
  DynbenchOutcome outcome;
  outcome.view = machine.adversary_view();
  outcome.report = cost_account(outcome.view, dyn);
  outcome.rebuild_exact =
      outcome.report.measured_rebuild_total == outcome.report.predicted_rebuild_total;
  outcome.query_exact =
      outcome.report.measured_query_total == outcome.report.predicted_query_total;
  return outcome;
}

namespace {

// Advantage rows for one arm of the attack. Thresholds default to the lower
// median of the in-subcube counts of the same arm.
std::vector<AdvantageRow> advantage_rows(const std::vector<std::vector<ProbeHistogram>>& in_by_epoch,
                                         const std::vector<ProbeHistogram>& out_histograms,
                                         const std::optional<uint64_t>& fixed_threshold) {
  std::vector<AdvantageRow> rows;
  for (size_t epoch = 0; epoch < in_by_epoch.size(); ++epoch) {
    const auto& in_histograms = in_by_epoch[epoch];
    std::vector<uint64_t> in_counts;
    std::vector<std::string> in_keys, out_keys;
    double sum = 0.0;
    for (const auto& h : in_histograms) {
      in_counts.push_back(h.per_epoch[epoch]);
      in_keys.push_back(std::to_string(h.per_epoch[epoch]));
      sum += static_cast<double>(h.per_epoch[epoch]);
    }
    for (const auto& h : out_histograms) out_keys.push_back(std::to_string(h.per_epoch[epoch]));
    AdvantageRow row;
    row.epoch = epoch;
    row.t_mean = sum / static_cast<double>(in_counts.size());
    row.t_median = static_cast<double>(lower_median(in_counts));
    row.threshold = fixed_threshold ? *fixed_threshold : lower_median(in_counts);
    row.advantage = distinguish(in_histograms, out_histograms, epoch, row.threshold);
    row.tv_bound = 2.0 * tv_empirical(in_keys, out_keys).value;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

AttackOutcome run_attack(const AttackParams& params) {
  if (params.trials == 0) throw std::invalid_argument("nothing to run");
  if (params.d_prime == 0 || params.d < 4 * params.d_prime)
    throw std::invalid_argument("need d >= 4*d_prime");
  if (params.d > 64) throw std::invalid_argument("dimension must be in [1,64]");
  EpochPlan plan = epoch_plan(params.n_total, kClientBits, 64, 1, params.floor_size, params.beta);
  AnnParams qparams = subcube_ann_params(params.d, params.d_prime);
  LinearScanStatic base(qparams);
  const uint64_t dyn_n_max = pow2_above(params.n_total);
  const uint64_t dyn_cells = ObliviousDynamic::cells_required(params.n_total, dyn_n_max, base);

  std::vector<std::vector<ProbeHistogram>> bucketed_in(plan.k), oblivious_in(plan.k);
  std::vector<ProbeHistogram> bucketed_out, oblivious_out;
  AttackOutcome outcome;
  outcome.epochs = plan.k;
  outcome.epoch_sizes = plan.sizes;
  outcome.trials = params.trials;

  for (uint64_t trial = 0; trial < params.trials; ++trial) {
    uint64_t s0 = mix_seed(params.seed, trial);
    SubcubeFamily family =
        build_prefixes(params.d, params.d_prime, plan.k, mix_seed(s0, 1), params.prefix_attempts);
    UpdateScript script = build_update_script(family, plan, mix_seed(s0, 2));
    auto execution = script.execution_order();
    Point q_out = outside_query(family, mix_seed(s0, 3));
    Rng qrng(mix_seed(s0, 4));
    std::vector<Point> q_in;
    for (size_t i = 0; i < plan.k; ++i)
      q_in.push_back(family.make_point(i, qrng.bits(params.d_prime)));

    {
      uint64_t cells = plan.total();
      Machine machine(cells, word_bits_for(cells, params.d), kClientBits, mix_seed(s0, 5));
      BucketedBaseline bucketed(machine, params.d, params.d_prime, family.prefixes, plan.sizes,
                                qparams);
      for (const auto& [epoch, point] : execution) bucketed.insert(point);
      EpochTagger tagger = tag_writes(machine.adversary_view(), plan);
      for (size_t i = 0; i < plan.k; ++i) {
        bucketed.query(q_in[i]);
        bucketed_in[i].push_back(
            count_epoch_probes(machine.operation(machine.operations_recorded() - 1), tagger));
      }
      bucketed.query(q_out);
      bucketed_out.push_back(
          count_epoch_probes(machine.operation(machine.operations_recorded() - 1), tagger));
      if (trial == 0) outcome.sample_view = machine.adversary_view();
    }
    {
      Machine machine(dyn_cells, word_bits_for(dyn_cells, params.d), kClientBits,
                      mix_seed(s0, 6));
      ObliviousDynamic dyn(machine, base, params.d, dyn_n_max);
      for (const auto& [epoch, point] : execution) dyn.operate_insert(point);
      // Tag over the update prefix of the session; queries come after.
      EpochTagger tagger = tag_writes(machine.adversary_view(), plan);
      for (size_t i = 0; i < plan.k; ++i) {
        dyn.query(q_in[i]);
        oblivious_in[i].push_back(
            count_epoch_probes(machine.operation(machine.operations_recorded() - 1), tagger));
      }
      dyn.query(q_out);
      oblivious_out.push_back(
          count_epoch_probes(machine.operation(machine.operations_recorded() - 1), tagger));
    }
  }

  outcome.bucketed = advantage_rows(bucketed_in, bucketed_out, params.threshold);
  outcome.oblivious = advantage_rows(oblivious_in, oblivious_out, params.threshold);
  outcome.soundness_ok = true;
  for (const auto* rows : {&outcome.bucketed, &outcome.oblivious})
    for (const auto& row : *rows)
      if (row.advantage > row.tv_bound + 1e-12) outcome.soundness_ok = false;
  return outcome;
}

std::string advantage_csv(const std::vector<AdvantageRow>& rows) {
  std::ostringstream out;
  out << "epoch,t_i_mean,t_i_median,advantage,threshold\n";
  out << std::fixed << std::setprecision(6);
  for (const auto& row : rows)
    out << row.epoch << ',' << row.t_mean << ',' << row.t_median << ',' << row.advantage << ','
        << row.threshold << '\n';
  return out.str();
}

namespace {

PinskerInstance random_pinsker(Rng& rng, unsigned grid_max) {
  PinskerInstance instance;
  instance.rows = 1 + static_cast<size_t>(rng.below(grid_max));
  instance.cols = 1 + static_cast<size_t>(rng.below(grid_max));
  size_t n = instance.rows * instance.cols;
  instance.p.assign(n, 0.0);
  instance.q.assign(n, 0.0);
  auto fill_random = [&rng](std::vector<double>& mass) {
    double sum = 0.0;
    for (double& v : mass) {
      v = rng.unit() + 1e-4;
      sum += v;
    }
    for (double& v : mass) v /= sum;
  };
  switch (rng.below(4)) {
    case 0:
      fill_random(instance.p);
      fill_random(instance.q);
      break;
    case 1:  // identical pair
      fill_random(instance.p);
      instance.q = instance.p;
      break;
    case 2: {  // disjoint supports
      if (n < 2) {
        fill_random(instance.p);
        instance.q = instance.p;
        break;
      }
      std::vector<int> side(n);
      for (auto& s : side) s = rng.bit() ? 1 : 0;
      side[0] = 0;
      side[1] = 1;
      double p_sum = 0.0, q_sum = 0.0;
      for (size_t i = 0; i < n; ++i) {
        double v = rng.unit() + 1e-4;
        if (side[i] == 0) {
          instance.p[i] = v;
          p_sum += v;
        } else {
          instance.q[i] = v;
          q_sum += v;
        }
      }
      for (size_t i = 0; i < n; ++i) {
        instance.p[i] /= p_sum;
        instance.q[i] /= q_sum;
      }
      break;
    }
    default: {  // point mass against a uniform column
      size_t a0 = rng.below(instance.rows);
      size_t b0 = rng.below(instance.cols);
      instance.p[a0 * instance.cols + b0] = 1.0;
      for (size_t a = 0; a < instance.rows; ++a)
        instance.q[a * instance.cols + b0] = 1.0 / static_cast<double>(instance.rows);
      break;
    }
  }
  return instance;
}

}  // namespace

LemmasOutcome run_lemmas(const LemmasParams& params) {
  if (params.grid_max == 0) throw std::invalid_argument("grid bound must be positive");
  LemmasOutcome outcome;

  Rng pinsker_rng(mix_seed(params.seed, 1));
  for (uint64_t i = 0; i < params.pinsker_instances; ++i) {
    PinskerReport report = reverse_pinsker_check(random_pinsker(pinsker_rng, params.grid_max));
    ++outcome.pinsker_checked;
    if (!report.holds) ++outcome.pinsker_violations;
  }

  if (params.population_max > 0) {
    for (uint64_t population = 1; population <= params.population_max; ++population)
      for (uint64_t t = 0; 2 * t <= population && t <= params.probes_max; ++t)
        for (uint64_t s = 2 * t; s <= population; ++s) {
          ResolutionProbability rp = resolution_probability({population, s, t});
          ++outcome.resolution_checked;
          if (rp.exact < rp.power_bound - 1e-12) ++outcome.resolution_violations;
        }
    SamplingParams spot{100, 10, 1};
    ResolutionProbability rp = resolution_probability(spot);
    outcome.spot_exact = rp.exact;
    outcome.spot_bound = rp.power_bound;
    if (params.mc_draws > 0) {
      std::vector<uint64_t> addresses(spot.population);
      for (uint64_t a = 0; a < spot.population; ++a) addresses[a] = a;
      uint64_t hits = 0;
      for (uint64_t draw = 0; draw < params.mc_draws; ++draw) {
        auto kept = sample_cells(addresses, spot.sample_size, mix_seed(params.seed, 0xacc0 + draw));
        bool both = std::binary_search(kept.begin(), kept.end(), uint64_t{0}) &&
                    std::binary_search(kept.begin(), kept.end(), uint64_t{1});
        if (both) ++hits;
      }
      outcome.mc_estimate = static_cast<double>(hits) / static_cast<double>(params.mc_draws);
      outcome.mc_sigma =
          std::sqrt(rp.exact * (1.0 - rp.exact) / static_cast<double>(params.mc_draws));
      outcome.mc_ok = std::abs(outcome.mc_estimate - rp.exact) <= 3.0 * outcome.mc_sigma;
    }
  }

  if (params.pairwise_trials > 0) {
    if (params.pairwise_points < 2) throw std::invalid_argument("need at least two points");
    outcome.pairwise_min_distance = params.pairwise_dim;
    for (uint64_t trial = 0; trial < params.pairwise_trials; ++trial) {
      Rng rng(mix_seed(params.seed, 0xd15 + trial));
      std::vector<Point> points;
      points.reserve(params.pairwise_points);
      for (uint64_t j = 0; j < params.pairwise_points; ++j)
        points.push_back(random_point(params.pairwise_dim, rng));
      unsigned m = min_pairwise_distance(points);
      outcome.pairwise_min_distance = std::min(outcome.pairwise_min_distance, m);
      if (static_cast<double>(m) < params.pairwise_ratio * params.pairwise_dim)
        ++outcome.pairwise_failures;
    }
  }
  return outcome;
}

ExpansionOutcome run_expansion(const ExpansionRunParams& params) {
  if (params.d == 0 || params.d > 4) throw std::invalid_argument("exhaustive oracle needs d <= 4");
  if (params.max_set_size == 0 || params.r_max == 0 || params.samples_per_cell == 0)
    throw std::invalid_argument("nothing to run");
  const uint64_t cube = uint64_t{1} << params.d;
  if (params.max_set_size > cube) throw std::invalid_argument("set size exceeds the cube");
  ExpansionOutcome outcome;
  outcome.spot_min_d4_r2 = exhaustive_min_expansion(4, 1, 2);
  Rng rng(mix_seed(params.seed, 1));
  for (unsigned size = 1; size <= params.max_set_size; ++size)
    for (unsigned r = 1; r <= params.r_max; ++r) {
      ExpansionRow row;
      row.set_size = size;
      row.r = r;
      row.exhaustive_min = exhaustive_min_expansion(params.d, size, r);
      row.sampled_min = cube;
      for (uint64_t sample = 0; sample < params.samples_per_cell; ++sample) {
        std::vector<uint64_t> pool(cube);
        for (uint64_t v = 0; v < cube; ++v) pool[v] = v;
        std::vector<Point> v_set;
        for (unsigned pick = 0; pick < size; ++pick) {
          uint64_t j = pick + rng.below(cube - pick);
          std::swap(pool[pick], pool[j]);
          v_set.push_back(Point::unpack(pool[pick], params.d));
        }
        uint64_t grown = neighborhood(v_set, r, params.d).size();
        row.sampled_min = std::min(row.sampled_min, grown);
        if (grown < row.exhaustive_min) ++outcome.violations;
      }
      row.phi_estimate = static_cast<double>(row.sampled_min) / static_cast<double>(size);
      outcome.rows.push_back(row);
    }
  return outcome;
}

namespace {

// Growing array on the probe machine: insert appends one cell, query scans
// every written cell. The always-probes-everything foil for the decoder.
class AppendScan {
 public:
  AppendScan(Machine& machine, unsigned d, uint64_t capacity)
      : machine_(machine), d_(d), base_(machine.reserve_region(capacity)), capacity_(capacity) {}

  void insert(const Point& x) {
    if (x.dim() != d_) throw std::invalid_argument("point dimension mismatch");
    if (fill_ == capacity_) throw std::length_error("append region full");
    machine_.begin_operation();
    machine_.write(base_ + fill_, x.packed());
    machine_.end_operation();
    ++fill_;
  }

  std::vector<ProbeRecord> replay_query(const Point& q) {
    machine_.begin_operation();
    for (uint64_t i = 0; i < fill_; ++i) machine_.read(base_ + i);
    machine_.end_operation();
    (void)q;  // scan shape is oblivious; the answer is irrelevant here
    return machine_.operation(machine_.operations_recorded() - 1).probes;
  }

 private:
  Machine& machine_;
  unsigned d_;
  uint64_t base_;
  uint64_t capacity_;
  uint64_t fill_ = 0;
};

}  // namespace

ResolveOutcome run_resolve(const ResolveParams& params) {
  if (params.d_prime == 0 || params.d_prime > 16)
    throw std::invalid_argument("subcube too large to enumerate");
  if (params.d < 4 * params.d_prime || params.d > 64)
    throw std::invalid_argument("need 4*d_prime <= d <= 64");
  // Fixed tiny scenario: epochs [1,2,4], seven updates, oldest epoch probed.
  EpochPlan plan = epoch_plan(7, kClientBits, 64, 1, uint64_t{1}, uint64_t{2});
  const size_t epoch = plan.k - 1;
  SubcubeFamily family =
      build_prefixes(params.d, params.d_prime, plan.k, mix_seed(params.seed, 1),
                     params.prefix_attempts);
  UpdateScript script = build_update_script(family, plan, mix_seed(params.seed, 2));
  auto execution = script.execution_order();
  AnnParams qparams = subcube_ann_params(params.d, params.d_prime);

  ResolveOutcome outcome;
  outcome.epoch = epoch;

  {
    uint64_t cells = plan.total();
    Machine machine(cells, word_bits_for(cells, params.d), kClientBits, mix_seed(params.seed, 3));
    AppendScan scan(machine, params.d, cells);
    for (const auto& [e, point] : execution) scan.insert(point);
    outcome.sample_view = machine.adversary_view();
    EpochTagger tagger = tag_writes(outcome.sample_view, plan);
    std::vector<uint64_t> owned = tagger.cells_of(epoch);
    outcome.linear_epoch_cells = owned.size();
    QueryReplayer replayer = [&scan](const Point& q) { return scan.replay_query(q); };
    std::vector<uint64_t> missing_one =
        sample_cells(owned, owned.size() - 1, mix_seed(params.seed, 4));
    ResolvedSet sparse =
        resolved_queries(replayer, missing_one, owned, family, epoch, params.probe_cap);
    outcome.linear_resolved_count = sparse.count();
    outcome.linear_bitmap = sparse.bitmap();
    ResolvedSet full = resolved_queries(replayer, owned, owned, family, epoch, params.probe_cap);
    outcome.linear_full_sample_resolved = full.count();

    SamplingParams spot{owned.size(), owned.size() - 1, 1};
    ResolutionProbability rp = resolution_probability(spot);
    outcome.sampling_spot_exact = rp.exact;
    outcome.sampling_spot_bound = rp.power_bound;
  }
  {
    uint64_t cells = plan.total();
    Machine machine(cells, word_bits_for(cells, params.d), kClientBits, mix_seed(params.seed, 5));
    BucketedBaseline bucketed(machine, params.d, params.d_prime, family.prefixes, plan.sizes,
                              qparams);
    for (const auto& [e, point] : execution) bucketed.insert(point);
    EpochTagger tagger = tag_writes(machine.adversary_view(), plan);
    std::vector<uint64_t> owned = tagger.cells_of(epoch);
    outcome.bucket_epoch_cells = owned.size();
    QueryReplayer replayer = [&machine, &bucketed](const Point& q) {
      bucketed.query(q);
      return machine.operation(machine.operations_recorded() - 1).probes;
    };
    ResolvedSet full = resolved_queries(replayer, owned, owned, family, epoch, params.probe_cap);
    outcome.bucket_resolved_count = full.count();
    outcome.bucket_bitmap = full.bitmap();
    std::vector<uint64_t> missing_one =
        sample_cells(owned, owned.size() - 1, mix_seed(params.seed, 6));
    ResolvedSet sparse =
        resolved_queries(replayer, missing_one, owned, family, epoch, params.probe_cap);
    outcome.bucket_holdout_resolved = sparse.count();
  }
  return outcome;
}

// ---- JSON front end ----

namespace {

using nlohmann::json;

[[noreturn]] void field_error(const std::string& kind, const std::string& key,
                              const std::string& reason) {
  throw std::invalid_argument("config field " + kind + "." + key + ": " + reason);
}

template <typename T>
void read_field(const json& section, const std::string& kind, const std::string& key, T& target) {
  if (!section.contains(key)) return;
  try {
    target = section.at(key).get<T>();
  } catch (const json::exception& e) {
    field_error(kind, key, e.what());
  }
}

void reject_unknown(const json& section, const std::string& kind,
                    const std::set<std::string>& known) {
  for (const auto& item : section.items())
    if (!known.count(item.key())) field_error(kind, item.key(), "unknown field");
}

json rows_json(const std::vector<AdvantageRow>& rows) {
  json out = json::array();
  for (const auto& row : rows)
    out.push_back({{"epoch", row.epoch},
                   {"t_i_mean", row.t_mean},
                   {"t_i_median", row.t_median},
                   {"advantage", row.advantage},
                   {"threshold", row.threshold},
                   {"tv_bound", row.tv_bound}});
  return out;
}

uint64_t require_seed(const CliOverrides& overrides) {
  if (!overrides.seed) throw std::invalid_argument("a seed is required");
  return *overrides.seed;
}

}  // namespace

RunResult run_experiment_json(const std::string& experiment, const std::string& config_text,
                              const CliOverrides& overrides) {
  static const std::set<std::string> kKinds = {"oblivcheck", "attack",    "dynbench",
                                               "lemmas",     "expansion", "resolve"};
  if (!kKinds.count(experiment)) throw std::invalid_argument("unknown experiment: " + experiment);
  json root = json::object();
  if (!config_text.empty()) {
    try {
      root = json::parse(config_text);
    } catch (const json::exception& e) {
      throw std::invalid_argument(std::string("config: ") + e.what());
    }
  }
  if (!root.is_object()) throw std::invalid_argument("config: top level must be an object");
  for (const auto& item : root.items()) {
    if (!kKinds.count(item.key()))
      throw std::invalid_argument("config section " + item.key() + ": unknown experiment");
    if (!item.value().is_object())
      throw std::invalid_argument("config section " + item.key() + ": must be an object");
  }
  json section = root.contains(experiment) ? root.at(experiment) : json::object();
  if (overrides.threshold && experiment != "attack")
    throw std::invalid_argument("a threshold only applies to attack");
  if (overrides.floor_size && experiment != "attack")
    throw std::invalid_argument("an epoch floor only applies to attack");
  if (overrides.trials && (experiment == "dynbench" || experiment == "resolve"))
    throw std::invalid_argument("a trial count does not apply to " + experiment);

  auto started = std::chrono::steady_clock::now();
  RunResult result;
  json record;
  record["experiment"] = experiment;

  if (experiment == "oblivcheck") {
    OblivcheckParams params;
    reject_unknown(section, experiment, {"pairs", "n_ops", "d", "seed"});
    read_field(section, experiment, "pairs", params.pairs);
    read_field(section, experiment, "n_ops", params.n_ops);
    read_field(section, experiment, "d", params.d);
    read_field(section, experiment, "seed", params.seed);
    params.seed = require_seed(overrides);
    if (overrides.trials) params.pairs = *overrides.trials;
    record["config"] = {
        {"pairs", params.pairs}, {"n_ops", params.n_ops}, {"d", params.d}, {"seed", params.seed}};
    OblivcheckOutcome outcome = run_oblivcheck(params);
    record["results"] = {{"pairs", outcome.pairs},
                         {"identical_pairs", outcome.identical_pairs},
                         {"max_tv", outcome.max_tv},
                         {"mean_tv", outcome.mean_tv},
                         {"per_pair_tv", outcome.per_pair_tv}};
    if (overrides.dump_trace) result.trace_text = outcome.sample_view.dump();
  } else if (experiment == "dynbench") {
    DynbenchParams params;
    reject_unknown(section, experiment, {"n_ops", "d", "query_fraction", "seed"});
    read_field(section, experiment, "n_ops", params.n_ops);
    read_field(section, experiment, "d", params.d);
    read_field(section, experiment, "query_fraction", params.query_fraction);
    read_field(section, experiment, "seed", params.seed);
    params.seed = require_seed(overrides);
    record["config"] = {{"n_ops", params.n_ops},
                        {"d", params.d},
                        {"query_fraction", params.query_fraction},
                        {"seed", params.seed}};
    DynbenchOutcome outcome = run_dynbench(params);
    const CostReport& r = outcome.report;
    record["results"] = {{"operations", r.operations},
                         {"total_probes", r.total_probes},
                         {"measured_query_total", r.measured_query_total},
                         {"measured_rebuild_total", r.measured_rebuild_total},
                         {"predicted_query_total", r.predicted_query_total},
                         {"predicted_rebuild_total", r.predicted_rebuild_total},
                         {"query_exact", outcome.query_exact},
                         {"rebuild_exact", outcome.rebuild_exact},
                         {"amortized_per_op", r.amortized_per_op},
                         {"amortized_query", r.amortized_query},
                         {"amortized_insert", r.amortized_insert},
                         {"worst_update_probes", r.worst_update_probes},
                         {"predicted_sum_form", r.predicted_sum_form},
                         {"predicted_informal_form", r.predicted_informal_form}};
    if (overrides.dump_trace) result.trace_text = outcome.view.dump();
  } else if (experiment == "attack") {
    AttackParams params;
    reject_unknown(section, experiment,
                   {"d", "d_prime", "n_total", "floor", "beta", "trials", "threshold",
                    "prefix_attempts", "seed"});
    read_field(section, experiment, "d", params.d);
    read_field(section, experiment, "d_prime", params.d_prime);
    read_field(section, experiment, "n_total", params.n_total);
    read_field(section, experiment, "floor", params.floor_size);
    read_field(section, experiment, "beta", params.beta);
    read_field(section, experiment, "trials", params.trials);
    read_field(section, experiment, "prefix_attempts", params.prefix_attempts);
    read_field(section, experiment, "seed", params.seed);
    if (section.contains("threshold")) {
      uint64_t threshold = 0;
      read_field(section, experiment, "threshold", threshold);
      params.threshold = threshold;
    }
    params.seed = require_seed(overrides);
    if (overrides.trials) params.trials = *overrides.trials;
    if (overrides.floor_size) params.floor_size = *overrides.floor_size;
    if (overrides.threshold) {
      if (*overrides.threshold < 0)
        throw std::invalid_argument("a threshold must be non-negative");
      params.threshold = static_cast<uint64_t>(*overrides.threshold);
    }
    record["config"] = {{"d", params.d},
                        {"d_prime", params.d_prime},
                        {"n_total", params.n_total},
                        {"floor", params.floor_size},
                        {"beta", params.beta},
                        {"trials", params.trials},
                        {"threshold", params.threshold ? json(*params.threshold) : json()},
                        {"prefix_attempts", params.prefix_attempts},
                        {"seed", params.seed}};
    AttackOutcome outcome = run_attack(params);
    record["results"] = {{"epochs", outcome.epochs},
                         {"epoch_sizes", outcome.epoch_sizes},
                         {"trials", outcome.trials},
                         {"bucketed", rows_json(outcome.bucketed)},
                         {"oblivious", rows_json(outcome.oblivious)},
                         {"soundness_ok", outcome.soundness_ok}};
    result.csv_bucketed = advantage_csv(outcome.bucketed);
    result.csv_oblivious = advantage_csv(outcome.oblivious);
    if (overrides.dump_trace) result.trace_text = outcome.sample_view.dump();
  } else if (experiment == "lemmas") {
    LemmasParams params;
    reject_unknown(section, experiment,
                   {"pinsker_instances", "grid_max", "population_max", "probes_max", "mc_draws",
                    "pairwise_trials", "pairwise_points", "pairwise_dim", "pairwise_ratio",
                    "seed"});
    read_field(section, experiment, "pinsker_instances", params.pinsker_instances);
    read_field(section, experiment, "grid_max", params.grid_max);
    read_field(section, experiment, "population_max", params.population_max);
    read_field(section, experiment, "probes_max", params.probes_max);
    read_field(section, experiment, "mc_draws", params.mc_draws);
    read_field(section, experiment, "pairwise_trials", params.pairwise_trials);
    read_field(section, experiment, "pairwise_points", params.pairwise_points);
    read_field(section, experiment, "pairwise_dim", params.pairwise_dim);
    read_field(section, experiment, "pairwise_ratio", params.pairwise_ratio);
    read_field(section, experiment, "seed", params.seed);
    params.seed = require_seed(overrides);
    if (overrides.trials) params.pinsker_instances = *overrides.trials;
    record["config"] = {{"pinsker_instances", params.pinsker_instances},
                        {"grid_max", params.grid_max},
                        {"population_max", params.population_max},
                        {"probes_max", params.probes_max},
                        {"mc_draws", params.mc_draws},
                        {"pairwise_trials", params.pairwise_trials},
                        {"pairwise_points", params.pairwise_points},
                        {"pairwise_dim", params.pairwise_dim},
                        {"pairwise_ratio", params.pairwise_ratio},
                        {"seed", params.seed}};
    LemmasOutcome outcome = run_lemmas(params);
    record["results"] = {{"pinsker_checked", outcome.pinsker_checked},
                         {"pinsker_violations", outcome.pinsker_violations},
                         {"resolution_checked", outcome.resolution_checked},
                         {"resolution_violations", outcome.resolution_violations},
                         {"spot_exact", outcome.spot_exact},
                         {"spot_bound", outcome.spot_bound},
                         {"mc_estimate", outcome.mc_estimate},
                         {"mc_sigma", outcome.mc_sigma},
                         {"mc_ok", outcome.mc_ok},
                         {"pairwise_failures", outcome.pairwise_failures},
                         {"pairwise_min_distance", outcome.pairwise_min_distance}};
  } else if (experiment == "expansion") {
    ExpansionRunParams params;
    reject_unknown(section, experiment, {"d", "max_set_size", "r_max", "samples_per_cell", "seed"});
    read_field(section, experiment, "d", params.d);
    read_field(section, experiment, "max_set_size", params.max_set_size);
    read_field(section, experiment, "r_max", params.r_max);
    read_field(section, experiment, "samples_per_cell", params.samples_per_cell);
    read_field(section, experiment, "seed", params.seed);
    params.seed = require_seed(overrides);
    if (overrides.trials) params.samples_per_cell = *overrides.trials;
    record["config"] = {{"d", params.d},
                        {"max_set_size", params.max_set_size},
                        {"r_max", params.r_max},
                        {"samples_per_cell", params.samples_per_cell},
                        {"seed", params.seed}};
    ExpansionOutcome outcome = run_expansion(params);
    json rows = json::array();
    for (const auto& row : outcome.rows)
      rows.push_back({{"set_size", row.set_size},
                      {"r", row.r},
                      {"exhaustive_min", row.exhaustive_min},
                      {"sampled_min", row.sampled_min},
                      {"phi_estimate", row.phi_estimate}});
    record["results"] = {{"rows", rows},
                         {"violations", outcome.violations},
                         {"spot_min_d4_r2", outcome.spot_min_d4_r2}};
  } else {  // resolve
    ResolveParams params;
    reject_unknown(section, experiment, {"d", "d_prime", "probe_cap", "prefix_attempts", "seed"});
    read_field(section, experiment, "d", params.d);
    read_field(section, experiment, "d_prime", params.d_prime);
    read_field(section, experiment, "probe_cap", params.probe_cap);
    read_field(section, experiment, "prefix_attempts", params.prefix_attempts);
    read_field(section, experiment, "seed", params.seed);
    params.seed = require_seed(overrides);
    record["config"] = {{"d", params.d},
                        {"d_prime", params.d_prime},
                        {"probe_cap", params.probe_cap},
                        {"prefix_attempts", params.prefix_attempts},
                        {"seed", params.seed}};
    ResolveOutcome outcome = run_resolve(params);
    record["results"] = {{"epoch", outcome.epoch},
                         {"linear_epoch_cells", outcome.linear_epoch_cells},
                         {"linear_resolved_count", outcome.linear_resolved_count},
                         {"linear_bitmap", outcome.linear_bitmap},
                         {"linear_full_sample_resolved", outcome.linear_full_sample_resolved},
                         {"bucket_epoch_cells", outcome.bucket_epoch_cells},
                         {"bucket_resolved_count", outcome.bucket_resolved_count},
                         {"bucket_bitmap", outcome.bucket_bitmap},
                         {"bucket_holdout_resolved", outcome.bucket_holdout_resolved},
                         {"sampling_spot_exact", outcome.sampling_spot_exact},
                         {"sampling_spot_bound", outcome.sampling_spot_bound}};
    if (overrides.dump_trace) result.trace_text = outcome.sample_view.dump();
  }

  if (overrides.timing) {
    auto elapsed = std::chrono::steady_clock::now() - started;
    record["wall_clock_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
  }
  result.record_text = record.dump(2) + "\n";
  return result;
}

}  // namespace oblivsim
