#include "oblivsim/structures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oblivsim {

LinearScanStatic::LinearScanStatic(AnnParams params) : params_(params) { params_.validate(); }

StaticHandle LinearScanStatic::preprocess(Machine& machine, const std::vector<Item>& items,
                                          const EncryptionKey& key) {
  if (params_.d > machine.word_bits()) throw std::invalid_argument("point wider than a cell");
  StaticHandle handle;
  handle.item_count = items.size();
  handle.key.token = key.token;
  handle.real_slot.resize(items.size(), false);
  if (items.empty()) return handle;
  handle.base = machine.reserve_region(items.size());
  for (size_t i = 0; i < items.size(); ++i) {
    // Null fillers write the zero word; liveness lives in the handle.
    uint64_t word = 0;
    if (items[i]) {
      if (items[i]->dim() != params_.d) throw std::invalid_argument("item dimension mismatch");
      word = items[i]->packed();
      handle.real_slot[i] = true;
    }
    machine.write(handle.base + i, word);
  }
  return handle;
}

std::optional<Point> LinearScanStatic::query(Machine& machine, const StaticHandle& handle,
                                             const Point& q) const {
  if (q.dim() != params_.d) throw std::invalid_argument("query dimension mismatch");
  std::optional<Point> best;
  unsigned best_dist = 0;
  for (uint64_t i = 0; i < handle.item_count; ++i) {
    uint64_t word = machine.read(handle.base + i);
    if (i >= handle.real_slot.size() || !handle.real_slot[i]) continue;
    Point p = Point::unpack(word, params_.d);
    unsigned dist = hamming(p, q);
    if (!best || dist < best_dist || (dist == best_dist && p.lex_less(*best))) {
      best = p;
      best_dist = dist;
    }
  }
  if (best && best_dist <= params_.r) return best;
  return std::nullopt;
}

Combiner ann_combiner() {
  return [](const Point& q, const std::optional<Point>& a,
            const std::optional<Point>& b) -> std::optional<Point> {
    if (!a) return b;
    if (!b) return a;
    unsigned da = hamming(*a, q);
    unsigned db = hamming(*b, q);
    if (da != db) return da < db ? a : b;
    return a->lex_less(*b) ? a : b;
  };
}

ObliviousDynamic::ObliviousDynamic(Machine& machine, StaticStructure& base, unsigned dim,
                                   uint64_t n_max, Combiner combiner)
    : machine_(machine),
      base_(base),
      dim_(dim),
      n_max_(n_max),
      combiner_(std::move(combiner)),
      dummy_query_(dim) {
  if (dim == 0) throw std::invalid_argument("zero dimension");
  if (n_max < 2) throw std::invalid_argument("capacity bound must be at least 2");
  levels_.resize(levels_for(n_max));
}

unsigned ObliviousDynamic::levels_for(uint64_t n_max) {
  if (n_max < 2) throw std::invalid_argument("capacity bound must be at least 2");
  unsigned k = 0;
  while ((uint64_t{1} << k) < n_max) ++k;  // ceil(log2 n_max)
  return k;
}

uint64_t ObliviousDynamic::level_rebuilds(uint64_t n_ops, unsigned level) {
  if (level == 0) throw std::invalid_argument("levels are 1-based");
  // Operation t rebuilds level k iff 2^(k-1) divides t + 2^(k-1) exactly at
  // that power, i.e. the counter carries into bit k-1.
  uint64_t half = uint64_t{1} << (level - 1);
  return (n_ops + half) >> level;
}

uint64_t ObliviousDynamic::cells_required(uint64_t n_ops, uint64_t n_max,
                                          const StaticStructure& base) {
  uint64_t total = 0;
  for (unsigned k = 1; k <= levels_for(n_max); ++k)
    total += level_rebuilds(n_ops, k) * base.storage_cells(uint64_t{1} << (k - 1));
  return total;
}

std::optional<Point> ObliviousDynamic::query_phase(const Point& q) {
  std::optional<Point> folded;
  for (const Level& level : levels_) {
    if (!level.occupied) continue;
    std::optional<Point> answer = base_.query(machine_, level.handle, q);
    folded = combiner_(q, folded, answer);
  }
  return folded;
}

void ObliviousDynamic::insert_phase(Item item) {
  if (items_inserted_ + 1 >= n_max_) throw std::length_error("capacity bound reached");
  unsigned k = 0;
  while (k < levels_.size() && levels_[k].occupied) ++k;
  if (k == levels_.size()) throw std::length_error("no empty level");
  std::vector<Item> merged;
  merged.reserve(uint64_t{1} << k);
  merged.push_back(std::move(item));
  for (unsigned below = 0; below < k; ++below) {
    auto& snapshot = levels_[below].snapshot;
    merged.insert(merged.end(), snapshot.begin(), snapshot.end());
    levels_[below] = Level{};
  }
  Level& target = levels_[k];
  target.key.token = ++key_counter_;
  target.handle = base_.preprocess(machine_, merged, target.key);
  target.snapshot = std::move(merged);
  target.occupied = true;
  ++items_inserted_;
}

bool ObliviousDynamic::point_live(const Point& x) const {
  for (const Level& level : levels_) {
    if (!level.occupied) continue;
    for (const Item& item : level.snapshot)
      if (item && *item == x) return true;
  }
  return false;
}

std::optional<Point> ObliviousDynamic::operate_query(const Point& q) {
  if (q.dim() != dim_) throw std::invalid_argument("query dimension mismatch");
  machine_.begin_operation();
  uint64_t before = machine_.open_operation_probes();
  std::optional<Point> answer = query_phase(q);
  uint64_t after_query = machine_.open_operation_probes();
  insert_phase(std::nullopt);
  uint64_t after_insert = machine_.open_operation_probes();
  machine_.end_operation();
  op_costs_.push_back({after_query - before, after_insert - after_query});
  return answer;
}

void ObliviousDynamic::operate_insert(const Point& x) {
  if (x.dim() != dim_) throw std::invalid_argument("insert dimension mismatch");
  machine_.begin_operation();
  uint64_t before = machine_.open_operation_probes();
  query_phase(dummy_query_);
  uint64_t after_query = machine_.open_operation_probes();
  // A repeated point is ignored at the answer level: filler goes in instead.
  insert_phase(point_live(x) ? Item{} : Item{x});
  uint64_t after_insert = machine_.open_operation_probes();
  machine_.end_operation();
  op_costs_.push_back({after_query - before, after_insert - after_query});
}

void ObliviousDynamic::insert(const Point& x) {
  if (x.dim() != dim_) throw std::invalid_argument("insert dimension mismatch");
  machine_.begin_operation();
  insert_phase(point_live(x) ? Item{} : Item{x});
  uint64_t probes = machine_.open_operation_probes();
  machine_.end_operation();
  op_costs_.push_back({0, probes});
}

std::optional<Point> ObliviousDynamic::query(const Point& q) {
  if (q.dim() != dim_) throw std::invalid_argument("query dimension mismatch");
  machine_.begin_operation();
  std::optional<Point> answer = query_phase(q);
  uint64_t probes = machine_.open_operation_probes();
  machine_.end_operation();
  op_costs_.push_back({probes, 0});
  return answer;
}

std::vector<unsigned> ObliviousDynamic::occupied_levels() const {
  std::vector<unsigned> out;
  for (unsigned k = 0; k < levels_.size(); ++k)
    if (levels_[k].occupied) out.push_back(k + 1);
  return out;
}

std::vector<Point> ObliviousDynamic::live_points() const {
  std::vector<Point> out;
  for (const Level& level : levels_) {
    if (!level.occupied) continue;
    for (const Item& item : level.snapshot)
      if (item) out.push_back(*item);
  }
  std::sort(out.begin(), out.end());
  return out;
}

CostReport cost_account(const SessionTrace& session, const ObliviousDynamic& structure) {
  const auto& costs = structure.op_costs();
  if (session.operations.size() != costs.size())
    throw std::invalid_argument("session and structure record different operation counts");
  CostReport report;
  report.operations = costs.size();
  for (size_t i = 0; i < costs.size(); ++i) {
    uint64_t measured = session.operations[i].probes.size();
    if (measured != costs[i].query_probes + costs[i].insert_probes)
      throw std::logic_error("per-operation probe split disagrees with the trace");
    report.per_op_probes.push_back(measured);
    report.total_probes += measured;
    report.measured_query_total += costs[i].query_probes;
    report.measured_rebuild_total += costs[i].insert_probes;
    report.worst_update_probes = std::max(report.worst_update_probes, costs[i].insert_probes);
  }
  const StaticStructure& base = structure.base();
  uint64_t n = report.operations;
  for (unsigned k = 1; k <= structure.level_count(); ++k) {
    uint64_t size = uint64_t{1} << (k - 1);
    report.predicted_rebuild_total +=
        ObliviousDynamic::level_rebuilds(n, k) * base.preprocess_probes(size);
  }
  // At operation t the occupied sizes are the set bits of t-1, so the
  // query-phase total telescopes over the counter states.
  for (uint64_t t = 0; t < n; ++t)
    for (unsigned k = 1; k <= structure.level_count(); ++k)
      if ((t >> (k - 1)) & 1u) report.predicted_query_total += base.query_probes(uint64_t{1} << (k - 1));
  if (n > 0) {
    report.amortized_per_op = static_cast<double>(report.total_probes) / static_cast<double>(n);
    report.amortized_query =
        static_cast<double>(report.measured_query_total) / static_cast<double>(n);
    report.amortized_insert =
        static_cast<double>(report.measured_rebuild_total) / static_cast<double>(n);
    for (unsigned k = 1; k <= structure.level_count(); ++k) {
      uint64_t size = uint64_t{1} << (k - 1);
      report.predicted_sum_form += static_cast<double>(base.query_probes(size)) +
                                   static_cast<double>(base.preprocess_probes(size)) /
                                       static_cast<double>(size);
    }
    double lg = std::log2(static_cast<double>(n));
    report.predicted_informal_form =
        lg * static_cast<double>(base.query_probes(n)) +
        lg * static_cast<double>(base.preprocess_probes(n)) / static_cast<double>(n);
  }
  return report;
}

BucketedBaseline::BucketedBaseline(Machine& machine, unsigned d, unsigned d_prime,
                                   std::vector<Point> prefixes, std::vector<uint64_t> capacities,
                                   AnnParams params)
    : machine_(machine),
      d_(d),
      d_prime_(d_prime),
      prefixes_(std::move(prefixes)),
      capacities_(std::move(capacities)),
      params_(params) {
  if (d_prime_ == 0 || d_prime_ >= d_) throw std::invalid_argument("bad subcube width");
  if (prefixes_.empty() || prefixes_.size() != capacities_.size())
    throw std::invalid_argument("one capacity per prefix required");
  for (const Point& prefix : prefixes_)
    if (prefix.dim() != d_ - d_prime_) throw std::invalid_argument("prefix width mismatch");
  params_.validate();
  for (size_t i = 0; i < prefixes_.size(); ++i) {
    if (capacities_[i] == 0) throw std::invalid_argument("empty bucket capacity");
    bases_.push_back(machine_.reserve_region(capacities_[i]));
    fill_.push_back(0);
  }
}

std::optional<size_t> BucketedBaseline::bucket_of(const Point& x) const {
  if (x.dim() != d_) throw std::invalid_argument("point dimension mismatch");
  Point prefix = x.slice(0, d_ - d_prime_);
  for (size_t i = 0; i < prefixes_.size(); ++i)
    if (prefix == prefixes_[i]) return i;
  return std::nullopt;
}

void BucketedBaseline::insert(const Point& x) {
  auto bucket = bucket_of(x);
  if (!bucket) throw std::invalid_argument("point outside every bucket");
  size_t i = *bucket;
  if (fill_[i] == capacities_[i]) throw std::length_error("bucket full");
  machine_.begin_operation();
  machine_.write(bases_[i] + fill_[i], x.packed());
  machine_.end_operation();
  ++fill_[i];
}

std::optional<Point> BucketedBaseline::query(const Point& q) {
  auto bucket = bucket_of(q);
  machine_.begin_operation();
  std::optional<Point> best;
  unsigned best_dist = 0;
  if (bucket) {
    size_t i = *bucket;
    for (uint64_t slot = 0; slot < fill_[i]; ++slot) {
      Point p = Point::unpack(machine_.read(bases_[i] + slot), d_);
      unsigned dist = hamming(p, q);
      if (!best || dist < best_dist || (dist == best_dist && p.lex_less(*best))) {
        best = p;
        best_dist = dist;
      }
    }
  }
  machine_.end_operation();
  if (best && best_dist <= params_.r) return best;
  return std::nullopt;
}

}  // namespace oblivsim
