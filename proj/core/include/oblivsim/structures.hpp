#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "oblivsim/ann.hpp"
#include "oblivsim/machine.hpp"
#include "oblivsim/point.hpp"

namespace oblivsim {

// Stored item: a live point, or the reserved null filler written by fake
// and duplicate inserts. Fillers never appear in answers.
using Item = std::optional<Point>;

// Key material of the abstract interface. Identity encoding, no
// cryptography: traces are the only channel under study.
struct EncryptionKey {
  uint64_t token = 0;
};
struct QueryKey {
  uint64_t token = 0;
};

struct StaticHandle {
  uint64_t base = 0;
  uint64_t item_count = 0;
  std::vector<bool> real_slot;  // which cells decode to live points
  QueryKey key;
};

// Static structure contract the dynamization composes over levels. Both the
// preprocess and query traces must depend only on the item count.
class StaticStructure {
 public:
  virtual ~StaticStructure() = default;

  virtual StaticHandle preprocess(Machine& machine, const std::vector<Item>& items,
                                  const EncryptionKey& key) = 0;
  virtual std::optional<Point> query(Machine& machine, const StaticHandle& handle,
                                     const Point& q) const = 0;

  // Cost predictors for n items: cells occupied, probes to build, probes
  // per query.
  virtual uint64_t storage_cells(uint64_t n) const = 0;
  virtual uint64_t preprocess_probes(uint64_t n) const = 0;
  virtual uint64_t query_probes(uint64_t n) const = 0;
};

// One point per cell in a fresh consecutive region; every query scans the
// whole region in ascending order. Trace shape = item count, nothing else.
class LinearScanStatic final : public StaticStructure {
 public:
  explicit LinearScanStatic(AnnParams params);

  StaticHandle preprocess(Machine& machine, const std::vector<Item>& items,
                          const EncryptionKey& key) override;
  std::optional<Point> query(Machine& machine, const StaticHandle& handle,
                             const Point& q) const override;

  uint64_t storage_cells(uint64_t n) const override { return n; }
  uint64_t preprocess_probes(uint64_t n) const override { return n; }
  uint64_t query_probes(uint64_t n) const override { return n; }

  const AnnParams& params() const { return params_; }

 private:
  AnnParams params_;
};

// Fold for per-level answers. Must cost zero machine probes.
using Combiner = std::function<std::optional<Point>(
    const Point& q, const std::optional<Point>&, const std::optional<Point>&)>;

// Keeps the answer closer to q; ties go to the lexicographically smaller
// point; an empty answer is the identity.
Combiner ann_combiner();

struct Level {
  bool occupied = false;
  StaticHandle handle;
  EncryptionKey key;
  std::vector<Item> snapshot;  // exactly 2^(k-1) items while occupied
};

struct OpCost {
  uint64_t query_probes = 0;
  uint64_t insert_probes = 0;
};

// Binary-counter dynamization over any static base. Level k holds 2^(k-1)
// items; an insert rebuilds the lowest empty level from the new item plus
// everything below, then clears below. operate_* runs a query phase then an
// insert phase for every operation, so the probe schedule is a function of
// the operation count alone.
class ObliviousDynamic {
 public:
  ObliviousDynamic(Machine& machine, StaticStructure& base, unsigned dim,
                   uint64_t n_max, Combiner combiner = ann_combiner());

  // Full operations (query phase + insert phase), one trace operation each.
  std::optional<Point> operate_query(const Point& q);
  void operate_insert(const Point& x);

  // Bare operations, still one trace operation each. query is read-only.
  void insert(const Point& x);
  std::optional<Point> query(const Point& q);

  uint64_t items_inserted() const { return items_inserted_; }
  uint64_t n_max() const { return n_max_; }
  unsigned dim() const { return dim_; }
  unsigned level_count() const { return static_cast<unsigned>(levels_.size()); }
  const std::vector<Level>& levels() const { return levels_; }
  std::vector<unsigned> occupied_levels() const;  // 1-based
  std::vector<Point> live_points() const;
  const std::vector<OpCost>& op_costs() const { return op_costs_; }
  const StaticStructure& base() const { return base_; }

  static unsigned levels_for(uint64_t n_max);
  // How often level k (1-based) is rebuilt within the first n_ops
  // operations of the fixed schedule.
  static uint64_t level_rebuilds(uint64_t n_ops, unsigned level);
  // Fresh cells consumed by all rebuilds across the first n_ops operations.
  static uint64_t cells_required(uint64_t n_ops, uint64_t n_max, const StaticStructure& base);

 private:
  std::optional<Point> query_phase(const Point& q);
  void insert_phase(Item item);
  bool point_live(const Point& x) const;

  Machine& machine_;
  StaticStructure& base_;
  unsigned dim_;
  uint64_t n_max_;
  Combiner combiner_;
  std::vector<Level> levels_;
  std::vector<OpCost> op_costs_;
  Point dummy_query_;  // fixed payload for fake query phases
  uint64_t items_inserted_ = 0;
  uint64_t key_counter_ = 0;
};

struct CostReport {
  uint64_t operations = 0;
  std::vector<uint64_t> per_op_probes;
  uint64_t total_probes = 0;

  uint64_t measured_query_total = 0;
  uint64_t measured_rebuild_total = 0;
  double amortized_per_op = 0.0;
  double amortized_query = 0.0;   // expected query probes t_q
  double amortized_insert = 0.0;
  uint64_t worst_update_probes = 0;  // worst-case update probes t_u

  // Exact closed forms for the fixed schedule (one item per operation).
  uint64_t predicted_rebuild_total = 0;
  uint64_t predicted_query_total = 0;

  // The two headline amortized predictions, reported side by side.
  double predicted_sum_form = 0.0;       // sum_i Q(2^i) + sum_i P(2^i)/2^i
  double predicted_informal_form = 0.0;  // log2(n)*Q(n) + log2(n)*P(n)/n
};

// Accounts a completed session driven through the structure. The session's
// operation count must match the structure's per-op records.
CostReport cost_account(const SessionTrace& session, const ObliviousDynamic& structure);

// Deliberately leaky baseline: one disjoint cell region per prefix bucket.
// Inserts append to the owning bucket; queries scan only their own bucket,
// and points outside every bucket probe nothing.
class BucketedBaseline {
 public:
  BucketedBaseline(Machine& machine, unsigned d, unsigned d_prime,
                   std::vector<Point> prefixes, std::vector<uint64_t> capacities,
                   AnnParams params);

  void insert(const Point& x);                 // x must land in some bucket
  std::optional<Point> query(const Point& q);  // one trace operation either way

  std::optional<size_t> bucket_of(const Point& x) const;
  size_t bucket_count() const { return prefixes_.size(); }
  uint64_t bucket_base(size_t i) const { return bases_.at(i); }
  uint64_t bucket_fill(size_t i) const { return fill_.at(i); }

 private:
  Machine& machine_;
  unsigned d_;
  unsigned d_prime_;
  std::vector<Point> prefixes_;
  std::vector<uint64_t> capacities_;
  std::vector<uint64_t> bases_;
  std::vector<uint64_t> fill_;
  AnnParams params_;
};

}  // namespace oblivsim
