#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "oblivsim/hard_distribution.hpp"
#include "oblivsim/trace.hpp"

namespace oblivsim {

// Maps each address to the epoch that last wrote it during the update
// phase. Tags partition the written addresses into disjoint groups C_i.
class EpochTagger {
 public:
  std::optional<size_t> epoch_of(uint64_t address) const;
  size_t epoch_count() const { return k_; }
  uint64_t tagged_count() const { return tags_.size(); }
  std::vector<uint64_t> cells_of(size_t epoch) const;  // sorted addresses

 private:
  friend EpochTagger tag_writes(const SessionTrace&, const std::vector<uint64_t>&);
  std::unordered_map<uint64_t, size_t> tags_;
  size_t k_ = 0;
};

// Replays the update trace, oldest epoch first; later writes win. The trace
// must contain exactly sum(execution_sizes) operations.
// execution_sizes[0] is the oldest epoch's size, i.e. epoch k-1.
EpochTagger tag_writes(const SessionTrace& update_trace,
                       const std::vector<uint64_t>& execution_sizes);
EpochTagger tag_writes(const SessionTrace& update_trace, const EpochPlan& plan);

// Per-epoch probe counts of a single query operation.
struct ProbeHistogram {
  std::vector<uint64_t> per_epoch;
  uint64_t untagged = 0;
  uint64_t total() const;
};

ProbeHistogram count_epoch_probes(const OperationTrace& query_trace,
                                  const EpochTagger& tagger);

// Threshold classifier "output 1 iff t_epoch >= threshold"; returns
// P[1 | in-subcube samples] - P[1 | outside samples], in [-1, 1].
double distinguish(const std::vector<ProbeHistogram>& in_histograms,
                   const std::vector<ProbeHistogram>& out_histograms, size_t epoch,
                   uint64_t threshold);

// Lower median; the default distinguisher threshold is the median of the
// in-subcube calibration counts.
uint64_t lower_median(std::vector<uint64_t> values);

struct TvEstimate {
  double value = 0.0;
  bool exact = false;
  uint64_t samples_a = 0;  // support size in exact mode, sample count otherwise
  uint64_t samples_b = 0;
};

// Half-L1 between fully enumerated keyed distributions; each side must sum
// to 1. Exact mode.
TvEstimate tv_exact(const std::vector<std::pair<std::string, double>>& dist_a,
                    const std::vector<std::pair<std::string, double>>& dist_b);

// Plug-in half-L1 between frequency tables of hashed keys.
TvEstimate tv_empirical(const std::vector<std::string>& keys_a,
                        const std::vector<std::string>& keys_b);

// Canonical key of a session view.
std::string trace_key(const SessionTrace& trace);

// Distance between the views of two deterministic runs (two point masses);
// operation counts must agree.
TvEstimate tv_deterministic(const SessionTrace& view_a, const SessionTrace& view_b);

// Plug-in distance between sampled views; every sample on both sides must
// share one operation count.
TvEstimate tv_samples(const std::vector<SessionTrace>& views_a,
                      const std::vector<SessionTrace>& views_b);

}  // namespace oblivsim
