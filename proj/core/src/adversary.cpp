#include "oblivsim/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace oblivsim {

std::optional<size_t> EpochTagger::epoch_of(uint64_t address) const {
  auto it = tags_.find(address);
  if (it == tags_.end()) return std::nullopt;
  return it->second;
}

std::vector<uint64_t> EpochTagger::cells_of(size_t epoch) const {
  std::vector<uint64_t> out;
  for (const auto& [address, tag] : tags_)
    if (tag == epoch) out.push_back(address);
  std::sort(out.begin(), out.end());
  return out;
}

EpochTagger tag_writes(const SessionTrace& update_trace,
                       const std::vector<uint64_t>& execution_sizes) {
  uint64_t expected = 0;
  for (uint64_t s : execution_sizes) expected += s;
  if (update_trace.operations.size() != expected)
    throw std::invalid_argument("update trace and epoch sizes record different op counts");
  EpochTagger tagger;
  tagger.k_ = execution_sizes.size();
  size_t block = 0;       // position in execution order, oldest first
  uint64_t remaining = execution_sizes.empty() ? 0 : execution_sizes[0];
  for (const auto& op : update_trace.operations) {
    while (remaining == 0) remaining = execution_sizes[++block];
    size_t epoch = execution_sizes.size() - 1 - block;  // oldest block = epoch k-1
    for (const auto& probe : op.probes)
      if (probe.kind == ProbeKind::write) tagger.tags_[probe.address] = epoch;
    --remaining;
  }
  return tagger;
}

EpochTagger tag_writes(const SessionTrace& update_trace, const EpochPlan& plan) {
  return tag_writes(update_trace, plan.execution_sizes());
}

uint64_t ProbeHistogram::total() const {
  uint64_t sum = untagged;
  for (uint64_t t : per_epoch) sum += t;
  return sum;
}

ProbeHistogram count_epoch_probes(const OperationTrace& query_trace, const EpochTagger& tagger) {
  ProbeHistogram histogram;
  histogram.per_epoch.assign(tagger.epoch_count(), 0);
  for (const auto& probe : query_trace.probes) {
    auto epoch = tagger.epoch_of(probe.address);
    if (epoch)
      ++histogram.per_epoch[*epoch];
    else
      ++histogram.untagged;
  }
  return histogram;
}

namespace {

double hit_rate(const std::vector<ProbeHistogram>& histograms, size_t epoch, uint64_t threshold) {
  uint64_t hits = 0;
  for (const auto& h : histograms) {
    uint64_t count = epoch < h.per_epoch.size() ? h.per_epoch[epoch] : 0;
    if (count >= threshold) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(histograms.size());
}

}  // namespace

double distinguish(const std::vector<ProbeHistogram>& in_histograms,
                   const std::vector<ProbeHistogram>& out_histograms, size_t epoch,
                   uint64_t threshold) {
  if (in_histograms.empty() || out_histograms.empty())
    throw std::invalid_argument("distinguisher needs samples on both sides");
  return hit_rate(in_histograms, epoch, threshold) - hit_rate(out_histograms, epoch, threshold);
}

uint64_t lower_median(std::vector<uint64_t> values) {
  if (values.empty()) throw std::invalid_argument("median of nothing");
  size_t target = (values.size() - 1) / 2;
  std::nth_element(values.begin(), values.begin() + target, values.end());
  return values[target];
}

namespace {

constexpr double kMassTolerance = 1e-9;

std::map<std::string, double> as_map(const std::vector<std::pair<std::string, double>>& dist) {
  std::map<std::string, double> table;
  double mass = 0.0;
  for (const auto& [key, probability] : dist) {
    if (probability < 0.0) throw std::invalid_argument("negative probability");
    table[key] += probability;
    mass += probability;
  }
  if (std::abs(mass - 1.0) > kMassTolerance)
    throw std::invalid_argument("distribution does not sum to 1");
  return table;
}

double half_l1(const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
  double sum = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      sum += ia->second;
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      sum += ib->second;
      ++ib;
    } else {
      sum += std::abs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return sum / 2.0;
}

}  // namespace

TvEstimate tv_exact(const std::vector<std::pair<std::string, double>>& dist_a,
                    const std::vector<std::pair<std::string, double>>& dist_b) {
  auto a = as_map(dist_a);
  auto b = as_map(dist_b);
  TvEstimate estimate;
  estimate.exact = true;
  estimate.value = half_l1(a, b);
  estimate.samples_a = a.size();
  estimate.samples_b = b.size();
  return estimate;
}

TvEstimate tv_empirical(const std::vector<std::string>& keys_a,
                        const std::vector<std::string>& keys_b) {
  if (keys_a.empty() || keys_b.empty())
    throw std::invalid_argument("empirical distance needs samples on both sides");
  std::map<uint64_t, double> a;
  std::map<uint64_t, double> b;
  for (const auto& key : keys_a) a[fnv1a64(key)] += 1.0 / static_cast<double>(keys_a.size());
  for (const auto& key : keys_b) b[fnv1a64(key)] += 1.0 / static_cast<double>(keys_b.size());
  double sum = 0.0;
  for (const auto& [key, mass] : a) {
    auto it = b.find(key);
    sum += std::abs(mass - (it == b.end() ? 0.0 : it->second));
  }
  for (const auto& [key, mass] : b)
    if (a.find(key) == a.end()) sum += mass;
  TvEstimate estimate;
  estimate.exact = false;
  estimate.value = sum / 2.0;
  estimate.samples_a = keys_a.size();
  estimate.samples_b = keys_b.size();
  return estimate;
}

std::string trace_key(const SessionTrace& trace) { return trace.dump(); }

TvEstimate tv_deterministic(const SessionTrace& view_a, const SessionTrace& view_b) {
  if (view_a.operations.size() != view_b.operations.size())
    throw std::invalid_argument("views record different operation counts");
  TvEstimate estimate;
  estimate.exact = true;
  estimate.value = view_a == view_b ? 0.0 : 1.0;
  estimate.samples_a = 1;
  estimate.samples_b = 1;
  return estimate;
}

TvEstimate tv_samples(const std::vector<SessionTrace>& views_a,
                      const std::vector<SessionTrace>& views_b) {
  if (views_a.empty() || views_b.empty())
    throw std::invalid_argument("need samples on both sides");
  size_t ops = views_a.front().operations.size();
  std::vector<std::string> keys_a;
  std::vector<std::string> keys_b;
  for (const auto& view : views_a) {
    if (view.operations.size() != ops)
      throw std::invalid_argument("operation counts differ across samples");
    keys_a.push_back(trace_key(view));
  }
  for (const auto& view : views_b) {
    if (view.operations.size() != ops)
      throw std::invalid_argument("operation counts differ across samples");
    keys_b.push_back(trace_key(view));
  }
  return tv_empirical(keys_a, keys_b);
}

}  // namespace oblivsim
