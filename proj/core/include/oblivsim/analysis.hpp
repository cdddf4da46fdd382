#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "oblivsim/hard_distribution.hpp"
#include "oblivsim/point.hpp"
#include "oblivsim/trace.hpp"

namespace oblivsim {

// Joint distributions p, q over a rows x cols grid, row-major; cell (a,b)
// at index a*cols + b. Masses are non-negative and sum to 1 within 1e-12.
struct PinskerInstance {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> p;
  std::vector<double> q;
  void validate() const;
};

struct PinskerReport {
  std::vector<std::pair<size_t, size_t>> s_cells;  // (a,b) with log2 ratio > 1
  double p_mass = 0.0;                             // p(S)
  double l1 = 0.0;                                 // sum |p - q|
  bool holds = false;                              // p(S) <= 2*l1
};

// S collects cells whose conditional log-likelihood ratio
// log2(p(a|b)/q(a|b)) exceeds 1, counting q(a|b) = 0 with p(a|b) > 0 as
// infinite. Checks p(S) <= 2 * sum|p-q| (non-strict so p = q passes).
PinskerReport reverse_pinsker_check(const PinskerInstance& instance);

struct SamplingParams {
  uint64_t population = 0;   // |C_i|
  uint64_t sample_size = 0;  // s, the cells kept
  uint64_t probes = 0;       // t, query probes into C_i; cap is 2t
  void validate() const;     // 0 <= 2t <= s <= population
};

struct ResolutionProbability {
  double exact = 0.0;        // C(population-2t, s-2t) / C(population, s)
  double power_bound = 0.0;  // ((s-2t)/population)^(2t), never above exact
};

ResolutionProbability resolution_probability(const SamplingParams& params);

// Uniform s-subset of the addresses, deterministic per seed, sorted.
std::vector<uint64_t> sample_cells(const std::vector<uint64_t>& c_addresses, uint64_t s,
                                   uint64_t seed);

// Re-executes one query against the frozen post-update memory image and
// returns its probe list. Must not mutate the image.
using QueryReplayer = std::function<std::vector<ProbeRecord>(const Point&)>;

// Queries of subcube P_epoch that replay without touching C_i outside the
// sampled set and without exceeding the probe cap within C_i.
struct ResolvedSet {
  size_t epoch = 0;
  unsigned d_prime = 0;
  std::vector<bool> member;  // indexed by suffix value

  uint64_t count() const;
  std::string bitmap() const;  // '0'/'1' per suffix value
};

// Enumerates all 2^d_prime queries of P_epoch (d_prime <= 16). A query
// resolves iff every probe into c_i_addresses lands inside t_addresses and
// the number of probes into c_i_addresses never exceeds probe_cap.
ResolvedSet resolved_queries(const QueryReplayer& replayer,
                             const std::vector<uint64_t>& t_addresses,
                             const std::vector<uint64_t>& c_i_addresses,
                             const SubcubeFamily& family, size_t epoch,
                             uint64_t probe_cap);

struct EncodingParams {
  uint64_t n_i = 0;          // epoch size
  unsigned d_prime = 0;      // suffix bits per point
  uint64_t w = 0;            // cell width
  uint64_t m = 0;            // client bits
  uint64_t sample_cells = 0; // |T_i|
  uint64_t newer_cells = 0;  // sum of |C_j| for j < i
  uint64_t f_count = 0;      // F, points landing in the neighborhood
  uint64_t gamma_size = 0;   // |Gamma_r(resolved set)|
  void validate() const;     // F <= n_i, gamma_size <= 2^d_prime
};

enum class EncodingBranch { extract, weak };

struct EncodingLengths {
  double case0_bits = 0.0;
  double case1_bits = 0.0;
  double entropy_floor = 0.0;  // n_i * d_prime
};

// Bit counts of the two message cases for either compression argument.
// Base-2 real logarithms throughout; no integer rounding.
EncodingLengths encoding_lengths(const EncodingParams& params, EncodingBranch branch);

}  // namespace oblivsim
