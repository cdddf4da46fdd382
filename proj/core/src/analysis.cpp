#include "oblivsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "oblivsim/rng.hpp"

namespace oblivsim {

void PinskerInstance::validate() const {
  if (rows == 0 || cols == 0) throw std::invalid_argument("empty grid");
  if (p.size() != rows * cols || q.size() != rows * cols)
    throw std::invalid_argument("mass table does not match the grid");
  double p_mass = 0.0, q_mass = 0.0;
  for (double v : p) {
    if (v < 0.0) throw std::invalid_argument("negative mass in p");
    p_mass += v;
  }
  for (double v : q) {
    if (v < 0.0) throw std::invalid_argument("negative mass in q");
    q_mass += v;
  }
  if (std::abs(p_mass - 1.0) > 1e-9 || std::abs(q_mass - 1.0) > 1e-9)
    throw std::invalid_argument("masses must sum to 1");
}

PinskerReport reverse_pinsker_check(const PinskerInstance& instance) {
  instance.validate();
  std::vector<double> p_col(instance.cols, 0.0);
  std::vector<double> q_col(instance.cols, 0.0);
  for (size_t a = 0; a < instance.rows; ++a)
    for (size_t b = 0; b < instance.cols; ++b) {
      p_col[b] += instance.p[a * instance.cols + b];
      q_col[b] += instance.q[a * instance.cols + b];
    }
  PinskerReport report;
  for (size_t a = 0; a < instance.rows; ++a)
    for (size_t b = 0; b < instance.cols; ++b) {
      double pj = instance.p[a * instance.cols + b];
      double qj = instance.q[a * instance.cols + b];
      report.l1 += std::abs(pj - qj);
      if (pj <= 0.0) continue;  // log ratio is -inf or undefined; never in S
      double p_cond = pj / p_col[b];
      bool in_s;
      if (qj <= 0.0 || q_col[b] <= 0.0) {
        in_s = true;  // q-conditional vanishes where p is positive
      } else {
        double q_cond = qj / q_col[b];
        in_s = p_cond > 2.0 * q_cond;  // log2 ratio > 1
      }
      if (in_s) {
        report.s_cells.emplace_back(a, b);
        report.p_mass += pj;
      }
    }
  report.holds = report.p_mass <= 2.0 * report.l1 + 1e-12;
  return report;
}

void SamplingParams::validate() const {
  if (population == 0) throw std::invalid_argument("empty population");
  if (2 * probes > sample_size) throw std::invalid_argument("probe cap exceeds the sample");
  if (sample_size > population) throw std::invalid_argument("sample exceeds the population");
}

namespace {

double log2_choose(uint64_t n, uint64_t k) {
  if (k > n) throw std::invalid_argument("choose out of range");
  return (std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
          std::lgamma(static_cast<double>(n - k) + 1.0)) /
         std::log(2.0);
}

}  // namespace

ResolutionProbability resolution_probability(const SamplingParams& params) {
  params.validate();
  uint64_t cap = 2 * params.probes;
  ResolutionProbability out;
  out.exact = std::exp2(log2_choose(params.population - cap, params.sample_size - cap) -
                        log2_choose(params.population, params.sample_size));
  out.power_bound = std::pow(static_cast<double>(params.sample_size - cap) /
                                 static_cast<double>(params.population),
                             static_cast<double>(cap));
  return out;
}

std::vector<uint64_t> sample_cells(const std::vector<uint64_t>& c_addresses, uint64_t s,
                                   uint64_t seed) {
  if (s > c_addresses.size()) throw std::invalid_argument("sample exceeds the population");
  std::vector<uint64_t> pool = c_addresses;
  Rng rng(seed);
  // Partial Fisher-Yates: the first s slots become a uniform subset.
  for (uint64_t i = 0; i < s; ++i) {
    uint64_t j = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(s);
  std::sort(pool.begin(), pool.end());
  return pool;
}

uint64_t ResolvedSet::count() const {
  uint64_t total = 0;
  for (bool m : member)
    if (m) ++total;
  return total;
}

std::string ResolvedSet::bitmap() const {
  std::string out(member.size(), '0');
  for (size_t i = 0; i < member.size(); ++i)
    if (member[i]) out[i] = '1';
  return out;
}

ResolvedSet resolved_queries(const QueryReplayer& replayer,
                             const std::vector<uint64_t>& t_addresses,
                             const std::vector<uint64_t>& c_i_addresses,
                             const SubcubeFamily& family, size_t epoch, uint64_t probe_cap) {
  if (family.d_prime > 16) throw std::invalid_argument("subcube too large to enumerate");
  if (epoch >= family.k()) throw std::out_of_range("epoch index out of range");
  std::unordered_set<uint64_t> kept(t_addresses.begin(), t_addresses.end());
  std::unordered_set<uint64_t> owned(c_i_addresses.begin(), c_i_addresses.end());
  ResolvedSet resolved;
  resolved.epoch = epoch;
  resolved.d_prime = family.d_prime;
  resolved.member.assign(uint64_t{1} << family.d_prime, false);
  for (uint64_t suffix = 0; suffix < resolved.member.size(); ++suffix) {
    auto probes = replayer(family.make_point(epoch, suffix));
    uint64_t into_owned = 0;
    bool ok = true;
    for (const auto& probe : probes) {
      if (!owned.count(probe.address)) continue;
      // The decode halts on a probe outside the kept sample or past the cap.
      if (!kept.count(probe.address) || ++into_owned > probe_cap) {
        ok = false;
        break;
      }
    }
    resolved.member[suffix] = ok;
  }
  return resolved;
}

void EncodingParams::validate() const {
  if (n_i == 0) throw std::invalid_argument("empty epoch");
  if (d_prime == 0 || d_prime > 62) throw std::invalid_argument("bad suffix width");
  if (f_count > n_i) throw std::invalid_argument("more covered points than the epoch holds");
  if (static_cast<double>(gamma_size) > std::exp2(static_cast<double>(d_prime)))
    throw std::invalid_argument("neighborhood larger than the subcube");
}

EncodingLengths encoding_lengths(const EncodingParams& params, EncodingBranch branch) {
  params.validate();
  double n = static_cast<double>(params.n_i);
  double dp = static_cast<double>(params.d_prime);
  double f = static_cast<double>(params.f_count);
  EncodingLengths out;
  out.case0_bits = 1.0 + n * dp;
  out.entropy_floor = n * dp;
  double common = 1.0 +
                  2.0 * static_cast<double>(params.w) *
                      static_cast<double>(params.sample_cells + params.newer_cells) +
                  static_cast<double>(params.m);
  if (branch == EncodingBranch::extract) {
    double outside = std::exp2(dp) - static_cast<double>(params.gamma_size);
    if (outside <= 0.0)
      throw std::invalid_argument("extract branch needs the neighborhood to miss something");
    out.case1_bits = common + std::log2(n) + log2_choose(params.n_i, params.f_count) + f * dp +
                     (n - f) * std::log2(outside);
  } else {
    out.case1_bits = common + n + (n - f) * dp + f * std::log2(n);
  }
  return out;
}

}  // namespace oblivsim
