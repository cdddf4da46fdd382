#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oblivsim/point.hpp"

namespace oblivsim {

// k prefixes of length d - d_prime carving disjoint subcubes P_i: a point
// belongs to P_i iff its first d - d_prime coordinates equal prefix i.
// Pairwise prefix distance exceeds d_prime, verified at construction.
struct SubcubeFamily {
  unsigned d = 0;
  unsigned d_prime = 0;
  std::vector<Point> prefixes;

  size_t k() const { return prefixes.size(); }
  std::optional<size_t> member(const Point& x) const;
  Point make_point(size_t i, const Point& suffix) const;
  Point make_point(size_t i, uint64_t suffix_value) const;  // d_prime <= 64
  void validate() const;
};

// Rejection-samples k prefixes until every pair is further than d_prime
// apart, then re-verifies the winning family. Requires d >= 4*d_prime.
SubcubeFamily build_prefixes(unsigned d, unsigned d_prime, size_t k, uint64_t seed,
                             uint64_t max_attempts);

// Geometrically decaying epochs: sizes[i] = beta^i * floor_size, epoch 0
// most recent. Execution order is oldest epoch (k-1) first.
struct EpochPlan {
  uint64_t beta = 0;
  uint64_t floor_size = 0;
  size_t k = 0;
  std::vector<uint64_t> sizes;  // indexed by epoch

  uint64_t total() const;
  std::vector<uint64_t> execution_sizes() const;  // oldest first
};

// floor defaults to max(ceil(sqrt(n_total)), m^2); beta defaults to
// (w*t_u)^2. k is maximal with sum_{i<k} beta^i*floor <= n_total.
EpochPlan epoch_plan(uint64_t n_total, uint64_t m, uint64_t w, uint64_t t_u,
                     std::optional<uint64_t> floor_override = std::nullopt,
                     std::optional<uint64_t> beta_override = std::nullopt);

// Ordered inserts grouped by epoch; epoch i contributes exactly
// plan.sizes[i] points, all inside P_i.
struct UpdateScript {
  unsigned d = 0;
  unsigned d_prime = 0;
  std::vector<std::vector<Point>> epochs;  // epochs[i] = epoch i's points

  uint64_t total() const;
  // Insert order: epoch k-1 first, epoch 0 last.
  std::vector<std::pair<size_t, Point>> execution_order() const;
};

// n_i points of P_i: the epoch's prefix plus a uniform d_prime-bit suffix.
std::vector<Point> sample_epoch_updates(const SubcubeFamily& family, const EpochPlan& plan,
                                        size_t epoch, uint64_t seed);

UpdateScript build_update_script(const SubcubeFamily& family, const EpochPlan& plan,
                                 uint64_t seed);

// A point whose prefix differs from every family prefix.
Point outside_query(const SubcubeFamily& family, uint64_t seed);

// Minimum pairwise Hamming distance; needs at least two points.
unsigned min_pairwise_distance(const std::vector<Point>& points);

// JSON text form: {d, d_prime, prefixes, epochs:[{index, points}]}, points
// as fixed-width binary strings, most significant coordinate first.
std::string update_script_json(const SubcubeFamily& family, const UpdateScript& script);
std::pair<SubcubeFamily, UpdateScript> update_script_from_json(const std::string& text);

}  // namespace oblivsim
