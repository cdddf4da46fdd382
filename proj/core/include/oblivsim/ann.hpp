#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "oblivsim/point.hpp"

namespace oblivsim {

// Duplicate-free set of equal-dimension points, kept in lexicographic order.
class DataSet {
 public:
  DataSet() = default;
  explicit DataSet(unsigned dim) : dim_(dim) {}

  // False if the point was already present (repeat inserts are ignored).
  bool insert(const Point& p);
  bool contains(const Point& p) const;
  size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  unsigned dim() const { return dim_; }
  const std::vector<Point>& points() const { return points_; }

 private:
  unsigned dim_ = 0;
  std::vector<Point> points_;
};

struct AnnParams {
  unsigned d = 0;   // cube dimension
  unsigned r = 0;   // near radius
  double c = 1.0;   // approximation factor
  void validate() const;  // c >= 1, c*r <= d
};

// Default parameters for a query point attacking a d_prime-dimensional
// suffix subcube: r = round(0.01*d_prime), largest c <= 24 with
// c*r <= 0.24*d_prime.
AnnParams subcube_ann_params(unsigned d, unsigned d_prime);

// Brute-force reference answer: if some point of s lies within r of q,
// the lexicographically smallest nearest point; otherwise nothing.
std::optional<Point> ann_oracle(const DataSet& s, const Point& q, const AnnParams& params);

// Checks an answer against the (c,r) semantics: a unique point within r
// demands a member of s within c*r; no point within r demands an empty
// answer; with several points within r either is accepted.
bool answer_valid(const DataSet& s, const Point& q, const AnnParams& params,
                  const std::optional<Point>& answer);

// All cube points within distance r of some point of v, sorted
// lexicographically. Enumerates the cube, so d <= 24.
std::vector<Point> neighborhood(const std::vector<Point>& v, unsigned r, unsigned d);

// Minimum neighborhood size over every subset of {0,1}^d of the given size.
// Exhaustive, so d <= 4.
uint64_t exhaustive_min_expansion(unsigned d, unsigned set_size, unsigned r);

struct ExpansionParams {
  unsigned d = 0;
  double epsilon = 0.0;       // radius fraction, r = epsilon*d
  double phi_estimate = 1.0;  // measured min |neighborhood(V)| / |V|
};

}  // namespace oblivsim
