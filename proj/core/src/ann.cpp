#include "oblivsim/ann.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace oblivsim {

bool DataSet::insert(const Point& p) {
  if (empty() && dim_ == 0) dim_ = p.dim();
  if (p.dim() != dim_) throw std::invalid_argument("dataset dimension mismatch");
  auto it = std::lower_bound(points_.begin(), points_.end(), p);
  if (it != points_.end() && *it == p) return false;
  points_.insert(it, p);
  return true;
}

bool DataSet::contains(const Point& p) const {
  if (p.dim() != dim_) return false;
  return std::binary_search(points_.begin(), points_.end(), p);
}

void AnnParams::validate() const {
  if (d == 0) throw std::invalid_argument("zero dimension");
  if (c < 1.0) throw std::invalid_argument("approximation factor below 1");
  if (c * r > static_cast<double>(d)) throw std::invalid_argument("c*r exceeds the dimension");
}

AnnParams subcube_ann_params(unsigned d, unsigned d_prime) {
  if (d_prime == 0 || d_prime > d) throw std::invalid_argument("bad subcube width");
  AnnParams params;
  params.d = d;
  params.r = static_cast<unsigned>(std::llround(0.01 * d_prime));
  params.c = params.r == 0 ? 24.0 : std::min(24.0, 0.24 * d_prime / params.r);
  params.validate();
  return params;
}

std::optional<Point> ann_oracle(const DataSet& s, const Point& q, const AnnParams& params) {
  params.validate();
  std::optional<Point> best;
  unsigned best_dist = 0;
  for (const Point& p : s.points()) {
    unsigned dist = hamming(p, q);
    // points() is sorted, so the first minimizer is the lex-smallest one.
    if (!best || dist < best_dist) {
      best = p;
      best_dist = dist;
    }
  }
  if (best && best_dist <= params.r) return best;
  return std::nullopt;
}

bool answer_valid(const DataSet& s, const Point& q, const AnnParams& params,
                  const std::optional<Point>& answer) {
  params.validate();
  unsigned within_r = 0;
  for (const Point& p : s.points()) {
    if (hamming(p, q) <= params.r && ++within_r == 2) break;
  }
  bool good_point = answer && s.contains(*answer) &&
                    static_cast<double>(hamming(*answer, q)) <= params.c * params.r;
  if (within_r == 0) return !answer.has_value();
  if (within_r == 1) return good_point;
  return !answer.has_value() || good_point;
}

std::vector<Point> neighborhood(const std::vector<Point>& v, unsigned r, unsigned d) {
  if (d == 0 || d > 24) throw std::invalid_argument("neighborhood needs 1 <= d <= 24");
  const uint64_t n = uint64_t{1} << d;
  std::vector<uint8_t> seen(n, 0);
  std::queue<uint64_t> frontier;
  for (const Point& p : v) {
    if (p.dim() != d) throw std::invalid_argument("neighborhood dimension mismatch");
    uint64_t mask = p.packed();
    if (!seen[mask]) {
      seen[mask] = 1;
      frontier.push(mask);
    }
  }
  // Multi-source BFS, r layers of single-coordinate flips.
  for (unsigned layer = 0; layer < r && !frontier.empty(); ++layer) {
    std::queue<uint64_t> next;
    while (!frontier.empty()) {
      uint64_t mask = frontier.front();
      frontier.pop();
      for (unsigned bit = 0; bit < d; ++bit) {
        uint64_t flipped = mask ^ (uint64_t{1} << bit);
        if (!seen[flipped]) {
          seen[flipped] = 1;
          next.push(flipped);
        }
      }
    }
    frontier = std::move(next);
  }
  std::vector<Point> out;
  for (uint64_t mask = 0; mask < n; ++mask)
    if (seen[mask]) out.push_back(Point::unpack(mask, d));
  std::sort(out.begin(), out.end());
  return out;
}

uint64_t exhaustive_min_expansion(unsigned d, unsigned set_size, unsigned r) {
  if (d == 0 || d > 4) throw std::invalid_argument("exhaustive minimizer needs 1 <= d <= 4");
  const unsigned n = 1u << d;
  if (set_size == 0 || set_size > n) throw std::invalid_argument("bad set size");
  // ball[p] marks the cube points within distance r of p, one bit each.
  std::vector<uint32_t> ball(n, 0);
  for (unsigned p = 0; p < n; ++p)
    for (unsigned x = 0; x < n; ++x)
      if (static_cast<unsigned>(std::popcount(p ^ x)) <= r) ball[p] |= uint32_t{1} << x;
  uint64_t best = n;
  for (uint32_t subset = 0; subset < (uint32_t{1} << n); ++subset) {
    if (static_cast<unsigned>(std::popcount(subset)) != set_size) continue;
    uint32_t covered = 0;
    for (unsigned p = 0; p < n; ++p)
      if ((subset >> p) & 1u) covered |= ball[p];
    best = std::min<uint64_t>(best, std::popcount(covered));
  }
  return best;
}

}  // namespace oblivsim
