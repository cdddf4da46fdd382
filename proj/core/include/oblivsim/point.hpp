#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace oblivsim {

// A point of the d-dimensional Hamming cube. Coordinate 0 is the leading
// character of the string form, so string order equals lexicographic order.
class Point {
 public:
  Point() = default;
  explicit Point(unsigned dim) : dim_(dim), words_((dim + 63) / 64, 0) {}

  // Value notation: from_value(0b1010, 4).to_string() == "1010".
  static Point from_value(uint64_t value, unsigned dim);
  static Point from_string(const std::string& bits);
  // Coordinate i of the result is bit i of word; inverse of packed().
  static Point unpack(uint64_t word, unsigned dim);
  static Point concat(const Point& head, const Point& tail);

  unsigned dim() const { return dim_; }
  bool get(unsigned i) const;
  void set(unsigned i, bool v);
  void flip(unsigned i);

  // Coordinates packed low-to-high into one word; requires dim <= 64.
  uint64_t packed() const;
  Point slice(unsigned begin, unsigned length) const;
  std::string to_string() const;

  bool lex_less(const Point& other) const;
  size_t hash() const;

  friend bool operator==(const Point& a, const Point& b) {
    return a.dim_ == b.dim_ && a.words_ == b.words_;
  }
  friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }
  friend bool operator<(const Point& a, const Point& b) { return a.lex_less(b); }

 private:
  unsigned dim_ = 0;
  std::vector<uint64_t> words_;

  friend unsigned hamming(const Point& a, const Point& b);
};

struct PointHash {
  size_t operator()(const Point& p) const { return p.hash(); }
};

// Number of differing coordinates; throws on dimension mismatch.
unsigned hamming(const Point& a, const Point& b);

}  // namespace oblivsim
