#include "oblivsim/point.hpp"

#include <bit>
#include <stdexcept>

namespace oblivsim {

namespace {

void check_index(unsigned i, unsigned dim) {
  if (i >= dim) throw std::out_of_range("point coordinate out of range");
}

}  // namespace

Point Point::from_value(uint64_t value, unsigned dim) {
  if (dim == 0 || dim > 64) throw std::invalid_argument("from_value needs 1 <= dim <= 64");
  if (dim < 64 && (value >> dim) != 0) throw std::invalid_argument("value wider than dim");
  Point p(dim);
  for (unsigned j = 0; j < dim; ++j) p.set(j, (value >> (dim - 1 - j)) & 1u);
  return p;
}

Point Point::from_string(const std::string& bits) {
  if (bits.empty()) throw std::invalid_argument("empty point string");
  Point p(static_cast<unsigned>(bits.size()));
  for (unsigned j = 0; j < bits.size(); ++j) {
    if (bits[j] == '1')
      p.set(j, true);
    else if (bits[j] != '0')
      throw std::invalid_argument("point string must be over {0,1}");
  }
  return p;
}

Point Point::unpack(uint64_t word, unsigned dim) {
  if (dim == 0 || dim > 64) throw std::invalid_argument("unpack needs 1 <= dim <= 64");
  if (dim < 64 && (word >> dim) != 0) throw std::invalid_argument("word wider than dim");
  Point p(dim);
  p.words_[0] = word;
  return p;
}

Point Point::concat(const Point& head, const Point& tail) {
  Point p(head.dim_ + tail.dim_);
  for (unsigned j = 0; j < head.dim_; ++j) p.set(j, head.get(j));
  for (unsigned j = 0; j < tail.dim_; ++j) p.set(head.dim_ + j, tail.get(j));
  return p;
}

bool Point::get(unsigned i) const {
  check_index(i, dim_);
  return (words_[i / 64] >> (i % 64)) & 1u;
}

void Point::set(unsigned i, bool v) {
  check_index(i, dim_);
  uint64_t mask = uint64_t{1} << (i % 64);
  if (v)
    words_[i / 64] |= mask;
  else
    words_[i / 64] &= ~mask;
}

void Point::flip(unsigned i) {
  check_index(i, dim_);
  words_[i / 64] ^= uint64_t{1} << (i % 64);
}

uint64_t Point::packed() const {
  if (dim_ == 0 || dim_ > 64) throw std::logic_error("packed() needs 1 <= dim <= 64");
  return words_[0];
}

Point Point::slice(unsigned begin, unsigned length) const {
  if (begin + length > dim_ || length == 0) throw std::out_of_range("bad slice");
  Point p(length);
  for (unsigned j = 0; j < length; ++j) p.set(j, get(begin + j));
  return p;
}

std::string Point::to_string() const {
  std::string s(dim_, '0');
  for (unsigned j = 0; j < dim_; ++j)
    if (get(j)) s[j] = '1';
  return s;
}

bool Point::lex_less(const Point& other) const {
  if (dim_ != other.dim_) throw std::invalid_argument("lex_less dimension mismatch");
  for (size_t w = 0; w < words_.size(); ++w) {
    uint64_t diff = words_[w] ^ other.words_[w];
    if (diff == 0) continue;
    // Lowest differing bit is the earliest differing coordinate; 0 < 1 there.
    unsigned bit = static_cast<unsigned>(std::countr_zero(diff));
    return ((words_[w] >> bit) & 1u) == 0;
  }
  return false;
}

size_t Point::hash() const {
  // FNV-1a over the words plus the dimension.
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  mix(dim_);
  for (uint64_t w : words_) mix(w);
  return static_cast<size_t>(h);
}

unsigned hamming(const Point& a, const Point& b) {
  if (a.dim_ != b.dim_) throw std::invalid_argument("hamming dimension mismatch");
  unsigned total = 0;
  for (size_t w = 0; w < a.words_.size(); ++w)
    total += static_cast<unsigned>(std::popcount(a.words_[w] ^ b.words_[w]));
  return total;
}

}  // namespace oblivsim
