#include "oblivsim/machine.hpp"

#include <sstream>
#include <stdexcept>

namespace oblivsim {

uint64_t SessionTrace::total_probes() const {
  uint64_t total = 0;
  for (const auto& op : operations) total += op.probes.size();
  return total;
}

std::string SessionTrace::dump() const {
  std::ostringstream out;
  out << "op_index,op_label,address,kind\n";
  for (size_t i = 0; i < operations.size(); ++i) {
    if (i != 0) out << '\n';
    for (const auto& probe : operations[i].probes) {
      out << i << ',' << operations[i].label << ',' << probe.address << ','
          << (probe.kind == ProbeKind::read ? 'R' : 'W') << '\n';
    }
  }
  return out.str();
}

uint64_t fnv1a64(const std::string& text) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

RandomTape::RandomTape(uint64_t seed) : seed_(seed), engine_(seed) {}

void RandomTape::ensure(uint64_t words) const {
  while (words_.size() < words) words_.push_back(engine_());
}

bool RandomTape::bit(uint64_t position) const {
  uint64_t index = position / 64;
  ensure(index + 1);
  return (words_[index] >> (position % 64)) & 1u;
}

uint64_t RandomTape::word(uint64_t index) const {
  ensure(index + 1);
  return words_[index];
}

Machine::Machine(uint64_t cell_count, unsigned word_bits, unsigned client_bits, uint64_t seed)
    : word_bits_(word_bits), cells_(cell_count, 0), client_(client_bits, 0), tape_(seed) {
  if (cell_count == 0) throw std::invalid_argument("machine needs at least one cell");
  if (word_bits_ == 0 || word_bits_ > 64)
    throw std::invalid_argument("word size must be in [1,64]");
  // Cell words must be able to address the memory.
  unsigned needed = 0;
  while ((uint64_t{1} << needed) < cell_count) ++needed;
  if (word_bits_ < needed) throw std::invalid_argument("word size below address width");
}

void Machine::begin_operation(std::string label) {
  if (open_) throw std::logic_error("operation already open");
  if (label.find(',') != std::string::npos || label.find('\n') != std::string::npos)
    throw std::invalid_argument("operation label must not contain ',' or newline");
  current_ = OperationTrace{std::move(label), {}};
  open_ = true;
}

void Machine::end_operation() {
  require_open();
  trace_.operations.push_back(std::move(current_));
  current_ = OperationTrace{};
  open_ = false;
}

uint64_t Machine::read(uint64_t address) {
  require_open();
  check_address(address);
  current_.probes.push_back({address, ProbeKind::read});
  return cells_[address];
}

void Machine::write(uint64_t address, uint64_t word) {
  require_open();
  check_address(address);
  if (word_bits_ < 64 && (word >> word_bits_) != 0)
    throw std::invalid_argument("word wider than the cell");
  current_.probes.push_back({address, ProbeKind::write});
  cells_[address] = word;
}

bool Machine::client_bit(unsigned index) const {
  if (index >= client_.size()) throw std::out_of_range("client bit out of range");
  return client_[index] != 0;
}

void Machine::set_client_bit(unsigned index, bool value) {
  if (index >= client_.size()) throw std::out_of_range("client bit out of range");
  client_[index] = value ? 1 : 0;
}

uint64_t Machine::reserve_region(uint64_t cells) {
  if (cells == 0) throw std::invalid_argument("empty reservation");
  if (next_free_ + cells > cells_.size()) throw std::length_error("machine memory exhausted");
  uint64_t base = next_free_;
  next_free_ += cells;
  return base;
}

const OperationTrace& Machine::operation(size_t index) const {
  if (index >= trace_.operations.size()) throw std::out_of_range("operation index out of range");
  return trace_.operations[index];
}

uint64_t Machine::open_operation_probes() const {
  require_open();
  return current_.probes.size();
}

uint64_t Machine::total_probes() const {
  return trace_.total_probes() + (open_ ? current_.probes.size() : 0);
}

SessionTrace Machine::adversary_view() const {
  if (open_) throw std::logic_error("operation still open");
  return trace_;
}

void Machine::require_open() const {
  if (!open_) throw std::logic_error("probe outside an operation");
}

void Machine::check_address(uint64_t address) const {
  if (address >= cells_.size()) throw std::out_of_range("cell address out of range");
}

}  // namespace oblivsim
