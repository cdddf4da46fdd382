#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "oblivsim/trace.hpp"

namespace oblivsim {

// Pre-drawn random string, fixed before the first operation. Reads are free
// and leave no trace. Lazily expanded; the same seed yields the same stream.
class RandomTape {
 public:
  explicit RandomTape(uint64_t seed);

  bool bit(uint64_t position) const;
  uint64_t word(uint64_t index) const;
  uint64_t seed() const { return seed_; }

 private:
  void ensure(uint64_t words) const;

  uint64_t seed_;
  mutable std::mt19937_64 engine_;
  mutable std::vector<uint64_t> words_;
};

// Server memory of cell_count cells, word_bits wide, plus client_bits of
// free client memory and a free random tape. Every cell access must happen
// inside an open operation and is recorded; only addresses and kinds reach
// the recorded view.
class Machine {
 public:
  Machine(uint64_t cell_count, unsigned word_bits, unsigned client_bits, uint64_t seed);

  uint64_t cell_count() const { return cells_.size(); }
  unsigned word_bits() const { return word_bits_; }
  unsigned client_bits() const { return static_cast<unsigned>(client_.size()); }
  const RandomTape& tape() const { return tape_; }

  // Operation boundaries. Labels end up in the trace dump, so they must not
  // contain ',' or newline.
  void begin_operation(std::string label = "op");
  void end_operation();
  bool operation_open() const { return open_; }

  uint64_t read(uint64_t address);
  void write(uint64_t address, uint64_t word);

  bool client_bit(unsigned index) const;
  void set_client_bit(unsigned index, bool value);

  // Bump allocation of a fresh cell range; bookkeeping only, not a probe.
  uint64_t reserve_region(uint64_t cells);
  uint64_t reserved_cells() const { return next_free_; }

  // Completed-operation access without copying the whole session.
  size_t operations_recorded() const { return trace_.operations.size(); }
  const OperationTrace& operation(size_t index) const;
  uint64_t open_operation_probes() const;
  uint64_t total_probes() const;

  // The recorded session; requires no open operation.
  SessionTrace adversary_view() const;

 private:
  void require_open() const;
  void check_address(uint64_t address) const;

  unsigned word_bits_;
  std::vector<uint64_t> cells_;
  std::vector<uint8_t> client_;
  RandomTape tape_;
  SessionTrace trace_;
  OperationTrace current_;
  bool open_ = false;
  uint64_t next_free_ = 0;
};

}  // namespace oblivsim
