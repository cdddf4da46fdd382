#include <doctest.h>

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "oblivsim/machine.hpp"
#include "oblivsim/rng.hpp"
#include "oblivsim/trace.hpp"

using namespace oblivsim;

namespace {

// Drives a fixed mixed read/write schedule so replays can be compared.
SessionTrace scripted_session(uint64_t seed) {
  Machine machine(32, 16, 8, seed);
  Rng rng(mix_seed(seed, 41));
  for (int op = 0; op < 6; ++op) {
    machine.begin_operation();
    for (int p = 0; p < 9; ++p) {
      uint64_t address = rng.below(machine.cell_count());
      if (rng.bit()) {
        machine.write(address, rng.bits(16));
      } else {
        machine.read(address);
      }
    }
    machine.end_operation();
  }
  return machine.adversary_view();
}

}  // namespace

TEST_SUITE("machine") {

TEST_CASE("construction validates geometry") {
  Machine machine(8, 3, 0, 1);
  CHECK(machine.cell_count() == 8);
  CHECK(machine.word_bits() == 3);
  CHECK(machine.client_bits() == 0);
  machine.begin_operation();
  for (uint64_t a = 0; a < 8; ++a) CHECK(machine.read(a) == 0);
  machine.end_operation();

  // 8 cells need 3 address bits, so 2-bit words cannot index the memory.
  CHECK_THROWS_AS(Machine(8, 2, 0, 1), std::invalid_argument);

  Machine tiny(1, 1, 4, 7);
  CHECK(tiny.cell_count() == 1);
  CHECK(tiny.client_bits() == 4);

  CHECK_THROWS_AS(Machine(0, 4, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(Machine(4, 0, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(Machine(4, 65, 0, 1), std::invalid_argument);
}

TEST_CASE("write then read returns the stored word") {
  Machine machine(8, 3, 0, 9);
  machine.begin_operation();
  machine.write(3, 0b101);
  CHECK(machine.read(3) == 0b101);
  machine.end_operation();
}

TEST_CASE("fresh cells read as zero") {
  Machine machine(8, 3, 0, 2);
  machine.begin_operation();
  CHECK(machine.read(5) == 0);
  machine.end_operation();
}

TEST_CASE("probe argument validation") {
  Machine machine(8, 3, 0, 3);
  machine.begin_operation();
  CHECK_THROWS_AS(machine.write(8, 0), std::out_of_range);
  CHECK_THROWS_AS(machine.read(8), std::out_of_range);
  // Words wider than word_bits are rejected rather than truncated.
  CHECK_THROWS_AS(machine.write(0, 0b1000), std::invalid_argument);
  machine.end_operation();
  // No open operation: probes are protocol errors.
  CHECK_THROWS_AS(machine.read(0), std::logic_error);
  CHECK_THROWS_AS(machine.write(0, 0), std::logic_error);
}

TEST_CASE("operation brackets") {
  Machine machine(8, 3, 0, 4);
  machine.begin_operation();
  machine.end_operation();
  CHECK(machine.operations_recorded() == 1);
  CHECK(machine.operation(0).probes.empty());

  machine.begin_operation();
  machine.read(1);
  machine.write(2, 1);
  machine.end_operation();
  CHECK(machine.operation(1).probes.size() == 2);

  CHECK_THROWS_AS(machine.end_operation(), std::logic_error);
  machine.begin_operation();
  CHECK_THROWS_AS(machine.begin_operation(), std::logic_error);
  machine.end_operation();

  CHECK_THROWS_AS(machine.begin_operation("a,b"), std::invalid_argument);
  CHECK_THROWS_AS(machine.begin_operation("a\nb"), std::invalid_argument);
}

TEST_CASE("adversary view records addresses and kinds verbatim") {
  Machine machine(8, 3, 0, 5);
  CHECK(machine.adversary_view().operations.empty());

  machine.begin_operation();
  machine.write(2, 1);
  machine.read(2);
  machine.read(5);
  machine.end_operation();
  SessionTrace view = machine.adversary_view();
  REQUIRE(view.operations.size() == 1);
  const auto& probes = view.operations[0].probes;
  REQUIRE(probes.size() == 3);
  CHECK(probes[0] == ProbeRecord{2, ProbeKind::write});
  CHECK(probes[1] == ProbeRecord{2, ProbeKind::read});
  CHECK(probes[2] == ProbeRecord{5, ProbeKind::read});

  machine.begin_operation();
  CHECK_THROWS_AS(machine.adversary_view(), std::logic_error);
  machine.end_operation();
}

TEST_CASE("replays with one seed are byte-identical") {
  SessionTrace a = scripted_session(77);
  SessionTrace b = scripted_session(77);
  CHECK(a == b);
  CHECK(a.dump() == b.dump());
  SessionTrace c = scripted_session(78);
  CHECK(a.dump() != c.dump());
}

TEST_CASE("probe accounting sums per operation") {
  Machine machine(16, 8, 0, 6);
  std::vector<uint64_t> expected;
  Rng rng(mix_seed(6, 1));
  for (int op = 0; op < 5; ++op) {
    machine.begin_operation();
    uint64_t count = rng.below(7);
    for (uint64_t p = 0; p < count; ++p) machine.read(rng.below(16));
    CHECK(machine.open_operation_probes() == count);
    machine.end_operation();
    expected.push_back(count);
  }
  uint64_t total = 0;
  for (size_t i = 0; i < expected.size(); ++i) {
    CHECK(machine.operation(i).probes.size() == expected[i]);
    total += expected[i];
  }
  CHECK(machine.total_probes() == total);
  CHECK(machine.adversary_view().total_probes() == total);
}

TEST_CASE("view carries no cell contents") {
  // Two sessions probing the same addresses with different payloads must
  // produce identical views, and the dump must not leak the written word.
  uint64_t payloads[2] = {48879, 4919};
  std::string dumps[2];
  for (int side = 0; side < 2; ++side) {
    Machine machine(64, 32, 0, 11);
    machine.begin_operation();
    machine.write(7, payloads[side]);
    machine.read(7);
    machine.end_operation();
    dumps[side] = machine.adversary_view().dump();
  }
  CHECK(dumps[0] == dumps[1]);
  CHECK(dumps[0].find("48879") == std::string::npos);
}

TEST_CASE("dump format") {
  Machine machine(8, 3, 0, 12);
  CHECK(machine.adversary_view().dump() == "op_index,op_label,address,kind\n");

  machine.begin_operation("load");
  machine.write(1, 1);
  machine.end_operation();
  machine.begin_operation();
  machine.end_operation();
  machine.begin_operation("probe");
  machine.read(1);
  machine.read(4);
  machine.end_operation();

  std::string dump = machine.adversary_view().dump();
  std::istringstream lines(dump);
  std::string line;
  std::vector<std::string> seen;
  while (std::getline(lines, line)) seen.push_back(line);
  REQUIRE(seen.size() == 6);
  CHECK(seen[0] == "op_index,op_label,address,kind");
  CHECK(seen[1] == "0,load,1,W");
  CHECK(seen[2] == "");  // blank separator between operations
  CHECK(seen[3] == "");  // op 1 recorded no probes
  CHECK(seen[4] == "2,probe,1,R");
  CHECK(seen[5] == "2,probe,4,R");
}

TEST_CASE("client memory is free and unrecorded") {
  Machine machine(8, 3, 6, 13);
  machine.set_client_bit(2, true);
  CHECK(machine.client_bit(2));
  machine.set_client_bit(2, false);
  CHECK_FALSE(machine.client_bit(2));
  CHECK_THROWS_AS(machine.client_bit(6), std::out_of_range);
  CHECK_THROWS_AS(machine.set_client_bit(6, true), std::out_of_range);
  CHECK(machine.total_probes() == 0);
  CHECK(machine.adversary_view().operations.empty());
}

TEST_CASE("random tape is free, reproducible, and unrecorded") {
  RandomTape tape(21);
  RandomTape again(21);
  for (uint64_t i = 0; i < 200; ++i) {
    CHECK(tape.bit(i) == again.bit(i));
    CHECK(tape.word(i) == again.word(i));
  }
  // Out-of-order access sees the same fixed string.
  RandomTape reversed(21);
  CHECK(reversed.word(150) == tape.word(150));
  CHECK(reversed.word(3) == tape.word(3));

  Machine machine(8, 3, 0, 21);
  machine.begin_operation();
  machine.read(0);
  (void)machine.tape().bit(17);
  (void)machine.tape().word(5);
  machine.read(1);
  machine.end_operation();
  CHECK(machine.total_probes() == 2);
}

TEST_CASE("region reservation is bookkeeping only") {
  Machine machine(10, 4, 0, 14);
  CHECK(machine.reserved_cells() == 0);
  CHECK(machine.reserve_region(4) == 0);
  CHECK(machine.reserve_region(3) == 4);
  CHECK(machine.reserved_cells() == 7);
  CHECK(machine.total_probes() == 0);
  CHECK(machine.reserve_region(3) == 7);
  CHECK_THROWS_AS(machine.reserve_region(1), std::length_error);
}

TEST_CASE("trace hashing separates distinct dumps") {
  CHECK(fnv1a64("") == fnv1a64(""));
  CHECK(fnv1a64("a") != fnv1a64("b"));
  CHECK(fnv1a64("0,op,1,R") != fnv1a64("0,op,1,W"));
}

}  // TEST_SUITE
