#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace oblivsim {

enum class ProbeKind : uint8_t { read, write };

struct ProbeRecord {
  uint64_t address = 0;
  ProbeKind kind = ProbeKind::read;
  friend bool operator==(const ProbeRecord&, const ProbeRecord&) = default;
};

struct OperationTrace {
  std::string label;
  std::vector<ProbeRecord> probes;
  friend bool operator==(const OperationTrace&, const OperationTrace&) = default;
};

// The observer's view of a session: per-operation probe addresses and kinds.
// Cell contents never enter this structure.
struct SessionTrace {
  std::vector<OperationTrace> operations;

  uint64_t total_probes() const;

  // Diffable text form: a header line, then one
  // "op_index,op_label,address,R|W" line per probe, with a blank line
  // between operations.
  std::string dump() const;

  friend bool operator==(const SessionTrace&, const SessionTrace&) = default;
};

// FNV-1a over a string; used to bucket traces in frequency tables.
uint64_t fnv1a64(const std::string& text);

}  // namespace oblivsim
