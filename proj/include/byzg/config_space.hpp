#pragma once

// Labeled initial configurations and the two agreed enumerations: Θ (graphs
// of one known size, >= f+1 labels) and Ω (any size, >= f+2 labels).

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "byzg/exploration.hpp"
#include "byzg/graph.hpp"

namespace byzg {

using Label = int;

struct Configuration {
  PortGraph graph;
  std::map<Label, NodeId> placements;  // label -> 0-based node

  int size() const { return graph.size(); }
  friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// GraphCode, then the placement count, then per placement (ascending label)
/// the label in unary (l-1 ones and a zero) and the 1-based node. Unary
/// labels keep every length bucket finite.
std::vector<std::uint8_t> config_code(const Configuration& c);

struct EnumMode {
  bool known = true;
  int n = 0;  // known mode only
  int f = 0;

  static EnumMode Known(int n, int f) { return {true, n, f}; }
  static EnumMode Unknown(int f) { return {false, 0, f}; }
  int min_labels() const { return known ? f + 1 : f + 2; }
  friend bool operator<(const EnumMode& a, const EnumMode& b) {
    return std::tie(a.known, a.n, a.f) < std::tie(b.known, b.n, b.f);
  }
};

/// Thrown when an index or code lies beyond what the enumerator can reach.
struct EnumerationLimit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shortlex enumeration of configurations for one mode. Thread-safe; buckets
/// are materialized on demand and memoized append-only.
class ConfigEnumerator {
 public:
  explicit ConfigEnumerator(EnumMode mode);
  ~ConfigEnumerator();

  const EnumMode& mode() const { return mode_; }

  /// 1-based. Throws EnumerationLimit when i would need graphs beyond the
  /// enumerator's reach (more than kMaxNodes nodes).
  const Configuration& at(std::uint64_t i) const;

  /// Position of c; throws std::invalid_argument when c fails the mode filter.
  std::uint64_t index_of(const Configuration& c) const;

  /// Smallest index over all node relabelings of c.
  std::uint64_t min_index_of(const Configuration& c) const;

  static constexpr int kMaxNodes = 6;

 private:
  struct Impl;
  EnumMode mode_;
  std::unique_ptr<Impl> impl_;
};

/// Shared enumerator per mode.
const ConfigEnumerator& enumerator(EnumMode mode);

inline const Configuration& enumerate_known(int n, int f, std::uint64_t i) { return enumerator(EnumMode::Known(n, f)).at(i); }
inline const Configuration& enumerate_unknown(int f, std::uint64_t i) { return enumerator(EnumMode::Unknown(f)).at(i); }
inline std::uint64_t index_of(const Configuration& c, EnumMode mode) { return enumerator(mode).index_of(c); }

/// Throws std::invalid_argument if c is not a well-formed configuration.
void check_configuration(const Configuration& c);
bool passes_filter(const Configuration& c, EnumMode mode);

NodeId target_node(const Configuration& c);

/// Lexicographically smallest shortest path from l's node to the target,
/// with the entry port expected after each move. Empty optional if l is not
/// placed in c.
std::optional<MoveLog> setup_path(const Configuration& c, Label l);

/// Number of port-numbered connected graphs on n labeled nodes with m edges.
std::uint64_t count_port_graphs(int n, int m);

}  // namespace byzg
