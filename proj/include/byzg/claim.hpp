#pragma once

// What agents shout each round, what they observe, and what they do.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "byzg/config_space.hpp"
#include "byzg/graph.hpp"

namespace byzg {

// Round numbers and waiting periods. Unknown-size phases grow by a factor of
// about eight each, so 64 bits run out after a couple dozen phases.
using Round = boost::multiprecision::cpp_int;

enum class Tag : std::uint8_t {
  kPart1,
  kSetup,
  kTowerBuilder,
  kTower,
  kWaitForTower,
  kFailure,
  kExplorer,
  kToken,
};

enum class Color : std::uint8_t { kNone, kYellow, kOrange, kRed };

const char* to_string(Tag t);
const char* to_string(Color c);
std::optional<Tag> parse_tag(const std::string& s);
std::optional<Color> parse_color(const std::string& s);

struct Claim {
  Label label = 0;
  Tag tag = Tag::kSetup;
  Color color = Color::kNone;
  std::optional<long> index;   // tower: EXPLO traversals made
  std::optional<Port> port;    // tower: entry port of the last traversal (0 at index 0)
  std::optional<std::uint64_t> phase;
  bool declared = false;

  friend bool operator==(const Claim&, const Claim&) = default;
};

struct Observation {
  int degree = 0;
  std::optional<Port> entry;   // set when the agent moved last round
  std::vector<Claim> others;   // co-located claims this round, self excluded
  bool just_woken = false;
};

struct Action {
  enum class Kind : std::uint8_t { kStay, kMove, kDeclare };
  Kind kind = Kind::kStay;
  Port port = 0;

  static Action Stay() { return {}; }
  static Action MoveBy(Port p) { return {Kind::kMove, p}; }
  static Action Declare() { return {Kind::kDeclare, 0}; }
  friend bool operator==(const Action&, const Action&) = default;
};

// Counting helpers over a claim multiset (self included by the caller).
int count_tag(const std::vector<Claim>& claims, Tag tag, std::optional<std::uint64_t> phase = std::nullopt);
int count_color(const std::vector<Claim>& claims, Color color, std::optional<std::uint64_t> phase = std::nullopt);

struct TowerGroup {
  long index = 0;
  Port port = 0;
  int size = 0;
};
/// Tower claims grouped by (index, port), ordered by index then port.
std::vector<TowerGroup> tower_groups(const std::vector<Claim>& claims);

}  // namespace byzg
