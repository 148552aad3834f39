#include "byzg/claim.hpp"

#include <algorithm>
#include <map>

namespace byzg {

namespace {
constexpr const char* kTagNames[] = {"part1", "setup", "tower_builder", "tower",
                                     "wait_for_tower", "failure", "explorer", "token"};
constexpr const char* kColorNames[] = {"none", "yellow", "orange", "red"};
}  // namespace

const char* to_string(Tag t) { return kTagNames[static_cast<int>(t)]; }
const char* to_string(Color c) { return kColorNames[static_cast<int>(c)]; }

std::optional<Tag> parse_tag(const std::string& s) {
  for (int i = 0; i < 8; ++i) {
    if (s == kTagNames[i]) return static_cast<Tag>(i);
  }
  return std::nullopt;
}

std::optional<Color> parse_color(const std::string& s) {
  for (int i = 0; i < 4; ++i) {
    if (s == kColorNames[i]) return static_cast<Color>(i);
  }
  return std::nullopt;
}

int count_tag(const std::vector<Claim>& claims, Tag tag, std::optional<std::uint64_t> phase) {
  return static_cast<int>(std::count_if(claims.begin(), claims.end(), [&](const Claim& c) {
    return c.tag == tag && (!phase || c.phase == phase);
  }));
}

int count_color(const std::vector<Claim>& claims, Color color, std::optional<std::uint64_t> phase) {
  return static_cast<int>(std::count_if(claims.begin(), claims.end(), [&](const Claim& c) {
    return c.tag == Tag::kTowerBuilder && c.color == color && (!phase || c.phase == phase);
  }));
}

std::vector<TowerGroup> tower_groups(const std::vector<Claim>& claims) {
  std::map<std::pair<long, Port>, int> sizes;
  for (const auto& c : claims) {
    if (c.tag == Tag::kTower && c.index) ++sizes[{*c.index, c.port.value_or(0)}];
  }
  std::vector<TowerGroup> out;
  for (const auto& [key, size] : sizes) out.push_back({key.first, key.second, size});
  return out;
}

}  // namespace byzg
