#pragma once
// Relative-motion labels of a conflicting vehicle pair before and after the conflict point.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace conflict {

/// P: parallel, C: crossing, O: opposite.
enum class Motion : std::uint8_t
{
  P,
  C,
  O
};

enum class Side : std::uint8_t
{
  left_to_right,
  right_to_left
};

struct RegimeLabel
{
  Motion before = Motion::C;
  Motion after = Motion::C;
  Side side = Side::left_to_right;

  bool operator==(const RegimeLabel&) const = default;

  /// Index in [0, 18): before * 6 + after * 2 + side.
  int index() const;
  static RegimeLabel from_index(int index);
};

inline constexpr int kRegimeCount = 18;

char to_char(Motion m);
/// "O>C:L" style: before letter, '>', after letter, ':', L (left_to_right) or R (right_to_left).
std::string to_string(const RegimeLabel& label);
std::optional<RegimeLabel> parse_regime(std::string_view text);

}  // namespace conflict
