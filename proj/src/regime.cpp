#include "conflict/regime.hpp"

namespace conflict {

namespace {

std::optional<Motion> parse_motion(char c)
{
  switch (c) {
    case 'P': return Motion::P;
    case 'C': return Motion::C;
    case 'O': return Motion::O;
    default: return std::nullopt;
  }
}

}  // namespace

int RegimeLabel::index() const
{
  return static_cast<int>(before) * 6 + static_cast<int>(after) * 2 + static_cast<int>(side);
}

RegimeLabel RegimeLabel::from_index(int index)
{
  return {static_cast<Motion>(index / 6), static_cast<Motion>((index / 2) % 3), static_cast<Side>(index % 2)};
}

char to_char(Motion m)
{
  switch (m) {
    case Motion::P: return 'P';
    case Motion::C: return 'C';
    case Motion::O: return 'O';
  }
  return '?';
}

std::string to_string(const RegimeLabel& label)
{
  std::string out;
  out += to_char(label.before);
  out += '>';
  out += to_char(label.after);
  out += ':';
  out += label.side == Side::left_to_right ? 'L' : 'R';
  return out;
}

std::optional<RegimeLabel> parse_regime(std::string_view text)
{
  if (text.size() != 5 || text[1] != '>' || text[3] != ':') return std::nullopt;
  const auto before = parse_motion(text[0]);
  const auto after = parse_motion(text[2]);
  if (!before || !after) return std::nullopt;
  if (text[4] != 'L' && text[4] != 'R') return std::nullopt;
  return RegimeLabel{*before, *after, text[4] == 'L' ? Side::left_to_right : Side::right_to_left};
}

}  // namespace conflict
