#pragma once

#include <string>
#include <string_view>
#include <optional>
#include <vector>

#include "attrdisam/scene.hpp"

namespace attrdisam::detail {

/// Lowercases ASCII and splits on every non-alphanumeric character.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if ((c >= '0' && c <= '9') || (c >= 'a' && c <= 'z')) {
      cur.push_back(static_cast<char>(c));
    } else if (c >= 'A' && c <= 'Z') {
      cur.push_back(static_cast<char>(c - 'A' + 'a'));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

struct CellMatch {
  std::size_t cell;
  std::size_t consumed;
};

/// Matches a grid cell starting at tokens[i]: "top left", "middle middle",
/// "center". With `allow_single`, a lone side word such as "left" or "top"
/// names the edge-middle cell.
inline std::optional<CellMatch> match_cell(const std::vector<std::string>& tokens, std::size_t i,
                                           bool allow_single) {
  if (i >= tokens.size()) return std::nullopt;
  const std::string& t = tokens[i];
  if (i + 1 < tokens.size()) {
    if (auto idx = LocationGrid::index_of(t + "-" + tokens[i + 1])) return CellMatch{*idx, 2};
  }
  if (t == "center" || t == "centre") return CellMatch{4, 1};
  if (allow_single) {
    if (t == "left") return CellMatch{3, 1};
    if (t == "right") return CellMatch{5, 1};
    if (t == "top") return CellMatch{1, 1};
    if (t == "bottom") return CellMatch{7, 1};
    if (t == "middle") return CellMatch{4, 1};
  }
  return std::nullopt;
}

}  // namespace attrdisam::detail
