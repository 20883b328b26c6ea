#pragma once

#include <numeric>
#include <vector>

#include "ddgame/errors.hpp"

namespace ddgame {

// How a stacked decision vector splits across players. Player i owns the
// coordinate range [offsets[i], offsets[i] + dims[i]).
struct PlayerLayout {
  int n = 0;
  std::vector<int> dims;
  std::vector<int> offsets;
  int total_dim = 0;

  static PlayerLayout from_dims(std::vector<int> player_dims) {
    if (player_dims.empty())
      throw DimensionMismatch("PlayerLayout: need at least one player");
    PlayerLayout out;
    out.n = static_cast<int>(player_dims.size());
    out.dims = std::move(player_dims);
    out.offsets.resize(out.dims.size());
    int acc = 0;
    for (std::size_t i = 0; i < out.dims.size(); ++i) {
      if (out.dims[i] <= 0)
        throw DimensionMismatch("PlayerLayout: player dims must be positive");
      out.offsets[i] = acc;
      acc += out.dims[i];
    }
    out.total_dim = acc;
    return out;
  }

  // n players with d coordinates each.
  static PlayerLayout uniform(int n, int d = 1) {
    if (n <= 0) throw DimensionMismatch("PlayerLayout: n must be positive");
    return from_dims(std::vector<int>(static_cast<std::size_t>(n), d));
  }

  int player_of(int coord) const {
    for (int i = n - 1; i >= 0; --i)
      if (coord >= offsets[static_cast<std::size_t>(i)]) return i;
    throw DimensionMismatch("PlayerLayout: coordinate out of range");
  }
};

}  // namespace ddgame
