#pragma once
#include <iosfwd>
#include <string>
#include <vector>

#include "warprl/env/types.hpp"

namespace warprl::env {

/// Line-delimited episode records: one "h" (header) line per episode
/// followed by one "s" line per step. Floats round-trip exactly.
/// Observations are not stored; they are rebuilt from the trajectory or by
/// deterministic replay (see demogen).
void write_episode(std::ostream& out, const Episode& ep);
std::vector<Episode> read_episodes(std::istream& in, const std::string& source_name = "<stream>");

std::string episode_to_string(const Episode& ep);

}  // namespace warprl::env
