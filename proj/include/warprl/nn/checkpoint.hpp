#pragma once
#include <string>
#include <vector>

#include "warprl/nn/qnet.hpp"

namespace warprl::nn {

/// Save all agents' networks to a versioned text file. Parameters are
/// written as raw IEEE-754 bit patterns (hex), so a load is bit-exact.
void save_checkpoint(const std::string& path, const std::vector<QNetwork>& nets);

/// Load a checkpoint written by save_checkpoint. Throws on version or
/// format mismatch.
std::vector<QNetwork> load_checkpoint(const std::string& path);

}  // namespace warprl::nn
