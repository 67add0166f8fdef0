#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace mean {

/// Engine used everywhere randomness is consumed; its textual state is stored in checkpoints.
using Rng = std::mt19937_64;

std::string rng_state(const Rng& rng);
void restore_rng_state(Rng& rng, const std::string& state);

}  // namespace mean
