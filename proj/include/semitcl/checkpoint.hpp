#pragma once

#include <cstdint>
#include <string>

#include "semitcl/encoder.hpp"
#include "semitcl/rng.hpp"

namespace semitcl {

// Versioned binary encoder snapshot: self-describing dims header followed by
// little-endian 64-bit floats and a train-config JSON blob. Round-trips
// byte-identically.
struct Checkpoint {
  Encoder encoder;
  std::string train_config_json;
  Rng::State rng_state{};
  std::uint32_t epoch = 0;
  double running_loss = 0.0;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace semitcl
