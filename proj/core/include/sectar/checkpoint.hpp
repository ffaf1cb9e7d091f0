#pragma once

#include <string>

#include "sectar/optim.hpp"

namespace sectar {

// Binary checkpoint of every registered parameter.
//
// Layout: the 8-byte magic "SECTAR1\n", then one record per tensor in
// registration order: u32 name length, name bytes, u32 rank, u32 dims,
// then the values as little-endian float64. Round-trips are bit-exact.
void save_checkpoint(const ParamRegistry& params, const std::string& path);

// Loads into an already-constructed registry. Every file record must match a
// registered name and shape, and every registered parameter must be present.
void load_checkpoint(ParamRegistry& params, const std::string& path);

}  // namespace sectar
